"""Arithmetic in a tensor tower of prime-degree extensions of F_q.

The symbol field E = F_q(a_1, ..., a_m) is represented as the quotient
ring F_q[x_1, ..., x_m] / (f_1(x_1), ..., f_m(x_m)) where f_i is a monic
irreducible of prime degree p_i and the p_i are pairwise distinct.
Distinctness makes the degrees pairwise coprime, so the quotient is the
field with q**l elements, l = p_1 * ... * p_m.

An element is a coefficient tensor of shape (p_1, ..., p_m) over F_q,
indexed by exponent tuples (e_1, ..., e_m).  The flat layout is C order
(e_m fastest), which is also the serialization order: l base-q digits,
one per byte.

For each i, F_i = F_q({a_j : j != i}) is the subfield spanned by the
monomials with e_i = 0.  Conjugation over F_i (the map t -> t^(q^(l/p_i)))
is precomputed as an l x l matrix over F_q, and the trace onto F_i is the
sum of its first p_i iterates.

Multiplication uses Kronecker substitution: coefficient tensors are
embedded into a mixed-radix space with per-axis radix 2*p_i - 1, where
multivariate convolution becomes a single integer convolution with no
radix carries; one precomputed linear map then reduces each axis mod f_i.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import _modmath as mm
from .errors import DuplicatePrimes, SingularBasis


def find_irreducible(q: int, d: int) -> tuple[int, ...]:
    """First monic irreducible of degree d over F_q, ascending coefficient
    order (constant term first, leading 1 included).

    Candidates are enumerated by the integer value of their non-leading
    coefficient vector, constant term least significant, so the result is
    deterministic for fixed (q, d).
    """
    if d < 1:
        raise ValueError("degree must be >= 1")
    if not mm.is_prime(q):
        raise ValueError(f"base modulus {q} is not prime")
    for v in range(q ** d):
        coeffs = []
        t = v
        for _ in range(d):
            coeffs.append(t % q)
            t //= q
        cand = tuple(coeffs) + (1,)
        if mm.poly_is_irreducible(cand, q):
            return cand
    raise AssertionError("unreachable: irreducibles exist for every degree")


def tower_new(q: int, primes: Sequence[int]) -> "TowerField":
    """Build the tower field F_q(a_1, ..., a_m) with deg(a_i) = primes[i]."""
    return TowerField(q, primes)


class TowerField:
    """The symbol field E with its subfield and trace machinery.

    Immutable after construction; all operations are pure, so instances
    are safe to share across threads.
    """

    def __init__(self, q: int, primes: Sequence[int], irreducibles=None):
        primes = tuple(int(p) for p in primes)
        if not mm.is_prime(q):
            raise ValueError(f"base modulus {q} is not prime")
        if q > 251:
            # one base-q digit per byte in the serialized form
            raise ValueError(f"base modulus {q} too large (max 251)")
        if not primes:
            raise ValueError("at least one extension degree is required")
        if len(set(primes)) != len(primes):
            raise DuplicatePrimes(f"extension degrees must be distinct: {primes}")
        for p in primes:
            if not mm.is_prime(p):
                raise ValueError(f"extension degree {p} is not prime")
        self.q = int(q)
        self.primes = primes
        self.m = len(primes)
        self.l = math.prod(primes)
        if irreducibles is None:
            irreducibles = tuple(find_irreducible(q, p) for p in primes)
        else:
            irreducibles = tuple(tuple(int(c) % q for c in f) for f in irreducibles)
            for p, f in zip(primes, irreducibles):
                if mm.poly_deg(mm.poly_trim(f)) != p or f[-1] != 1:
                    raise ValueError(f"modulus {f} is not monic of degree {p}")
                if not mm.poly_is_irreducible(f, q):
                    raise ValueError(f"modulus {f} is reducible over F_{q}")
        self.irreducibles = irreducibles

        self._shape = primes
        self._ext_shape = tuple(2 * p - 1 for p in primes)
        self._ext_size = math.prod(self._ext_shape)
        self._init_mul_tables()
        self._frobenius = self._build_frobenius_matrix()
        self._subfield_maps: dict[int, FrobeniusPowerMap] = {}
        self._trace_mats: dict[int, np.ndarray] = {}
        self._abs_trace_mat = None

    # -- construction helpers ------------------------------------------------

    def _init_mul_tables(self):
        # embedding of element flat indices into the mixed-radix space
        ext_strides = np.zeros(self.m, dtype=np.int64)
        stride = 1
        for i in range(self.m - 1, -1, -1):
            ext_strides[i] = stride
            stride *= self._ext_shape[i]
        grids = np.indices(self._shape).reshape(self.m, -1)
        self._emb = (ext_strides[:, None] * grids).sum(axis=0)
        # flat index of the exponent sum e + f; no carries because
        # e_i + f_i <= 2*p_i - 2 stays below the per-axis radix
        self._idx2 = self._emb[:, None] + self._emb[None, :]
        # per-axis reduction x_i^j -> x_i^j mod f_i, combined Kronecker-style
        reducers = []
        for p, f in zip(self.primes, self.irreducibles):
            r = np.zeros((2 * p - 1, p), dtype=np.int64)
            for j in range(2 * p - 1):
                rem = mm.poly_mod((0,) * j + (1,), f, self.q)
                for t, c in enumerate(rem):
                    r[j, t] = c
            reducers.append(r)
        k = reducers[0]
        for r in reducers[1:]:
            k = np.kron(k, r)
        self._reduce_mat = k  # (ext_size, l)
        self._reduce_mat_f = k.astype(np.float64)

    def _build_frobenius_matrix(self) -> np.ndarray:
        """Matrix of t -> t^q as an F_q-linear map on coefficient vectors."""
        cols = np.zeros((self.l, self.l), dtype=np.int64)
        for flat, exps in enumerate(np.ndindex(*self._shape)):
            factors = []
            for i, e in enumerate(exps):
                rem = mm.poly_powmod((0, 1), self.q * e, self.irreducibles[i], self.q)
                vec = np.zeros(self.primes[i], dtype=np.int64)
                for t, c in enumerate(rem):
                    vec[t] = c
                factors.append(vec)
            tensor = factors[0]
            for vec in factors[1:]:
                tensor = np.multiply.outer(tensor, vec)
            cols[:, flat] = tensor.reshape(-1) % self.q
        return cols

    # -- equality / identification -------------------------------------------

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, TowerField):
            return NotImplemented
        return (self.q, self.primes, self.irreducibles) == (
            other.q,
            other.primes,
            other.irreducibles,
        )

    def __hash__(self):
        return hash((self.q, self.primes, self.irreducibles))

    def __repr__(self):
        return f"TowerField(q={self.q}, primes={list(self.primes)})"

    # -- element constructors --------------------------------------------------

    def element(self, coeffs) -> "FieldElement":
        arr = np.asarray(coeffs, dtype=np.int64) % self.q
        if arr.shape == (self.l,):
            flat = arr.copy()
        elif arr.shape == self._shape:
            flat = arr.reshape(-1).copy()
        else:
            raise ValueError(f"expected {self.l} coefficients or shape {self._shape}")
        return FieldElement(self, flat)

    def zero(self) -> "FieldElement":
        return FieldElement(self, np.zeros(self.l, dtype=np.int64))

    def one(self) -> "FieldElement":
        return self.embed(1)

    def embed(self, c: int) -> "FieldElement":
        flat = np.zeros(self.l, dtype=np.int64)
        flat[0] = c % self.q
        return FieldElement(self, flat)

    def alpha(self, i: int) -> "FieldElement":
        """The i-th tower generator (the class of x_i)."""
        self._check_subfield(i)
        exps = [0] * self.m
        exps[i] = 1
        flat = np.zeros(self.l, dtype=np.int64)
        flat[np.ravel_multi_index(tuple(exps), self._shape)] = 1
        return FieldElement(self, flat)

    def random_element(self, rng) -> "FieldElement":
        flat = np.array([rng.randrange(self.q) for _ in range(self.l)], dtype=np.int64)
        return FieldElement(self, flat)

    def from_bytes(self, data: bytes) -> "FieldElement":
        if len(data) != self.l:
            raise ValueError(f"expected {self.l} bytes, got {len(data)}")
        flat = np.frombuffer(data, dtype=np.uint8).astype(np.int64)
        if flat.max(initial=0) >= self.q:
            raise ValueError("digit out of range for base q")
        return FieldElement(self, flat)

    # -- raw coefficient arithmetic ---------------------------------------------

    def _mul_flat(self, a: np.ndarray, b: np.ndarray) -> np.ndarray:
        outer = a[:, None] * b[None, :]
        conv = np.bincount(
            self._idx2.reshape(-1),
            weights=outer.reshape(-1).astype(np.float64),
            minlength=self._ext_size,
        )
        red = conv @ self._reduce_mat_f
        return np.rint(red).astype(np.int64) % self.q

    def _mult_matrix_flat(self, a: np.ndarray) -> np.ndarray:
        """l x l matrix of the F_q-linear map b -> a*b."""
        unreduced = np.zeros((self._ext_size, self.l), dtype=np.float64)
        unreduced[self._idx2, np.arange(self.l)[None, :]] = a[:, None]
        prod = self._reduce_mat_f.T @ unreduced
        return np.rint(prod).astype(np.int64) % self.q

    def mult_matrix(self, a: "FieldElement") -> np.ndarray:
        """Multiplication by a as an l x l matrix over F_q (column per basis
        monomial, flat layout)."""
        self._check_element(a)
        return self._mult_matrix_flat(a._flat)

    def _inv_flat(self, a: np.ndarray) -> np.ndarray:
        if not a.any():
            raise ZeroDivisionError("zero has no inverse")
        one = np.zeros(self.l, dtype=np.int64)
        one[0] = 1
        return mm.solve_mod(self._mult_matrix_flat(a), one, self.q)

    # -- Frobenius / subfields / traces -----------------------------------------

    def _check_subfield(self, i: int):
        if not 0 <= i < self.m:
            raise ValueError(f"subfield index {i} out of range [0, {self.m})")

    def _check_element(self, a: "FieldElement"):
        if a.tower is not self and a.tower != self:
            raise ValueError("element belongs to a different tower")

    @property
    def frobenius_matrix(self) -> np.ndarray:
        """Matrix of the base Frobenius t -> t^q."""
        return self._frobenius

    def frobenius_power_map(self, i: int) -> "FrobeniusPowerMap":
        """Conjugation over F_i: the map t -> t^(q^(l/p_i)), order p_i."""
        self._check_subfield(i)
        cached = self._subfield_maps.get(i)
        if cached is None:
            matrix = mm.mat_pow_mod(self._frobenius, self.l // self.primes[i], self.q)
            cached = FrobeniusPowerMap(self, i, matrix)
            self._subfield_maps[i] = cached
        return cached

    def _trace_matrix(self, i: int) -> np.ndarray:
        cached = self._trace_mats.get(i)
        if cached is None:
            phi = self.frobenius_power_map(i).matrix
            acc = np.eye(self.l, dtype=np.int64)
            power = np.eye(self.l, dtype=np.int64)
            for _ in range(self.primes[i] - 1):
                power = mm.mat_mul_mod(phi, power, self.q)
                acc = (acc + power) % self.q
            cached = acc
            self._trace_mats[i] = cached
        return cached

    def trace_to_subfield(self, a: "FieldElement", i: int) -> "FieldElement":
        """Trace of E onto F_i: the sum of the p_i conjugates over F_i."""
        self._check_element(a)
        self._check_subfield(i)
        return FieldElement(self, (self._trace_matrix(i) @ a._flat) % self.q)

    def absolute_trace(self, a: "FieldElement") -> "FieldElement":
        """Trace of E onto F_q, straight from the conjugate-sum definition."""
        self._check_element(a)
        if self._abs_trace_mat is None:
            acc = np.eye(self.l, dtype=np.int64)
            power = np.eye(self.l, dtype=np.int64)
            for _ in range(self.l - 1):
                power = mm.mat_mul_mod(self._frobenius, power, self.q)
                acc = (acc + power) % self.q
            self._abs_trace_mat = acc
        return FieldElement(self, (self._abs_trace_mat @ a._flat) % self.q)

    def subfield_membership(self, a: "FieldElement", i: int) -> bool:
        """True iff a lies in F_i, i.e. no coefficient touches x_i."""
        self._check_element(a)
        self._check_subfield(i)
        tensor = a._flat.reshape(self._shape)
        sel = [slice(None)] * self.m
        sel[i] = slice(1, None)
        return not tensor[tuple(sel)].any()

    def subfield_monomial_indices(self, i: int) -> np.ndarray:
        """Flat indices of the monomials spanning F_i (those with e_i = 0)."""
        self._check_subfield(i)
        grids = np.indices(self._shape).reshape(self.m, -1)
        return np.nonzero(grids[i] == 0)[0]

    def subfield_monomials(self, i: int) -> list["FieldElement"]:
        """The monomial F_q-basis of F_i, in flat index order (l/p_i elements)."""
        out = []
        for flat in self.subfield_monomial_indices(i):
            vec = np.zeros(self.l, dtype=np.int64)
            vec[flat] = 1
            out.append(FieldElement(self, vec))
        return out

    # -- serialization -----------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "q": self.q,
            "primes": list(self.primes),
            "irreducibles": [list(f) for f in self.irreducibles],
        }

    @classmethod
    def from_dict(cls, d: dict) -> "TowerField":
        return cls(d["q"], d["primes"], d.get("irreducibles"))


class FieldElement:
    """An element of a TowerField; immutable, supports +, -, *, **, inv()."""

    __slots__ = ("tower", "_flat")

    def __init__(self, tower: TowerField, flat: np.ndarray):
        self.tower = tower
        flat.flags.writeable = False
        self._flat = flat

    @property
    def coeffs(self) -> np.ndarray:
        """Coefficient tensor of shape (p_1, ..., p_m), read-only."""
        return self._flat.reshape(self.tower._shape)

    @property
    def flat(self) -> np.ndarray:
        return self._flat

    def is_zero(self) -> bool:
        return not self._flat.any()

    def _coerce(self, other):
        if isinstance(other, FieldElement):
            self.tower._check_element(other)
            return other
        if isinstance(other, (int, np.integer)):
            return self.tower.embed(int(other))
        return None

    def __add__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return FieldElement(self.tower, (self._flat + other._flat) % self.tower.q)

    __radd__ = __add__

    def __sub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return FieldElement(self.tower, (self._flat - other._flat) % self.tower.q)

    def __rsub__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return other - self

    def __neg__(self):
        return FieldElement(self.tower, (-self._flat) % self.tower.q)

    def __mul__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return FieldElement(self.tower, self.tower._mul_flat(self._flat, other._flat))

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.inv() ** (-e)
        result = self.tower.one()
        base = self
        while e > 0:
            if e & 1:
                result = result * base
            base = base * base
            e >>= 1
        return result

    def inv(self) -> "FieldElement":
        return FieldElement(self.tower, self.tower._inv_flat(self._flat))

    def __truediv__(self, other):
        other = self._coerce(other)
        if other is None:
            return NotImplemented
        return self * other.inv()

    def __eq__(self, other):
        if not isinstance(other, FieldElement):
            return NotImplemented
        return self.tower == other.tower and np.array_equal(self._flat, other._flat)

    def __hash__(self):
        return hash((self.tower.q, self.tower.primes, self._flat.tobytes()))

    def __repr__(self):
        return f"FieldElement({self._flat.tolist()})"

    def to_bytes(self) -> bytes:
        """l base-q digits, one per byte, exponent tuples in C order."""
        return self._flat.astype(np.uint8).tobytes()


@dataclass(frozen=True)
class FrobeniusPowerMap:
    """Conjugation of E over F_i as a precomputed F_q-linear map.

    The p_i-th iterate is the identity and the fixed field is exactly F_i.
    """

    tower: TowerField
    subfield: int
    matrix: np.ndarray

    @property
    def order(self) -> int:
        return self.tower.primes[self.subfield]

    def __call__(self, a: FieldElement) -> FieldElement:
        self.tower._check_element(a)
        return FieldElement(self.tower, (self.matrix @ a._flat) % self.tower.q)

    def iterate(self, a: FieldElement, t: int) -> FieldElement:
        t %= self.order
        out = a
        for _ in range(t):
            out = self(out)
        return out


@dataclass(frozen=True)
class SubfieldBasis:
    """A basis of E over F_i together with its trace-dual basis."""

    subfield: int
    elems: tuple[FieldElement, ...]
    dual: tuple[FieldElement, ...]

    def reconstruct(self, a: FieldElement) -> FieldElement:
        """Expand a through the duality: sum_s tr_i(elems[s] * a) * dual[s]."""
        tower = a.tower
        out = tower.zero()
        for e, d in zip(self.elems, self.dual):
            out = out + tower.trace_to_subfield(e * a, self.subfield) * d
        return out


def trace_dual_basis(elems: Sequence[FieldElement], i: int) -> SubfieldBasis:
    """Dual basis {d_t} with tr_i(elems[s] * d_t) = 1 if s == t else 0.

    Solves the trace Gram system: with G[s][t] = tr_i(elems[s] * elems[t]),
    d_t = sum_u inv(G)[t][u] * elems[u].  G is invertible iff the inputs are
    F_i-linearly independent (the trace form on E / F_i is nondegenerate).
    """
    elems = tuple(elems)
    if not elems:
        raise SingularBasis("empty basis")
    tower = elems[0].tower
    tower._check_subfield(i)
    p = tower.primes[i]
    if len(elems) != p:
        raise SingularBasis(f"need exactly {p} elements, got {len(elems)}")
    gram = [
        [tower.trace_to_subfield(elems[s] * elems[t], i) for t in range(p)]
        for s in range(p)
    ]
    ginv = _invert_element_matrix(gram)
    dual = []
    for t in range(p):
        acc = tower.zero()
        for u in range(p):
            acc = acc + ginv[t][u] * elems[u]
        dual.append(acc)
    return SubfieldBasis(i, elems, tuple(dual))


def _invert_element_matrix(rows: list[list[FieldElement]]) -> list[list[FieldElement]]:
    """Gauss-Jordan inverse of a small matrix with FieldElement entries."""
    n = len(rows)
    tower = rows[0][0].tower
    a = [list(r) for r in rows]
    inv = [[tower.one() if r == c else tower.zero() for c in range(n)] for r in range(n)]
    for col in range(n):
        piv = next((r for r in range(col, n) if not a[r][col].is_zero()), None)
        if piv is None:
            raise SingularBasis("linearly dependent input")
        a[col], a[piv] = a[piv], a[col]
        inv[col], inv[piv] = inv[piv], inv[col]
        scale = a[col][col].inv()
        a[col] = [x * scale for x in a[col]]
        inv[col] = [x * scale for x in inv[col]]
        for r in range(n):
            if r == col or a[r][col].is_zero():
                continue
            f = a[r][col]
            a[r] = [x - f * y for x, y in zip(a[r], a[col])]
            inv[r] = [x - f * y for x, y in zip(inv[r], inv[col])]
    return inv
