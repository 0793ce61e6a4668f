"""Generalized Reed-Solomon codes over a tower field.

A code is described by n distinct evaluation points, a dimension k, and
nonzero column multipliers (all ones for a plain RS code).  Codeword j
holds multipliers[j] * f(evals[j]) for a message polynomial f of degree
below k.  The dual is again a GRS code; its column coefficients v_j are
computed from the classical formula and are the workhorse of both the
syndrome checks and the trace repair scheme.

Codewords are plain tuples of FieldElement, one per coordinate.
"""

from __future__ import annotations

from typing import Iterable, Mapping, Sequence

from .errors import (
    ArityError,
    InconsistentSymbols,
    InsufficientData,
    SingularEvaluationSet,
)
from .field_tower import FieldElement, TowerField


# ---------------------------------------------------------------------------
# univariate polynomials with FieldElement coefficients (ascending order)
# ---------------------------------------------------------------------------

def poly_eval(coeffs: Sequence[FieldElement], x: FieldElement) -> FieldElement:
    """Horner evaluation; empty coefficient list is the zero polynomial."""
    if not coeffs:
        return x.tower.zero()
    acc = coeffs[-1]
    for c in reversed(coeffs[:-1]):
        acc = acc * x + c
    return acc


def poly_mul(a: Sequence[FieldElement], b: Sequence[FieldElement]) -> list[FieldElement]:
    if not a or not b:
        return []
    tower = a[0].tower
    out = [tower.zero()] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if ca.is_zero():
            continue
        for j, cb in enumerate(b):
            out[i + j] = out[i + j] + ca * cb
    return out


def poly_from_roots(tower: TowerField, roots: Iterable[FieldElement]) -> list[FieldElement]:
    """Monic product of (x - r); the empty product is the constant 1."""
    out = [tower.one()]
    for r in roots:
        out = poly_mul(out, [-r, tower.one()])
    return out


def lagrange_interpolate(points: Sequence[tuple[FieldElement, FieldElement]]) -> list[FieldElement]:
    """Coefficients of the unique degree < len(points) polynomial through
    the given (x, y) pairs; x values must be distinct."""
    if not points:
        return []
    tower = points[0][0].tower
    xs = [x for x, _ in points]
    master = poly_from_roots(tower, xs)
    acc = [tower.zero()] * len(points)
    for xi, yi in points:
        # synthetic division of the master polynomial by (x - xi)
        quot = [tower.zero()] * (len(master) - 1)
        carry = master[-1]
        for j in range(len(master) - 2, -1, -1):
            quot[j] = carry
            carry = master[j] + carry * xi
        denom = poly_eval(quot, xi)
        scale = yi * denom.inv()
        for j in range(len(quot)):
            acc[j] = acc[j] + scale * quot[j]
    return acc


# ---------------------------------------------------------------------------
# the code itself
# ---------------------------------------------------------------------------

class GrsCode:
    """An [n, k] generalized Reed-Solomon code over the tower field E."""

    def __init__(
        self,
        evals: Sequence[FieldElement],
        k: int,
        multipliers: Sequence[FieldElement] | None = None,
    ):
        evals = tuple(evals)
        if not evals:
            raise ValueError("no evaluation points")
        tower = evals[0].tower
        for b in evals:
            tower._check_element(b)
        n = len(evals)
        if not 1 <= k < n:
            raise ValueError(f"need 1 <= k < n, got k={k}, n={n}")
        if len({b.to_bytes() for b in evals}) != n:
            raise SingularEvaluationSet("evaluation points must be pairwise distinct")
        if multipliers is None:
            multipliers = tuple(tower.one() for _ in range(n))
        else:
            multipliers = tuple(multipliers)
            if len(multipliers) != n:
                raise ArityError(f"expected {n} multipliers")
            if any(w.is_zero() for w in multipliers):
                raise ValueError("multipliers must be nonzero")
        self.tower = tower
        self.evals = evals
        self.k = k
        self.multipliers = multipliers
        self._dual: tuple[FieldElement, ...] | None = None
        self._syndrome_rows: list[tuple[FieldElement, ...]] | None = None

    @property
    def n(self) -> int:
        return len(self.evals)

    @property
    def r(self) -> int:
        return self.n - self.k

    def __repr__(self):
        return f"GrsCode(n={self.n}, k={self.k}, tower={self.tower!r})"

    # -- encoding ---------------------------------------------------------------

    def encode(self, message: Sequence[FieldElement]) -> tuple[FieldElement, ...]:
        """Evaluate the message (polynomial coefficients, ascending) at every
        point, scaled by the column multipliers."""
        if len(message) != self.k:
            raise ArityError(f"message must have {self.k} symbols, got {len(message)}")
        return tuple(
            w * poly_eval(message, b) for b, w in zip(self.evals, self.multipliers)
        )

    def random_message(self, rng) -> list[FieldElement]:
        return [self.tower.random_element(rng) for _ in range(self.k)]

    # -- duality ------------------------------------------------------------------

    @property
    def dual_coefficients(self) -> tuple[FieldElement, ...]:
        """Column coefficients of the dual code:
        v_j = multipliers[j]^-1 * prod_{m != j} (evals[j] - evals[m])^-1."""
        if self._dual is None:
            vs = []
            for j, bj in enumerate(self.evals):
                prod = self.tower.one()
                for mj, bm in enumerate(self.evals):
                    if mj == j:
                        continue
                    diff = bj - bm
                    if diff.is_zero():
                        raise SingularEvaluationSet("repeated evaluation point")
                    prod = prod * diff
                vs.append((self.multipliers[j] * prod).inv())
            self._dual = tuple(vs)
        return self._dual

    def _dual_syndrome_rows(self) -> list[tuple[FieldElement, ...]]:
        # row s holds (v_j * evals[j]^s) for j in range(n), s < n - k
        if self._syndrome_rows is None:
            rows = []
            weights = list(self.dual_coefficients)
            for _ in range(self.r):
                rows.append(tuple(weights))
                weights = [w * b for w, b in zip(weights, self.evals)]
            self._syndrome_rows = rows
        return self._syndrome_rows

    def syndromes(self, word: Sequence[FieldElement]) -> list[FieldElement]:
        if len(word) != self.n:
            raise ArityError(f"word must have {self.n} symbols")
        out = []
        for row in self._dual_syndrome_rows():
            acc = self.tower.zero()
            for wgt, c in zip(row, word):
                if not c.is_zero():
                    acc = acc + wgt * c
            out.append(acc)
        return out

    def is_codeword(self, word: Sequence[FieldElement]) -> bool:
        return all(s.is_zero() for s in self.syndromes(word))

    # -- erasure decoding -----------------------------------------------------------

    def erasure_decode(
        self,
        known: Mapping[int, FieldElement] | Iterable[tuple[int, FieldElement]],
    ) -> tuple[FieldElement, ...]:
        """Recover the unique codeword agreeing with at least k known
        coordinates, by Lagrange interpolation from the k lowest-indexed
        ones followed by a consistency check against all of them."""
        if isinstance(known, Mapping):
            pairs = dict(known)
        else:
            pairs = {}
            for idx, sym in known:
                if idx in pairs:
                    if pairs[idx] != sym:
                        raise InconsistentSymbols(f"conflicting values at {idx}")
                    continue
                pairs[idx] = sym
        for idx in pairs:
            if not 0 <= idx < self.n:
                raise ValueError(f"coordinate {idx} out of range")
        if len(pairs) < self.k:
            raise InsufficientData(f"need {self.k} coordinates, got {len(pairs)}")
        anchor = sorted(pairs)[: self.k]
        pts = [
            (self.evals[j], pairs[j] * self.multipliers[j].inv()) for j in anchor
        ]
        poly = lagrange_interpolate(pts)
        poly += [self.tower.zero()] * (self.k - len(poly))
        word = self.encode(poly[: self.k])
        for idx, sym in pairs.items():
            if word[idx] != sym:
                raise InconsistentSymbols(
                    f"known symbol at {idx} disagrees with the interpolated codeword"
                )
        return word

    # -- serialization ----------------------------------------------------------------

    def codeword_to_bytes(self, word: Sequence[FieldElement]) -> bytes:
        if len(word) != self.n:
            raise ArityError(f"word must have {self.n} symbols")
        return b"".join(c.to_bytes() for c in word)

    def codeword_from_bytes(self, data: bytes) -> tuple[FieldElement, ...]:
        l = self.tower.l
        if len(data) != self.n * l:
            raise ValueError(f"expected {self.n * l} bytes")
        return tuple(
            self.tower.from_bytes(data[j * l : (j + 1) * l]) for j in range(self.n)
        )
