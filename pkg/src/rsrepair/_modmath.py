"""Arithmetic helpers modulo a small prime q.

Univariate polynomials over F_q are tuples of ints in ascending degree
order (constant term first), trimmed so the last entry is nonzero; the
zero polynomial is the empty tuple.  Matrices are numpy int64 arrays
with entries in [0, q).  Matrix products are routed through float64
BLAS, which is exact here because entries are < q <= a few dozen and
the accumulation sums stay far below 2**53.
"""

from __future__ import annotations

import numpy as np


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n < 4:
        return True
    if n % 2 == 0:
        return False
    d = 3
    while d * d <= n:
        if n % d == 0:
            return False
        d += 2
    return True


def sieve(limit: int) -> list[int]:
    """All primes <= limit, ascending."""
    if limit < 2:
        return []
    flags = np.ones(limit + 1, dtype=bool)
    flags[:2] = False
    for p in range(2, int(limit ** 0.5) + 1):
        if flags[p]:
            flags[p * p :: p] = False
    return [int(p) for p in np.nonzero(flags)[0]]


# ---------------------------------------------------------------------------
# univariate polynomials over F_q
# ---------------------------------------------------------------------------

def poly_trim(p) -> tuple[int, ...]:
    p = list(p)
    while p and p[-1] == 0:
        p.pop()
    return tuple(p)


def poly_deg(p) -> int:
    return len(p) - 1


def poly_add(a, b, q) -> tuple[int, ...]:
    n = max(len(a), len(b))
    out = [0] * n
    for i, c in enumerate(a):
        out[i] = c
    for i, c in enumerate(b):
        out[i] = (out[i] + c) % q
    return poly_trim(out)


def poly_sub(a, b, q) -> tuple[int, ...]:
    n = max(len(a), len(b))
    out = [0] * n
    for i, c in enumerate(a):
        out[i] = c
    for i, c in enumerate(b):
        out[i] = (out[i] - c) % q
    return poly_trim(out)


def poly_mul(a, b, q) -> tuple[int, ...]:
    if not a or not b:
        return ()
    out = [0] * (len(a) + len(b) - 1)
    for i, ca in enumerate(a):
        if ca:
            for j, cb in enumerate(b):
                out[i + j] = (out[i + j] + ca * cb) % q
    return poly_trim(out)


def poly_divmod(a, b, q):
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(a)
    db, dl = len(b) - 1, b[-1]
    inv_lead = pow(dl, q - 2, q)
    quot = [0] * max(len(a) - db, 0)
    while len(a) - 1 >= db and any(a):
        if a[-1] == 0:
            a.pop()
            continue
        shift = len(a) - 1 - db
        factor = a[-1] * inv_lead % q
        quot[shift] = factor
        for i, cb in enumerate(b):
            a[shift + i] = (a[shift + i] - factor * cb) % q
        a.pop()
    return poly_trim(quot), poly_trim(a)


def poly_mod(a, f, q) -> tuple[int, ...]:
    return poly_divmod(a, f, q)[1]


def poly_mulmod(a, b, f, q) -> tuple[int, ...]:
    return poly_mod(poly_mul(a, b, q), f, q)


def poly_powmod(a, e: int, f, q) -> tuple[int, ...]:
    result = (1,)
    base = poly_mod(a, f, q)
    while e > 0:
        if e & 1:
            result = poly_mulmod(result, base, f, q)
        base = poly_mulmod(base, base, f, q)
        e >>= 1
    return result


def poly_gcd(a, b, q) -> tuple[int, ...]:
    a, b = poly_trim(a), poly_trim(b)
    while b:
        a, b = b, poly_mod(a, b, q)
    if a:
        # normalize monic
        inv_lead = pow(a[-1], q - 2, q)
        a = tuple(c * inv_lead % q for c in a)
    return a


def _prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def poly_is_irreducible(f, q) -> bool:
    """Rabin's test: f (monic, degree d >= 1) is irreducible over F_q iff
    x^(q^d) == x mod f and gcd(x^(q^(d/rho)) - x, f) = 1 for each prime
    rho dividing d."""
    f = poly_trim(f)
    d = poly_deg(f)
    if d < 1:
        return False
    x = (0, 1)
    # frob[j] = x^(q^j) mod f, built by repeated q-th powering
    t = poly_mod(x, f, q)
    frob = [t]
    for _ in range(d):
        t = poly_powmod(t, q, f, q)
        frob.append(t)
    if frob[d] != poly_mod(x, f, q):
        return False
    for rho in _prime_factors(d):
        g = poly_gcd(poly_sub(frob[d // rho], x, q), f, q)
        if poly_deg(g) != 0:
            return False
    return True


# ---------------------------------------------------------------------------
# matrices over F_q
# ---------------------------------------------------------------------------

def mat_mul_mod(a: np.ndarray, b: np.ndarray, q: int) -> np.ndarray:
    prod = a.astype(np.float64) @ b.astype(np.float64)
    return np.rint(prod).astype(np.int64) % q


def mat_vec_mod(a: np.ndarray, v: np.ndarray, q: int) -> np.ndarray:
    return (a @ v) % q


def mat_pow_mod(a: np.ndarray, e: int, q: int) -> np.ndarray:
    result = np.eye(a.shape[0], dtype=np.int64)
    base = a % q
    while e > 0:
        if e & 1:
            result = mat_mul_mod(result, base, q)
        base = mat_mul_mod(base, base, q)
        e >>= 1
    return result


def _eliminate(aug: np.ndarray, q: int):
    """In-place Gauss-Jordan on the augmented matrix; yields pivot columns."""
    rows, cols = aug.shape
    row = 0
    pivots = []
    for col in range(cols):
        if row == rows:
            break
        hits = np.nonzero(aug[row:, col])[0]
        if hits.size == 0:
            continue
        piv = row + int(hits[0])
        if piv != row:
            aug[[row, piv]] = aug[[piv, row]]
        inv = pow(int(aug[row, col]), q - 2, q)
        aug[row] = aug[row] * inv % q
        factors = aug[:, col].copy()
        factors[row] = 0
        nz = np.nonzero(factors)[0]
        if nz.size:
            aug[nz] = (aug[nz] - np.outer(factors[nz], aug[row])) % q
        pivots.append(col)
        row += 1
    return pivots


def solve_mod(a: np.ndarray, b: np.ndarray, q: int) -> np.ndarray:
    """Solve a @ x = b mod q for square invertible a; raises on singular."""
    n = a.shape[0]
    aug = np.concatenate([a % q, (b % q).reshape(n, 1)], axis=1).astype(np.int64)
    pivots = _eliminate(aug, q)
    if len(pivots) != n or pivots != list(range(n)):
        raise np.linalg.LinAlgError("matrix is singular mod %d" % q)
    return aug[:, n].copy()


def rank_mod(a: np.ndarray, q: int) -> int:
    if a.size == 0:
        return 0
    work = (a % q).astype(np.int64).copy()
    return len(_eliminate(work, q))
