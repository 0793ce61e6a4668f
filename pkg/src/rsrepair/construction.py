"""Evaluation-set planning from prime conjugate classes.

A plan assigns each of the n code coordinates a pair (i, t), meaning the
evaluation point is the t-th q-power conjugate of the i-th tower
generator.  Coordinates sharing a generator form a prime class; repair
of a class-i node needs p_i + k - 1 helpers drawn from outside the
class, so each class carries an exact repairability certificate
p_i + k - 1 <= n - |class i|.

Two automatic planners realize the asymptotic families (they fail with
InsufficientPrimes when the prime window is empty, which is expected for
desk-scale n), and plan_manual accepts explicit primes and subset sizes
for instances small enough to actually build.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from . import _modmath as mm
from .errors import (
    BuildCapExceeded,
    DuplicatePrimes,
    InfeasiblePlan,
    InsufficientPrimes,
    InvalidSubset,
)
from .field_tower import TowerField, tower_new
from .grs import GrsCode

DEFAULT_BUILD_CAP = 1 << 20


def primes_in_range(lo, hi) -> list[int]:
    """All primes p with lo <= p <= hi, ascending (endpoints may be any
    rationals)."""
    lo = Fraction(lo)
    hi = Fraction(hi)
    if hi < 2:
        return []
    lo_int = max(2, math.ceil(lo))
    hi_int = math.floor(hi)
    return [p for p in mm.sieve(hi_int) if p >= lo_int]


def _frac(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


@dataclass(frozen=True)
class FeasibilityEntry:
    """Exact repair accounting for one prime class."""

    prime: int
    assigned: int              # |S'_i|, coordinates drawn from this class
    required_helpers: int      # p_i + k - 1
    available_helpers: int     # n - |S'_i|
    repairable: bool
    per_helper_subsymbols: int     # l / p_i
    total_subsymbols: int          # (p_i + k - 1) * l / p_i
    cutset: Fraction               # (n - 1) * l / (n - k)
    ratio_total: Fraction
    ratio_per_helper: Fraction     # (n - k) / p_i
    epsilon_node: Fraction         # ratio_per_helper - 1

    def to_dict(self) -> dict:
        return {
            "prime": self.prime,
            "assigned": self.assigned,
            "required_helpers": self.required_helpers,
            "available_helpers": self.available_helpers,
            "repairable": self.repairable,
            "per_helper_subsymbols": self.per_helper_subsymbols,
            "total_subsymbols": self.total_subsymbols,
            "cutset": _frac_dict(self.cutset),
            "ratio_total": _frac_dict(self.ratio_total),
            "ratio_per_helper": _frac_dict(self.ratio_per_helper),
            "epsilon_node": _frac_dict(self.epsilon_node),
        }


def _frac_dict(x: Fraction) -> dict:
    return {"num": x.numerator, "den": x.denominator}


@dataclass(frozen=True)
class ConstructionPlan:
    """Primes, per-class subset sizes, and the coordinate assignment.

    assignment[j] = (i, t): coordinate j evaluates at the t-th q-power
    conjugate of generator i.  primes are ascending; subset_sizes are the
    effective per-class counts after trimming to exactly n coordinates.
    """

    q: int
    primes: tuple[int, ...]
    subset_sizes: tuple[int, ...]
    n: int
    k: int
    assignment: tuple[tuple[int, int], ...]
    scheme: str = "manual"
    delta: Fraction | None = None
    epsilon: Fraction | None = None
    feasibility: tuple[FeasibilityEntry, ...] = field(default=())

    @property
    def m(self) -> int:
        return len(self.primes)

    @property
    def r(self) -> int:
        return self.n - self.k

    @property
    def l(self) -> int:
        return math.prod(self.primes)

    def class_of(self, j: int) -> int:
        return self.assignment[j][0]

    def coords_of_class(self, i: int) -> list[int]:
        return [j for j, (ci, _) in enumerate(self.assignment) if ci == i]

    def class_feasibility(self, i: int) -> FeasibilityEntry:
        return self.feasibility[i]

    def is_repairable_class(self, i: int) -> bool:
        return self.feasibility[i].repairable

    def cutset(self) -> Fraction:
        return Fraction((self.n - 1) * self.l, self.r)

    # -- serialization -------------------------------------------------------

    def to_dict(self) -> dict:
        d = {
            "schema_version": 1,
            "scheme": self.scheme,
            "q": self.q,
            "n": self.n,
            "k": self.k,
            "l": self.l,
            "primes": list(self.primes),
            "subset_sizes": list(self.subset_sizes),
            "assignment": [list(a) for a in self.assignment],
            "feasibility": [f.to_dict() for f in self.feasibility],
        }
        if self.delta is not None:
            d["delta"] = _frac_dict(self.delta)
        if self.epsilon is not None:
            d["epsilon"] = _frac_dict(self.epsilon)
        return d

    @classmethod
    def from_dict(cls, d: dict) -> "ConstructionPlan":
        plan = plan_manual(
            q=d["q"],
            primes=d["primes"],
            subset_sizes=d["subset_sizes"],
            n=d["n"],
            k=d["k"],
        )
        delta = d.get("delta")
        epsilon = d.get("epsilon")
        return ConstructionPlan(
            q=plan.q,
            primes=plan.primes,
            subset_sizes=plan.subset_sizes,
            n=plan.n,
            k=plan.k,
            assignment=plan.assignment,
            scheme=d.get("scheme", "manual"),
            delta=Fraction(delta["num"], delta["den"]) if delta else None,
            epsilon=Fraction(epsilon["num"], epsilon["den"]) if epsilon else None,
            feasibility=plan.feasibility,
        )

    def save(self, path) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            json.dump(self.to_dict(), fh, indent=2, sort_keys=True)
            fh.write("\n")

    @classmethod
    def load(cls, path) -> "ConstructionPlan":
        with open(path, encoding="utf-8") as fh:
            return cls.from_dict(json.load(fh))


def _feasibility(primes, sizes, n, k) -> tuple[FeasibilityEntry, ...]:
    l = math.prod(primes)
    r = n - k
    cutset = Fraction((n - 1) * l, r)
    out = []
    for p, s in zip(primes, sizes):
        required = p + k - 1
        available = n - s
        per_helper = l // p
        total = required * per_helper
        ratio_total = Fraction(total) / cutset
        ratio_helper = Fraction(r, p)
        out.append(
            FeasibilityEntry(
                prime=p,
                assigned=s,
                required_helpers=required,
                available_helpers=available,
                repairable=required <= available,
                per_helper_subsymbols=per_helper,
                total_subsymbols=total,
                cutset=cutset,
                ratio_total=ratio_total,
                ratio_per_helper=ratio_helper,
                epsilon_node=ratio_helper - 1,
            )
        )
    return tuple(out)


def _assemble(q, primes, sizes, n, k, scheme, delta=None, epsilon=None, strict=False):
    """Sort classes, trim the assignment to exactly n coordinates (dropping
    from the last class), and attach certificates."""
    order = sorted(range(len(primes)), key=lambda i: primes[i])
    primes = tuple(primes[i] for i in order)
    sizes = [sizes[i] for i in order]
    assignment = []
    effective = [0] * len(primes)
    for i, (p, s) in enumerate(zip(primes, sizes)):
        for t in range(s):
            if len(assignment) == n:
                break
            assignment.append((i, t))
            effective[i] += 1
    if len(assignment) < n:
        raise InvalidSubset(
            f"subset sizes supply {len(assignment)} coordinates, need {n}"
        )
    feas = _feasibility(primes, effective, n, k)
    if strict:
        bad = [f.prime for f in feas if f.assigned and not f.repairable]
        if bad:
            raise InfeasiblePlan(
                f"classes with primes {bad} fail the helper certificate"
            )
    return ConstructionPlan(
        q=q,
        primes=primes,
        subset_sizes=tuple(effective),
        n=n,
        k=k,
        assignment=tuple(assignment),
        scheme=scheme,
        delta=delta,
        epsilon=epsilon,
        feasibility=feas,
    )


def _check_nk(n, k):
    if not 0 < k < n:
        raise ValueError(f"need 0 < k < n, got n={n}, k={k}")


def plan_manual(
    q: int,
    primes: Sequence[int],
    subset_sizes: Sequence[int],
    n: int,
    k: int,
    strict: bool = False,
) -> ConstructionPlan:
    """Desk-scale planning from explicit primes and per-class subset sizes.

    Never rejects on prime-window grounds; with strict=True, rejects when
    any class fails its repairability certificate.
    """
    _check_nk(n, k)
    primes = [int(p) for p in primes]
    subset_sizes = [int(s) for s in subset_sizes]
    if len(subset_sizes) != len(primes):
        raise InvalidSubset("one subset size per prime is required")
    if len(set(primes)) != len(primes):
        raise DuplicatePrimes(f"primes must be distinct: {primes}")
    for p in primes:
        if not mm.is_prime(p):
            raise ValueError(f"extension degree {p} is not prime")
    for p, s in zip(primes, subset_sizes):
        if not 0 <= s <= p:
            raise InvalidSubset(f"subset size {s} exceeds class size {p}")
    if sum(subset_sizes) < n:
        raise InvalidSubset(
            f"subset sizes sum to {sum(subset_sizes)}, need at least n={n}"
        )
    return _assemble(q, primes, subset_sizes, n, k, "manual", strict=strict)


def plan_constant_overhead(n: int, k: int, delta=Fraction(1, 10), q: int = 2) -> ConstructionPlan:
    """Planner for the constant-factor family: ceil((2+delta)/c) primes from
    the window [r/(2+delta), r/2], every conjugate of each used generator.

    Only works once n is large enough for the window to hold that many
    primes; raises InsufficientPrimes otherwise.
    """
    _check_nk(n, k)
    delta = _frac(delta)
    if delta <= 0:
        raise ValueError("delta must be positive")
    r = n - k
    c = Fraction(r, n)
    m = math.ceil((2 + delta) / c)
    window_lo = Fraction(r, 1) / (2 + delta)
    window_hi = Fraction(r, 2)
    candidates = primes_in_range(window_lo, window_hi)
    if len(candidates) < m:
        raise InsufficientPrimes(
            f"window [{float(window_lo):.2f}, {float(window_hi):.2f}] holds "
            f"{len(candidates)} primes, need {m}"
        )
    chosen = candidates[-m:]  # largest first lowers per-helper download
    sizes = list(chosen)  # all conjugates of each generator
    plan = _assemble(q, chosen, sizes, n, k, "thm1", delta=delta)
    bad = [f.prime for f in plan.feasibility if f.assigned and not f.repairable]
    if bad:
        raise InfeasiblePlan(f"classes with primes {bad} fail the helper certificate")
    return plan


def plan_epsilon_msr(
    n: int, k: int, epsilon, delta=Fraction(1, 10), q: int = 2
) -> ConstructionPlan:
    """Planner for the epsilon-overhead family: more primes from a narrower
    window near r, only ceil(c_1 * epsilon * r) conjugates per generator.

    With c = r/n, the window is [r(1 - c_2 eps), r(1 - c_1 eps)] where
    c_1 = 1/(delta + max(eps + 1 - c, 2 eps)) and c_2 drops the delta.
    """
    _check_nk(n, k)
    epsilon = _frac(epsilon)
    delta = _frac(delta)
    if epsilon <= 0 or delta <= 0:
        raise ValueError("epsilon and delta must be positive")
    r = n - k
    c = Fraction(r, n)
    denom = max(epsilon + 1 - c, 2 * epsilon)
    c1 = 1 / (delta + denom)
    c2 = 1 / denom
    m = math.ceil(1 / (c * c1 * epsilon))
    window_lo = r * (1 - c2 * epsilon)
    window_hi = r * (1 - c1 * epsilon)
    candidates = primes_in_range(window_lo, window_hi)
    if len(candidates) < m:
        raise InsufficientPrimes(
            f"window [{float(window_lo):.2f}, {float(window_hi):.2f}] holds "
            f"{len(candidates)} primes, need {m}"
        )
    subset = math.ceil(c1 * epsilon * r)
    if subset > window_lo:
        # the chain ceil(c_1 eps r) <= r(1 - c_2 eps) <= p_i must hold
        raise InfeasiblePlan(
            f"per-class subset {subset} exceeds the window floor {float(window_lo):.2f}"
        )
    chosen = candidates[-m:]
    sizes = [subset] * m
    plan = _assemble(q, chosen, sizes, n, k, "thm2", delta=delta, epsilon=epsilon)
    bad = [f.prime for f in plan.feasibility if f.assigned and not f.repairable]
    if bad:
        raise InfeasiblePlan(f"classes with primes {bad} fail the helper certificate")
    return plan


def build_code(
    plan: ConstructionPlan, max_subpacketization: int = DEFAULT_BUILD_CAP
) -> tuple[TowerField, GrsCode]:
    """Realize a plan: build the tower and the plain RS code whose j-th
    evaluation point is the assigned conjugate alpha_i ** (q ** t).

    Refuses towers with l above the cap; planning itself has no such limit.
    """
    l = plan.l
    if l > max_subpacketization:
        raise BuildCapExceeded(
            f"sub-packetization {l} exceeds the build cap {max_subpacketization}"
        )
    tower = tower_new(plan.q, plan.primes)
    conjugates: dict[int, list] = {}
    for i in range(plan.m):
        needed = max((t for ci, t in plan.assignment if ci == i), default=-1) + 1
        orbit = []
        cur = tower.alpha(i)
        for _ in range(needed):
            orbit.append(cur)
            cur = cur ** plan.q
        conjugates[i] = orbit
    evals = [conjugates[i][t] for i, t in plan.assignment]
    seen = {}
    for j, b in enumerate(evals):
        key = b.to_bytes()
        assert key not in seen, f"conjugate collision between {seen.get(key)} and {j}"
        seen[key] = j
    return tower, GrsCode(evals, plan.k)
