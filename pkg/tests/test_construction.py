"""Planners, feasibility certificates, and code building."""

import math
from fractions import Fraction

import pytest

from rsrepair.construction import (
    DEFAULT_BUILD_CAP,
    ConstructionPlan,
    build_code,
    plan_constant_overhead,
    plan_epsilon_msr,
    plan_manual,
    primes_in_range,
)
from rsrepair.errors import (
    BuildCapExceeded,
    DuplicatePrimes,
    InfeasiblePlan,
    InsufficientPrimes,
    InvalidSubset,
)


def _is_prime_slow(n):
    return n >= 2 and all(n % d for d in range(2, int(n ** 0.5) + 1))


class TestPrimesInRange:
    def test_matches_trial_division(self):
        got = primes_in_range(4.5, 9.5)
        assert got == [p for p in range(5, 10) if _is_prime_slow(p)] == [5, 7]

    def test_empty_below_two(self):
        assert primes_in_range(1.1, 1.9) == []

    def test_inclusive_endpoints(self):
        assert primes_in_range(2, 2) == [2]

    def test_large_window_against_oracle(self):
        got = primes_in_range(2000, 2500)
        want = [p for p in range(2000, 2501) if _is_prime_slow(p)]
        assert got == want

    def test_fraction_endpoints(self):
        assert primes_in_range(Fraction(5, 2), Fraction(7, 2)) == [3]


class TestPlanManual:
    def test_desk_instance_b_certificates(self):
        plan = plan_manual(q=2, primes=[3, 5, 7], subset_sizes=[3, 5, 7], n=15, k=2)
        # certificate arithmetic: p + k - 1 <= n - |S'_i|
        by_prime = {f.prime: f for f in plan.feasibility}
        assert by_prime[3].required_helpers == 4 and by_prime[3].available_helpers == 12
        assert by_prime[5].required_helpers == 6 and by_prime[5].available_helpers == 10
        assert by_prime[7].required_helpers == 8 and by_prime[7].available_helpers == 8
        assert all(f.repairable for f in plan.feasibility)
        assert plan.l == 105

    def test_desk_instance_a_certificates(self):
        plan = plan_manual(q=2, primes=[2, 3], subset_sizes=[2, 3], n=5, k=2)
        by_prime = {f.prime: f for f in plan.feasibility}
        assert by_prime[2].repairable            # 3 <= 3
        assert not by_prime[3].repairable        # 4 > 2

    def test_oversized_subset_rejected(self):
        with pytest.raises(InvalidSubset):
            plan_manual(q=2, primes=[3, 5], subset_sizes=[4, 3], n=6, k=2)

    def test_undersized_total_rejected(self):
        with pytest.raises(InvalidSubset):
            plan_manual(q=2, primes=[2, 3], subset_sizes=[2, 2], n=5, k=2)

    def test_duplicate_primes_rejected(self):
        with pytest.raises(DuplicatePrimes):
            plan_manual(q=2, primes=[3, 3], subset_sizes=[3, 3], n=5, k=2)

    def test_strict_mode_rejects_infeasible_class(self):
        with pytest.raises(InfeasiblePlan):
            plan_manual(q=2, primes=[2, 3], subset_sizes=[2, 3], n=5, k=2, strict=True)

    def test_assignment_order_and_trim(self):
        # primes ascending, conjugate exponents ascending, last class trimmed
        plan = plan_manual(q=2, primes=[5, 2, 3], subset_sizes=[5, 2, 3], n=6, k=2)
        assert plan.primes == (2, 3, 5)
        assert plan.assignment == ((0, 0), (0, 1), (1, 0), (1, 1), (1, 2), (2, 0))
        assert plan.subset_sizes == (2, 3, 1)

    def test_roundtrip_serialization(self, tmp_path):
        plan = plan_manual(q=2, primes=[3, 5, 7], subset_sizes=[3, 5, 7], n=15, k=2)
        path = tmp_path / "plan.json"
        plan.save(path)
        loaded = ConstructionPlan.load(path)
        assert loaded.assignment == plan.assignment
        assert loaded.feasibility == plan.feasibility


class TestPlanConstantOverhead:
    def test_small_n_insufficient_primes(self):
        # r=5: window [5/2.2, 2.5] holds no prime, and 5 would be needed
        with pytest.raises(InsufficientPrimes):
            plan_constant_overhead(n=10, k=5, delta=Fraction(1, 5))

    def test_synthetic_large_n(self):
        # r=5000, window [2000, 2500]; oracle count via trial division
        n, k, delta = 10_000, 5_000, Fraction(1, 2)
        window = [p for p in range(2000, 2501) if _is_prime_slow(p)]
        m = math.ceil((2 + delta) / Fraction(n - k, n))
        assert len(window) >= m
        plan = plan_constant_overhead(n, k, delta)
        assert plan.m == m == 5
        assert sum(plan.subset_sizes) == n
        # every certificate holds
        for f in plan.feasibility:
            assert f.required_helpers <= f.available_helpers
        # sub-packetization bound: prod p_i <= (r/2)^m
        assert plan.l <= (Fraction(n - k, 2)) ** m
        # chosen primes sit in the window
        assert all(2000 <= p <= 2500 for p in plan.primes)

    def test_total_bandwidth_bound(self):
        # any emitted plan obeys total <= (2+delta)(1-c/2) * (n-1)/r * l
        n, k, delta = 10_000, 5_000, Fraction(1, 2)
        plan = plan_constant_overhead(n, k, delta)
        c = Fraction(n - k, n)
        bound = (2 + delta) * (1 - c / 2) * Fraction(n - 1, n - k)
        for f in plan.feasibility:
            assert f.ratio_total <= bound

    def test_supply_clause(self):
        # m * (smallest chosen prime) >= n, so the classes can cover n points
        plan = plan_constant_overhead(10_000, 5_000, Fraction(1, 2))
        assert plan.m * min(plan.primes) >= plan.n


class TestPlanEpsilonMsr:
    def test_small_n_insufficient_primes(self):
        with pytest.raises(InsufficientPrimes):
            plan_epsilon_msr(n=20, k=10, epsilon=Fraction(1, 10), delta=Fraction(1, 20))

    def test_synthetic_large_n(self):
        n, k = 400_000, 380_000
        eps = Fraction(1, 2)
        plan = plan_epsilon_msr(n, k, epsilon=eps, delta=Fraction(1, 2))
        r = n - k
        c = Fraction(r, n)
        c1 = 1 / (Fraction(1, 2) + max(eps + 1 - c, 2 * eps))
        c2 = 1 / max(eps + 1 - c, 2 * eps)
        assert plan.m == math.ceil(1 / (c * c1 * eps)) == 78
        # window membership and subset size
        lo, hi = r * (1 - c2 * eps), r * (1 - c1 * eps)
        assert all(lo <= p <= hi for p in plan.primes)
        assert max(plan.subset_sizes) <= math.ceil(c1 * eps * r)
        assert sum(plan.subset_sizes) == n
        # certificates
        for f in plan.feasibility:
            assert f.required_helpers <= f.available_helpers
        # sub-packetization bound
        assert plan.l <= (r * (1 - c1 * eps)) ** plan.m
        # per-helper download within (1 + eps) * l / r for every class
        for f in plan.feasibility:
            assert f.ratio_per_helper <= 1 + eps
        # total download within (1 + eps) times the cut-set bound
        for f in plan.feasibility:
            assert f.ratio_total <= (1 + eps)

    def test_scheme_recorded(self):
        plan = plan_epsilon_msr(400_000, 380_000, Fraction(1, 2), Fraction(1, 2))
        assert plan.scheme == "thm2"
        assert plan.epsilon == Fraction(1, 2)


class TestBuildCode:
    def test_membership_pattern(self):
        plan = plan_manual(q=2, primes=[2, 3], subset_sizes=[2, 3], n=5, k=2)
        tower, code = build_code(plan)
        for j, (i, _) in enumerate(plan.assignment):
            assert not tower.subfield_membership(code.evals[j], i)
            for other in range(plan.m):
                if other != i:
                    assert tower.subfield_membership(code.evals[j], other)

    def test_evals_pairwise_distinct(self):
        plan = plan_manual(q=2, primes=[3, 5, 7], subset_sizes=[3, 5, 7], n=15, k=2)
        tower, code = build_code(plan)
        assert len({b.to_bytes() for b in code.evals}) == plan.n
        assert code.n == plan.n

    def test_conjugates_match_assignment(self):
        plan = plan_manual(q=3, primes=[2, 3], subset_sizes=[2, 3], n=5, k=2)
        tower, code = build_code(plan)
        for j, (i, t) in enumerate(plan.assignment):
            expect = tower.alpha(i) ** (plan.q ** t)
            assert code.evals[j] == expect

    def test_minimal_polynomial_degree(self):
        # the minimal polynomial over F_q of a class-i point has degree p_i:
        # its q-power orbit has exactly p_i distinct members
        plan = plan_manual(q=2, primes=[2, 3], subset_sizes=[2, 3], n=5, k=2)
        tower, code = build_code(plan)
        for j, (i, _) in enumerate(plan.assignment):
            orbit = set()
            cur = code.evals[j]
            for _ in range(tower.l):
                orbit.add(cur.to_bytes())
                cur = cur ** plan.q
            assert len(orbit) == plan.primes[i]

    def test_build_cap(self):
        plan = plan_constant_overhead(10_000, 5_000, Fraction(1, 2))
        with pytest.raises(BuildCapExceeded):
            build_code(plan)
        assert plan.l > DEFAULT_BUILD_CAP

    def test_custom_cap(self):
        plan = plan_manual(q=2, primes=[2, 3], subset_sizes=[2, 3], n=5, k=2)
        with pytest.raises(BuildCapExceeded):
            build_code(plan, max_subpacketization=5)
