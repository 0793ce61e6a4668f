"""Tower field arithmetic, Frobenius maps, traces, and dual bases."""

import itertools
import random

import numpy as np
import pytest

from rsrepair.errors import DuplicatePrimes, SingularBasis
from rsrepair.field_tower import (
    FieldElement,
    find_irreducible,
    tower_new,
    trace_dual_basis,
)


def _poly_eval_int(coeffs, x, q):
    # ascending coefficients, plain modular arithmetic
    acc = 0
    for c in reversed(coeffs):
        acc = (acc * x + c) % q
    return acc


def _brute_force_irreducibles(q, d):
    """All monic degree-d polynomials with no factor of degree <= d // 2,
    by trial division against every lower-degree monic polynomial."""
    def all_monic(deg):
        for tail in itertools.product(range(q), repeat=deg):
            yield tuple(tail) + (1,)

    def divides(g, f):
        # polynomial long division remainder == 0
        f = list(f)
        while len(f) >= len(g) and any(f):
            if f[-1] == 0:
                f.pop()
                continue
            shift = len(f) - len(g)
            factor = f[-1] * pow(g[-1], q - 2, q) % q
            for i, c in enumerate(g):
                f[shift + i] = (f[shift + i] - factor * c) % q
            f.pop()
        return not any(f)

    out = []
    for cand in all_monic(d):
        if all(
            not divides(g, cand)
            for deg in range(1, d // 2 + 1)
            for g in all_monic(deg)
        ):
            out.append(cand)
    return out


class TestFindIrreducible:
    def test_degree_one_is_irreducible(self):
        f = find_irreducible(2, 1)
        assert len(f) == 2 and f[-1] == 1

    def test_unique_quadratic_over_f2(self):
        # oracle: exhaustive check of all 4 monic quadratics
        irreducibles = _brute_force_irreducibles(2, 2)
        assert irreducibles == [(1, 1, 1)]
        assert find_irreducible(2, 2) == (1, 1, 1)

    def test_first_cubic_over_f2(self):
        # oracle: brute-force irreducibility over all monic cubics
        assert (1, 1, 0, 1) in _brute_force_irreducibles(2, 3)
        assert find_irreducible(2, 3) == (1, 1, 0, 1)

    @pytest.mark.parametrize("q,d", [(2, 5), (3, 2), (3, 3), (5, 2), (7, 2)])
    def test_matches_brute_force_membership(self, q, d):
        assert find_irreducible(q, d) in _brute_force_irreducibles(q, d)

    def test_no_roots_in_base_field(self):
        for q, d in [(2, 7), (3, 5), (5, 3), (7, 3)]:
            f = find_irreducible(q, d)
            assert all(_poly_eval_int(f, x, q) != 0 for x in range(q))

    def test_deterministic(self):
        assert find_irreducible(2, 11) == find_irreducible(2, 11)


class TestTowerNew:
    def test_l_is_product(self):
        assert tower_new(2, [2, 3]).l == 6
        assert tower_new(2, [3, 5, 7]).l == 105

    def test_duplicate_primes_rejected(self):
        with pytest.raises(DuplicatePrimes):
            tower_new(2, [3, 3])

    def test_composite_degree_rejected(self):
        with pytest.raises(ValueError):
            tower_new(2, [4, 3])

    def test_composite_base_rejected(self):
        with pytest.raises(ValueError):
            tower_new(4, [2, 3])

    def test_roundtrip_serialization(self):
        t = tower_new(3, [2, 5])
        t2 = tower_new(3, [2, 5])
        assert t.to_dict() == t2.to_dict()
        from rsrepair.field_tower import TowerField

        assert TowerField.from_dict(t.to_dict()) == t


class TestArithmetic:
    def test_identities(self, rng):
        t = tower_new(2, [2, 3])
        one = t.one()
        for _ in range(50):
            a = t.random_element(rng)
            assert a * one == a
            assert a + t.zero() == a
            if not a.is_zero():
                assert a * a.inv() == one

    def test_exhaustive_inverses_l6(self):
        t = tower_new(2, [2, 3])
        one = t.one()
        elems = [t.element(list(c)) for c in itertools.product(range(2), repeat=6)]
        assert len(elems) == 64
        for e in elems:
            if e.is_zero():
                with pytest.raises(ZeroDivisionError):
                    e.inv()
            else:
                assert e * e.inv() == one

    def test_field_axioms_exhaustive_l6(self):
        # table-driven exhaustive check over all 64 elements
        t = tower_new(2, [2, 3])
        elems = [t.element(list(c)) for c in itertools.product(range(2), repeat=6)]
        index = {e.to_bytes(): i for i, e in enumerate(elems)}
        size = len(elems)
        mul = np.zeros((size, size), dtype=np.int64)
        add = np.zeros((size, size), dtype=np.int64)
        for i, a in enumerate(elems):
            for j, b in enumerate(elems):
                mul[i, j] = index[(a * b).to_bytes()]
                add[i, j] = index[(a + b).to_bytes()]
        # commutativity
        assert np.array_equal(mul, mul.T)
        assert np.array_equal(add, add.T)
        # associativity: T[T[a,b],c] == T[a,T[b,c]]
        assert np.array_equal(mul[mul], mul[:, mul])
        assert np.array_equal(add[add], add[:, add])
        # distributivity: a*(b+c) == a*b + a*c
        lhs = mul[np.arange(size)[:, None, None], add[None, :, :]]
        rhs = add[mul[:, :, None], mul[:, None, :]]
        assert np.array_equal(lhs, rhs)

    def test_axioms_random_q3(self, rng):
        t = tower_new(3, [2, 3])
        for _ in range(200):
            a, b, c = (t.random_element(rng) for _ in range(3))
            assert (a * b) * c == a * (b * c)
            assert a * (b + c) == a * b + a * c
            assert a + b == b + a and a * b == b * a

    def test_pow_matches_repeated_mul(self, rng):
        t = tower_new(5, [2, 3])
        a = t.random_element(rng)
        acc = t.one()
        for e in range(8):
            assert a ** e == acc
            acc = acc * a

    def test_cross_tower_rejected(self):
        t1 = tower_new(2, [2, 3])
        t2 = tower_new(2, [2, 5])
        with pytest.raises(ValueError):
            t1.one() + t2.one()

    def test_serialization_roundtrip(self, rng):
        t = tower_new(7, [2, 3])
        a = t.random_element(rng)
        assert t.from_bytes(a.to_bytes()) == a
        assert len(a.to_bytes()) == t.l


class TestFrobenius:
    def test_fixed_field_elements_unchanged(self, rng):
        t = tower_new(2, [2, 3])
        phi = t.frobenius_power_map(0)
        # anything supported on e_0 = 0 is fixed
        a2 = t.alpha(1)
        for e in [t.zero(), t.one(), a2, a2 * a2 + t.one()]:
            assert phi(e) == e

    def test_generator_maps_to_distinct_conjugate(self):
        t = tower_new(2, [2, 3])
        for i in range(2):
            phi = t.frobenius_power_map(i)
            a = t.alpha(i)
            img = phi(a)
            assert img != a
            # same minimal polynomial: f_i(img) == 0
            f = t.irreducibles[i]
            acc = t.zero()
            for j, c in enumerate(f):
                if c:
                    acc = acc + c * img ** j
            assert acc.is_zero()

    def test_order_is_prime_degree(self):
        t = tower_new(2, [3, 5, 7])
        for i, p in enumerate(t.primes):
            phi = t.frobenius_power_map(i)
            a = t.alpha(i)
            assert phi.iterate(a, p) == a
            assert all(phi.iterate(a, s) != a for s in range(1, p))

    def test_multiplicative(self, rng):
        t = tower_new(2, [3, 5, 7])
        phi = t.frobenius_power_map(1)
        for _ in range(50):
            a, b = t.random_element(rng), t.random_element(rng)
            assert phi(a * b) == phi(a) * phi(b)

    def test_membership_agrees_with_fixed_point_exhaustive(self):
        t = tower_new(2, [2, 3])
        elems = [t.element(list(c)) for c in itertools.product(range(2), repeat=6)]
        for i in range(2):
            phi = t.frobenius_power_map(i)
            for e in elems:
                assert t.subfield_membership(e, i) == (phi(e) == e)


class TestTrace:
    def test_trace_of_subfield_element(self, rng):
        # a in F_i has all conjugates equal: trace is (p_i mod q) * a
        t = tower_new(3, [2, 3])
        a = t.alpha(1)  # lies in F_0
        assert t.trace_to_subfield(a, 0) == (t.primes[0] % 3) * a
        assert t.trace_to_subfield(t.zero(), 0) == t.zero()

    def test_two_term_conjugate_sum_by_hand(self):
        # q=2 tower with a degree-2 part: omega^2 = omega + 1, so the
        # conjugate sum omega + omega^2 equals 1
        t = tower_new(2, [2, 3])
        w = t.alpha(0)
        by_hand = w + w * w
        assert by_hand == t.one()
        assert t.trace_to_subfield(w, 0) == by_hand

    def test_image_in_subfield(self, rng):
        t = tower_new(2, [3, 5, 7])
        for i in range(3):
            for _ in range(30):
                a = t.random_element(rng)
                assert t.subfield_membership(t.trace_to_subfield(a, i), i)

    def test_subfield_linearity(self, rng):
        # tr_i(a * b) == b * tr_i(a) for b in F_i
        t = tower_new(2, [3, 5, 7])
        mons = t.subfield_monomials(1)
        for _ in range(30):
            a = t.random_element(rng)
            b = sum(
                (m for m in mons if rng.randrange(2)), start=t.zero()
            )
            assert t.trace_to_subfield(a * b, 1) == b * t.trace_to_subfield(a, 1)

    def test_surjectivity(self, rng):
        # for nonzero theta, a -> tr_i(theta * a) is a nonzero functional
        t = tower_new(2, [2, 3])
        elems = [t.element(list(c)) for c in itertools.product(range(2), repeat=6)]
        for _ in range(20):
            theta = t.random_element(rng)
            if theta.is_zero():
                continue
            assert any(
                not t.trace_to_subfield(theta * a, 0).is_zero() for a in elems
            )

    def test_transitivity(self, rng):
        # tr_{E/F_q}(a) == tr_{F_i/F_q}(tr_i(a)); the outer trace is the
        # q-power conjugate sum over F_i's degree, computed independently
        t = tower_new(2, [2, 3])
        frob = t.frobenius_matrix
        for i in range(t.m):
            deg = t.l // t.primes[i]
            for _ in range(50):
                a = t.random_element(rng)
                inner = t.trace_to_subfield(a, i)
                acc, cur = t.zero(), inner
                for _ in range(deg):
                    acc = acc + cur
                    cur = FieldElement(t, (frob @ cur.flat) % t.q)
                assert acc == t.absolute_trace(a)


class TestTraceDualBasis:
    def test_duality_relation(self, rng):
        t = tower_new(2, [2, 3])
        basis = trace_dual_basis([t.one(), t.alpha(0)], 0)
        for s, es in enumerate(basis.elems):
            for u, du in enumerate(basis.dual):
                tr = t.trace_to_subfield(es * du, 0)
                assert tr == (t.one() if s == u else t.zero())

    def test_reconstruct_roundtrip(self, rng):
        t = tower_new(2, [2, 3])
        basis = trace_dual_basis([t.one(), t.alpha(0) + t.alpha(1)], 0)
        for _ in range(100):
            a = t.random_element(rng)
            assert basis.reconstruct(a) == a

    def test_selfdual_normal_basis_single_prime(self):
        t = tower_new(2, [2])
        w = t.alpha(0)
        basis = trace_dual_basis([w, w * w], 0)
        assert list(basis.dual) == [w, w * w]

    def test_duplicated_element_singular(self):
        t = tower_new(2, [2, 3])
        with pytest.raises(SingularBasis):
            trace_dual_basis([t.one(), t.one()], 0)

    def test_wrong_arity_rejected(self):
        t = tower_new(2, [3, 5])
        with pytest.raises(SingularBasis):
            trace_dual_basis([t.one()], 0)


def test_concurrent_use_is_pure(rng):
    # operations never mutate operands
    t = tower_new(2, [2, 3])
    a = t.random_element(rng)
    snapshot = a.to_bytes()
    b = t.random_element(rng)
    _ = a + b, a * b, -a, a ** 5
    if not a.is_zero():
        _ = a.inv()
    assert a.to_bytes() == snapshot
    with pytest.raises(ValueError):
        a.flat[0] = 1
