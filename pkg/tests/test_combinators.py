import math
import random
from fractions import Fraction

import pytest

from seqrenorm import (FiniteVector, FinitePermutation, NormError,
                       TailNotSummable, SignEnumerationTooLarge,
                       lp, sup_norm, l1_norm, day_norm, lorentz_harmonic,
                       tsirelson_norm, summing_norm,
                       apply_permutation, apply_signs,
                       eval_norm, eval_day, eval_tsirelson,
                       day_augment, strictly_convex_unconditional_base,
                       eval_strictly_convex_base, shifted_norm,
                       EquivClassEnumeration, os_unconditional_2R,
                       DavisParams, davis_norm, davis_interpolation,
                       y_space_norm, symmetric_2R_norm, random_vector)

from oracles import davis_grid_oracle


def vec(*dense):
    return FiniteVector.from_dense(dense)


def random_perm_and_signs(rng, v):
    supp = list(v.support)
    shuffled = supp[:]
    rng.shuffle(shuffled)
    sigma = FinitePermutation(dict(zip(supp, shuffled)))
    signs = {i: rng.choice((1, -1)) for i in supp}
    return apply_signs(apply_permutation(v, sigma), signs)


class TestDayAugment:
    def test_basis_spot_value(self):
        norm = day_augment(lp(2))
        assert eval_norm(norm, vec(1.0)) == pytest.approx(math.sqrt(1.25),
                                                          abs=1e-12)

    def test_zero(self):
        assert eval_norm(day_augment(lp(2)), FiniteVector(())) == 0.0

    def test_permutation_invariance_over_lp2(self):
        rng = random.Random(3)
        norm = day_augment(lp(2))
        for _ in range(50):
            v = random_vector(rng, max_support=6, max_index=12)
            assert eval_norm(norm, random_perm_and_signs(rng, v)) \
                == pytest.approx(eval_norm(norm, v), rel=1e-12)


class TestStrictlyConvexBase:
    def test_unconditional_base_spot_value(self):
        norm = strictly_convex_unconditional_base(lp(2))
        assert eval_norm(norm, vec(1.0)) == 1.25

    def test_sign_invariance(self):
        norm = strictly_convex_unconditional_base(summing_norm())
        rng = random.Random(5)
        for _ in range(30):
            v = random_vector(rng, max_support=5, max_index=8)
            signs = {i: rng.choice((1, -1)) for i in v.support}
            assert eval_norm(norm, apply_signs(v, signs)) \
                == eval_norm(norm, v)

    def test_zero(self):
        norm = strictly_convex_unconditional_base(sup_norm())
        assert eval_norm(norm, FiniteVector(())) == 0.0

    def test_sign_enumeration_actually_sups(self):
        # summing norm of (1,-1) is 1, of (1,1) is 2: the sup must find 2
        norm = strictly_convex_unconditional_base(summing_norm())
        val = eval_strictly_convex_base(summing_norm(), vec(1.0, -1.0))
        assert val == pytest.approx(2.0 + math.sqrt(2.0 ** -4 + 2.0 ** -8))
        assert eval_norm(norm, vec(1.0, -1.0)) == val

    def test_enumeration_cap(self):
        big = FiniteVector((i, 1.0) for i in range(1, 23))
        with pytest.raises(SignEnumerationTooLarge):
            eval_strictly_convex_base(summing_norm(), big)
        # unconditional bases skip the enumeration entirely
        assert eval_strictly_convex_base(lp(2), big) > 0


class TestShiftedNorm:
    def test_zero_center_doubles(self):
        rng = random.Random(7)
        for _ in range(30):
            y = random_vector(rng, max_support=6, max_index=10)
            assert shifted_norm(lp(2), FiniteVector(()), y) \
                == 2.0 * eval_norm(lp(2), y)

    def test_basis_spot_values(self):
        e1, e2 = FiniteVector.basis(1), FiniteVector.basis(2)
        assert shifted_norm(lp(2), e1, e1) == pytest.approx(2.0)
        assert shifted_norm(lp(2), e1, e2) == pytest.approx(2 * math.sqrt(2))

    def test_equivalence_bounds(self):
        rng = random.Random(11)
        base = strictly_convex_unconditional_base(sup_norm())
        for _ in range(100):
            x = random_vector(rng, max_support=6, max_index=10)
            y = random_vector(rng, max_support=6, max_index=10)
            ny = eval_norm(base, y)
            nx = eval_norm(base, x)
            val = shifted_norm(base, x, y)
            assert 2.0 * ny <= val * (1 + 1e-9) + 1e-12
            assert val <= (2.0 + 2.0 * nx) * ny * (1 + 1e-9) + 1e-12


class TestClassEnumeration:
    def test_stream_prefix_stability(self):
        small = EquivClassEnumeration(max_support=2, denominator_bound=1,
                                      coefficient_bound=1)
        large = EquivClassEnumeration(max_support=3, denominator_bound=2,
                                      coefficient_bound=1)
        from seqrenorm.combinators import enumerate_classes
        ranks_small = dict(enumerate_classes(small))
        ranks_large = dict(enumerate_classes(large))
        for rank, pattern in ranks_small.items():
            assert ranks_large.get(rank) == pattern

    def test_bad_bounds(self):
        with pytest.raises(ValueError):
            EquivClassEnumeration(max_support=0)
        with pytest.raises(ValueError):
            EquivClassEnumeration(weight_decay=1.0)
        with pytest.raises(ValueError):
            EquivClassEnumeration(max_support=9)


class TestOs2R:
    BASE = strictly_convex_unconditional_base(sup_norm())
    ENUM = EquivClassEnumeration()

    def test_zero_vector(self):
        enc = os_unconditional_2R(self.BASE, self.ENUM, FiniteVector(()))
        assert enc.lo == enc.hi == 0.0

    def test_sign_flip_bit_identical(self):
        rng = random.Random(13)
        for _ in range(40):
            v = random_vector(rng, max_support=6, max_index=10)
            signs = {i: rng.choice((1, -1)) for i in v.support}
            a = os_unconditional_2R(self.BASE, self.ENUM, v)
            b = os_unconditional_2R(self.BASE, self.ENUM,
                                    apply_signs(v, signs))
            assert (a.lo, a.hi) == (b.lo, b.hi)

    def test_nesting_under_refinement(self):
        rng = random.Random(17)
        larger = EquivClassEnumeration(max_support=3, denominator_bound=2,
                                       coefficient_bound=1)
        for _ in range(25):
            v = random_vector(rng, max_support=5, max_index=8)
            a = os_unconditional_2R(self.BASE, self.ENUM, v)
            b = os_unconditional_2R(self.BASE, larger, v)
            slack = 1e-12 * max(1.0, a.hi)
            assert b.lo >= a.lo - slack
            assert b.hi <= a.hi + slack

    def test_equivalent_norm(self):
        # rank 0 is the zero class, contributing exactly 2||v||; every class
        # is capped by 2||v|| decay^rank, so the whole sum stays below
        # 2||v||/(1 - decay)
        rng = random.Random(19)
        q = self.ENUM.weight_decay
        for _ in range(25):
            v = random_vector(rng, max_support=5, max_index=8)
            enc = os_unconditional_2R(self.BASE, self.ENUM, v)
            nv = eval_norm(self.BASE, v)
            assert enc.lo >= 2.0 * nv * (1 - 1e-12)
            assert enc.hi <= 2.0 * nv / (1.0 - q) * (1 + 1e-9)

    def test_requires_unconditional_base(self):
        with pytest.raises(NormError):
            os_unconditional_2R(summing_norm(), self.ENUM, vec(1.0))


class TestDavisInterpolation:
    @pytest.mark.parametrize("m", [1.0, 2.0, 4.0, 8.0, 16.0])
    def test_closed_form_basis(self, m):
        val = davis_interpolation(sup_norm(), l1_norm(), m,
                                  FiniteVector.basis(1))
        assert val == pytest.approx(m / math.sqrt(1 + m ** 4), abs=1e-9)

    def test_zero(self):
        assert davis_interpolation(sup_norm(), l1_norm(), 2.0,
                                   FiniteVector(())) == 0.0

    def test_feasible_point_bound(self):
        rng = random.Random(23)
        for m in (1.0, 2.0, 8.0):
            for _ in range(20):
                x = random_vector(rng, max_support=6, max_index=10)
                val = davis_interpolation(sup_norm(), l1_norm(), m, x)
                assert val <= eval_norm(l1_norm(), x) / m * (1 + 1e-9)

    def test_norm_estimates_sandwich(self):
        rng = random.Random(29)
        for m in (1.0, 2.0, 4.0, 8.0, 16.0):
            for _ in range(20):
                x = random_vector(rng, max_support=6, max_index=10)
                val = davis_interpolation(sup_norm(), l1_norm(), m, x)
                ne = eval_norm(sup_norm(), x)
                assert val / m <= ne * (1 + 1e-9) + 1e-12
                assert ne <= 2 * m * val * (1 + 1e-9) + 1e-12

    def test_grid_oracle_sup_l1(self):
        rng = random.Random(31)
        for _ in range(25):
            size = rng.randint(1, 3)
            idxs = rng.sample(range(1, 7), size)
            x = FiniteVector((i, rng.uniform(-5, 5)) for i in idxs)
            m = rng.choice((1.0, 2.0, 4.0))
            val = davis_interpolation(sup_norm(), l1_norm(), m, x)
            grid = davis_grid_oracle(sup_norm(), l1_norm(), m, x)
            assert val == pytest.approx(grid, abs=1e-3)
            assert val <= grid + 1e-9  # optimizer is at least as good

    def test_grid_oracle_general_path(self):
        # lp(2) <= l1, neither side is sup: exercises coordinate descent
        rng = random.Random(37)
        for _ in range(12):
            size = rng.randint(1, 3)
            idxs = rng.sample(range(1, 7), size)
            x = FiniteVector((i, rng.uniform(-5, 5)) for i in idxs)
            val = davis_interpolation(lp(2), l1_norm(), 2.0, x)
            grid = davis_grid_oracle(lp(2), l1_norm(), 2.0, x)
            assert val == pytest.approx(grid, abs=1e-3)

    def test_triangle_inequality(self):
        rng = random.Random(41)
        for _ in range(40):
            x = random_vector(rng, max_support=5, max_index=8)
            y = random_vector(rng, max_support=5, max_index=8)
            dx = davis_interpolation(sup_norm(), l1_norm(), 2.0, x)
            dy = davis_interpolation(sup_norm(), l1_norm(), 2.0, y)
            ds = davis_interpolation(sup_norm(), l1_norm(), 2.0, x + y)
            assert ds <= dx + dy + 1e-9

    def test_symmetric_invariance(self):
        rng = random.Random(43)
        for _ in range(30):
            v = random_vector(rng, max_support=6, max_index=10)
            a = davis_interpolation(sup_norm(), l1_norm(), 4.0, v)
            b = davis_interpolation(sup_norm(), l1_norm(), 4.0,
                                    random_perm_and_signs(rng, v))
            assert b == pytest.approx(a, abs=1e-7)

    def test_order_violation_rejected(self):
        with pytest.raises(NormError):
            davis_interpolation(l1_norm(), sup_norm(), 2.0, vec(1.0))

    def test_lorentz_as_big_space(self):
        val = davis_interpolation(sup_norm(), lorentz_harmonic(), 1.0,
                                  FiniteVector.basis(1))
        # same 1-D geometry as sup/l1 on a singleton
        assert val == pytest.approx(1 / math.sqrt(2), abs=1e-9)


class TestYSpaceNorm:
    E, F, X = sup_norm(), l1_norm(), tsirelson_norm()

    def test_zero(self):
        enc = y_space_norm(self.E, self.F, self.X, DavisParams(),
                           FiniteVector(()), 8)
        assert enc.lo == enc.hi == 0.0

    def test_nesting(self):
        rng = random.Random(47)
        for _ in range(10):
            v = random_vector(rng, max_support=5, max_index=8)
            a = y_space_norm(self.E, self.F, self.X, DavisParams(), v, 6)
            b = y_space_norm(self.E, self.F, self.X, DavisParams(), v, 12)
            slack = 1e-12 * max(1.0, a.hi)
            assert b.lo >= a.lo - slack
            assert b.hi <= a.hi + slack

    def test_closed_form_cross_check(self):
        coeffs = [(n, 2.0 ** n / math.sqrt(1 + 2.0 ** (4 * n)))
                  for n in range(1, 9)]
        expected_lo = float(eval_tsirelson(FiniteVector(coeffs)))
        enc = y_space_norm(self.E, self.F, self.X, DavisParams(),
                           FiniteVector.basis(1), 8)
        assert enc.lo == pytest.approx(expected_lo, abs=1e-7)
        assert enc.hi >= enc.lo


class TestSymmetric2R:
    def test_basel_spot_value(self):
        enc = symmetric_2R_norm(lp(2), FiniteVector.basis(1), 4096)
        target = math.sqrt(math.pi ** 2 / 6 + 0.25)
        assert enc.contains(target)
        assert enc.width < 1e-3

    def test_zero(self):
        enc = symmetric_2R_norm(lp(2), FiniteVector(()), 64)
        assert enc.lo == enc.hi == 0.0

    def test_bit_identical_under_rearrangement(self):
        rng = random.Random(53)
        for _ in range(40):
            v = random_vector(rng, max_support=8, max_index=16)
            a = symmetric_2R_norm(lp(2), v, 256)
            b = symmetric_2R_norm(lp(2), random_perm_and_signs(rng, v), 256)
            assert (a.lo, a.hi) == (b.lo, b.hi)

    def test_enclosure_triangle(self):
        rng = random.Random(59)
        for _ in range(40):
            x = random_vector(rng, max_support=6, max_index=10)
            y = random_vector(rng, max_support=6, max_index=10)
            ex = symmetric_2R_norm(lp(2), x, 256)
            ey = symmetric_2R_norm(lp(2), y, 256)
            es = symmetric_2R_norm(lp(2), x + y, 256)
            assert es.lo <= ex.hi + ey.hi + 1e-9

    def test_l1_tail_not_summable(self):
        with pytest.raises(TailNotSummable):
            symmetric_2R_norm(l1_norm(), vec(1.0), 64)

    def test_tsirelson_rejected_by_flags(self):
        with pytest.raises(NormError):
            symmetric_2R_norm(tsirelson_norm(), vec(1.0), 64)

    def test_lemma_constant_for_lp(self):
        # ||hat x|| <= c ||x|| with c = 1/(2^(1-1/p) - 1) on the hi side
        from seqrenorm import hat_transform, eval_tailed
        rng = random.Random(61)
        for p in (1.5, 2.0, 4.0):
            c = 1.0 / (2.0 ** (1.0 - 1.0 / p) - 1.0)
            for _ in range(30):
                x = random_vector(rng, max_support=8, max_index=16)
                enc = eval_tailed(lp(p), hat_transform(x), 65536)
                assert enc.hi <= c * eval_norm(lp(p), x) * (1 + 1e-9)

    def test_lower_sandwich(self):
        # 1-symmetric base: ||x|| <= ||hat x|| on the lo side
        from seqrenorm import hat_transform, eval_tailed
        rng = random.Random(67)
        for _ in range(30):
            x = random_vector(rng, max_support=8, max_index=16)
            enc = eval_tailed(lp(2), hat_transform(x), 1024)
            assert eval_norm(lp(2), x) <= enc.lo * (1 + 1e-9)
