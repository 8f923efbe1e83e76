import math
import random
from fractions import Fraction

import pytest

from seqrenorm import FiniteVector, eval_tsirelson, eval_norm, tsirelson_norm

from oracles import tsirelson_bruteforce


def ones_block(lo, hi):
    return FiniteVector((i, Fraction(1)) for i in range(lo, hi + 1))


class TestSpotValues:
    @pytest.mark.parametrize("n", [1, 2, 5, 9, 17])
    def test_unit_vectors(self, n):
        assert eval_tsirelson(FiniteVector.basis(n, Fraction(1))) == 1

    def test_adjacent_pair_past_two(self):
        # singletons {3},{4} are admissible: (1/2)(1+1) = 1, tied with sup
        assert eval_tsirelson(FiniteVector([(3, 1.0), (4, 1.0)])) == 1.0

    @pytest.mark.parametrize("n", [2, 3, 4])
    def test_block_past_n_is_half_n(self, n):
        x = ones_block(n + 1, 2 * n)
        assert eval_tsirelson(x) == Fraction(n, 2)

    def test_low_block_is_cheaper_than_shifted_block(self):
        # positions constrain admissible families, so the norm is not symmetric
        assert eval_tsirelson(ones_block(1, 4)) == 1
        assert eval_tsirelson(ones_block(3, 6)) == Fraction(3, 2)

    def test_rational_mode_exact(self):
        x = FiniteVector([(2, Fraction(1, 3)), (3, Fraction(1, 2)),
                          (5, Fraction(2, 7))])
        val = eval_tsirelson(x)
        assert isinstance(val, Fraction)
        assert val == tsirelson_bruteforce(x)


class TestOracleEquivalence:
    def test_random_rational_vectors(self):
        rng = random.Random(41)
        for _ in range(40):
            size = rng.randint(1, 5)
            idxs = rng.sample(range(1, 11), size)
            x = FiniteVector(
                (i, Fraction(rng.randint(-12, 12), rng.randint(1, 8)))
                for i in idxs)
            assert eval_tsirelson(x) == tsirelson_bruteforce(x)

    def test_random_float_vectors(self):
        rng = random.Random(43)
        for _ in range(30):
            size = rng.randint(1, 6)
            idxs = rng.sample(range(1, 13), size)
            x = FiniteVector((i, rng.uniform(-10, 10)) for i in idxs)
            assert eval_tsirelson(x) == pytest.approx(
                tsirelson_bruteforce(x), rel=1e-12)


class TestStructure:
    def test_lattice_monotonicity(self):
        rng = random.Random(47)
        for _ in range(60):
            idxs = rng.sample(range(1, 13), rng.randint(1, 6))
            v = FiniteVector((i, rng.uniform(-10, 10)) for i in idxs)
            shrink = FiniteVector((i, a * rng.uniform(0.0, 1.0)) for i, a in v)
            assert (eval_tsirelson(shrink)
                    <= eval_tsirelson(v) * (1 + 1e-12))

    def test_sup_and_half_l1_bounds(self):
        rng = random.Random(53)
        for _ in range(60):
            idxs = rng.sample(range(1, 15), rng.randint(1, 6))
            v = FiniteVector((i, rng.uniform(-10, 10)) for i in idxs)
            t = eval_tsirelson(v)
            sup = max(abs(a) for _, a in v)
            l1 = math.fsum(abs(a) for _, a in v)
            assert sup <= t * (1 + 1e-12)
            assert t <= max(sup, l1 / 2) * (1 + 1e-12)

    def test_descriptor_dispatch(self):
        x = FiniteVector([(3, 1.0), (4, -1.0)])
        assert eval_norm(tsirelson_norm(), x) == 1.0
