import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from latfact import (DimensionMismatchError, DualVector, ExponentTriple,
                     MeasureSpace, NotPConvexError, WeightedLebesgue,
                     kothe_dual_norm, p_convexity_estimate, pth_power_norm,
                     pth_power_space, sample_positive_dual_ball)
from conftest import make_space


class TestMeasureSpace:
    def test_rejects_nonpositive_weights(self):
        with pytest.raises(ValueError):
            MeasureSpace(weights=[1.0, 0.0])
        with pytest.raises(ValueError):
            MeasureSpace(weights=[])

    def test_integrate(self):
        ms = MeasureSpace(weights=[2.0, 1.0])
        assert ms.integrate([1.0, 3.0]) == 5.0

    def test_equality_and_immutability(self):
        a = MeasureSpace(weights=[1.0, 2.0])
        b = MeasureSpace(weights=[1.0, 2.0])
        assert a == b and hash(a) == hash(b)
        with pytest.raises(ValueError):
            a.weights[0] = 3.0


class TestLebesgueNorm:
    def test_example_values(self):
        assert make_space([1, 1], 2).norm([3, 4]) == pytest.approx(5.0, abs=1e-12)
        assert make_space([2, 1], 1).norm([1, 1]) == pytest.approx(3.0, abs=1e-12)
        assert make_space([1, 1, 1], 3).norm([0, 0, 0]) == 0.0

    def test_dimension_and_finiteness_errors(self):
        X = make_space([1, 1], 2)
        with pytest.raises(DimensionMismatchError):
            X.norm([1.0, 2.0, 3.0])
        with pytest.raises(ValueError):
            X.norm([np.inf, 0.0])

    def test_large_exponent_is_stable(self):
        X = make_space([1, 1], 200.0)
        assert X.norm([2.0, 2.0]) == pytest.approx(2.0 * 2.0 ** (1 / 200.0))

    @pytest.mark.parametrize("s,weights", [(1.0, [1, 1, 1]), (2.0, [0.5, 2, 1]),
                                           (3.5, [1, 1, 1, 1])])
    def test_norm_axioms_on_random_triples(self, s, weights):
        X = make_space(weights, s)
        rng = np.random.default_rng(7)
        for _ in range(1000):
            f = rng.normal(size=X.n)
            g = rng.normal(size=X.n)
            a = rng.normal()
            nf, ng = X.norm(f), X.norm(g)
            assert X.norm(f + g) <= nf + ng + 1e-10 * (nf + ng)
            assert X.norm(a * f) == pytest.approx(abs(a) * nf, rel=1e-10, abs=1e-12)
            smaller = np.sign(g) * np.minimum(np.abs(f), np.abs(g))
            assert X.norm(smaller) <= ng * (1 + 1e-10)

    def test_norm_rows_matches_scalar(self):
        X = make_space([0.5, 1.5, 1.0], 2.5)
        rng = np.random.default_rng(3)
        F = rng.normal(size=(20, 3))
        np.testing.assert_allclose(X.norm_rows(F),
                                   [X.norm(f) for f in F], rtol=1e-13)


class TestPthPower:
    def test_example_values(self):
        X = make_space([1, 1], 2)
        assert pth_power_norm(X, 2.0, [1, 3]) == pytest.approx(4.0, abs=1e-12)
        assert pth_power_norm(X, 2.0, [0, 0]) == 0.0
        X4 = make_space([1, 1], 4)
        assert pth_power_norm(X4, 2.0, [1, 1]) == pytest.approx(math.sqrt(2))

    def test_closed_form_matches_definition(self):
        X = make_space([0.7, 1.3, 1.0], 3.0)
        rng = np.random.default_rng(11)
        for _ in range(50):
            f = rng.normal(size=3)
            direct = X.norm(np.abs(f) ** (1 / 1.5)) ** 1.5
            assert pth_power_norm(X, 1.5, f) == pytest.approx(direct, rel=1e-12)

    def test_rejects_p_above_s(self):
        X = make_space([1, 1], 2)
        with pytest.raises(NotPConvexError):
            pth_power_norm(X, 3.0, [1, 1])
        with pytest.raises(NotPConvexError):
            pth_power_space(X, 2.5)

    def test_is_a_norm_when_one_convex(self):
        # triangle inequality for the p-th power functional when s >= p
        X = make_space([1, 2, 0.5], 3.0)
        rng = np.random.default_rng(13)
        for _ in range(500):
            f = rng.normal(size=3)
            g = rng.normal(size=3)
            lhs = pth_power_norm(X, 2.0, f + g)
            rhs = pth_power_norm(X, 2.0, f) + pth_power_norm(X, 2.0, g)
            assert lhs <= rhs * (1 + 1e-10)


class TestKotheDual:
    def test_example_values(self):
        assert kothe_dual_norm(make_space([1, 1], 1), [2, 3]) == pytest.approx(3.0)
        assert kothe_dual_norm(make_space([1, 1], 2), [3, 4]) == pytest.approx(5.0)
        assert kothe_dual_norm(make_space([1, 1], 2), [0, 0]) == 0.0

    def test_closed_vs_numeric_agreement(self):
        rng = np.random.default_rng(17)
        for s in (1.0, 1.5, 2.0, 3.0):
            for n in (2, 4, 6):
                X = make_space(rng.uniform(0.5, 2.0, size=n), s)
                for _ in range(5):
                    h = np.abs(rng.normal(size=n))
                    closed = kothe_dual_norm(X, h, method="closed")
                    numeric = kothe_dual_norm(X, h, method="numeric")
                    assert numeric == pytest.approx(closed, rel=1e-7)

    def test_holder_inequality(self):
        rng = np.random.default_rng(19)
        for s in (1.0, 2.0, 2.7):
            X = make_space(rng.uniform(0.5, 2.0, size=4), s)
            for _ in range(300):
                f = rng.normal(size=4)
                h = rng.normal(size=4)
                pairing = float(np.sum(np.abs(h * f) * X.space.weights))
                bound = X.norm(f) * kothe_dual_norm(X, h)
                assert pairing <= bound * (1 + 1e-10) + 1e-12


class TestExponentTriple:
    def test_conjugacy(self):
        e = ExponentTriple(p=1.0, q=2.0)
        assert e.r == pytest.approx(2.0)
        assert ExponentTriple(p=2.0, q=3.0).r == pytest.approx(6.0)

    def test_extreme_marker(self):
        assert ExponentTriple(p=2.0, q=2.0).is_extreme
        assert not ExponentTriple(p=2.0, q=2.5).is_extreme

    @given(p=st.floats(1.0, 4.0), bump=st.floats(0.01, 4.0))
    @settings(max_examples=200, deadline=None)
    def test_conjugate_identity_on_random_exponents(self, p, bump):
        e = ExponentTriple(p=p, q=p + bump)
        assert abs(1.0 / e.p - 1.0 / e.r - 1.0 / e.q) <= 1e-12

    def test_rejects_bad_exponents(self):
        with pytest.raises(ValueError):
            ExponentTriple(p=0.5, q=2.0)
        with pytest.raises(ValueError):
            ExponentTriple(p=3.0, q=2.0)
        with pytest.raises(ValueError):
            ExponentTriple(p=1.0, q=math.inf)


class TestDualBallSampling:
    def test_extreme_patterns_on_sup_ball(self):
        X = make_space([1, 1], 1)
        got = sample_positive_dual_ball(X, 1.0, strategy="extreme", count=16)
        vectors = {tuple(d.h) for d in got}
        assert {(1.0, 1.0), (1.0, 0.0), (0.0, 1.0), (0.0, 0.0)} <= vectors

    def test_count_zero_gives_empty(self, lebesgue2):
        assert sample_positive_dual_ball(lebesgue2, 2.0, count=0) == []

    def test_all_samples_certified(self, lebesgue2):
        for d in sample_positive_dual_ball(lebesgue2, 2.0, strategy="mixed",
                                           count=40, seed=5):
            assert d.certified_norm <= 1.0 + 1e-9
            assert np.all(d.h >= 0)

    def test_deterministic_given_seed(self, lebesgue2):
        a = sample_positive_dual_ball(lebesgue2, 2.0, count=20, seed=9)
        b = sample_positive_dual_ball(lebesgue2, 2.0, count=20, seed=9)
        assert all(x == y for x, y in zip(a, b))

    def test_unknown_strategy_rejected(self, lebesgue2):
        with pytest.raises(ValueError):
            sample_positive_dual_ball(lebesgue2, 2.0, strategy="magic")


class TestPConvexityEstimate:
    def test_equality_cases(self):
        X = make_space([1, 1, 1], 2)
        est = p_convexity_estimate(X, 2.0, budget=12, seed=0)
        assert est.value == pytest.approx(1.0, abs=1e-9)
        est1 = p_convexity_estimate(make_space([1, 1], 1), 1.0, budget=8, seed=0)
        assert est1.value == pytest.approx(1.0, abs=1e-9)

    def test_l1_two_convexity_reaches_oracle_value(self):
        # exhaustive small-grid oracle over two-element families on 2 atoms
        X = make_space([1, 1], 1)
        grid = np.linspace(-1.0, 1.0, 7)
        best = 0.0
        for a in grid:
            for b in grid:
                for c in grid:
                    for d in grid:
                        F = np.array([[a, b], [c, d]])
                        den = math.sqrt(X.norm(F[0]) ** 2 + X.norm(F[1]) ** 2)
                        if den == 0:
                            continue
                        num = X.norm(np.sqrt((F ** 2).sum(axis=0)))
                        best = max(best, num / den)
        assert best == pytest.approx(math.sqrt(2), rel=1e-12)
        est = p_convexity_estimate(X, 2.0, budget=24, seed=1)
        assert est.value >= best - 1e-6

    def test_budget_monotone_and_deterministic(self):
        X = make_space([1.0, 0.5, 2.0], 1)
        small = p_convexity_estimate(X, 2.0, budget=4, seed=3)
        big = p_convexity_estimate(X, 2.0, budget=12, seed=3)
        again = p_convexity_estimate(X, 2.0, budget=12, seed=3)
        assert small.value <= big.value
        assert big.value == again.value

    def test_witness_replays_value(self):
        X = make_space([1, 1], 1)
        est = p_convexity_estimate(X, 2.0, budget=12, seed=2)
        F = est.witness_matrix
        num = X.norm(np.sqrt((F ** 2).sum(axis=0)))
        den = math.sqrt(float(np.sum(X.norm_rows(F) ** 2)))
        assert est.value == pytest.approx(num / den, rel=1e-9)


class TestDualVector:
    def test_rejects_negative_entries(self):
        with pytest.raises(ValueError):
            DualVector(h=np.array([-0.1, 0.2]), certified_norm=0.5)
