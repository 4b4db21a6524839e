import numpy as np
import pytest

from mkdiv import (
    AmbiguityError,
    BregmanScore,
    Entropic,
    Expectile,
    GPLScore,
    LambdaQuantile,
    LogNormal,
    Mean,
    MomentError,
    Normal,
    PointMass,
    Quantile,
    Shortfall,
    StepFunction,
    Uniform,
    argmin_expected_score,
    check_axioms,
    exponential_loss,
    expected_score,
    from_samples,
    linear_loss,
    quadratic,
)
from mkdiv.scores import ExpectileScore, ShortfallScore

TEST_DISTS = [
    from_samples([1.0, 2.0, 3.0]),
    from_samples(np.random.default_rng(11).normal(0.5, 1.2, 37)),
    from_samples(np.random.default_rng(12).uniform(-1, 2, 24)),
    Uniform(-0.5, 1.5),
    Normal(0.3, 0.8),
]


class TestEvaluate:
    def test_mean_empirical(self):
        assert Mean().evaluate(from_samples([1, 2, 3])) == 2.0

    def test_expectile_hand_oracle(self):
        # alpha E[(Y-z)+] = (1-alpha) E[(z-Y)+] on {0,1}:
        # 0.8*0.5*(1-z) = 0.2*0.5*z  =>  z = 0.8
        assert Expectile(0.8).evaluate(from_samples([0, 1])) == pytest.approx(
            0.8, abs=1e-9
        )

    def test_shortfall_exponential_equals_entropic(self):
        for d in TEST_DISTS:
            s = Shortfall(exponential_loss(1.0)).evaluate(d)
            e = Entropic(1.0).evaluate(d)
            assert s == pytest.approx(e, abs=1e-9)

    def test_shortfall_linear_is_the_mean(self):
        d = from_samples([0.0, 1.0, 5.0])
        assert Shortfall(linear_loss()).evaluate(d) == pytest.approx(2.0, abs=1e-9)

    def test_lambda_constant_reduces_to_median(self):
        t = LambdaQuantile(StepFunction([], [0.5]))
        assert t.evaluate(from_samples([1, 2, 3])) == 2.0

    def test_lambda_continuous_constant_is_upper_quantile(self):
        t = LambdaQuantile(StepFunction([], [0.5]))
        assert t.evaluate(Uniform(0, 1)) == pytest.approx(0.5, abs=1e-12)

    def test_lambda_two_step_crossing_after_breakpoint(self):
        # threshold steps 0.3 -> 0.6 at 0.2; F of U(0,1) is below 0.3 on the
        # whole first segment, so the unique crossing is at 0.6
        t = LambdaQuantile(StepFunction([0.2], [0.3, 0.6]))
        assert t.evaluate(Uniform(0, 1)) == pytest.approx(0.6, abs=1e-12)

    def test_lambda_two_step_crossing_before_breakpoint(self):
        # crossing at 0.3; at the breakpoint F(0.35) = 0.35 stays above the
        # new level 0.34, so the crossing is unique
        t = LambdaQuantile(StepFunction([0.35], [0.3, 0.34]))
        assert t.evaluate(Uniform(0, 1)) == pytest.approx(0.3, abs=1e-12)

    def test_lambda_dip_after_breakpoint_is_ambiguous(self):
        # threshold steps 0.3 -> 0.6 at 0.5: F of U(0,1) crosses at 0.3,
        # dips below 0.6 on [0.5, 0.6), and crosses again
        t = LambdaQuantile(StepFunction([0.5], [0.3, 0.6]))
        with pytest.raises(AmbiguityError):
            t.evaluate(Uniform(0, 1))

    def test_lambda_cross_path_consistency(self):
        # the empirical scan on a dense grid sample converges to the
        # continuous evaluation at rate 1/m
        from mkdiv import quantile_grid

        t = LambdaQuantile(StepFunction([0.2], [0.3, 0.6]))
        cont = t.evaluate(Uniform(0, 1))
        dense = quantile_grid(Uniform(0, 1), m=4001, delta=0.0).nodes
        emp = t.evaluate(from_samples(dense))
        assert abs(cont - emp) <= 1.0 / 4001 + 1e-12

    def test_entropic_point_mass(self):
        assert Entropic(2.0).evaluate(PointMass(3.5)) == 3.5

    def test_quantile_delegates(self):
        assert Quantile(0.5).evaluate(from_samples([1, 2, 3])) == 2.0

    def test_expectile_half_is_the_mean_parametric(self):
        # the 0.5-expectile coincides with the mean; grid quadrature keeps
        # the symmetric case to ~1e-10
        assert Expectile(0.5).evaluate(Normal(2.0, 3.0)) == pytest.approx(
            2.0, abs=1e-9
        )


class TestEvaluateErrors:
    def test_ambiguous_crossings(self):
        # F of {0,1} sits at 0.5 on [0,1); a threshold stepping 0.45 -> 0.55
        # at 0.5 crosses at 0, dips back below, and crosses again at 1
        t = LambdaQuantile(StepFunction([0.5], [0.45, 0.55]))
        with pytest.raises(AmbiguityError):
            t.evaluate(from_samples([0.0, 1.0]))

    def test_moment_error_on_overflowing_tail(self):
        t = Entropic(1.0)
        with pytest.raises(MomentError):
            t.evaluate(LogNormal(0.0, 4.0))


class TestExpectileFOC:
    def test_residual_at_solution(self):
        rng = np.random.default_rng(21)
        for _ in range(20):
            sample = rng.normal(0, 2, int(rng.integers(5, 40)))
            d = from_samples(sample)
            t = Expectile(float(rng.uniform(0.1, 0.9)))
            z = t.evaluate(d)
            scale = 1.0 + np.mean(np.abs(sample))
            assert abs(t.residual(d.values, z)) <= 1e-10 * scale

    def test_shortfall_root_inside_sample_range(self):
        rng = np.random.default_rng(22)
        for loss in (linear_loss(), exponential_loss(0.7)):
            for _ in range(10):
                sample = rng.normal(0, 1, 19)
                v = Shortfall(loss).evaluate(from_samples(sample))
                assert sample.min() - 1e-9 <= v <= sample.max() + 1e-9


class TestArgmin:
    def test_pinball_median(self):
        z = argmin_expected_score(GPLScore(0.5), from_samples([1, 2, 3]), 0.0, 4.0)
        assert z == pytest.approx(2.0, abs=1e-2)  # within a grid step

    def test_squared_loss_mean(self):
        z = argmin_expected_score(
            BregmanScore(quadratic()), from_samples([0, 1]), -1.0, 2.0
        )
        assert z == pytest.approx(0.5, abs=1e-6)

    def test_expectile_score_argmin(self):
        z = argmin_expected_score(
            ExpectileScore(0.8, quadratic()), from_samples([0, 1]), 0.0, 1.0
        )
        assert z == pytest.approx(0.8, abs=1e-6)

    def test_ties_break_to_smallest(self):
        # {0,1} with the 0.5-pinball has a flat minimiser interval [0, 1]
        z = argmin_expected_score(GPLScore(0.5), from_samples([0.0, 1.0]), -1.0, 2.0)
        assert z <= 0.01

    def test_all_overflow_grid_raises_evaluation_error(self):
        from mkdiv import EntropicScore, EvaluationError, quadratic

        s = EntropicScore(1.0, quadratic())
        d = from_samples([900.0, 950.0])
        with pytest.raises(EvaluationError):
            argmin_expected_score(s, d, 800.0, 1000.0, steps=11)

    def test_expected_score_scalar_matches_rows(self):
        d = from_samples([0.0, 0.7, 1.3])
        s = ShortfallScore(exponential_loss(1.0))
        zs = np.array([-0.3, 0.2, 0.9])
        rows = expected_score(s, d, zs)
        for z, row in zip(zs, rows):
            assert expected_score(s, d, float(z)) == row


class TestAxioms:
    def _pairs(self, seed=3, pairs=50, size=40):
        rng = np.random.default_rng(seed)
        return [
            (rng.normal(0, 1, size), rng.normal(0, 1, size)) for _ in range(pairs)
        ]

    def test_mean_trivial_transformations(self):
        report = check_axioms(Mean(), self._pairs(pairs=5), shifts=(0.0,), scales=(1.0,))
        assert report.all_passed

    def test_expectile_07_coherent(self):
        report = check_axioms(Expectile(0.7), self._pairs())
        assert report.all_passed, report.to_json_dict()

    def test_expectile_03_convexity_violation_with_witness(self):
        report = check_axioms(Expectile(0.3), self._pairs())
        conv = report["convexity"]
        assert not conv.passed
        assert conv.witness is not None
        assert conv.max_violation > 1e-9
        # the other coherence axioms hold for any expectile level
        assert report["translation_invariance"].passed
        assert report["positive_homogeneity"].passed
        assert report["monotonicity"].passed

    def test_shortfall_convex_loss_is_convex(self):
        report = check_axioms(Shortfall(exponential_loss(1.0)), self._pairs())
        assert report["convexity"].passed
        assert report["translation_invariance"].passed
        assert report["monotonicity"].passed
        # the entropic premium is not positively homogeneous
        assert not report["positive_homogeneity"].passed
