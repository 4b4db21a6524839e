import numpy as np
import pytest

from mkdiv.errors import EvaluationError
from mkdiv.numerics import (
    bisect_decreasing,
    golden_section,
    midpoint_u,
    pairwise_mean,
    pairwise_sum,
)


class TestPairwise:
    def test_empty_and_singleton(self):
        assert pairwise_sum([]) == 0.0
        assert pairwise_sum([3.5]) == 3.5

    def test_mean_requires_values(self):
        with pytest.raises(EvaluationError):
            pairwise_mean([])

    def test_matches_exact_on_integers(self):
        x = np.arange(1, 101, dtype=float)
        assert pairwise_sum(x) == 5050.0


class TestMidpointGrid:
    def test_nodes(self):
        np.testing.assert_allclose(midpoint_u(4), [0.125, 0.375, 0.625, 0.875])

    def test_clipping(self):
        u = midpoint_u(4, delta=0.2)
        assert u[0] == 0.2 and u[-1] == 0.8


class TestBisect:
    def test_linear_root(self):
        root = bisect_decreasing(lambda x: 1.0 - x, 0.0, 5.0, target=0.0)
        assert root == pytest.approx(1.0, abs=1e-11)

    def test_invalid_bracket(self):
        with pytest.raises(EvaluationError):
            bisect_decreasing(lambda x: -x, 1.0, 2.0, target=0.0)


class TestGolden:
    def test_parabola(self):
        x = golden_section(lambda z: (z - 0.3) ** 2, -1.0, 1.0, width_tol=1e-10)
        assert x == pytest.approx(0.3, abs=1e-8)

    def test_v_shape_kink(self):
        x = golden_section(lambda z: abs(z - 0.25), -2.0, 2.0, width_tol=1e-10)
        assert x == pytest.approx(0.25, abs=1e-8)

    def test_flat_bottom_prefers_left(self):
        f = lambda z: max(abs(z) - 1.0, 0.0)  # flat minimum on [-1, 1]
        x = golden_section(f, -3.0, 3.0, width_tol=1e-10)
        assert x <= -0.99
