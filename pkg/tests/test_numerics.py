import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from sfwmsim.errors import BracketError, NonConvergenceError
from sfwmsim.numerics import (QuadratureSpec, RootBracket, bracket_root,
                              derivative, erf_ratio, find_root, integrate_1d,
                              integrate_2d, sinc)

# frozen oracle values (brute-force trapezoid / long bisection, see comments)
SINC2_0_40 = 1.5584510463645005          # 1e7-point trapezoid of sinc^2
WALLIS_ROOT = 2.094551481542327          # 200-step bisection of x^3-2x-5
ERF1 = 0.8427007929497149
TWO_OVER_SQRT_PI = 1.1283791670955126


class TestIntegrate1D:
    def test_sine(self):
        res = integrate_1d(math.sin, 0.0, math.pi)
        assert abs(res.value - 2.0) < 1e-10

    def test_constant_exact_any_order(self):
        for order in (2, 5, 15):
            spec = QuadratureSpec(panel_order=order)
            res = integrate_1d(lambda x: 1.0, 0.0, 1.0, spec)
            assert res.value == pytest.approx(1.0, abs=1e-14)

    def test_sinc_squared_against_trapezoid_oracle(self):
        spec = QuadratureSpec(rel_tol=1e-10)
        res = integrate_1d(lambda x: sinc(x) ** 2, 0.0, 40.0, spec,
                           vectorized=True)
        assert abs(res.value - SINC2_0_40) < 1e-8

    def test_complex_integrand(self):
        res = integrate_1d(lambda x: np.exp(1j * x), 0.0, np.pi / 2,
                           vectorized=True)
        assert res.value == pytest.approx(1.0 + 1.0j, abs=1e-10)

    def test_array_valued_integrand(self):
        # component k integrates x^k on [0,1] -> 1/(k+1)
        res = integrate_1d(lambda x: x[:, None] ** np.arange(4)[None, :],
                           0.0, 1.0, vectorized=True)
        assert np.allclose(res.value, [1, 1 / 2, 1 / 3, 1 / 4], atol=1e-12)

    def test_error_estimate_reported(self):
        res = integrate_1d(lambda x: np.exp(-x * x), -4.0, 4.0, vectorized=True)
        assert res.error_estimate >= 0.0
        assert abs(res.value - math.sqrt(math.pi) * math.erf(4.0)) \
            <= max(res.error_estimate, 1e-9)

    def test_nonconvergence_carries_best_estimate(self):
        spec = QuadratureSpec(rel_tol=1e-15, abs_tol=0.0, max_subdivisions=3)
        with pytest.raises(NonConvergenceError) as err:
            integrate_1d(lambda x: np.sin(50 * x * x), 0.0, 10.0, spec,
                         vectorized=True)
        assert err.value.best is not None
        assert math.isfinite(err.value.best)
        assert err.value.subdivisions >= 3

    def test_invalid_bounds(self):
        with pytest.raises(ValueError):
            integrate_1d(math.sin, 1.0, 1.0)

    @given(st.floats(0.3, 3.0), st.floats(0.5, 4.0))
    @settings(max_examples=20, deadline=None)
    def test_even_integrand_symmetric_interval(self, width, a):
        f = lambda x: np.exp(-a * x * x) + np.cos(x)
        full = integrate_1d(f, -width, width, vectorized=True)
        half = integrate_1d(f, 0.0, width, vectorized=True)
        tol = 1e-7 * abs(full.value) + 2 * (full.error_estimate
                                            + 2 * half.error_estimate) + 1e-12
        assert abs(full.value - 2 * half.value) <= tol


class TestIntegrate2D:
    def test_unit_square_constant(self):
        res = integrate_2d(lambda x, y: 1.0, (0, 1, 0, 1))
        assert res.value == pytest.approx(1.0, abs=1e-12)

    def test_separable_polynomial(self):
        res = integrate_2d(lambda x, y: x * y, (0, 1, 0, 1))
        assert res.value == pytest.approx(0.25, abs=1e-12)

    def test_gaussian_equals_pi(self):
        res = integrate_2d(lambda x, y: np.exp(-x * x - y * y),
                           (-6, 6, -6, 6), vectorized_inner=True)
        assert abs(res.value - math.pi) < 1e-9

    def test_transpose_symmetry(self):
        f = lambda x, y: np.exp(-(x - 0.3) ** 2 - (y - 0.3) ** 2) + x * y
        a = integrate_2d(f, (-2, 2, -2, 2), vectorized_inner=True)
        b = integrate_2d(lambda x, y: f(y, x), (-2, 2, -2, 2),
                         vectorized_inner=True)
        assert abs(a.value - b.value) <= 1e-10 * abs(a.value)

    def test_inner_axis_identified_on_failure(self):
        spec = QuadratureSpec(rel_tol=1e-15, abs_tol=0.0, max_subdivisions=3)
        with pytest.raises(NonConvergenceError) as err:
            integrate_2d(lambda x, y: np.sin(50 * y * y) + 0 * x,
                         (0, 1, 0, 10), spec, vectorized_inner=True)
        assert err.value.axis == "y"

    def test_bad_window(self):
        with pytest.raises(ValueError):
            integrate_2d(lambda x, y: 1.0, (0, 1, 1, 1))


class TestFindRoot:
    def test_linear(self):
        assert find_root(lambda x: x - 2, (0.0, 5.0), 1e-12) == \
            pytest.approx(2.0, abs=1e-10)

    def test_cosine(self):
        root = find_root(math.cos, (1.0, 2.0), 1e-12)
        assert root == pytest.approx(math.pi / 2, abs=1e-10)

    def test_cubic_against_bisection_oracle(self):
        root = find_root(lambda x: x ** 3 - 2 * x - 5, (2.0, 3.0), 1e-12)
        assert abs(root - WALLIS_ROOT) < 1e-9

    def test_invalid_bracket(self):
        with pytest.raises(BracketError):
            bracket_root(lambda x: x * x + 1.0, -1.0, 1.0)

    def test_bracket_dataclass_validation(self):
        with pytest.raises(BracketError):
            RootBracket(lo=1.0, hi=0.0, f_lo=-1.0, f_hi=1.0)

    @given(st.floats(-2.0, 2.0), st.floats(0.1, 3.0), st.floats(0.05, 2.0))
    @settings(max_examples=30, deadline=None)
    def test_root_inside_bracket(self, center, spread, scale):
        f = lambda x: scale * (x - center)
        lo, hi = center - spread, center + spread * 1.7
        root = find_root(f, (lo, hi), 1e-10)
        assert lo <= root <= hi
        assert abs(root - center) < 1e-8


class TestDerivative:
    def test_square(self):
        assert derivative(lambda x: x * x, 3.0) == \
            pytest.approx(6.0, rel=1e-7)

    def test_constant(self):
        assert derivative(lambda x: 4.5, 10.0) == pytest.approx(0.0, abs=1e-9)

    def test_exponential(self):
        assert derivative(math.exp, 1.0) == pytest.approx(math.e, rel=1e-8)

    def test_explicit_step(self):
        got = derivative(lambda x: x ** 3, 2.0, step=1e-4)
        assert got == pytest.approx(12.0, rel=1e-9)

    def test_bad_scale(self):
        with pytest.raises(ValueError):
            derivative(math.exp, 1.0, scale=-1.0)


class TestErfRatio:
    def test_at_zero(self):
        assert erf_ratio(0.0) == pytest.approx(TWO_OVER_SQRT_PI, abs=1e-12)

    def test_at_one(self):
        assert erf_ratio(1.0) == pytest.approx(ERF1, rel=1e-12)

    def test_tiny_argument(self):
        assert erf_ratio(1e-8) == pytest.approx(TWO_OVER_SQRT_PI, abs=1e-12)

    def test_switchover_continuity(self):
        below = erf_ratio(1e-4 * (1 - 1e-9))
        above = erf_ratio(1e-4 * (1 + 1e-9))
        assert abs(below - above) / above < 1e-12

    def test_monotone_decreasing_on_grid(self):
        xs = np.linspace(0.0, 3.0, 1000)
        vals = [erf_ratio(float(x)) for x in xs]
        assert all(a > b for a, b in zip(vals, vals[1:]))

    def test_negative_rejected(self):
        with pytest.raises(ValueError):
            erf_ratio(-0.1)


class TestSpecValidation:
    @pytest.mark.parametrize("kwargs", [
        {"rel_tol": 0.0}, {"rel_tol": -1e-9}, {"abs_tol": -1.0},
        {"max_subdivisions": 0}, {"panel_order": 1},
    ])
    def test_invalid_spec(self, kwargs):
        with pytest.raises(ValueError):
            QuadratureSpec(**kwargs)

    def test_sinc_removable_singularity(self):
        assert sinc(0.0) == 1.0
        assert sinc(np.array([0.0, math.pi]))[0] == 1.0
        assert sinc(math.pi) == pytest.approx(0.0, abs=1e-15)


def test_repeat_runs_bit_identical():
    f = lambda x: np.exp(-x * x) * np.cos(3 * x)
    a = integrate_1d(f, -3.0, 5.0, vectorized=True)
    b = integrate_1d(f, -3.0, 5.0, vectorized=True)
    assert a.value == b.value
    assert a.error_estimate == b.error_estimate
    assert a.subdivisions == b.subdivisions
