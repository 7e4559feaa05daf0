import math

import numpy as np
import pytest

from oracles import Y0_INTEGRAL_03_10, apply_M_pointwise

from bos.inverse import (
    InverseProfile,
    KernelExponents,
    QuadratureError,
    compute_y0,
    compute_z0,
    minv_closed_form,
    minv_fourier,
    minv_ode,
)
from bos.params import FourierVector, OperatorParams

PAIRS = [(0.0, 1.0), (0.3, 1.0), (0.2, 1.2), (0.45, 1.0)]
X = np.concatenate([-np.geomspace(3.1, 1e-3, 23), np.geomspace(1e-3, 3.1, 23)])


class TestKernelExponents:
    def test_values(self):
        k = KernelExponents.from_params(OperatorParams(0.3, 1.0))
        assert k.zero_exponent == pytest.approx(-0.3)
        assert k.pi_exponent == pytest.approx(-1.3)
        assert k.admissible

    @pytest.mark.parametrize("a,b,ok", [(0.0, 1.0, True), (0.5, 0.99, True), (0.5, 1.0, False), (0.7, 0.6, False)])
    def test_admissibility_boundary(self, a, b, ok):
        assert KernelExponents.admissible_for(a, b) is ok


class TestProfile:
    @pytest.mark.parametrize(
        "kwargs", [{"x_cut": 0.0}, {"x_cut": 0.5}, {"quad_order": 4}, {"graded_ratio": 1.0}, {"panels": 2}]
    )
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            InverseProfile(**kwargs)

    def test_refined_is_finer(self):
        p = InverseProfile().refined()
        assert p.quad_order == 24 and p.panels == 80 and not p.check


class TestClosedForm:
    @pytest.mark.parametrize("a,b", PAIRS)
    def test_inverts_M_on_smooth_functions(self, a, b):
        # u = M f for a smooth periodic f, so M^{-1} u must return f
        f = lambda x: np.exp(np.cos(x)) + 1j * np.sin(2 * x)  # noqa: E731
        fp = lambda x: -np.sin(x) * np.exp(np.cos(x)) + 2j * np.cos(2 * x)  # noqa: E731
        u = apply_M_pointwise(a, b, f, fp)
        y = minv_closed_form(OperatorParams(a, b), u, X)
        np.testing.assert_allclose(y.values, f(X), atol=1e-10)

    @pytest.mark.parametrize("a,b", PAIRS)
    def test_agrees_with_ode(self, a, b):
        u = FourierVector.from_modes({-2: 0.5, 0: 1.0, 1: 0.3 - 0.2j, 3: 0.1}, 3)
        p = OperatorParams(a, b)
        yc = minv_closed_form(p, u, X).values
        yo = minv_ode(p, u, X).values
        assert np.max(np.abs(yc - yo)) < 1e-9

    def test_self_consistency_recorded(self):
        y = minv_closed_form(OperatorParams(0.3, 1.0), lambda x: np.cos(x), X)
        assert y.meta["self_consistency"] < 1e-9

    def test_unconverged_quadrature_raises(self):
        coarse = InverseProfile(quad_order=8, panels=4, graded_ratio=0.9, check_tol=1e-15)
        with pytest.raises(QuadratureError):
            minv_closed_form(OperatorParams(0.2, 1.2), lambda x: np.exp(np.sin(3 * x)), X, coarse)

    def test_limit_values(self):
        p = OperatorParams(0.3, 1.0)
        y = minv_closed_form(p, lambda x: 1 + 0 * x, np.array([-math.pi, 0.0, math.pi]))
        np.testing.assert_allclose(y.values.real, [1 / 1.3, 1 / 0.7, 1 / 1.3], rtol=1e-12)


class TestY0:
    def test_constant_at_a0(self):
        # a = 0: y + b sin x y' = 1 is solved by y = 1
        g = compute_y0(OperatorParams(0.0, 1.0), n_points=33)
        np.testing.assert_allclose(g.values, 1.0, atol=1e-12)

    @pytest.mark.parametrize("a,b", PAIRS)
    def test_endpoints_and_evenness(self, a, b):
        m = compute_y0(OperatorParams(a, b), n_points=65).meta
        assert abs(m["near_zero"] - 1 / (1 - a)) < 1e-6
        assert abs(m["near_pi"] - 1 / (1 + a)) < 1e-6
        assert abs(m["near_minus_pi"] - 1 / (1 + a)) < 1e-6
        assert m["evenness_defect"] < 1e-8

    @pytest.mark.parametrize("a,b", PAIRS)
    def test_moment_identity(self, a, b):
        # integrating M y0 = 1 by parts: int y0 (1 - (a + b) cos x) dx = 2 pi
        m = compute_y0(OperatorParams(a, b), n_points=9).meta
        assert m["weighted_mean"] == pytest.approx(1.0, abs=1e-10)

    def test_frozen_integral(self):
        m = compute_y0(OperatorParams(0.3, 1.0), n_points=9).meta
        assert m["integral"] == pytest.approx(Y0_INTEGRAL_03_10, abs=1e-10)


class TestZ0:
    def test_cross_pipeline_identity(self):
        z = compute_z0(OperatorParams(0.3, 1.0), 2**18)
        assert abs(z.one_z0 - Y0_INTEGRAL_03_10) < 1e-8

    def test_a0_value(self):
        z = compute_z0(OperatorParams(0.0, 1.0), 256)
        assert z.one_z0 == pytest.approx(2 * math.pi, abs=1e-10)


class TestFourierRoute:
    @pytest.mark.parametrize("a,b", [(0.3, 1.0), (0.2, 1.2)])
    def test_agrees_with_ode_away_from_singularities(self, a, b):
        p = OperatorParams(a, b)
        u = FourierVector.from_modes({-1: 0.5, 0: 1.0, 2: 0.25j}, 2)
        x = X[np.abs(np.abs(X) - math.pi / 2) < math.pi / 2 - 1e-2]
        yf = minv_fourier(p, u, x, N_solve=2**16).values
        yo = minv_ode(p, u, x).values
        assert np.max(np.abs(yf - yo)) < 1e-6

    def test_callable_rhs(self):
        p = OperatorParams(0.0, 1.0)
        y = minv_fourier(p, lambda x: np.ones_like(x), np.array([0.5, 1.0]), N_solve=64)
        np.testing.assert_allclose(y.values, 1.0, atol=1e-12)

    def test_fft_interpolation_path(self):
        # many nodes times a large solve switches to FFT + local interpolation
        p = OperatorParams(0.3, 1.0)
        x = np.linspace(-3, 3, 400)
        u = FourierVector.from_modes({0: 1.0, 1: 0.5}, 1)
        a = minv_fourier(p, u, x, N_solve=2**14).values
        b = minv_fourier(p, u, x[:50], N_solve=2**14).values
        np.testing.assert_allclose(a[:50], b, atol=1e-9)
