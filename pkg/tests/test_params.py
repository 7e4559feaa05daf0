import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bos.params import (
    AliasingError,
    FourierVector,
    GridError,
    GridFunction,
    ParamsError,
    analyze,
    as_callable,
    l2_quadrature_norm,
    synthesize,
    uniform_grid,
    validate_params,
)


class TestValidateParams:
    @pytest.mark.parametrize("a,b", [(0.0, 1.0), (0.3, 1.0), (0.45, 1.0), (0.2, 1.2), (0.0, 1.999), (0.99, 0.01)])
    def test_accepts_regime(self, a, b):
        p = validate_params(a, b)
        assert (p.a, p.b) == (a, b)
        assert p.margin > 0

    @pytest.mark.parametrize(
        "a,b,code",
        [
            (0.5, 1.5, "regime-violation"),
            (0.5, 1.0, "regime-violation"),
            (0.35, 1.3, "regime-violation"),
            (-0.1, 1.0, "negative-a"),
            (0.3, 0.0, "nonpositive-b"),
            (0.3, -2.0, "nonpositive-b"),
            (math.nan, 1.0, "non-finite"),
            (0.0, math.inf, "non-finite"),
        ],
    )
    def test_rejects_with_code(self, a, b, code):
        with pytest.raises(ParamsError) as info:
            validate_params(a, b)
        assert info.value.code == code

    def test_degenerate_drainage_flag(self):
        assert validate_params(0.0, 1.0).as_dict()["regime"] == "degenerate-drainage"
        assert validate_params(0.1, 1.0).as_dict()["regime"] == "standard"

    @given(i=st.integers(0, 20), j=st.integers(1, 44))
    def test_grid_boundary_is_exact(self, i, j):
        a, b = i / 20, j / 20
        try:
            validate_params(a, b)
            accepted = True
        except ParamsError:
            accepted = False
        assert accepted == (2 * i + j < 40)


class TestFourierVector:
    def test_layout_and_access(self):
        v = FourierVector.from_modes({-2: 1.0, 0: 3.0, 1: 2j}, 3)
        assert v.N == 3 and v.coeffs.size == 7
        assert v[-2] == 1.0 and v[1] == 2j and v.mean == 3.0
        assert v[5] == 0

    def test_even_length_rejected(self):
        with pytest.raises(ValueError):
            FourierVector(np.zeros(4))

    def test_mode_outside_truncation(self):
        with pytest.raises(ValueError):
            FourierVector.from_modes({4: 1.0}, 3)

    def test_norm_of_constant(self):
        # || 1 ||^2 = 2 pi
        assert FourierVector.from_modes({0: 1.0}, 2).l2_norm() == pytest.approx(math.sqrt(2 * math.pi))

    def test_immutable(self):
        v = FourierVector.zeros(2)
        with pytest.raises(ValueError):
            v.coeffs[0] = 1.0

    def test_inner_matches_quadrature(self):
        rng = np.random.default_rng(3)
        u = FourierVector(rng.normal(size=9) + 1j * rng.normal(size=9))
        w = FourierVector(rng.normal(size=5) + 1j * rng.normal(size=5))
        x = uniform_grid(64)
        ref = 2 * math.pi / 64 * np.sum(u(x) * np.conj(w(x)))
        assert u.inner(w) == pytest.approx(ref, abs=1e-12)

    def test_derivative(self):
        v = FourierVector.from_modes({-1: 0.5, 1: 0.5}, 2)  # cos x
        x = np.linspace(-3, 3, 7)
        np.testing.assert_allclose(v.derivative()(x), -np.sin(x), atol=1e-14)

    @settings(max_examples=30, deadline=None)
    @given(
        c1=st.lists(st.complex_numbers(max_magnitude=10, allow_nan=False), min_size=5, max_size=5),
        c2=st.lists(st.complex_numbers(max_magnitude=10, allow_nan=False), min_size=5, max_size=5),
        s=st.complex_numbers(max_magnitude=10, allow_nan=False),
    )
    def test_inner_is_sesquilinear(self, c1, c2, s):
        u, w = FourierVector(np.array(c1)), FourierVector(np.array(c2))
        assert (s * u).inner(w) == pytest.approx(s * u.inner(w), abs=1e-9)
        assert u.inner(s * w) == pytest.approx(np.conj(s) * u.inner(w), abs=1e-9)
        assert u.inner(w) == pytest.approx(np.conj(w.inner(u)), abs=1e-9)

    def test_resize_roundtrip(self):
        v = FourierVector(np.arange(5, dtype=complex))
        assert np.array_equal(v.resized(6).resized(2).coeffs, v.coeffs)


class TestGrids:
    def test_uniform_grid(self):
        x = uniform_grid(8)
        assert x[0] == -math.pi and x.size == 8
        assert x[-1] == pytest.approx(math.pi - 2 * math.pi / 8)

    @pytest.mark.parametrize("K", [0, -3])
    def test_empty_grid(self, K):
        with pytest.raises(GridError):
            uniform_grid(K)

    @pytest.mark.parametrize("K", [9, 10, 33])
    def test_analyze_synthesize_roundtrip(self, K):
        rng = np.random.default_rng(K)
        v = FourierVector(rng.normal(size=9) + 1j * rng.normal(size=9))
        back = analyze(synthesize(v, uniform_grid(K)), 4)
        np.testing.assert_allclose(back.coeffs, v.coeffs, atol=1e-13)

    def test_too_coarse(self):
        with pytest.raises(GridError):
            analyze(GridFunction(uniform_grid(6), np.ones(6)), 4)

    def test_nonuniform_rejected(self):
        x = np.linspace(-3, 3, 16)
        with pytest.raises(GridError):
            analyze(GridFunction(x, np.ones(16)), 2)

    def test_aliasing_detected(self):
        x = uniform_grid(64)
        f = GridFunction(x, np.cos(10 * x))
        with pytest.raises(AliasingError):
            analyze(f, 4)
        assert np.allclose(analyze(f, 4, alias_tol=None).coeffs, 0)

    def test_quadrature_norm(self):
        x = uniform_grid(32)
        assert l2_quadrature_norm(GridFunction(x, np.sin(x))) == pytest.approx(math.sqrt(math.pi))

    def test_csv_roundtrip(self, tmp_path):
        x = uniform_grid(5)
        g = GridFunction(x, np.exp(1j * x))
        g.to_csv(tmp_path / "g.csv")
        h = GridFunction.from_csv(tmp_path / "g.csv")
        assert np.array_equal(h.nodes, g.nodes) and np.array_equal(h.values, g.values)

    def test_bad_nodes(self):
        with pytest.raises(GridError):
            GridFunction(np.array([0.0, 0.0]), np.zeros(2))
        with pytest.raises(GridError):
            GridFunction(np.array([0.0, 4.0]), np.zeros(2))

    def test_as_callable_sampled(self):
        x = uniform_grid(17)
        f = as_callable(GridFunction(x, np.cos(2 * x)))
        assert f(np.array([0.3]))[0] == pytest.approx(math.cos(0.6), abs=1e-13)
