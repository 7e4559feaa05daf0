import math

import numpy as np
import pytest
from scipy.linalg import expm

from bos.evolution import (
    SCHEMES,
    GrowthRow,
    bump,
    eigenmode,
    envelope_monotone,
    evolve,
    growth_envelope,
    log_expm_norm,
    preset,
    random_init,
    reference_error,
    rk4_order,
)
from bos.factorization import block_decompose
from bos.params import FourierVector, OperatorParams

A0 = OperatorParams(0.0, 1.0)


class TestEvolve:
    @pytest.mark.parametrize("scheme", ["rk4", "expm"])
    @pytest.mark.parametrize("a,b", [(0.0, 1.0), (0.3, 1.0), (0.2, 1.2)])
    def test_mean_conserved(self, scheme, a, b):
        tr = evolve(OperatorParams(a, b), 8, bump(8), dt=1e-3, t_max=0.5, scheme=scheme)
        assert tr.summary()["mean_drift"] <= 1e-10

    def test_schemes_agree_on_small_truncation(self):
        y0 = bump(6)
        e = evolve(A0, 6, y0, dt=1e-3, t_max=0.5, scheme="expm").final
        err = [
            (evolve(A0, 6, y0, dt=dt, t_max=0.5, scheme="rk4").final - e).l2_norm() / e.l2_norm()
            for dt in (1e-3, 1e-4)
        ]
        assert err[0] <= 1e-7
        # fourth order: a tenfold smaller step gains about four digits
        assert err[0] / err[1] > 5e3

    @pytest.mark.parametrize("k", [1, 2, 3])
    def test_eigenmode_norm_constant(self, k):
        lam, v = eigenmode(A0, 64, k)
        tr = evolve(A0, 64, v, t_max=10.0, scheme="modal", eigenvalue=lam)
        assert tr.summary()["norm_drift"] <= 1e-6
        assert tr.times[-1] == pytest.approx(10.0)

    def test_modal_rejects_non_eigenvector(self):
        with pytest.raises(ValueError):
            evolve(A0, 8, bump(8), scheme="modal", eigenvalue=1j)

    def test_blowup_is_recorded(self):
        # backward-heat modes of the truncation overflow quickly at N = 32
        tr = evolve(A0, 32, random_init(32, 0), dt=1e-3, t_max=10.0, scheme="expm")
        assert tr.blowup and tr.last_finite_time < 10.0
        assert np.all(np.isfinite(tr.l2_norms))

    @pytest.mark.parametrize(
        "kwargs", [{"dt": 0.0}, {"t_max": -1.0}, {"scheme": "euler"}]
    )
    def test_invalid(self, kwargs):
        with pytest.raises(ValueError):
            evolve(A0, 8, bump(8), **kwargs)

    def test_dimension_mismatch(self):
        with pytest.raises(ValueError):
            evolve(A0, 8, bump(6))

    def test_csv(self, tmp_path):
        tr = evolve(A0, 6, bump(6), t_max=0.3)
        tr.to_csv(tmp_path / "t.csv")
        lines = (tmp_path / "t.csv").read_text().splitlines()
        assert lines[0] == "t,l2,h1,blowup_flag" and len(lines) == 1 + tr.times.size

    def test_schemes_listed(self):
        assert set(SCHEMES) == {"rk4", "expm", "modal"}


class TestAccuracy:
    def test_rk4_order(self):
        assert 3.7 <= rk4_order(A0, 8, bump(8)) <= 4.3

    def test_reference_error(self):
        assert reference_error(A0, 8, bump(8)) <= 1e-6


class TestInitialData:
    def test_bump_is_real_even(self):
        v = bump(32)
        np.testing.assert_allclose(v.coeffs, v.coeffs[::-1], atol=1e-15)
        assert v(np.array([0.0]))[0].real == pytest.approx(1.0, abs=1e-12)

    def test_random_is_seeded(self):
        assert np.array_equal(random_init(8, 3).coeffs, random_init(8, 3).coeffs)

    def test_eigenmode_is_eigenvector(self):
        lam, v = eigenmode(A0, 16, 1)
        L11 = block_decompose(A0, 16).L11
        keep = np.r_[0:16, 17:33]
        assert np.linalg.norm(L11 @ v.coeffs[keep] - lam * v.coeffs[keep]) < 1e-10
        assert v.mean == 0

    @pytest.mark.parametrize("spec", ["mode:0", "mode:99", "spike"])
    def test_bad_preset(self, spec):
        with pytest.raises(ValueError):
            preset(A0, 8, spec)


class TestGrowth:
    def test_log_norm_matches_expm(self):
        A = block_decompose(A0, 4).L11
        for t in (0.0, 0.05, 0.3):
            ref = math.log(np.linalg.norm(expm(-t * A), 2))
            assert log_expm_norm(A, t) == pytest.approx(ref, abs=1e-9)

    def test_envelope_monotone(self):
        rows = growth_envelope(A0, [8, 16], np.linspace(0, 1, 5))
        ok, peak = envelope_monotone(rows)
        assert ok and peak[16] > peak[8]
        assert all(r.log10_norm == 0.0 for r in rows if r.t == 0)

    def test_envelope_requires_ascending(self):
        with pytest.raises(ValueError):
            growth_envelope(A0, [16, 8], [0.0])

    def test_row_norm_overflow(self):
        assert GrowthRow(8, 1.0, 400.0).norm == math.inf
        assert GrowthRow(8, 1.0, 2.0).norm == pytest.approx(100.0)

    def test_monotone_detects_decrease(self):
        rows = [GrowthRow(8, 1.0, 5.0), GrowthRow(16, 1.0, 4.0)]
        assert envelope_monotone(rows)[0] is False


def test_fourier_vector_is_returned():
    tr = evolve(A0, 4, bump(4), t_max=0.2)
    assert isinstance(tr.final, FourierVector)
