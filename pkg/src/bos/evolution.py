"""Method-of-lines evolution of ``y_t + L y = 0`` on the truncated Fourier basis.

The truncated matrix has eigenvalues with real parts of both signs and size
about ``0.84 N^2``; the backward-heat half of them makes ``exp(-t L_N)``
grow extremely fast with ``N``. Solutions are therefore integrated until
they overflow, and the blow-up is recorded rather than treated as an error.
Norm growth of the semigroup is measured in log form so that it can be
tabulated far beyond the floating-point range.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

import numpy as np
from scipy.linalg import expm

from .factorization import block_decompose
from .operators import assemble
from .params import TWO_PI, FourierVector, GridFunction, OperatorParams, analyze, uniform_grid

SCHEMES = ("rk4", "expm", "modal")
_OVERFLOW = 1e150


@dataclass
class EvolutionTrace:
    times: np.ndarray
    l2_norms: np.ndarray
    h1_norms: np.ndarray
    means: np.ndarray
    coeff_snapshots: list = field(default_factory=list)
    growth_factor: float = 1.0
    blowup: bool = False
    last_finite_time: float = 0.0
    scheme: str = "rk4"
    label: str = ""

    @property
    def final(self) -> Optional[FourierVector]:
        return self.coeff_snapshots[-1] if self.coeff_snapshots else None

    def to_csv(self, path: Union[str, Path]) -> None:
        with open(path, "w", newline="\n", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["t", "l2", "h1", "blowup_flag"])
            for t, a, b in zip(self.times, self.l2_norms, self.h1_norms):
                w.writerow([repr(float(t)), repr(float(a)), repr(float(b)), int(self.blowup)])

    def summary(self) -> dict:
        return {
            "scheme": self.scheme,
            "label": self.label,
            "t_end": float(self.times[-1]),
            "growth_factor": self.growth_factor,
            "blowup": self.blowup,
            "last_finite_time": self.last_finite_time,
            "norm_drift": float(np.max(np.abs(self.l2_norms / self.l2_norms[0] - 1))),
            "mean_drift": float(np.max(np.abs(self.means - self.means[0]))),
        }


def _h1(c: np.ndarray) -> float:
    N = (c.size - 1) // 2
    n = np.arange(-N, N + 1)
    return math.sqrt(TWO_PI * float(np.sum((1 + n**2) * np.abs(c) ** 2)))


def _l2(c: np.ndarray) -> float:
    return math.sqrt(TWO_PI * float(np.sum(np.abs(c) ** 2)))


def _rk4_step(Lop, y, dt):
    k1 = -Lop.matvec(y)
    k2 = -Lop.matvec(y + 0.5 * dt * k1)
    k3 = -Lop.matvec(y + 0.5 * dt * k2)
    k4 = -Lop.matvec(y + dt * k3)
    return y + (dt / 6) * (k1 + 2 * k2 + 2 * k3 + k4)


def evolve(
    params: OperatorParams,
    N: int,
    y_init: FourierVector,
    dt: float = 1e-3,
    t_max: float = 10.0,
    scheme: str = "rk4",
    checkpoint: float = 0.1,
    eigenvalue: complex | None = None,
    label: str = "",
) -> EvolutionTrace:
    """Integrate ``dy/dt = -L_N y`` from ``y_init``.

    Args:
        scheme: ``rk4`` (classical Runge-Kutta with step ``dt``), ``expm``
            (exact propagator between checkpoints) or ``modal`` (exact
            ``exp(-lam t) y_init`` for an eigenvector; needs ``eigenvalue``).
        checkpoint: spacing of recorded times; rounded to a multiple of dt.

    The integration stops at the first checkpoint where the solution is not
    finite or exceeds ``1e150`` in norm; ``blowup`` is then set.
    """
    if dt <= 0 or t_max <= 0:
        raise ValueError("dt and t_max must be positive")
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")
    if y_init.N != N:
        raise ValueError(f"dimension mismatch: N={N}, initial data N={y_init.N}")
    Lop = assemble(params, N, "L")
    every = max(1, int(round(checkpoint / dt)))
    n_chk = int(math.ceil(t_max / (every * dt) - 1e-9))
    y = np.array(y_init.coeffs, dtype=complex)

    if scheme == "modal":
        if eigenvalue is None:
            raise ValueError("the modal scheme needs the eigenvalue of y_init")
        lam = complex(eigenvalue)
        res = np.linalg.norm(Lop.matvec(y) - lam * y) / np.linalg.norm(y)
        if res > 1e-8 * (1 + abs(lam)):
            raise ValueError(f"y_init is not an eigenvector for {lam} (residual {res:.2e})")
    elif scheme == "expm":
        E = expm(-(every * dt) * Lop.dense())

    times, l2s, h1s, means, snaps = [0.0], [_l2(y)], [_h1(y)], [y[N]], [FourierVector(y)]
    blow, last = False, 0.0
    for j in range(1, n_chk + 1):
        t = j * every * dt
        with np.errstate(all="ignore"):
            if scheme == "rk4":
                for _ in range(every):
                    y = _rk4_step(Lop, y, dt)
            elif scheme == "expm":
                y = E @ y
            else:
                y = np.exp(-lam * t) * np.asarray(y_init.coeffs)
        with np.errstate(over="ignore"):
            nrm = _l2(y) if np.all(np.isfinite(y)) else math.inf
        if not math.isfinite(nrm) or nrm > _OVERFLOW:
            blow = True
            break
        times.append(t)
        l2s.append(nrm)
        h1s.append(_h1(y))
        means.append(y[N])
        snaps.append(FourierVector(y))
        last = t
    l2s = np.array(l2s)
    return EvolutionTrace(
        np.array(times), l2s, np.array(h1s), np.array(means), snaps,
        float(np.max(l2s) / l2s[0]), blow, last, scheme, label,
    )


def bump(N: int, kappa: float = 10.0) -> FourierVector:
    """Truncated periodic bump ``exp(kappa (cos x - 1))``."""
    K = max(4 * N + 4, 256)
    x = uniform_grid(K)
    return analyze(GridFunction(x, np.exp(kappa * (np.cos(x) - 1))), N, alias_tol=None)


def random_init(N: int, seed: int) -> FourierVector:
    """Seeded coefficients with ``1/(1 + n^2)`` decay."""
    rng = np.random.default_rng(seed)
    n = np.arange(-N, N + 1)
    c = (rng.normal(size=n.size) + 1j * rng.normal(size=n.size)) / (1 + n**2)
    return FourierVector(c)


def eigenmode(params: OperatorParams, N: int, k: int):
    """``k``-th (1-based, by modulus, then imaginary part) eigenpair of L11, embedded with zero mean."""
    blocks = block_decompose(params, N)
    lam, V = np.linalg.eig(blocks.L11)
    order = np.lexsort((lam.imag, np.round(np.abs(lam), 10)))
    j = order[k - 1]
    c = np.zeros(2 * N + 1, dtype=complex)
    keep = np.concatenate([np.arange(N), np.arange(N + 1, 2 * N + 1)])
    v = V[:, j] / np.linalg.norm(V[:, j])
    c[keep] = v
    return complex(lam[j]), FourierVector(c)


def preset(params: OperatorParams, N: int, spec: str, seed: int = 0):
    """Initial data from ``bump``, ``mode:k`` or ``random``; returns ``(y, eigenvalue or None)``."""
    if spec == "bump":
        return bump(N), None
    if spec == "random":
        return random_init(N, seed), None
    if spec.startswith("mode:"):
        k = int(spec.split(":", 1)[1])
        if not 1 <= k <= 2 * N:
            raise ValueError(f"mode index must lie in 1..{2 * N}")
        lam, v = eigenmode(params, N, k)
        return v, lam
    raise ValueError(f"unknown preset {spec!r}")


def log_expm_norm(A: np.ndarray, t: float) -> float:
    """``log ||exp(-t A)||_2`` without overflow.

    Scales ``t A`` down by ``2^s`` so ``expm`` is accurate, then squares
    ``s`` times while renormalising and accumulating the logarithm.
    """
    if t == 0:
        return 0.0
    B = -t * A
    s = max(0, int(math.ceil(math.log2(max(np.linalg.norm(B, 1), 1e-300)))) + 1)
    E = expm(B / 2**s)
    logscale = 0.0
    for _ in range(s):
        E = E @ E
        nrm = np.linalg.norm(E, 2)
        E = E / nrm
        logscale = 2 * logscale + math.log(nrm)
    return logscale + math.log(np.linalg.norm(E, 2))


@dataclass(frozen=True)
class GrowthRow:
    N: int
    t: float
    log10_norm: float

    @property
    def norm(self) -> float:
        return 10.0**self.log10_norm if self.log10_norm < 308 else math.inf


def growth_envelope(params: OperatorParams, N_list, t_grid) -> list[GrowthRow]:
    """``||exp(-t L11_N)||_2`` (as ``log10``) for every ``N`` and ``t``."""
    N_list = [int(n) for n in N_list]
    if N_list != sorted(N_list):
        raise ValueError("N_list must be ascending")
    rows = []
    for N in N_list:
        A = block_decompose(params, N).L11
        for t in t_grid:
            rows.append(GrowthRow(N, float(t), log_expm_norm(A, float(t)) / math.log(10)))
    return rows


def envelope_monotone(rows) -> tuple[bool, dict]:
    """Max-over-t of the log-norm per N, and whether it is non-decreasing in N."""
    peak = {}
    for r in rows:
        peak[r.N] = max(peak.get(r.N, -math.inf), r.log10_norm)
    vals = [peak[n] for n in sorted(peak)]
    return bool(all(b >= a for a, b in zip(vals, vals[1:]))), peak


def rk4_order(params: OperatorParams, N: int, y0: FourierVector, dt: float = 0.005, t_end: float = 1.0) -> float:
    """Observed order from runs with ``dt``, ``dt/2`` and ``dt/4``."""
    Lop = assemble(params, N, "L")

    def run(h):
        y = np.array(y0.coeffs, dtype=complex)
        for _ in range(int(round(t_end / h))):
            y = _rk4_step(Lop, y, h)
        return y

    y1, y2, y4 = run(dt), run(dt / 2), run(dt / 4)
    return math.log2(np.linalg.norm(y1 - y2) / np.linalg.norm(y2 - y4))


def reference_error(params: OperatorParams, N: int, y0: FourierVector, dt: float = 1e-3, t_end: float = 1.0) -> float:
    """Relative L2 difference between rk4 and the matrix exponential at ``t_end``."""
    Lop = assemble(params, N, "L")
    y = np.array(y0.coeffs, dtype=complex)
    with np.errstate(all="ignore"):
        for _ in range(int(round(t_end / dt))):
            y = _rk4_step(Lop, y, dt)
        ref = expm(-t_end * Lop.dense()) @ y0.coeffs
        err = np.linalg.norm(y - ref) / np.linalg.norm(ref)
    return float(err) if np.isfinite(err) else math.inf
