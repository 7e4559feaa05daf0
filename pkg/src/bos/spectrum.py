"""Eigenvalues of L: Galerkin truncations and the shooting characteristic function.

The truncated Fourier block L11 has, besides approximations of the true
eigenvalues, a family of spurious eigenvalues with real parts growing like
``N^2``, and its low eigenvalues converge slowly. The trusted spectrum is
therefore computed from the shooting function ``F`` of :mod:`bos.shooting`:

1. seeds come from a sign-change scan of ``Im F(i mu)`` along the imaginary
   axis and from the eigenvalues of the projected compact resolvent;
2. every seed is moved off the imaginary axis and polished by an
   unconstrained complex secant iteration, so real parts are computed, not
   imposed;
3. the number of zeros inside a circle is counted with the argument
   principle and compared with the roots found (completeness and
   simplicity);
4. each root is recomputed with half the series order and a different
   matching point; the change is the reported stability.

Galerkin eigenvalues are kept in the report for comparison.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

import numpy as np
from scipy.optimize import brentq

from .factorization import block_decompose, l11_inverse_composed_matrix
from .operators import assemble
from .params import OperatorParams, analyze, GridFunction, uniform_grid
from .shooting import Shooter, secant, winding_number_quarter


class SpectrumError(ArithmeticError):
    """Root finding or eigen-decomposition failed."""


def sort_spectrum(lam: np.ndarray) -> np.ndarray:
    """Order by imaginary part, ties broken by real part."""
    lam = np.asarray(lam, dtype=complex)
    return lam[np.lexsort((np.round(lam.real, 12), np.round(lam.imag, 12)))]


def galerkin_spectrum(params: OperatorParams, N: int, method: str = "direct", N_inner: int | None = None) -> np.ndarray:
    """Eigenvalues of a Galerkin truncation on modes ``0 < |n| <= N``.

    ``direct`` diagonalises the truncated L11 block. ``compact`` inverts the
    eigenvalues of ``P_N L11^{-1} P_N``, with the inverse applied on a
    much larger inner truncation.
    """
    if method == "direct":
        return np.linalg.eigvals(block_decompose(params, N).L11)
    if method == "compact":
        Nb = N_inner or max(2**14, 64 * N)
        mu = np.linalg.eigvals(l11_inverse_composed_matrix(params, N, Nb))
        mu = mu[np.abs(mu) > 1e-14]
        return 1 / mu
    raise ValueError(f"unknown Galerkin method {method!r}")


def nearest_distance(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """For each entry of ``a``, distance to the nearest entry of ``b``."""
    if len(b) == 0:
        return np.full(len(a), np.inf)
    return np.min(np.abs(np.asarray(a)[:, None] - np.asarray(b)[None, :]), axis=1)


@dataclass
class SpectrumReport:
    params: OperatorParams
    N: int
    k: int
    eigenvalues: np.ndarray
    stability: np.ndarray
    converged: np.ndarray
    residuals: np.ndarray
    max_real_part_ratio: float
    min_gap: float
    tolerance: float
    radius: float
    zero_count: float
    complete: bool
    symmetry_defect: Optional[float] = None
    j_defect: Optional[float] = None
    galerkin_eigenvalues: np.ndarray = field(default_factory=lambda: np.zeros(0, complex))
    galerkin_stability: np.ndarray = field(default_factory=lambda: np.zeros(0))
    method: str = "shooting"

    @property
    def n_converged(self) -> int:
        return int(np.sum(self.converged))

    def to_csv(self, path: Union[str, Path]) -> None:
        with open(path, "w", newline="\n", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["re", "im", "converged", "stability"])
            for lam, ok, st in zip(self.eigenvalues, self.converged, self.stability):
                w.writerow([repr(float(lam.real)), repr(float(lam.imag)), int(bool(ok)), repr(float(st))])

    def summary(self) -> dict:
        g_small = self.galerkin_eigenvalues[np.argsort(np.abs(self.galerkin_eigenvalues))][: self.k]
        return {
            "method": self.method,
            "N": self.N,
            "k": self.k,
            "eigenvalues": [[float(z.real), float(z.imag)] for z in self.eigenvalues],
            "stability": [float(s) for s in self.stability],
            "converged": [bool(c) for c in self.converged],
            "n_converged": self.n_converged,
            "max_real_part_ratio": self.max_real_part_ratio,
            "min_gap": self.min_gap,
            "tolerance": self.tolerance,
            "count_radius": self.radius,
            "zero_count_in_radius": self.zero_count,
            "complete": self.complete,
            "symmetry_defect": self.symmetry_defect,
            "j_defect": self.j_defect,
            "galerkin_smallest": [[float(z.real), float(z.imag)] for z in sort_spectrum(g_small)],
            "galerkin_max_abs_real": float(np.max(np.abs(self.galerkin_eigenvalues.real))) if self.galerkin_eigenvalues.size else 0.0,
        }


def _scan_imaginary_axis(shooter: Shooter, n_pos: int, step: float, mu_max: float) -> list[float]:
    """Positive ``mu`` with ``Im F(i mu) = 0``, up to ``n_pos`` of them."""
    g = lambda mu: shooter.F(1j * mu).imag  # noqa: E731
    roots = []
    mu0 = step / 4
    g0 = g(mu0)
    while len(roots) < n_pos and mu0 < mu_max:
        mu1 = mu0 + step
        g1 = g(mu1)
        if g0 == 0:
            roots.append(mu0)
        elif g0 * g1 < 0:
            roots.append(brentq(g, mu0, mu1, xtol=1e-12, rtol=1e-14))
        mu0, g0 = mu1, g1
    return roots


def _polish(shooter: Shooter, seed: complex, offset: float = 1e-3, maxiter: int = 40):
    """Secant on F from two seeds displaced off the imaginary axis.

    Returns ``(root, |F(root)|)`` or ``None`` when the iteration does not
    settle or the residual is not small relative to ``|F|`` at the seeds.
    """
    scale = 1.0 + abs(seed)
    z0 = seed + offset * scale * complex(1.0, 0.5)
    z1 = seed - offset * scale * complex(0.7, -0.3)
    ref = max(abs(shooter.F(z0)), abs(shooter.F(z1)))
    r, fr, it = secant(shooter.F, z0, z1, maxiter=maxiter)
    if it >= maxiter or not np.isfinite(r) or fr > 1e-8 * max(ref, 1e-300):
        return None
    return r, fr


def _dedupe(pairs, tol):
    out = []
    for r, f in pairs:
        if all(abs(r - s) > tol * (1 + abs(r)) for s, _ in out):
            out.append((r, f))
    return out


def find_roots(
    params: OperatorParams,
    count: int,
    order: int = 64,
    h: float = 0.5,
    step: float = 0.25,
    mu_max: float = 400.0,
    seeds=(),
):
    """Nonzero roots of ``F`` from the imaginary-axis scan plus optional seeds.

    The scan collects at least ``count`` roots when they exist. Extra seeds
    (for instance Galerkin eigenvalues) are polished only if they are not
    already near a scanned root. Returns ``(roots, residuals)`` sorted by
    modulus.
    """
    sh = Shooter(params, order=order, h=h)
    mus = _scan_imaginary_axis(sh, count // 2 + 2, step, mu_max)
    cand = [1j * m for m in mus] + [-1j * m for m in mus]
    cand += [
        complex(z)
        for z in seeds
        if all(abs(z - 1j * m) > 0.05 * (1 + m) and abs(z + 1j * m) > 0.05 * (1 + m) for m in mus)
    ]
    found = []
    for s in cand:
        out = _polish(sh, s)
        if out is not None and abs(out[0]) > 1e-6:
            found.append(out)
    keep = _dedupe(sorted(found, key=lambda t: abs(t[0])), 1e-8)
    return np.array([r for r, _ in keep], dtype=complex), np.array([f for _, f in keep])


def _count_check(params, roots, k, order):
    mods = np.abs(roots)
    # roots come in pairs of equal modulus; keep the circle off every root
    outer = mods[mods > mods[k - 1] * (1 + 1e-6)]
    if outer.size == 0:
        raise SpectrumError("no root beyond the k-th one to bound the counting circle")
    radius = 0.5 * (mods[k - 1] + outer[0])
    zc = winding_number_quarter(Shooter(params, order=order).F, float(radius))
    inside = int(np.sum(mods < radius))
    # the zero at the origin is built into F
    return float(radius), zc, abs(zc - (inside + 1)) < 0.25


def compute_spectrum(
    params: OperatorParams,
    N: int = 64,
    k: int = 10,
    tol: float = 1e-6,
    with_galerkin: bool = True,
    with_symmetry: bool = True,
) -> SpectrumReport:
    """Trusted eigenvalues of L with stability, completeness and symmetry data.

    Args:
        params: operator parameters.
        N: resolution; the Frobenius series order, and the Galerkin size for
            the comparison spectra.
        k: number of eigenvalues (smallest modulus) to report.
        tol: convergence tolerance, applied as ``tol * (1 + |lam|)``.
        with_galerkin: also report the truncated-matrix eigenvalues.
        with_symmetry: at ``a = 0``, run the eigenfunction and J checks.

    Raises:
        SpectrumError: fewer than ``k + 1`` roots could be located.
    """
    if k < 1 or k > N // 2:
        raise ValueError(f"k must satisfy 1 <= k <= N/2, got k={k}, N={N}")

    gal = np.zeros(0, complex)
    gal_stab = np.zeros(0)
    if with_galerkin:
        gal = sort_spectrum(galerkin_spectrum(params, N))
        gal_stab = nearest_distance(gal, galerkin_spectrum(params, N // 2))

    roots, res = find_roots(params, k + 2, order=N)
    if roots.size < k + 1:
        raise SpectrumError(f"found {roots.size} roots, need {k + 1} to bound the counting circle")
    radius, zc, complete = _count_check(params, roots, k, N)
    if not complete:
        # off-axis roots may exist: seed from the compact-resolvent Galerkin spectrum
        seeds = [z for z in galerkin_spectrum(params, N, "compact") if abs(z) < 1.5 * radius]
        roots, res = find_roots(params, k + 2, order=N, seeds=seeds)
        radius, zc, complete = _count_check(params, roots, k, N)

    trusted = roots[:k]
    trusted_res = res[:k]
    # independent recomputation: half the series order and another matching point
    alt_sh = Shooter(params, order=max(16, N // 2), h=0.35)
    alt = []
    for z in trusted:
        out = _polish(alt_sh, z)
        alt.append(out[0] if out is not None else np.nan)
    stability = np.abs(np.array(alt) - trusted)
    converged = np.nan_to_num(stability, nan=np.inf) <= tol * (1 + np.abs(trusted))

    order_idx = np.lexsort((np.round(trusted.real, 12), np.round(trusted.imag, 12)))
    trusted, stability, converged, trusted_res = (
        trusted[order_idx],
        stability[order_idx],
        converged[order_idx],
        trusted_res[order_idx],
    )
    good = trusted[converged]
    ratio = float(np.max(np.abs(good.real) / (1 + np.abs(good)))) if good.size else math.inf
    if good.size > 1:
        d = np.abs(good[:, None] - good[None, :])
        min_gap = float(np.min(d[~np.eye(good.size, dtype=bool)]))
    else:
        min_gap = math.inf

    sym = None
    jdef = None
    if params.a == 0 and with_symmetry:
        sym = eigenfunction_symmetry_check(params, N, k, eigenvalues=good)
        jdef = j_symmetry_check(params, N)
    return SpectrumReport(
        params, N, k, trusted, stability, converged, trusted_res, ratio, min_gap, tol,
        radius, float(zc), bool(complete), sym, jdef, gal, gal_stab,
    )


def gauge_fix(values: np.ndarray) -> np.ndarray:
    """Rotate samples on the uniform grid so the largest Fourier coefficient is real positive."""
    K = values.size
    c = analyze(GridFunction(uniform_grid(K), values), (K - 1) // 2, alias_tol=None).coeffs
    j = int(np.argmax(np.abs(c)))
    return values * (abs(c[j]) / c[j])


def symmetry_defect(values: np.ndarray) -> float:
    """``||y(-x) - conj y(x)|| / ||y||`` on the uniform grid ``-pi + 2 pi j / K``."""
    K = values.size
    mirror = values[(-np.arange(K)) % K]
    return float(np.linalg.norm(mirror - np.conj(values)) / np.linalg.norm(values))


def eigenfunction_values(params: OperatorParams, lam: complex, K: int = 512, order: int = 64):
    """Eigenfunction for ``lam`` on the uniform grid ``-pi + 2 pi j / K``.

    The value at ``-pi`` is the mean of the one-sided limits ``alpha(lam)``
    and ``alpha(-lam)``, which coincide at an eigenvalue.
    """
    x = uniform_grid(K)
    sh = Shooter(params, order=order)
    out = np.empty(K, dtype=complex)
    out[1:] = sh.eigenfunction(lam, x[1:])
    out[0] = 0.5 * (sh.alpha(lam) + sh.alpha(-lam))
    return out


def eigenfunction_symmetry_check(
    params: OperatorParams,
    N: int = 64,
    k: int = 8,
    eigenvalues=None,
    K: int = 512,
    simple_tol: float = 1e-6,
) -> float:
    """Largest gauge-fixed symmetry defect over ``k`` eigenfunctions at ``a = 0``.

    Eigenvalues closer than ``simple_tol`` to another are treated as
    degenerate and skipped.
    """
    if params.a != 0:
        raise ValueError("the eigenfunction symmetry holds for a = 0 only")
    if eigenvalues is None:
        eigenvalues = find_roots(params, k, order=N)[0][:k]
    lam = np.asarray(eigenvalues, dtype=complex)[:k]
    worst = 0.0
    for j, z in enumerate(lam):
        others = np.delete(lam, j)
        if others.size and np.min(np.abs(others - z)) < simple_tol:
            continue
        v = gauge_fix(eigenfunction_values(params, z, K, order=N))
        worst = max(worst, symmetry_defect(v))
    return worst


def j_matrix(N: int) -> np.ndarray:
    """``(J c)_n = (-1)^n c_{-n}``: the Fourier form of ``f(x) -> f(pi - x)``."""
    n = np.arange(-N, N + 1)
    J = np.zeros((2 * N + 1, 2 * N + 1))
    J[n + N, -n + N] = np.where(n % 2 == 0, 1.0, -1.0)
    return J


def j_symmetry_check(params: OperatorParams, N: int) -> float:
    """``max |J L - L^H J|`` over interior modes ``|m|, |n| <= N - 1``."""
    L = assemble(params, N, "L").dense()
    J = j_matrix(N)
    D = J @ L - L.conj().T @ J
    return float(np.max(np.abs(D[1:-1, 1:-1])))
