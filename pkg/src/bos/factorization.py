"""Discrete factorization checks, the L11 block inverse and the block resolvent.

``L2 = L0 (+) L1`` splits off the constants. Since ``d/dx`` kills the mean,
row 0 of the truncated L vanishes and L has the block form

    [ 0    0   ]
    [ L10  L11 ]

with ``L10: 1 -> a sin x``. The inverse of L11 is built two ways: by dense
inversion, and by composing ``S^{-1}`` on mean-zero data, the constant shift
that lands in ``{z0}^perp`` and ``M^{-1}``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .inverse import compute_z0
from .operators import assemble, quadrature_assemble
from .params import FourierVector, OperatorParams


class NearEigenvalueError(ArithmeticError):
    """The requested spectral parameter is too close to an eigenvalue of L_N."""

    def __init__(self, message: str, nearest: complex, distance: float):
        super().__init__(message)
        self.nearest = nearest
        self.distance = distance


class ResolventError(ArithmeticError):
    """A solve failed its residual contract."""


def _nonzero_modes(N: int) -> np.ndarray:
    n = np.arange(-N, N + 1)
    return n[n != 0]


def _drop_zero(N: int) -> np.ndarray:
    """Indices of modes ``n != 0`` in a length ``2N+1`` vector."""
    return np.concatenate([np.arange(N), np.arange(N + 1, 2 * N + 1)])


@dataclass(frozen=True)
class BlockDecomposition:
    N: int
    L10_image: FourierVector
    L11: np.ndarray
    modes: np.ndarray

    def projector_constant(self, f: FourierVector) -> complex:
        return f.mean


def block_decompose(params: OperatorParams, N: int) -> BlockDecomposition:
    L = assemble(params, N, "L").dense()
    keep = _drop_zero(N)
    return BlockDecomposition(N, FourierVector(L[:, N]), L[np.ix_(keep, keep)], _nonzero_modes(N))


def factorization_residual(params: OperatorParams, N: int, n_grid: int = 4096) -> float:
    """``max |L_quad - S M|`` over interior modes ``|m|, |n| <= N - 1``."""
    Lq = quadrature_assemble(params, N, "L", n_grid)
    S = assemble(params, N, "S").dense()
    M = assemble(params, N, "M").dense()
    D = Lq - S @ M
    return float(np.max(np.abs(D[1:-1, 1:-1])))


@dataclass(frozen=True)
class L11Inverse:
    matrix: np.ndarray
    modes: np.ndarray
    residual: float
    condition: float

    def apply(self, g: FourierVector) -> FourierVector:
        N = (self.modes.size) // 2
        out = np.zeros(2 * N + 1, dtype=complex)
        keep = _drop_zero(N)
        out[keep] = self.matrix @ g.coeffs[keep]
        return FourierVector(out)


def l11_inverse_direct(params: OperatorParams, N: int) -> L11Inverse:
    """Dense inverse of the truncated L11 block, with residual and condition number."""
    L11 = block_decompose(params, N).L11
    inv = np.linalg.inv(L11)
    res = float(np.max(np.abs(L11 @ inv - np.eye(L11.shape[0]))))
    cond = float(np.linalg.cond(L11))
    return L11Inverse(inv, _nonzero_modes(N), res, cond)


@dataclass(frozen=True)
class HyperplanePair:
    """The pair ``x1 = 1``, ``x2 = z0`` with ``alpha = (x1, x2)``."""

    x1: FourierVector
    x2: FourierVector
    alpha: complex

    @classmethod
    def for_params(cls, params: OperatorParams, N: int, threshold: float = 1e-12) -> "HyperplanePair":
        z = compute_z0(params, N)
        if abs(z.one_z0) < threshold:
            raise ResolventError(f"|(1, z0)| = {abs(z.one_z0):.3e} is below {threshold}")
        return cls(FourierVector.from_modes({0: 1.0}, N), z.z0, z.one_z0)

    def lift(self, w: FourierVector) -> FourierVector:
        """Inverse of the mean-removing projection restricted to ``{z0}^perp``.

        Adds the unique constant that makes the result orthogonal to z0.
        """
        c = -w.inner(self.x2) / self.alpha
        return w + self.x1 * c

    @staticmethod
    def project(v: FourierVector) -> FourierVector:
        """Orthogonal projection onto mean-zero functions."""
        c = np.array(v.coeffs)
        c[v.N] = 0
        return FourierVector(c)


@dataclass(frozen=True)
class CompositionStages:
    u: FourierVector
    v: FourierVector
    y: FourierVector
    shift: complex
    orthogonality: float


def composition_stages(params: OperatorParams, N: int, g: FourierVector, mean_tol: float = 1e-12) -> CompositionStages:
    """The three stages of the composed inverse applied to mean-zero ``g``."""
    if g.N != N:
        g = g.resized(N)
    if abs(g.mean) > mean_tol * max(1.0, float(np.max(np.abs(g.coeffs)))):
        raise ValueError("composed inverse requires mean-zero data")
    n = g.modes
    u = np.zeros(2 * N + 1, dtype=complex)
    nz = n != 0
    u[nz] = g.coeffs[nz] / (1j * n[nz])
    pair = HyperplanePair.for_params(params, N)
    uv = FourierVector(u)
    v = pair.lift(uv)
    y = assemble(params, N, "M").solve(v.coeffs)
    orth = abs(v.inner(pair.x2)) / max(1e-300, v.l2_norm() * pair.x2.l2_norm())
    return CompositionStages(uv, v, FourierVector(y), complex(v.mean), float(orth))


def l11_inverse_composed(params: OperatorParams, N: int, g: FourierVector) -> FourierVector:
    """``L11^{-1} g`` as ``M^{-1}`` after the constant shift after ``S^{-1}``."""
    return composition_stages(params, N, g).y


def l11_inverse_composed_matrix(params: OperatorParams, N: int, N_inner: int | None = None) -> np.ndarray:
    """Matrix of the composed inverse on modes ``0 < |n| <= N``.

    With ``N_inner = N`` this coincides with the dense inverse of the
    truncated block. A larger ``N_inner`` applies the inverse of the
    untruncated operator more faithfully and then projects back onto
    ``|n| <= N``.
    """
    Nb = N if N_inner is None else int(N_inner)
    if Nb < N:
        raise ValueError("N_inner must be >= N")
    modes = _nonzero_modes(N)
    K = 2 * Nb + 1
    V = np.zeros((K, modes.size), dtype=complex)
    V[Nb + modes, np.arange(modes.size)] = 1 / (1j * modes)
    z = compute_z0(params, Nb)
    z0 = z.z0.coeffs
    V[Nb] -= (np.conj(z0) @ V) / np.conj(z0[Nb])
    Y = assemble(params, Nb, "M").solve(V)
    return Y[Nb + modes]


def _nearest_eigenvalue(L: np.ndarray, lam: complex):
    ev = np.linalg.eigvals(L)
    j = int(np.argmin(np.abs(ev - lam)))
    return complex(ev[j]), float(abs(ev[j] - lam))


def resolvent_apply(
    params: OperatorParams,
    N: int,
    lam: complex,
    f: FourierVector,
    refuse_rel: float = 1e-8,
    residual_tol: float = 1e-8,
) -> FourierVector:
    """Apply ``(L_N - lam)^{-1}`` through the block formula.

    The constant component is ``-f0 / lam``; the mean-zero part solves
    ``(L11 - lam) y1 = f1 - L10 y0``.

    Raises:
        NearEigenvalueError: ``lam`` lies within ``refuse_rel * ||L_N||_2`` of
            an eigenvalue of the truncated operator.
        ResolventError: the full-system residual exceeds
            ``residual_tol * max(1, ||f||)``.
    """
    lam = complex(lam)
    if f.N != N:
        raise ValueError(f"dimension mismatch: N={N}, vector N={f.N}")
    L = assemble(params, N, "L").dense()
    scale = float(np.linalg.norm(L, 2))
    nearest, dist = _nearest_eigenvalue(L, lam)
    if dist <= refuse_rel * scale:
        raise NearEigenvalueError(
            f"lambda={lam} is within {dist:.3e} of the eigenvalue {nearest} of L_N", nearest, dist
        )
    blocks = block_decompose(params, N)
    keep = _drop_zero(N)
    y0 = -f.coeffs[N] / lam
    rhs = f.coeffs[keep] - blocks.L10_image.coeffs[keep] * y0
    y1 = np.linalg.solve(blocks.L11 - lam * np.eye(keep.size), rhs)
    y = np.zeros(2 * N + 1, dtype=complex)
    y[N] = y0
    y[keep] = y1
    res = float(np.linalg.norm(L @ y - lam * y - f.coeffs))
    if res > residual_tol * max(1.0, float(np.linalg.norm(f.coeffs))):
        raise ResolventError(f"resolvent residual {res:.3e} exceeds tolerance")
    return FourierVector(y)


def hs_norm_estimate(params: OperatorParams, N_list) -> list[tuple[int, float]]:
    """Frobenius norms of the truncated ``L11^{-1}`` for each N."""
    N_list = [int(n) for n in N_list]
    if N_list != sorted(N_list) or len(set(N_list)) != len(N_list):
        raise ValueError("N_list must be strictly ascending")
    return [(N, float(np.linalg.norm(l11_inverse_direct(params, N).matrix, "fro"))) for N in N_list]


def hs_differences_decreasing(seq) -> bool:
    vals = [v for _, v in seq]
    d = np.abs(np.diff(vals))
    return bool(len(d) < 2 or np.all(np.diff(d) < 0))


def row_norm_slope(params: OperatorParams, N: int, n_min: int = 4) -> float:
    """Log-log slope of the row norms of ``L11^{-1}`` against ``|n|``.

    Fitted over ``n_min <= |n| <= N/2`` so the truncation edge is excluded.
    """
    inv = l11_inverse_direct(params, N)
    rows = np.linalg.norm(inv.matrix, axis=1)
    n = np.abs(inv.modes)
    sel = (n >= n_min) & (n <= N // 2)
    return float(np.polyfit(np.log(n[sel]), np.log(rows[sel]), 1)[0])
