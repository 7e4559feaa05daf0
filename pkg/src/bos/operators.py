"""Truncated Fourier matrices of S, M, M*, D, C and L.

Every operator here maps ``exp(i n x)`` into the span of modes ``n - 1``,
``n``, ``n + 1``, so a matrix is stored column-wise as three bands::

    lower[n] = entry(m = n + 1, n)
    diag[n]  = entry(m = n,     n)
    upper[n] = entry(m = n - 1, n)

Entries that would leave the truncation ``|m| <= N`` are dropped.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np
from scipy.linalg import solve_banded

from .params import TWO_PI, FourierVector, OperatorParams

KINDS = ("S", "M", "Mstar", "D", "C", "L")


def _modes(N: int) -> np.ndarray:
    return np.arange(-N, N + 1, dtype=float)


@dataclass(frozen=True)
class BandedOperatorMatrix:
    kind: str
    N: int
    lower: np.ndarray
    diag: np.ndarray
    upper: np.ndarray

    def __post_init__(self):
        for name in ("lower", "diag", "upper"):
            arr = np.array(getattr(self, name), dtype=complex)
            if arr.shape != (2 * self.N + 1,):
                raise ValueError(f"band {name} must have length {2 * self.N + 1}")
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def size(self) -> int:
        return 2 * self.N + 1

    def dense(self) -> np.ndarray:
        """Full ``(2N+1) x (2N+1)`` matrix indexed ``[m + N, n + N]``."""
        A = np.diag(self.diag)
        A += np.diag(self.lower[:-1], -1)
        A += np.diag(self.upper[1:], 1)
        return A

    def entry(self, m: int, n: int) -> complex:
        if max(abs(m), abs(n)) > self.N:
            raise IndexError(f"mode outside truncation N={self.N}")
        j = n + self.N
        if m == n:
            return complex(self.diag[j])
        if m == n + 1:
            return complex(self.lower[j])
        if m == n - 1:
            return complex(self.upper[j])
        return 0j

    def conj_transpose(self, kind: str | None = None) -> "BandedOperatorMatrix":
        lower = np.zeros(self.size, dtype=complex)
        upper = np.zeros(self.size, dtype=complex)
        # (A^H)[n+1, n] = conj(A[n, n+1]) = conj(upper[n+1])
        lower[:-1] = np.conj(self.upper[1:])
        upper[1:] = np.conj(self.lower[:-1])
        return BandedOperatorMatrix(kind or self.kind + "^H", self.N, lower, np.conj(self.diag), upper)

    def banded(self) -> np.ndarray:
        """Storage for :func:`scipy.linalg.solve_banded` with ``(l, u) = (1, 1)``."""
        ab = np.zeros((3, self.size), dtype=complex)
        ab[0, 1:] = self.upper[1:]
        ab[1] = self.diag
        ab[2, :-1] = self.lower[:-1]
        return ab

    def matvec(self, c: np.ndarray) -> np.ndarray:
        c = np.asarray(c)
        out = self.diag[:, None] * c if c.ndim == 2 else self.diag * c
        if c.ndim == 2:
            out[1:] += self.lower[:-1, None] * c[:-1]
            out[:-1] += self.upper[1:, None] * c[1:]
        else:
            out[1:] += self.lower[:-1] * c[:-1]
            out[:-1] += self.upper[1:] * c[1:]
        return out

    def solve(self, rhs: np.ndarray) -> np.ndarray:
        return solve_banded((1, 1), self.banded(), np.asarray(rhs, dtype=complex))

    def to_csv(self, path: Union[str, Path]) -> None:
        """Dump nonzero entries as ``m,n,re,im`` rows."""
        with open(path, "w", newline="\n", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["m", "n", "re", "im"])
            for j, n in enumerate(range(-self.N, self.N + 1)):
                for m, v in ((n - 1, self.upper[j]), (n, self.diag[j]), (n + 1, self.lower[j])):
                    if abs(m) <= self.N and v != 0:
                        w.writerow([m, n, repr(float(v.real)), repr(float(v.imag))])


def _stencil(params: OperatorParams, N: int, kind: str):
    a, b = params.a, params.b
    n = _modes(N)
    one = np.ones_like(n)
    if kind == "S":
        return 0 * n, 1j * n, 0 * n
    if kind == "M":
        # (1 - a cos x) e_n + b sin x (i n) e_n
        return (n * b - a) / 2, one, -(n * b + a) / 2
    if kind == "Mstar":
        # (1 - a cos x) z - b (sin x z)'
        return -(a + b * (n + 1)) / 2, one, (b * (n - 1) - a) / 2
    if kind == "D":
        # multiplication by 1 - (a + b/2) cos x
        off = -(a + b / 2) / 2 * one
        return off, one, off
    if kind == "C":
        # i { (b/2) cos x y - b (sin x y)' }
        return 1j * b * (-2 * n - 1) / 4, 0 * n, 1j * b * (2 * n - 1) / 4
    if kind == "L":
        lo, di, up = _stencil(params, N, "M")
        # L = S M: row m of M times i m
        return 1j * (n + 1) * lo, 1j * n * di, 1j * (n - 1) * up
    raise ValueError(f"unknown operator kind {kind!r}; expected one of {KINDS}")


def assemble(params: OperatorParams, N: int, kind: str) -> BandedOperatorMatrix:
    """Banded matrix of ``kind`` on modes ``-N..N``."""
    if not isinstance(N, (int, np.integer)) or N < 2:
        raise ValueError(f"truncation N must be an integer >= 2, got {N!r}")
    lower, diag, upper = _stencil(params, int(N), kind)
    lower = np.array(lower, dtype=complex)
    upper = np.array(upper, dtype=complex)
    lower[-1] = 0
    upper[0] = 0
    return BandedOperatorMatrix(kind, int(N), lower, np.array(diag, dtype=complex), upper)


def apply(op: BandedOperatorMatrix, y: FourierVector) -> FourierVector:
    if y.N != op.N:
        raise ValueError(f"dimension mismatch: operator N={op.N}, vector N={y.N}")
    return FourierVector(op.matvec(y.coeffs))


def adjoint_check(params: OperatorParams, N: int) -> float:
    """``max |Mstar - M^H|`` with both sides built from their own stencils."""
    M = assemble(params, N, "M").dense()
    Ms = assemble(params, N, "Mstar").dense()
    return float(np.max(np.abs(Ms - M.conj().T)))


def quadrature_assemble(params: OperatorParams, N: int, kind: str, n_grid: int = 4096) -> np.ndarray:
    """Dense matrix ``<T e_n, e_m> / 2 pi`` by trapezoidal quadrature.

    ``T e_n`` is evaluated pointwise from the differential expression, so the
    result is independent of the band stencils; used as a test oracle.
    """
    if n_grid < 2 * N + 4:
        raise ValueError("quadrature grid too coarse for the requested truncation")
    a, b = params.a, params.b
    x = -math.pi + TWO_PI * np.arange(n_grid) / n_grid
    n = np.arange(-N, N + 1)
    s, c = np.sin(x)[:, None], np.cos(x)[:, None]
    nn = n[None, :].astype(float)
    if kind == "L":
        # d/dx((1 - a cos x) y + b sin x y') for y = e^{inx}
        sym = a * s + 1j * nn * (1 - a * c) + 1j * nn * b * c - b * nn**2 * s
    elif kind == "M":
        sym = (1 - a * c) + 1j * nn * b * s
    elif kind == "Mstar":
        sym = 1 - (a + b) * c - 1j * nn * b * s
    elif kind == "S":
        sym = 1j * nn + 0 * s
    elif kind == "D":
        sym = (1 - (a + b / 2) * c) + 0 * nn
    elif kind == "C":
        sym = 1j * ((b / 2) * c - b * (c + 1j * nn * s))
    else:
        raise ValueError(f"unknown operator kind {kind!r}")
    vals = sym * np.exp(1j * x[:, None] * nn)
    F = np.fft.fft(vals, axis=0) / n_grid
    # output mode m sits at FFT bin m mod n_grid, with the (-1)^m grid shift
    rows = np.mod(n, n_grid)
    sign = np.where(n % 2 == 0, 1.0, -1.0)[:, None]
    return F[rows, :] * sign


def _sin_times(c: np.ndarray) -> np.ndarray:
    """Coefficients of ``sin(x) f`` on modes ``-N-1..N+1``."""
    out = np.zeros(c.size + 2, dtype=complex)
    # sin x e_n = (e_{n+1} - e_{n-1}) / 2i
    out[2:] += c / 2j
    out[:-2] -= c / 2j
    return out


@dataclass(frozen=True)
class DomainDiagnostic:
    h1_norm_sq: float
    weighted_norm_sq: float
    in_domain: bool
    total_norm_sq: float
    h1_tail_slope: float
    weighted_tail_slope: float


def _tail_slope(c: np.ndarray, weight_power: int = 2) -> float:
    """Log-log slope of ``(1 + n^2) (|c_n|^2 + |c_-n|^2)`` over the top octave.

    Returns ``-inf`` when the tail is at the round-off floor.
    """
    N = (c.size - 1) // 2
    n = np.arange(max(1, N // 2), N + 1)
    amp2 = np.abs(c[N + n]) ** 2 + np.abs(c[N - n]) ** 2
    scale = float(np.max(np.abs(c))) ** 2
    if scale == 0 or np.max(amp2) <= (1e3 * np.finfo(float).eps) ** 2 * scale or n.size < 4:
        return -math.inf
    t = (1.0 + n.astype(float) ** weight_power) * amp2
    good = t > 0
    if good.sum() < 4:
        return -math.inf
    return float(np.polyfit(np.log(n[good]), np.log(t[good]), 1)[0])


def domain_membership(y: FourierVector, slope_margin: float = 0.1) -> DomainDiagnostic:
    """Evidence that ``y`` lies in the domain ``{f in H^1 : sin(x) f' in H^1}``.

    The squared norms are exact for the truncated vector. Membership is a
    decay test: the H^1-weighted tail terms must fall faster than ``n^-1``
    by ``slope_margin`` in the fitted log-log slope, for both ``f`` and
    ``sin(x) f'``.
    """
    c = y.coeffs
    n = y.modes.astype(float)
    h1 = TWO_PI * float(np.sum((1 + n**2) * np.abs(c) ** 2))
    w = _sin_times(1j * n * c)
    m = np.arange(-(y.N + 1), y.N + 2, dtype=float)
    weighted = TWO_PI * float(np.sum((1 + m**2) * np.abs(w) ** 2))
    s1 = _tail_slope(c)
    s2 = _tail_slope(w)
    ok = s1 <= -1.0 - slope_margin and s2 <= -1.0 - slope_margin
    return DomainDiagnostic(h1, weighted, bool(ok), h1 + weighted, s1, s2)
