"""Characteristic function of the eigenvalue problem ``L y = lam y`` by shooting.

Written out, ``L y = lam y`` is the second-order equation

    b sin(x) y'' + (1 + (b - a) cos x) y' + (a sin x - lam) y = 0,

with regular singular points at ``0`` and ``+-pi``. At the origin the
exponents are ``0`` and ``(a - 1)/b < 0``; an eigenfunction must be the
regular (analytic) solution there. At ``pi`` the exponents are ``0`` and
``q = (1 + a)/b``. Continuing the regular solution from 0 to ``pi`` and
splitting it as ``alpha Phi_0 + beta Phi_q`` gives ``alpha(lam)``, the value
it reaches at ``pi``. The reflection ``x -> -x`` maps the problem to
``-lam``, so the left half reaches ``alpha(-lam)`` at ``-pi`` and periodicity
is the condition

    F(lam) = alpha(lam) - alpha(-lam) = 0.

``F`` is odd and satisfies ``F(conj lam) = conj F(lam)``, so it vanishes
at ``lam = 0`` and is purely imaginary on the imaginary axis. The zero at
the origin is an artefact of the construction and is discounted when
zeros are counted.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy.integrate import solve_ivp

from .params import OperatorParams


def _sin_series(K: int) -> np.ndarray:
    c = np.zeros(K)
    for k in range(1, K, 2):
        c[k] = (-1) ** ((k - 1) // 2) / math.factorial(k)
    return c


def _cos_series(K: int) -> np.ndarray:
    c = np.zeros(K)
    for k in range(0, K, 2):
        c[k] = (-1) ** (k // 2) / math.factorial(k)
    return c


def _reciprocal(c: np.ndarray) -> np.ndarray:
    K = c.size
    r = np.zeros(K)
    r[0] = 1 / c[0]
    for n in range(1, K):
        r[n] = -np.dot(c[1 : n + 1], r[n - 1 :: -1][:n]) / c[0]
    return r


def _mul(p: np.ndarray, q: np.ndarray) -> np.ndarray:
    return np.convolve(p, q)[: p.size]


def frobenius(P: np.ndarray, Q: np.ndarray, r: float) -> np.ndarray:
    """Coefficients of ``x^(n + r)`` for ``x^2 y'' + x P y' + Q y = 0`` with ``c_0 = 1``."""
    K = P.size
    c = np.zeros(K, dtype=complex)
    c[0] = 1
    for n in range(1, K):
        k = np.arange(1, n + 1)
        rhs = -np.sum((P[k] * (n - k + r) + Q[k]) * c[n - k])
        c[n] = rhs / ((n + r) * (n + r - 1) + P[0] * (n + r) + Q[0])
    return c


def _series_value(c: np.ndarray, r: float, h: float):
    n = np.arange(c.size)
    return np.sum(c * h ** (n + r)), np.sum(c * (n + r) * h ** (n + r - 1))


@dataclass(frozen=True)
class Shooter:
    """Evaluator of ``alpha`` and ``F`` for fixed parameters.

    Attributes:
        params: operator parameters.
        order: number of Frobenius series terms.
        h: matching distance from the singular points.
        rtol: relative tolerance of the interior integration.
    """

    params: OperatorParams
    order: int = 60
    h: float = 0.5
    rtol: float = 1e-13

    @cached_property
    def _series(self):
        a, b, K = self.params.a, self.params.b, self.order
        S = _sin_series(K + 1)
        C = _cos_series(K)
        one = np.r_[1.0, np.zeros(K - 1)]
        x_over_sin = _reciprocal(S[1 : K + 1])
        x1 = np.r_[0.0, 1.0, np.zeros(K - 2)]
        P0 = _mul((b - a) * C + one, x_over_sin) / b
        Qa = _mul(_mul(x1, x_over_sin), a * S[:K]) / b
        Ql = -_mul(x1, x_over_sin) / b
        # near pi in s = pi - x: s^2 y'' + s Ps y' + Q y = 0
        Ps = -_mul(one - (b - a) * C, x_over_sin) / b
        return P0, Qa, Ql, Ps

    @property
    def q(self) -> float:
        return (1 + self.params.a) / self.params.b

    def _rhs(self, lam):
        a, b = self.params.a, self.params.b

        def f(x, u):
            return [u[1], -((1 + (b - a) * np.cos(x)) * u[1] + (a * np.sin(x) - lam) * u[0]) / (b * np.sin(x))]

        return f

    def regular_start(self, lam: complex, x0: float):
        """Value and derivative of the regular solution (``y(0) = 1``) at ``x0``."""
        P0, Qa, Ql, _ = self._series
        c = frobenius(P0, Qa + lam * Ql, 0.0)
        n = np.arange(c.size)
        return np.sum(c * x0**n), np.sum(c[1:] * n[1:] * x0 ** (n[1:] - 1))

    def alpha(self, lam: complex) -> complex:
        lam = complex(lam)
        P0, Qa, Ql, Ps = self._series
        h = self.h
        y, dy = self.regular_start(lam, h)
        sol = solve_ivp(
            self._rhs(lam),
            (h, math.pi - h),
            np.array([y, dy], dtype=complex),
            method="DOP853",
            rtol=self.rtol,
            atol=1e-15,
        )
        if not sol.success:
            raise ArithmeticError(f"shooting integration failed: {sol.message}")
        yN, dyN = sol.y[:, -1]
        q = self.q
        d = frobenius(Ps, Qa + lam * Ql, q)
        ph, dph_ds = _series_value(d, q, h)
        W = yN * (-dph_ds) - dyN * ph
        # Wronskian of Phi_0 and Phi_q by Abel's formula, normalised so Phi_0(pi) = 1
        x = math.pi - h
        a, b = self.params.a, self.params.b
        W0 = -q * 2 ** (1 / b) * math.tan(x / 2) ** (-1 / b) * math.sin(x) ** (-(b - a) / b)
        return W / W0

    def F(self, lam: complex) -> complex:
        return self.alpha(lam) - self.alpha(-lam)

    def eigenfunction(self, lam: complex, x) -> np.ndarray:
        """Regular solution with ``y(0) = 1`` continued through ``lam`` on both halves.

        Both halves use the same ``lam`` (no reflection), so symmetry
        properties of the result are not built in.
        """
        lam = complex(lam)
        x = np.asarray(x, dtype=float)
        out = np.full(x.shape, np.nan, dtype=complex)
        P0, Qa, Ql, _ = self._series
        c = frobenius(P0, Qa + lam * Ql, 0.0)
        h = self.h
        near = np.abs(x) <= h
        if np.any(near):
            n = np.arange(c.size)
            out[near] = (c[None, :] * x[near, None] ** n[None, :]).sum(axis=1)
        for sgn in (1.0, -1.0):
            sel = np.where((sgn * x > h) & (np.abs(x) < math.pi))[0]
            if not sel.size:
                continue
            x0 = sgn * h
            n = np.arange(c.size)
            y0 = np.sum(c * x0**n)
            dy0 = np.sum(c[1:] * n[1:] * x0 ** (n[1:] - 1))
            pts = x[sel]
            order = np.argsort(sgn * pts)
            sol = solve_ivp(
                self._rhs(lam),
                (x0, float(pts[order[-1]])),
                np.array([y0, dy0], dtype=complex),
                method="DOP853",
                t_eval=pts[order],
                rtol=self.rtol,
                atol=1e-15,
            )
            if not sol.success:
                raise ArithmeticError(f"shooting integration failed: {sol.message}")
            out[sel[order]] = sol.y[0]
        return out


def secant(f, z0: complex, z1: complex, tol: float = 1e-13, maxiter: int = 60):
    """Complex secant iteration; returns ``(root, |f(root)|, iterations)``."""
    f0, f1 = f(z0), f(z1)
    for it in range(maxiter):
        if f1 == f0:
            break
        z2 = z1 - f1 * (z1 - z0) / (f1 - f0)
        z0, f0 = z1, f1
        z1, f1 = z2, f(z2)
        if abs(z1 - z0) <= tol * max(1.0, abs(z1)):
            return z1, abs(f1), it + 1
    return z1, abs(f1), maxiter


def winding_number_quarter(f, R: float, n0: int = 64, max_step: float = math.pi / 6, max_points: int = 20000) -> float:
    """Zeros of an odd, conjugate-symmetric ``f`` inside ``|lam| < R``.

    The phase change along the quarter arc from ``R`` to ``iR`` is
    accumulated adaptively and multiplied by four, using
    ``f(-lam) = -f(lam)`` and ``f(conj lam) = conj f(lam)``. Returns the
    (real) winding number, which should be close to an integer.
    """
    th = list(np.linspace(0.0, math.pi / 2, n0 + 1))
    vals = [f(R * np.exp(1j * t)) for t in th]
    total = 0.0
    i = 0
    while i < len(th) - 1:
        d = np.angle(vals[i + 1] / vals[i])
        if abs(d) > max_step and len(th) < max_points:
            tm = 0.5 * (th[i] + th[i + 1])
            th.insert(i + 1, tm)
            vals.insert(i + 1, f(R * np.exp(1j * tm)))
            continue
        total += d
        i += 1
    return 4 * total / (2 * math.pi)
