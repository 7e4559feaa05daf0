"""Model parameters, Fourier coefficient vectors and physical-space grids.

Conventions shared by the whole package:

* functions on [-pi, pi] are expanded as ``y(x) = sum_n c_n exp(i n x)`` with
  the symmetric truncation ``n = -N..N``;
* coefficient arrays are stored with mode ``n`` at index ``n + N``;
* the inner product is unnormalised, ``<f, g> = int f conj(g) dx``, so
  ``<e_n, e_m> = 2 pi delta_nm``.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Callable, Union

import numpy as np

TWO_PI = 2.0 * math.pi


class ParamsError(ValueError):
    """Rejected operator parameters.

    ``code`` is a short machine-readable tag: ``"negative-a"``,
    ``"nonpositive-b"``, ``"regime-violation"`` or ``"non-finite"``.
    """

    def __init__(self, code: str, message: str):
        super().__init__(message)
        self.code = code


class GridError(ValueError):
    """Invalid grid, or a grid too coarse for the requested truncation."""


class AliasingError(ValueError):
    """Sampled data carries energy outside the requested modes."""

    def __init__(self, message: str, tail: float):
        super().__init__(message)
        self.tail = tail


def _check_ab(a: float, b: float) -> None:
    if not (math.isfinite(a) and math.isfinite(b)):
        raise ParamsError("non-finite", f"parameters must be finite, got a={a}, b={b}")
    if a < 0:
        raise ParamsError("negative-a", f"a must be >= 0, got a={a}")
    if b <= 0:
        raise ParamsError("nonpositive-b", f"b must be > 0, got b={b}")
    # exact rational comparison on the decimal form, so 0.35/1.3 sits on the boundary
    if 2 * Fraction(repr(a)) + Fraction(repr(b)) >= 2:
        raise ParamsError(
            "regime-violation",
            f"2a + b = {2 * a + b:g} must be < 2 (strict) for the factorization to hold",
        )


@dataclass(frozen=True)
class OperatorParams:
    """Validated pair ``(a, b)`` with ``a >= 0``, ``b > 0`` and ``2a + b < 2``."""

    a: float
    b: float

    def __post_init__(self):
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))
        _check_ab(self.a, self.b)

    @property
    def margin(self) -> float:
        """Distance ``2 - (2a + b)`` to the regime boundary."""
        return 2.0 - (2.0 * self.a + self.b)

    @property
    def degenerate_drainage(self) -> bool:
        # a = 0 drops the gravity-drainage term; admitted but flagged in reports
        return self.a == 0.0

    def as_dict(self) -> dict:
        return {
            "a": self.a,
            "b": self.b,
            "margin": self.margin,
            "regime": "degenerate-drainage" if self.degenerate_drainage else "standard",
        }


def validate_params(a: float, b: float) -> OperatorParams:
    """Return validated parameters or raise :class:`ParamsError`."""
    return OperatorParams(a, b)


def _frozen(arr: np.ndarray) -> np.ndarray:
    arr = np.array(arr, copy=True)
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True)
class FourierVector:
    """Coefficients ``c_n``, ``n = -N..N``, of a function on [-pi, pi]."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.asarray(self.coeffs, dtype=complex)
        if c.ndim != 1 or c.size % 2 == 0:
            raise ValueError(f"coefficient vector must be 1-D with odd length, got shape {c.shape}")
        object.__setattr__(self, "coeffs", _frozen(c))

    @property
    def N(self) -> int:
        return (self.coeffs.size - 1) // 2

    @property
    def modes(self) -> np.ndarray:
        return np.arange(-self.N, self.N + 1)

    @classmethod
    def zeros(cls, N: int) -> "FourierVector":
        return cls(np.zeros(2 * N + 1, dtype=complex))

    @classmethod
    def from_modes(cls, modes: dict, N: int) -> "FourierVector":
        c = np.zeros(2 * N + 1, dtype=complex)
        for n, value in modes.items():
            if abs(n) > N:
                raise ValueError(f"mode {n} outside truncation N={N}")
            c[n + N] = value
        return cls(c)

    def __getitem__(self, n: int) -> complex:
        if abs(n) > self.N:
            return 0j
        return complex(self.coeffs[n + self.N])

    @property
    def mean(self) -> complex:
        """The ``n = 0`` coefficient, i.e. the average over the period."""
        return complex(self.coeffs[self.N])

    def l2_norm(self) -> float:
        return math.sqrt(TWO_PI * float(np.sum(np.abs(self.coeffs) ** 2)))

    def inner(self, other: "FourierVector") -> complex:
        """``<self, other> = int self * conj(other) dx``."""
        M = max(self.N, other.N)
        u, v = self.resized(M).coeffs, other.resized(M).coeffs
        return complex(TWO_PI * np.vdot(v, u))

    def resized(self, N: int) -> "FourierVector":
        """Zero-pad or truncate to half-width ``N``."""
        if N == self.N:
            return self
        c = np.zeros(2 * N + 1, dtype=complex)
        k = min(N, self.N)
        c[N - k : N + k + 1] = self.coeffs[self.N - k : self.N + k + 1]
        return FourierVector(c)

    def derivative(self) -> "FourierVector":
        return FourierVector(1j * self.modes * self.coeffs)

    def __add__(self, other: "FourierVector") -> "FourierVector":
        M = max(self.N, other.N)
        return FourierVector(self.resized(M).coeffs + other.resized(M).coeffs)

    def __sub__(self, other: "FourierVector") -> "FourierVector":
        return self + (-1.0) * other

    def __mul__(self, scalar) -> "FourierVector":
        return FourierVector(self.coeffs * scalar)

    __rmul__ = __mul__

    def __call__(self, x) -> np.ndarray:
        """Evaluate the trigonometric polynomial at ``x`` (any shape)."""
        return evaluate_series(self.coeffs, x)


def evaluate_series(coeffs: np.ndarray, x, chunk: int = 2**22) -> np.ndarray:
    """Sum ``c_n exp(i n x)`` for arbitrary-shaped ``x``, memory-chunked."""
    coeffs = np.asarray(coeffs, dtype=complex)
    N = (coeffs.size - 1) // 2
    x = np.asarray(x, dtype=float)
    flat = x.ravel()
    out = np.empty(flat.size, dtype=complex)
    n = np.arange(-N, N + 1)
    step = max(1, chunk // max(1, coeffs.size))
    for s in range(0, flat.size, step):
        xs = flat[s : s + step]
        out[s : s + step] = np.exp(1j * np.outer(xs, n)) @ coeffs
    return out.reshape(x.shape)


@dataclass(frozen=True)
class GridFunction:
    """Samples of a function on nodes in [-pi, pi]."""

    nodes: np.ndarray
    values: np.ndarray
    meta: dict = field(default_factory=dict, compare=False)

    def __post_init__(self):
        x = np.asarray(self.nodes, dtype=float)
        v = np.asarray(self.values, dtype=complex)
        if x.ndim != 1 or v.shape != x.shape:
            raise GridError(f"nodes and values must be 1-D of equal length, got {x.shape} and {v.shape}")
        if x.size and (x[0] < -math.pi - 1e-12 or x[-1] > math.pi + 1e-12):
            raise GridError("nodes must lie in [-pi, pi]")
        if np.any(np.diff(x) <= 0):
            raise GridError("nodes must be strictly increasing")
        object.__setattr__(self, "nodes", _frozen(x))
        object.__setattr__(self, "values", _frozen(v))

    def __len__(self) -> int:
        return self.nodes.size

    def is_uniform_periodic(self, rtol: float = 1e-10) -> bool:
        K = self.nodes.size
        return K > 0 and np.allclose(self.nodes, uniform_grid(K), rtol=0, atol=rtol * math.pi)

    def to_csv(self, path: Union[str, Path]) -> None:
        with open(path, "w", newline="\n", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["x", "re", "im"])
            for x, v in zip(self.nodes, self.values):
                w.writerow([repr(float(x)), repr(float(v.real)), repr(float(v.imag))])

    @classmethod
    def from_csv(cls, path: Union[str, Path]) -> "GridFunction":
        with open(path, newline="", encoding="utf-8") as fh:
            rows = list(csv.DictReader(fh))
        if not rows or set(rows[0]) != {"x", "re", "im"}:
            raise GridError(f"{path}: expected CSV header x,re,im")
        x = np.array([float(r["x"]) for r in rows])
        v = np.array([float(r["re"]) + 1j * float(r["im"]) for r in rows])
        return cls(x, v)


def uniform_grid(K: int) -> np.ndarray:
    """Periodic grid ``x_j = -pi + 2 pi j / K``, ``j = 0..K-1``."""
    if K < 1:
        raise GridError(f"grid size must be positive, got {K}")
    return -math.pi + TWO_PI * np.arange(K) / K


def synthesize(coeffs: FourierVector, nodes) -> GridFunction:
    """Evaluate ``sum_n c_n exp(i n x_j)`` at the given nodes."""
    nodes = np.asarray(nodes, dtype=float)
    return GridFunction(nodes, evaluate_series(coeffs.coeffs, nodes))


def analyze(f: GridFunction, N: int, alias_tol: float | None = 1e-8) -> FourierVector:
    """Trigonometric interpolation coefficients of uniform-grid samples.

    Exact for trigonometric polynomials of degree <= N. When the grid holds
    more than ``2N + 1`` points, the discarded modes are measured and an
    :class:`AliasingError` is raised if their relative L2 weight exceeds
    ``alias_tol`` (pass ``None`` to truncate silently).
    """
    K = len(f)
    if K < 2 * N + 1:
        raise GridError(f"grid of {K} points is too coarse for N={N} (needs >= {2 * N + 1})")
    if not f.is_uniform_periodic():
        raise GridError("analyze requires the uniform periodic grid -pi + 2 pi j / K")
    # x_j = -pi + 2 pi j/K, so exp(-i n x_j) = (-1)^n exp(-2 pi i n j / K)
    F = np.fft.fft(f.values) / K
    k = np.fft.fftfreq(K, d=1.0 / K).astype(int)
    if K % 2 == 0:
        # the Nyquist bin is shared by +-K/2; keep it on the discarded side
        k[K // 2] = K // 2
    F = F * np.where(k % 2 == 0, 1.0, -1.0)
    c = np.zeros(2 * N + 1, dtype=complex)
    keep = np.abs(k) <= N
    c[k[keep] + N] = F[keep]
    if alias_tol is not None:
        total = float(np.sum(np.abs(F) ** 2))
        tail = float(np.sum(np.abs(F[~keep]) ** 2))
        rel = math.sqrt(tail / total) if total > 0 else 0.0
        if rel > alias_tol:
            raise AliasingError(
                f"samples carry {rel:.3e} (relative L2) outside modes |n| <= {N}", rel
            )
    return FourierVector(c)


def l2_quadrature_norm(f: GridFunction) -> float:
    """Trapezoidal L2 norm on a uniform periodic grid."""
    if not f.is_uniform_periodic():
        raise GridError("quadrature norm requires the uniform periodic grid")
    return math.sqrt(TWO_PI / len(f) * float(np.sum(np.abs(f.values) ** 2)))


FunctionLike = Union[Callable, FourierVector, GridFunction]


def as_callable(u: FunctionLike) -> Callable[[np.ndarray], np.ndarray]:
    """Turn a callable, coefficient vector or sampled function into ``u(x)``.

    Uniform periodic samples are interpolated trigonometrically; other grids
    fall back to a cubic spline.
    """
    if isinstance(u, FourierVector):
        return u
    if isinstance(u, GridFunction):
        if u.is_uniform_periodic():
            return analyze(u, (len(u) - 1) // 2, alias_tol=None)
        from scipy.interpolate import CubicSpline

        re = CubicSpline(u.nodes, u.values.real)
        im = CubicSpline(u.nodes, u.values.imag)
        return lambda x: re(x) + 1j * im(x)
    if callable(u):
        return lambda x: np.asarray(u(np.asarray(x, dtype=float)), dtype=complex) * np.ones_like(x, dtype=complex)
    raise TypeError(f"cannot evaluate object of type {type(u).__name__}")
