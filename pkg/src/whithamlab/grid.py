"""Periodic grids standing in for the real line, and fields living on them."""
from __future__ import annotations

from dataclasses import dataclass, field
from functools import cached_property

import numpy as np


@dataclass(frozen=True)
class Grid:
    """Uniform periodic grid x_j = -L + 2Lj/N, j = 0..N-1.

    Frequencies are xi_k = pi k / L. Real transforms keep k = 0..N/2, so the
    Nyquist mode appears with a positive sign; every multiplier used here is
    even, which makes that choice immaterial.
    """

    L: float = 200.0
    N: int = 2 ** 16

    def __post_init__(self):
        N = int(self.N)
        if N < 16 or N & (N - 1):
            raise ValueError(f"N must be a power of two >= 16, got {self.N}")
        if not (np.isfinite(self.L) and self.L > 0):
            raise ValueError(f"L must be positive, got {self.L}")
        object.__setattr__(self, "N", N)
        object.__setattr__(self, "L", float(self.L))

    @property
    def h(self) -> float:
        return 2 * self.L / self.N

    @cached_property
    def x(self) -> np.ndarray:
        x = -self.L + self.h * np.arange(self.N)
        x[self.N // 2] = 0.0
        x.flags.writeable = False
        return x

    @cached_property
    def xi(self) -> np.ndarray:
        """Nonnegative frequencies matching numpy's rfft layout."""
        xi = np.pi / self.L * np.arange(self.N // 2 + 1)
        xi.flags.writeable = False
        return xi

    @property
    def xi_max(self) -> float:
        return np.pi * self.N / (2 * self.L)

    @property
    def origin(self) -> int:
        """Index of x = 0."""
        return self.N // 2

    def refined(self, factor: int = 2) -> "Grid":
        return Grid(self.L, self.N * factor)

    def __hash__(self):
        return hash((self.L, self.N))

    def __eq__(self, other):
        return isinstance(other, Grid) and (self.L, self.N) == (other.L, other.N)


def _frozen(a):
    a = np.array(a, dtype=a.dtype if np.iscomplexobj(a) else float, copy=True)
    a.flags.writeable = False
    return a


@dataclass(frozen=True, eq=False)
class SpectralField:
    """Real function on a grid, held as samples plus rfft coefficients.

    Build with ``SpectralField(grid, values)`` or ``SpectralField.from_hat``.
    """

    grid: Grid
    values: np.ndarray
    hat: np.ndarray = field(default=None, repr=False)

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.grid.N,):
            raise ValueError(f"expected {self.grid.N} samples, got shape {v.shape}")
        object.__setattr__(self, "values", _frozen(v))
        if self.hat is None:
            object.__setattr__(self, "hat", _frozen(np.fft.rfft(v)))
        else:
            object.__setattr__(self, "hat", _frozen(np.asarray(self.hat, dtype=complex)))

    @classmethod
    def from_hat(cls, grid: Grid, hat) -> "SpectralField":
        hat = np.asarray(hat, dtype=complex)
        return cls(grid, np.fft.irfft(hat, grid.N), hat)

    @classmethod
    def from_function(cls, grid: Grid, f) -> "SpectralField":
        return cls(grid, f(np.asarray(grid.x)))

    def consistency_error(self) -> float:
        """sup |samples - inverse transform of coefficients|."""
        return float(np.max(np.abs(np.fft.irfft(self.hat, self.grid.N) - self.values)))

    # basic arithmetic keeps the code downstream readable
    def __add__(self, other):
        o = other.values if isinstance(other, SpectralField) else other
        return SpectralField(self.grid, self.values + o)

    __radd__ = __add__

    def __sub__(self, other):
        o = other.values if isinstance(other, SpectralField) else other
        return SpectralField(self.grid, self.values - o)

    def __mul__(self, other):
        o = other.values if isinstance(other, SpectralField) else other
        return SpectralField(self.grid, self.values * o)

    __rmul__ = __mul__

    def __neg__(self):
        return SpectralField(self.grid, -self.values)

    def sup(self) -> float:
        return float(np.max(self.values))

    def integral(self) -> float:
        return float(self.grid.h * np.sum(self.values))

    def apply_multiplier(self, sym) -> "SpectralField":
        """F^{-1}(sym(xi) * F f) for an even real multiplier given as array or callable."""
        s = sym(self.grid.xi) if callable(sym) else sym
        return SpectralField.from_hat(self.grid, s * self.hat)

    def derivative(self, order: int = 1) -> "SpectralField":
        g = self.grid
        mult = (1j * np.asarray(g.xi)) ** order
        if order % 2:
            mult[-1] = 0.0
        return SpectralField.from_hat(g, mult * self.hat)

    def shifted(self, a: float) -> "SpectralField":
        """The translate x -> f(x - a) by spectral phase shift."""
        return SpectralField.from_hat(self.grid, shift_hat(self.grid, self.hat, a))

    def reflected(self, lam: float = 0.0) -> "SpectralField":
        """x -> f(2 lam - x)."""
        N = self.grid.N
        rev = self.values[(-np.arange(N)) % N]
        out = SpectralField(self.grid, rev)
        return out.shifted(2 * lam) if lam else out


def shift_hat(grid: Grid, hat, a: float):
    ph = np.exp(-1j * np.asarray(grid.xi) * a)
    ph[-1] = np.cos(grid.xi[-1] * a)
    return hat * ph


def dealiased_square(grid: Grid, hat, pad: int = 2):
    """Transform of u^2 computed on a grid refined by ``pad`` (zero padding)."""
    N = grid.N
    M = pad * N
    big = np.zeros(M // 2 + 1, dtype=complex)
    big[: N // 2 + 1] = hat
    big[N // 2] *= 0.5  # split Nyquist energy between +/- modes
    u = np.fft.irfft(big, M) * pad
    out = np.fft.rfft(u * u)[: N // 2 + 1] / pad
    out[-1] = 0.0
    return out
