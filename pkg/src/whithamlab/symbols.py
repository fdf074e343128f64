"""Fourier multipliers of the Whitham problem.

m(xi) = sqrt(tanh(xi)/xi) is the dispersion symbol and m/(c - m) the
resolvent symbol whose inverse transform turns the steady equation into
the fixed point phi(c - phi) = H_c * phi^2.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from .errors import DomainError, PreconditionError

# even Taylor coefficients of sqrt(tanh x / x) in powers of x^2
_SERIES = np.array([
    1.0,
    -1.0 / 6,
    19.0 / 360,
    -55.0 / 3024,
    11813.0 / 1814400,
    -2117.0 / 887040,
    64604977.0 / 72648576000,
    -263101079.0 / 784604620800,
    1768132943.0 / 13857951744000,
])
SWITCH = 0.25


def whitham_symbol(xi):
    """m(xi) = (tanh xi / xi)^(1/2); accepts scalars or arrays."""
    a = np.abs(np.asarray(xi, dtype=float))
    if not np.all(np.isfinite(a)):
        raise DomainError("whitham_symbol needs finite frequencies")
    small = a < SWITCH
    out = np.empty_like(a)
    z = a[small] ** 2
    out[small] = np.polynomial.polynomial.polyval(z, _SERIES)
    big = a[~small]
    out[~small] = np.sqrt(np.tanh(big) / big)
    return out if out.ndim else float(out)


def _check_speed(c):
    if not (np.isfinite(c) and c > 1):
        raise PreconditionError("supercritical speed required: c > 1")


def resolvent_symbol(xi, c: float):
    """m/(c - m), strictly positive for c > 1."""
    _check_speed(c)
    m = whitham_symbol(xi)
    return m / (c - m)


def strip_halfwidth(c: float) -> float:
    """Root of tan(d)/d = c^2 on (0, pi/2), by bisection."""
    _check_speed(c)
    c2 = float(c) * float(c)
    lo, hi = 1e-15, np.pi / 2 - 1e-12
    g = lambda d: np.tan(d) / d - c2
    # bisect until the bracket stops shrinking; that is well below 1e-12
    while True:
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if g(mid) > 0:
            hi = mid
        else:
            lo = mid
    return lo if abs(g(lo)) <= abs(g(hi)) else hi


@dataclass(frozen=True)
class Multiplier:
    """An even Fourier multiplier.

    kind is "whitham", "resolvent" (needs c) or "custom" (needs func).
    """

    kind: str
    c: Optional[float] = None
    func: Optional[Callable] = None
    label: str = ""

    def __post_init__(self):
        if self.kind == "resolvent":
            _check_speed(self.c)
        elif self.kind == "custom":
            if self.func is None:
                raise ValueError("custom multiplier needs func")
        elif self.kind != "whitham":
            raise ValueError(f"unknown multiplier kind {self.kind!r}")

    @classmethod
    def whitham(cls):
        return cls("whitham")

    @classmethod
    def resolvent(cls, c):
        return cls("resolvent", c=float(c))

    @classmethod
    def custom(cls, func, label="custom"):
        return cls("custom", func=func, label=label)

    def __call__(self, xi):
        xi = np.abs(np.asarray(xi, dtype=float))
        if self.kind == "whitham":
            return whitham_symbol(xi)
        if self.kind == "resolvent":
            return resolvent_symbol(xi, self.c)
        out = np.asarray(self.func(xi), dtype=float)
        if not np.all(np.isfinite(out)):
            raise DomainError("multiplier produced non-finite values")
        return out

    def far_field(self, K: int = 10):
        """Coefficients a_k with s(xi) ~ sum_k a_k |xi|^(-k/2) as xi -> inf.

        Returns None for custom symbols (no known expansion).
        """
        a = np.zeros(K + 1)
        if self.kind == "whitham":
            a[1] = 1.0
        elif self.kind == "resolvent":
            # m/(c-m) = sum_k (m/c)^k and m ~ |xi|^(-1/2) up to exponentially small terms
            a[1:] = float(self.c) ** -np.arange(1.0, K + 1)
        else:
            return None
        return a

    @property
    def name(self) -> str:
        if self.kind == "resolvent":
            return f"resolvent(c={self.c:g})"
        return self.label or self.kind
