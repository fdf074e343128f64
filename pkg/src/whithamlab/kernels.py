"""Kernel synthesis K = F^{-1} m, H_c = F^{-1} m/(c-m), and shape certificates."""
from __future__ import annotations

import math
import warnings
from dataclasses import dataclass, field, asdict
from functools import lru_cache
from typing import Callable, Optional, Sequence

import mpmath
import numpy as np

from . import _singular as sg
from .errors import DomainError, PreconditionError, ResolutionError
from .grid import Grid, SpectralField
from .symbols import Multiplier, _check_speed

XI_MAX_MIN = 100.0
TAIL_START = 0.5
SPECTRAL_FLOOR = 1e-13


def _lattice_sum(grid: Grid, coef, theta: float = 0.0):
    """(1/2L) sum_k coef(xi_k) e^{i xi_k (x_j + theta)} for all j, coef even in k."""
    N = grid.N
    k = np.arange(N // 2 + 1)
    ph = np.where(k % 2 == 0, 1.0, -1.0).astype(complex)  # e^{-i xi_k L}
    if theta:
        ph = ph * np.exp(1j * np.asarray(grid.xi) * theta)
        ph[-1] = (-1.0) ** (N // 2) * np.cos(grid.xi[-1] * theta)
    return np.fft.irfft(coef * ph, N) * N / (2 * grid.L)


def _trig_eval(grid: Grid, coef, x):
    """Same band-limited sum evaluated at arbitrary points."""
    x = np.asarray(x, dtype=float)
    xi = np.asarray(grid.xi)
    w = np.full(xi.size, 2.0)
    w[0] = 1.0
    w[-1] = 1.0
    cw = coef * w / (2 * grid.L)
    flat = x.ravel()
    out = np.empty(flat.size)
    step = max(1, 2 ** 22 // xi.size)
    for i in range(0, flat.size, step):
        out[i:i + step] = np.cos(np.outer(flat[i:i + step], xi)) @ cw
    return out.reshape(x.shape)


class KernelTable:
    """Sampled kernel with its near-origin singular structure made explicit.

    values[j] is the kernel at x_j for x_j != 0. At the origin, where the
    kernel is infinite, values holds origin_weight / h, the corrected
    quadrature weight, so h * sum(values) is the kernel's total mass.
    """

    def __init__(self, grid, symbol, regular_part, singular_part, values,
                 singular_coefficient, origin_weight, fitted_tail_rate,
                 _regular_coef, _near, _terms, _derivative_weights):
        self.grid = grid
        self.symbol = symbol
        for name, arr in (("regular_part", regular_part), ("singular_part", singular_part),
                          ("values", values)):
            arr = np.array(arr, dtype=float)
            arr.flags.writeable = False
            setattr(self, name, arr)
        self.singular_coefficient = float(singular_coefficient)
        self.origin_weight = float(origin_weight)
        self.fitted_tail_rate = float(fitted_tail_rate)
        self._regular_coef = _regular_coef
        self._near = _near
        self._terms = _terms
        self._dweights = tuple(_derivative_weights)

    @property
    def singular(self) -> bool:
        return self._near is not None

    @property
    def tail_start(self) -> Optional[float]:
        return TAIL_START if self.symbol.kind != "custom" else None

    def evaluate(self, x):
        """Kernel at arbitrary points (inf at the origin of a singular kernel)."""
        x = np.asarray(x, dtype=float)
        ax = np.abs(x)
        out = np.empty(ax.shape)
        far = np.zeros(ax.shape, dtype=bool)
        if self.tail_start is not None:
            far = ax >= self.tail_start
            c = self.symbol.c if self.symbol.kind == "resolvent" else None
            out[far] = sg.tail_value(ax[far], c, self.tail_start)
        near = ~far
        if np.any(near):
            v = _trig_eval(self.grid, self._regular_coef, ax[near])
            if self.singular:
                with np.errstate(divide="ignore", invalid="ignore"):
                    s = sg.singular_sum(self._near, ax[near])
                s[ax[near] == 0] = np.inf
                v = v + s
            out[near] = v
        return out if out.ndim else float(out)

    def on_shifted_grid(self, theta: float):
        """Kernel at x_j + theta for all j (theta not a multiple of h)."""
        g = self.grid
        pts = np.asarray(g.x) + theta
        return self.evaluate(pts)

    def origin_smooth_value(self):
        return self.origin_weight / self.grid.h

    def convolve(self, f):
        """Quadrature for (k * f)(x_j) with singularity-corrected weights."""
        g = self.grid
        fv = f.values if isinstance(f, SpectralField) else np.asarray(f, dtype=float)
        w = g.h * self.values
        wr = np.roll(w, -g.origin)
        fh = np.fft.rfft(fv)
        out = np.fft.irfft(np.fft.rfft(wr) * fh, g.N)
        if self._dweights:
            xi2 = -np.asarray(g.xi) ** 2
            corr = np.zeros_like(fh)
            for l, d in enumerate(self._dweights, start=1):
                corr += d * xi2 ** l * fh
            out = out + np.fft.irfft(corr, g.N)
        return out

    def to_dict(self):
        return {
            "symbol": self.symbol.name,
            "L": self.grid.L,
            "N": self.grid.N,
            "singular_coefficient": self.singular_coefficient,
            "origin_weight": self.origin_weight,
            "fitted_tail_rate": self.fitted_tail_rate,
        }


def synthesize_kernel(symbol: Multiplier, grid: Grid, nterms: int = sg.NTERMS,
                      fit_window=(2.0, 8.0)) -> KernelTable:
    """Build a KernelTable for ``symbol`` on ``grid``."""
    if grid.xi_max < XI_MAX_MIN:
        raise ResolutionError(
            f"grid resolves frequencies only up to {grid.xi_max:.3g} < {XI_MAX_MIN:g}; "
            "increase N or decrease L")
    xi = np.asarray(grid.xi)
    s = symbol(xi)
    if not np.all(np.isfinite(s)):
        raise DomainError("symbol is not finite on the frequency lattice")
    x = np.asarray(grid.x)
    o = grid.origin
    a = symbol.far_field(nterms)
    if a is None:
        reg = _lattice_sum(grid, s)
        sing = np.zeros(grid.N)
        values = reg.copy()
        origin_weight = grid.h * values[o]
        near, terms, dws = None, [], []
        coef = s
        a1 = 0.0
    else:
        b = sg.near_field_coefficients(a)
        coef = s.copy()
        for k in range(1, len(b)):
            coef -= b[k] * sg.matern_symbol(k, xi)
        reg = _lattice_sum(grid, coef)
        # regular part is even in exact arithmetic; remove transform asymmetry
        reg[1:] = 0.5 * (reg[1:] + reg[1:][::-1])
        sing = np.zeros(grid.N)
        nz = np.arange(grid.N) != o
        sing[nz] = sg.singular_sum(b, x[nz])
        values = reg + sing
        # replace the far field by the exact exponential expansion
        pos = np.arange(o + 1, grid.N)
        far = pos[x[pos] >= TAIL_START]
        if far.size:
            c = symbol.c if symbol.kind == "resolvent" else None
            tv = sg.tail_value(x[far], c, TAIL_START)
            values[far] = tv
            values[2 * o - far] = tv
            # x_0 = -L has no mirror image inside the grid
            values[0] = sg.tail_value(np.array([grid.L]), c, TAIL_START)[0]
        terms = sg.origin_terms(a)
        smooth0 = reg[o] + sum(b[k] * sg.matern_smooth_constant(k) for k in range(1, len(b)))
        d0, dws = sg.endpoint_corrections(terms, grid.h)
        origin_weight = grid.h * smooth0 + d0
        values[o] = origin_weight / grid.h
        sing[o] = np.nan
        near = b
        a1 = a[1]
    table = KernelTable(grid, symbol, reg, sing, values, a1, origin_weight, np.nan,
                        coef, near, terms, dws)
    lo, hi = fit_window
    hi = min(hi, grid.L / 2)
    try:
        sel = (x >= lo) & (x <= hi)
        rate = fit_decay_rate((x[sel], table.values[sel]), (lo, hi), floor_reference=np.max(np.abs(values)))
    except (DomainError, PreconditionError):
        rate = np.nan
    table.fitted_tail_rate = float(rate)
    return table


@lru_cache(maxsize=16)
def cached_kernel(kind: str, c, L: float, N: int) -> KernelTable:
    sym = Multiplier.resolvent(c) if kind == "resolvent" else Multiplier.whitham()
    return synthesize_kernel(sym, Grid(L, N))


def resolvent_kernel(c: float, grid: Grid) -> KernelTable:
    return cached_kernel("resolvent", float(c), grid.L, grid.N)


def whitham_kernel(grid: Grid) -> KernelTable:
    return cached_kernel("whitham", None, grid.L, grid.N)


# ------------------------------------------------------------------ oracle
def _mp_symbol(symbol: Multiplier):
    if symbol.kind == "whitham":
        return lambda t: mpmath.sqrt(mpmath.tanh(t) / t) if t else mpmath.mpf(1)
    if symbol.kind == "resolvent":
        c = mpmath.mpf(symbol.c)

        def f(t):
            m = mpmath.sqrt(mpmath.tanh(t) / t) if t else mpmath.mpf(1)
            return m / (c - m)
        return f
    return lambda t: mpmath.mpf(float(symbol(float(t))))


def _power_tail(s, x):
    """int_1^inf t^(-s) cos(x t) dt in closed form (upper incomplete gamma)."""
    return mpmath.re(x ** (s - 1) * mpmath.mpc(0, 1) ** (1 - s) * mpmath.gammainc(1 - s, mpmath.mpc(0, -x)))


def kernel_by_quadrature(symbol: Multiplier, x: float, dps: int = 20, nsub: int = 6) -> float:
    """(1/pi) int_0^inf s(xi) cos(x xi) d xi by adaptive oscillatory quadrature.

    The first ``nsub`` far-field powers are subtracted on [1, inf) and
    integrated in closed form; the remainder is integrated over dyadic
    subintervals and finished with mpmath.quadosc. Independent of every
    grid-based path; intended for spot checks.
    """
    x = abs(float(x))
    if x == 0:
        raise DomainError("oscillatory quadrature needs x != 0")
    f = _mp_symbol(symbol)
    a = symbol.far_field(nsub)
    with mpmath.workdps(dps):
        xm = mpmath.mpf(x)
        if a is None:
            a = [0.0] * (nsub + 1)
        coef = [mpmath.mpf(float(v)) for v in a]
        if symbol.kind == "resolvent":
            coef = [mpmath.mpf(symbol.c) ** (-k) for k in range(nsub + 1)]
            coef[0] = mpmath.mpf(0)

        def g(t):
            return f(t) - sum(coef[k] * t ** (-mpmath.mpf(k) / 2) for k in range(1, nsub + 1) if coef[k])

        # dyadic steps while shorter than half a period, then half-period steps
        half = mpmath.pi / xm
        top = max(mpmath.mpf(64), 32 * half)
        pts = [mpmath.mpf(1)]
        while pts[-1] < top:
            pts.append(pts[-1] + min(pts[-1], half))
        v = mpmath.quad(lambda t: f(t) * mpmath.cos(xm * t), [0, 1])
        v += mpmath.quad(lambda t: g(t) * mpmath.cos(xm * t), pts)
        v += mpmath.quadosc(lambda t: g(t) * mpmath.cos(xm * t), [pts[-1], mpmath.inf], omega=xm)
        v += sum(coef[k] * _power_tail(mpmath.mpf(k) / 2, xm) for k in range(1, nsub + 1) if coef[k])
        return float(v / mpmath.pi)


def near_origin_profile(table: KernelTable, xs) -> np.ndarray:
    """sqrt(x) * kernel(x) at the given positive points."""
    xs = np.asarray(xs, dtype=float)
    return np.sqrt(xs) * table.evaluate(xs)


# ------------------------------------------------------------------ reports
@dataclass
class KernelShapeReport:
    passed: bool
    n_checked: int
    violation: Optional[str] = None
    violation_x: Optional[float] = None
    symbol: str = ""

    def to_dict(self):
        return asdict(self)


def kernel_positivity_monotonicity(table: KernelTable) -> KernelShapeReport:
    """Positivity and strict decrease of the table on (0, L/2]."""
    g = table.grid
    x = np.asarray(g.x)
    sel = (x > 0) & (x <= g.L / 2)
    xv, v = x[sel], table.values[sel]
    bad = np.nonzero(~(v > 0))[0]
    if bad.size:
        return KernelShapeReport(False, int(v.size), "positivity", float(xv[bad[0]]), table.symbol.name)
    inc = np.nonzero(~(np.diff(v) < 0))[0]
    if inc.size:
        return KernelShapeReport(False, int(v.size), "monotonicity", float(xv[inc[0] + 1]),
                                 table.symbol.name)
    return KernelShapeReport(True, int(v.size), None, None, table.symbol.name)


@dataclass
class MonotoneReport:
    passed: bool
    n_max: int
    points: list
    min_scaled: dict = field(default_factory=dict)  # n -> min of (-1)^n D^n h / tol_n
    violations: list = field(default_factory=list)  # (n, x)
    warnings: list = field(default_factory=list)

    def to_dict(self):
        d = asdict(self)
        d["min_scaled"] = {str(k): v for k, v in self.min_scaled.items()}
        return d


def cm_function(c: float) -> Callable:
    """h(x) = m(sqrt x)/(c - m(sqrt x)), the function whose complete monotonicity is checked."""
    _check_speed(c)
    sym = Multiplier.resolvent(c)
    return lambda x: sym(np.sqrt(np.asarray(x, dtype=float)))


def _divided_difference(xs, ys):
    d = np.array(ys, dtype=float)
    n = len(xs) - 1
    for j in range(1, n + 1):
        d[j:] = (d[j:] - d[j - 1:-1]) / (xs[j:] - xs[:-j])
    return d[n]


def check_complete_monotone(c: Optional[float], n_max: int, points: Sequence[float],
                            func: Optional[Callable] = None, rel_width: float = 0.1) -> MonotoneReport:
    """Sign test (-1)^n n! h[x_0..x_n] >= -tol_n on geometric stencils.

    The divided difference equals h^(n) at an interior point, so for a
    completely monotone h only rounding can make it negative. tol_n is
    1e-8 * width^(-n) * max|h| with width the stencil extent.
    ``func`` replaces the resolvent-derived h (used to validate the harness).
    """
    if n_max > 6 or n_max < 1:
        raise PreconditionError("n_max must lie in 1..6")
    pts = np.asarray(points, dtype=float)
    if pts.size == 0 or np.any(pts <= 0) or np.any(pts > 50):
        raise PreconditionError("points must lie in (0, 50]")
    h = func if func is not None else cm_function(c)
    rep = MonotoneReport(True, n_max, [float(p) for p in pts])
    for n in range(1, n_max + 1):
        q = (1 + rel_width) ** (1.0 / n)
        mins = []
        for x0 in pts:
            nodes = x0 * q ** (np.arange(n + 1) - n / 2)
            width = nodes[-1] - nodes[0]
            vals = np.asarray(h(nodes), dtype=float)
            scale = np.max(np.abs(vals))
            tol = 1e-8 * width ** (-n) * scale
            if not np.isfinite(tol) or tol > 1e6 * max(scale, 1e-300):
                rep.warnings.append(f"order {n} skipped at x={x0:g}: stencil too narrow")
                continue
            val = (-1) ** n * math.factorial(n) * _divided_difference(nodes, vals)
            mins.append(val / tol)
            if val < -tol:
                rep.passed = False
                rep.violations.append((n, float(x0)))
        rep.min_scaled[n] = float(min(mins)) if mins else float("nan")
    return rep


# ------------------------------------------------------------------ decay fits
def fit_decay_rate(samples, window, floor_reference: Optional[float] = None) -> float:
    """-slope of the least-squares line through (x, log value) inside ``window``.

    samples is a pair of arrays (x, values) or an (n, 2) array.
    floor_reference sets the noise floor 1e-13 * floor_reference; it defaults
    to the largest |value| among the samples.
    """
    if isinstance(samples, tuple) and len(samples) == 2:
        x, v = (np.asarray(s, dtype=float) for s in samples)
    else:
        arr = np.asarray(samples, dtype=float)
        x, v = arr[:, 0], arr[:, 1]
    lo, hi = window
    sel = (x >= lo) & (x <= hi)
    xs, vs = x[sel], v[sel]
    if xs.size < 10:
        raise PreconditionError(f"need at least 10 samples in window, got {xs.size}")
    if np.any(vs <= 0):
        raise DomainError("nonpositive values inside the fit window")
    ref = np.max(np.abs(v)) if floor_reference is None else floor_reference
    floor = SPECTRAL_FLOOR * ref
    if np.min(vs) < 100 * floor:
        raise PreconditionError("fit window reaches the transform noise floor")
    slope = np.polyfit(xs, np.log(vs), 1)[0]
    return float(-slope)
