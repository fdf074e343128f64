"""Solitary waves of -c phi + phi^2 + K * phi = 0 by Petviashvili iteration."""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .errors import (DependencyError, NoRealShiftError, NonConvergenceError,
                     PreconditionError, WhithamError)
from .grid import Grid, SpectralField, dealiased_square
from .kernels import KernelTable, fit_decay_rate, resolvent_kernel
from .symbols import _check_speed, whitham_symbol

log = logging.getLogger(__name__)

MAX_ITER = 500


@dataclass
class SolitaryWave:
    grid: Grid
    phi: SpectralField
    c: float
    residual_physical: float = float("nan")
    residual_convolution: float = float("nan")
    iterations: int = 0
    converged: bool = False
    stabilizer: float = float("nan")
    diagnostics: dict = field(default_factory=dict)

    @property
    def amplitude(self) -> float:
        return float(np.max(self.phi.values))

    def to_dict(self):
        return {
            "c": self.c,
            "L": self.grid.L,
            "N": self.grid.N,
            "sup_phi": self.amplitude,
            "residual_physical": self.residual_physical,
            "residual_convolution": self.residual_convolution,
            "iterations": self.iterations,
            "converged": self.converged,
            "stabilizer": self.stabilizer,
            **self.diagnostics,
        }


# ------------------------------------------------------------ Galilean shift
@dataclass(frozen=True)
class GalileanShift:
    gamma: float

    def apply(self, phi, c, B):
        g = self.gamma
        return phi + g, c + 2 * g, B + g * (1 - c - g)

    def inverse(self) -> "GalileanShift":
        return GalileanShift(-self.gamma)


class Normalized(NamedTuple):
    phi: object
    c: float
    B: float
    gamma: float


def normalize_galilean(phi, c: float, B: float) -> Normalized:
    """Shift (phi, c, B) to B = 0 using the root gamma of smaller magnitude."""
    # gamma (1 - c - gamma) = -B  <=>  gamma^2 + (c - 1) gamma - B = 0
    b, c0 = c - 1.0, -B
    disc = b * b - 4 * c0
    if disc < 0:
        raise NoRealShiftError(f"no real Galilean shift: discriminant {disc:.3g} < 0")
    if c0 == 0:
        gamma = 0.0
    else:
        q = -0.5 * (b + np.copysign(np.sqrt(disc), b if b else 1.0))
        roots = (q, c0 / q) if q else (0.5 * np.sqrt(disc), -0.5 * np.sqrt(disc))
        gamma = float(min(roots, key=abs))
    p, c2, _ = GalileanShift(gamma).apply(phi, c, B)
    return Normalized(p, c2, 0.0, gamma)


# ------------------------------------------------------------ solver
def kdv_guess(c: float, grid: Grid) -> SpectralField:
    a = 1.5 * (c - 1)
    k = np.sqrt(a)
    return SpectralField(grid, a / np.cosh(k * np.asarray(grid.x)) ** 2)


def _physical_residual(phi: np.ndarray, c: float, m: np.ndarray) -> np.ndarray:
    Kphi = np.fft.irfft(m * np.fft.rfft(phi), phi.size)
    return -c * phi + phi * phi + Kphi


def _half_spectrum_sum(v):
    # sums over the full lattice from an rfft layout
    return 2 * np.sum(v) - v[0] - v[-1]


def center_crest(phi: SpectralField) -> SpectralField:
    j = int(np.argmax(phi.values))  # leftmost maximum on ties
    x0 = phi.grid.x[j]
    return phi.shifted(-x0) if x0 else phi


def petviashvili_solve(c: float, grid: Optional[Grid] = None, init: Optional[SpectralField] = None,
                       tol: float = 1e-12, max_iter: int = MAX_ITER) -> SolitaryWave:
    """Stabilized fixed point (c - m) phi_hat = F(phi^2)."""
    _check_speed(c)
    if c > 3:
        raise PreconditionError("solver supports 1 < c <= 3")
    if tol < 1e-13:
        raise PreconditionError("tol must be >= 1e-13")
    grid = grid or Grid()
    if init is None:
        init = kdv_guess(c, grid)
    elif init.grid != grid:
        raise PreconditionError("initial guess lives on a different grid")
    if not np.any(init.values):
        raise PreconditionError("zero initial guess is a trivial fixed point")
    m = whitham_symbol(np.asarray(grid.xi))
    lop = c - m
    hat = np.array(init.hat)
    res = np.inf
    S = np.nan
    for it in range(1, max_iter + 1):
        nl = dealiased_square(grid, hat)
        num = _half_spectrum_sum(lop * np.abs(hat) ** 2)
        den = _half_spectrum_sum(np.real(np.conj(hat) * nl))
        if den == 0 or not np.isfinite(den):
            raise NonConvergenceError("stabilizing factor undefined", res, it, c)
        S = num / den
        hat = S * S * nl / lop
        phi = np.fft.irfft(hat, grid.N)
        res = float(np.max(np.abs(_physical_residual(phi, c, m))))
        if not np.isfinite(res) or res > 1e6:
            raise NonConvergenceError(f"iteration diverged at c={c}", res, it, c)
        if res <= tol:
            break
    else:
        raise NonConvergenceError(
            f"no convergence in {max_iter} iterations at c={c}; last residual {res:.3e}", res, max_iter, c)
    field_ = center_crest(SpectralField.from_hat(grid, hat))
    wave = SolitaryWave(grid, field_, float(c), iterations=it, converged=True, stabilizer=float(S))
    try:
        wave.residual_physical, wave.residual_convolution = residual(wave)
    except DependencyError as exc:
        # grids too coarse for a kernel table still get the spectral residual
        wave.residual_physical = res
        wave.diagnostics["convolution_residual_unavailable"] = str(exc)
    return wave


def residual(wave: SolitaryWave, table: Optional[KernelTable] = None):
    """(sup |-c phi + phi^2 + K*phi|, sup |phi (c - phi) - H_c * phi^2|)."""
    phi = wave.phi
    if phi.consistency_error() > 1e-12 * max(1.0, float(np.max(np.abs(phi.values)))):
        raise PreconditionError("physical and spectral data disagree")
    g, c = wave.grid, wave.c
    if table is None:
        try:
            table = resolvent_kernel(c, g)
        except WhithamError as exc:
            raise DependencyError(f"kernel table unavailable: {exc}") from exc
    elif table.grid != g or table.symbol.kind != "resolvent" or table.symbol.c != c:
        raise DependencyError("kernel table does not match the wave's grid and speed")
    v = np.asarray(phi.values)
    m = whitham_symbol(np.asarray(g.xi))
    r1 = float(np.max(np.abs(_physical_residual(v, c, m))))
    r2 = float(np.max(np.abs(v * (c - v) - table.convolve(v * v))))
    return r1, r2


ROUNDOFF_FLOOR = 1e-14


def within_bounds(wave: SolitaryWave, floor: float = ROUNDOFF_FLOOR) -> bool:
    """0 < phi < c, with the far tail allowed to sit at roundoff level (|phi| <= floor*sup)."""
    v = np.asarray(wave.phi.values)
    top = float(np.max(v))
    return bool(np.min(v) >= -floor * top and top < wave.c and top > 0)


# ------------------------------------------------------------ tails
def tail_window(phi: SpectralField, hi_level: float = 1e-3, lo_level: float = 1e-9):
    """Fit window right of the crest where phi/sup phi falls from hi_level to lo_level."""
    g = phi.grid
    v = np.asarray(phi.values)
    x = np.asarray(g.x)
    j0 = int(np.argmax(v))
    top = v[j0]
    sel = (x > x[j0]) & (x <= x[j0] + g.L / 2)
    xs, vs = x[sel], v[sel]
    below = np.nonzero(vs < hi_level * top)[0]
    if below.size == 0:
        raise PreconditionError("profile does not decay inside half the box")
    i0 = below[0]
    above = np.nonzero(vs[i0:] > lo_level * top)[0]
    if above.size < 10:
        raise PreconditionError("tail too short for a decay fit")
    i1 = i0 + above[-1]
    # stop at the first non-monotone step to stay clear of roundoff wiggles
    d = np.diff(vs[i0:i1 + 1])
    bad = np.nonzero(d >= 0)[0]
    if bad.size:
        i1 = i0 + bad[0]
    return float(xs[i0]), float(xs[i1])


def profile_decay_rate(phi: SpectralField, window=None):
    if window is None:
        window = tail_window(phi)
    x = np.asarray(phi.grid.x)
    return fit_decay_rate((x, np.asarray(phi.values)), window), tuple(window)


def continuation_sweep(c_values: Sequence[float], grid: Optional[Grid] = None,
                       tol: float = 1e-12) -> list:
    """Solve for ascending speeds, warm-starting each solve from the last wave."""
    cs = [float(c) for c in c_values]
    if any(b <= a for a, b in zip(cs, cs[1:])):
        raise PreconditionError("c_values must be strictly ascending")
    for c in cs:
        _check_speed(c)
        if c > 3:
            raise PreconditionError("c_values must lie in (1, 3]")
    grid = grid or Grid()
    out, prev = [], None
    for c in cs:
        try:
            wave = petviashvili_solve(c, grid, init=prev.phi if prev else None, tol=tol)
        except NonConvergenceError as exc:
            exc.c = c
            raise
        try:
            nu, win = profile_decay_rate(wave.phi)
        except WhithamError:
            nu, win = float("nan"), None
        wave.diagnostics.update(decay_rate=nu, decay_window=win)
        log.info("c=%g sup=%.6g nu=%.4g iterations=%d", c, wave.amplitude, nu, wave.iterations)
        out.append(wave)
        prev = wave
    return out
