"""Numerical certificates for symmetry, ordering, decay, and the auxiliary inequalities."""
from __future__ import annotations

import math
from dataclasses import asdict, dataclass, field
from typing import Iterable, Optional, Sequence

import numpy as np
from scipy import integrate, signal

from .errors import DegenerateInputError, PreconditionError, TruncationError
from .grid import SpectralField
from .kernels import KernelTable
from .steady import profile_decay_rate
from .symbols import strip_halfwidth

EPS_NUM = 1e-10
CREST_LEVEL = 1e-6
DECAY_LEVEL = 1e-8


# ------------------------------------------------------------------ symmetry
@dataclass
class PlaneScan:
    lam: float
    degenerate: bool = False

    def __float__(self):
        return float(self.lam)


@dataclass
class SymmetryReport:
    crest_location: float
    reflection_error: float
    crest_count: int
    monotone_tail: bool
    moving_plane_sup: float
    tolerance: float
    grid_spacing: float
    degenerate_scan: bool = False
    below_half_speed: Optional[bool] = None
    strictly_decreasing_tail: Optional[bool] = None
    passed: bool = False

    def to_dict(self):
        return asdict(self)


def crest_location(phi: SpectralField) -> float:
    """Vertex of the parabola through the discrete maximum and its neighbours."""
    v = np.asarray(phi.values)
    N = v.size
    j = int(np.argmax(v))
    ym, y0, yp = v[(j - 1) % N], v[j], v[(j + 1) % N]
    den = ym - 2 * y0 + yp
    off = 0.5 * (ym - yp) / den if den < 0 else 0.0
    return float(phi.grid.x[j] + off * phi.grid.h)


def count_crests(v: np.ndarray, level: float = CREST_LEVEL) -> list:
    top = np.max(v)
    inner = v[1:-1]
    idx = np.nonzero((inner > v[:-2]) & (inner > v[2:]) & (inner > level * top))[0] + 1
    return [int(i) for i in idx]


def reflection_error(phi: SpectralField, lam: float) -> float:
    """sup |phi(2 lam - x) - phi(x)| / sup phi."""
    r = phi.reflected(lam)
    return float(np.max(np.abs(r.values - phi.values)) / np.max(phi.values))


def _tail_is_monotone(phi: SpectralField, lam: float, strict: bool = False) -> bool:
    g = phi.grid
    v = np.asarray(phi.values)
    j0 = int(np.ceil((lam + g.L) / g.h - 1e-9))
    n = int(g.N // 4)  # L/2 worth of samples
    seg = v[np.arange(j0, j0 + n + 1) % g.N]
    d = np.diff(seg)
    if not strict:
        return bool(np.all(d <= EPS_NUM * np.max(v)))
    top = np.max(v)
    sig = seg[1:] > DECAY_LEVEL * top  # where roundoff cannot flip the sign
    return bool(np.all(d[sig] < 0))


def moving_plane_scan(phi: SpectralField) -> PlaneScan:
    """Slide lam rightwards from the left edge while phi(x) >= phi(2 lam - x) - eps for x > lam.

    Candidates are the half-grid points, so the result is exact to h/2.
    Reflections falling outside the box count as zero.
    """
    g = phi.grid
    v = np.asarray(phi.values)
    top = float(np.max(v))
    if top <= 0:
        raise DegenerateInputError("profile has no positive part")
    eps = EPS_NUM * top
    x0 = float(g.x[0])
    jmax = int(np.argmax(v))
    if jmax in (0, g.N - 1) or not count_crests(v):
        return PlaneScan(x0, True)
    if max(abs(v[0]), abs(v[-1])) > DECAY_LEVEL * top:
        raise TruncationError("profile has not decayed at the edge of the box")
    sig = np.nonzero(v > eps)[0]
    negs = np.nonzero(v < -eps)[0]  # these fail even against a zero reflection
    N = g.N
    p = 2 * int(sig[0]) if sig.size else 0
    last_ok = p
    while p <= 2 * (N - 1):
        # x_j > lam_p  <=>  2 j > p ; reflection index i = p - j
        i = sig[(sig < p / 2) & (sig > p - N)]
        ok = True
        if i.size:
            j = p - i
            ok = bool(np.all(v[j] >= v[i] - eps))
        if ok and negs.size:
            jn = negs[2 * negs > p]
            refl = p - jn
            rv = np.where(refl >= 0, v[np.clip(refl, 0, N - 1)], 0.0)
            ok = bool(np.all(v[jn] >= rv - eps))
        if not ok:
            break
        last_ok = p
        p += 1
    return PlaneScan(x0 + last_ok * g.h / 2, False)


def verify_symmetry(phi: SpectralField, tol: float = 1e-7, c: Optional[float] = None) -> SymmetryReport:
    v = np.asarray(phi.values)
    top = float(np.max(v))
    if top <= 0:
        raise PreconditionError("sup phi must be positive")
    if top == float(np.min(v)):
        raise DegenerateInputError("flat profile")
    lam0 = crest_location(phi)
    err = reflection_error(phi, lam0)
    crests = count_crests(v)
    mono = _tail_is_monotone(phi, lam0)
    scan = moving_plane_scan(phi)
    h = phi.grid.h
    rep = SymmetryReport(lam0, err, len(crests), mono, scan.lam, tol, h, scan.degenerate)
    if c is not None:
        x = np.asarray(phi.grid.x)
        right = (x >= lam0 + h) & (x <= lam0 + phi.grid.L / 2)
        rep.below_half_speed = bool(np.max(v[right]) < c / 2) if np.any(right) else None
        rep.strictly_decreasing_tail = _tail_is_monotone(phi, lam0, strict=True)
    rep.passed = bool(err <= tol and len(crests) == 1 and mono and not scan.degenerate
                      and abs(scan.lam - lam0) <= h)
    return rep


# ------------------------------------------------------------------ touching dichotomy
@dataclass
class TouchingVerdict:
    verdict: str  # "identically equal", "strictly ordered" or "inconclusive"
    lam: float
    min_integral: float
    max_difference: float
    checked_points: int

    def to_dict(self):
        return asdict(self)


def half_line_convolution(f: np.ndarray, table: KernelTable) -> np.ndarray:
    """H * f for f odd about some lam.

    For x >= lam this equals int_lam^inf (H(x-y) - H(x+y-2lam)) f(y) dy: the
    reflected half of the integral is rewritten with z = 2lam - y and f(z) = -f(y),
    which puts every quadrature node back on the grid.
    """
    return table.convolve(f)


def touching_check(phi1: SpectralField, phi2: SpectralField, lam: float, table: KernelTable) -> TouchingVerdict:
    """Dichotomy check for an ordered pair on the half line [lam, inf)."""
    g = phi1.grid
    if phi2.grid != g or table.grid != g:
        raise PreconditionError("fields and kernel table must share one grid")
    c = table.symbol.c
    v1, v2 = np.asarray(phi1.values), np.asarray(phi2.values)
    top = max(float(np.max(np.abs(v1))), float(np.max(np.abs(v2))), 1e-300)
    eps = EPS_NUM * top
    x = np.asarray(g.x)
    right = x >= lam
    if np.any(v1[right] < v2[right] - eps):
        raise PreconditionError("hypothesis phi1 >= phi2 on [lam, inf) fails")
    f = v1 * v1 - v2 * v2
    fr = SpectralField(g, f).reflected(lam).values
    if np.max(np.abs(fr + f)) > eps * top:
        raise PreconditionError("hypothesis phi1^2 - phi2^2 odd about lam fails")
    integral = half_line_convolution(f, table)
    d = (v1 - v2)[right]
    maxdiff = float(np.max(np.abs(d))) if d.size else 0.0
    sig = right & (np.maximum(v1, v2) > DECAY_LEVEL * top) & (x > lam + 0.5 * g.h)
    mi = float(np.min(integral[sig])) if np.any(sig) else 0.0
    if maxdiff <= 1e-8 * top:
        verdict = "identically equal"
    else:
        ordered = np.all((v1 - v2)[sig] > 0)
        sub = c is None or np.all((v1 + v2)[sig] < c)
        verdict = "strictly ordered" if (ordered and sub and mi > 0) else "inconclusive"
    return TouchingVerdict(verdict, float(lam), mi, maxdiff, int(np.count_nonzero(sig)))


# ------------------------------------------------------------------ decay
def weighted_norm(phi: SpectralField, l: float, q: float) -> float:
    """(h sum (|x|^l |phi|)^q)^(1/q), or the max for q = inf."""
    if l < 0 or not (q >= 1):
        raise PreconditionError("need l >= 0 and q in [1, inf]")
    x = np.abs(np.asarray(phi.grid.x))
    w = x ** l * np.abs(phi.values) if l else np.abs(np.asarray(phi.values))
    if np.isinf(q):
        return float(np.max(w))
    return float((phi.grid.h * np.sum(w ** q)) ** (1.0 / q))


DEFAULT_NORMS = tuple((l, q) for l in (0, 1, 2, 4) for q in (2.5, 3.0, math.inf))


@dataclass
class DecayReport:
    fitted_rate: float
    reference_rate: float
    window: tuple
    weighted_norms: dict = field(default_factory=dict)
    passed: bool = False

    def to_dict(self):
        d = asdict(self)
        d["weighted_norms"] = {f"l={l:g},q={q:g}": v for (l, q), v in self.weighted_norms.items()}
        return d


def decay_report(phi: SpectralField, c: float, window=None,
                 norms: Iterable = DEFAULT_NORMS) -> DecayReport:
    nu, win = profile_decay_rate(phi, window)
    delta = strip_halfwidth(c)
    wn = {(float(l), float(q)): weighted_norm(phi, l, q) for l, q in norms}
    ok = nu >= 0.9 * delta and all(np.isfinite(v) for v in wn.values())
    return DecayReport(nu, delta, win, wn, bool(ok))


# ------------------------------------------------------------------ auxiliary inequalities
def factorial_inequality_holds(n: int, q: int) -> bool:
    """(q n)! <= (q^n n!)^q in exact integers."""
    if int(n) != n or int(q) != q or not (0 <= n <= 20) or not (1 <= q <= 5):
        raise PreconditionError("need integers 0 <= n <= 20 and 1 <= q <= 5")
    n, q = int(n), int(q)
    return math.factorial(q * n) <= (q ** n * math.factorial(n)) ** q


def _linear_conv(a, b, h):
    if a.size <= 8192:
        return np.convolve(a, b) * h
    return signal.fftconvolve(a, b) * h


def moment_sides(f: SpectralField, g: SpectralField, n: int):
    """Both sides of x^n (f*g) = sum_j C(n,j) (x^(n-j) f) * (x^j g) on the sum lattice."""
    if not (0 <= n <= 6) or int(n) != n:
        raise PreconditionError("need integer 0 <= n <= 6")
    grid = f.grid
    if g.grid != grid:
        raise PreconditionError("f and g must share one grid")
    fv, gv = np.asarray(f.values), np.asarray(g.values)
    for v, name in ((fv, "f"), (gv, "g")):
        if max(abs(v[0]), abs(v[-1])) > DECAY_LEVEL * max(np.max(np.abs(v)), 1e-300):
            raise TruncationError(f"{name} has not decayed at the edge of the box")
    x = np.asarray(grid.x)
    h = grid.h
    X = 2 * x[0] + h * np.arange(2 * grid.N - 1)  # points x_j + x_k
    X[grid.N] = 0.0
    lhs = X ** n * _linear_conv(fv, gv, h)
    rhs = np.zeros_like(lhs)
    for j in range(n + 1):
        rhs += math.comb(n, j) * _linear_conv(x ** (n - j) * fv, x ** j * gv, h)
    return X, lhs, rhs


def convolution_moment_identity(f: SpectralField, g: SpectralField, n: int) -> float:
    """sup |lhs - rhs| of the binomial moment identity for convolutions."""
    _, lhs, rhs = moment_sides(f, g, n)
    return float(np.max(np.abs(lhs - rhs)))


def weight_ratio(l: float, m: float, x: float, eps: float) -> float:
    """[int |y|^l / ((1+eps|y|)^m (1+|x-y|)^m) dy] (1+eps|x|)^m / |x|^l."""
    f = lambda y: abs(y) ** l / ((1 + eps * abs(y)) ** m * (1 + abs(x - y)) ** m)
    a, b = sorted((0.0, x))
    parts = [integrate.quad(f, -np.inf, a, limit=200)[0],
             integrate.quad(f, a, b, limit=200)[0],
             integrate.quad(f, b, np.inf, limit=200)[0]]
    return float(sum(parts) * (1 + eps * abs(x)) ** m / abs(x) ** l)


def weight_inequality_constant(l: float, m: float, x_range: Sequence[float],
                               eps_set: Sequence[float]) -> float:
    """Largest weight_ratio over the probe grid x_range x eps_set."""
    if not (0 < l < m - 1):
        raise PreconditionError("need 0 < l < m - 1")
    xs = [float(v) for v in x_range]
    es = [float(e) for e in eps_set]
    if not xs or any(abs(v) < 1 for v in xs):
        raise PreconditionError("probes need |x| >= 1")
    if not es or any(e <= 0 for e in es):
        raise PreconditionError("eps values must be positive")
    return max(weight_ratio(l, m, xv, e) for xv in xs for e in es)


def _bump(x, center, radius):
    r = (x - center) / radius
    out = np.zeros_like(x)
    inside = np.abs(r) < 1
    out[inside] = np.exp(-1.0 / (1.0 - r[inside] ** 2))
    return out


def random_compact_pair(grid, rng: np.random.Generator):
    """Two smooth compactly supported bumps with random centers, radii and heights."""
    x = np.asarray(grid.x)
    span = grid.L / 4
    pair = []
    for _ in range(2):
        center = rng.uniform(-span, span)
        radius = rng.uniform(0.5, span)
        height = rng.uniform(0.5, 2.0)
        pair.append(SpectralField(grid, height * _bump(x, center, radius)))
    return tuple(pair)
