"""Analytic pieces used to synthesize kernels with a |x|^(-1/2) singularity.

Near field
    The symbol s(xi) ~ sum_k a_k |xi|^(-k/2) is split as
    s = sum_k b_k (xi^2 + kappa^2)^(-k/4) + r, where the b_k are chosen so
    the first K far-field terms cancel in r. Each subtracted term has the
    closed-form inverse transform P_k |x|^nu K_nu(kappa |x|), nu = k/4 - 1/2,
    and r decays fast enough for a plain discrete inverse transform.

Tail
    For x > 0 the resolvent kernel equals a sum of exponentials from the
    poles of m/(c - m) on the imaginary axis plus integrals over the branch
    cuts of sqrt(tanh z / z). All contributions are positive, which is what
    lets the table certify positivity far below the transform noise floor.

Quadrature weights
    Trapezoid sums of H(x - y) f(y) are corrected at the singular node with
    the generalized Euler-Maclaurin (zeta-function) terms of the origin
    expansion of H.
"""
from __future__ import annotations

from functools import lru_cache

import mpmath
import numpy as np
from numpy.polynomial import polynomial as P
from scipy import optimize, special

KAPPA = 1.0
NTERMS = 10


def near_field_coefficients(a, kappa=KAPPA):
    """b_k so that sum b_k (xi^2+kappa^2)^(-k/4) matches sum a_k |xi|^(-k/2) to order K."""
    K = len(a) - 1
    # |xi|^(-1/2) = t (1 - kappa^2 t^4)^(-1/4) with t = (xi^2 + kappa^2)^(-1/4)
    us = np.zeros(K + 1)
    coef = 1.0
    for n in range(K // 4 + 1):
        if 4 * n + 1 <= K:
            us[4 * n + 1] = coef * kappa ** (2 * n)
        coef *= (0.25 + n) / (n + 1)
    b = np.zeros(K + 1)
    upow = np.zeros(K + 1)
    upow[0] = 1.0
    for k in range(1, K + 1):
        upow = np.pad(P.polymul(upow, us), (0, 2 * K + 2))[: K + 1]
        b += a[k] * upow
    return b


def matern_symbol(k, xi, kappa=KAPPA):
    return (np.asarray(xi) ** 2 + kappa ** 2) ** (-k / 4)


def _matern_prefactor(k, kappa):
    nu = k / 4 - 0.5
    return np.sqrt(np.pi) / special.gamma(k / 4) * (2 * kappa) ** (-nu) / np.pi


def matern_kernel(k, x, kappa=KAPPA):
    """Inverse transform of (xi^2 + kappa^2)^(-k/4) at x != 0."""
    nu = k / 4 - 0.5
    ax = np.abs(np.asarray(x, dtype=float))
    return _matern_prefactor(k, kappa) * ax ** nu * special.kv(nu, kappa * ax)


def matern_smooth_constant(k, kappa=KAPPA):
    """Value at 0 of matern_kernel after removing its singular origin terms."""
    nu = k / 4 - 0.5
    pk = _matern_prefactor(k, kappa)
    if k == 2:
        return pk * (-np.log(kappa / 2) - np.euler_gamma)
    return pk * special.gamma(nu) * 2 ** (nu - 1) * kappa ** (-nu)


def singular_sum(b, x, kappa=KAPPA):
    x = np.asarray(x, dtype=float)
    out = np.zeros(x.shape)
    for k in range(1, len(b)):
        if b[k]:
            out += b[k] * matern_kernel(k, x, kappa)
    return out


def origin_terms(a):
    """Origin expansion of F^{-1} sum_k a_k |xi|^(-k/2): list of (C, beta, has_log).

    Each entry stands for C |x|^beta, times log|x| when has_log is set.
    """
    out = []
    for k in range(1, len(a)):
        if not a[k]:
            continue
        al = k / 2
        if k % 2 == 1:
            C = special.gamma(1 - al) * np.sin(np.pi * al / 2) / np.pi
            out.append((a[k] * C, al - 1, False))
        elif k % 4 == 0:
            n = k // 4
            C = (-1) ** n / (2 * special.factorial(2 * n - 1))
            out.append((a[k] * C, 2 * n - 1, False))
        else:
            n = (k - 2) // 4
            C = (-1) ** (n + 1) / (np.pi * special.factorial(2 * n))
            out.append((a[k] * C, 2 * n, True))
    return out


def origin_singular_value(terms, x):
    ax = np.abs(np.asarray(x, dtype=float))
    out = np.zeros(ax.shape)
    for C, be, lg in terms:
        out += C * ax ** be * (np.log(ax) if lg else 1.0)
    return out


@lru_cache(maxsize=64)
def _zeta_factor(beta, l, has_log, h):
    s = -beta - 2 * l
    if has_log:
        return float(-mpmath.zeta(s, derivative=1) + mpmath.zeta(s) * mpmath.log(h))
    return float(mpmath.zeta(s))


def endpoint_corrections(terms, h, lmax=2):
    """Zeta-function corrections for trapezoid sums over a node at the singularity.

    Returns (d0, [d1, d2, ...]): d0 adds to the origin weight, d_l multiplies
    the 2l-th derivative of the smooth factor.
    """
    d = [0.0] * (lmax + 1)
    for C, be, lg in terms:
        for l in range(lmax + 1):
            p = be + 2 * l
            if not lg and p == int(p) and int(p) % 2 == 0:
                continue  # smooth even monomials need no correction
            z = _zeta_factor(float(be), l, bool(lg), float(h))
            d[l] += -2 * C * z * h ** (p + 1) / special.factorial(2 * l)
    return d[0], d[1:]


# ---------------------------------------------------------------- tail
_GL = 40


def _gauss_cut_nodes(n=_GL):
    gx, gw = np.polynomial.legendre.leggauss(n)
    th = np.pi / 2 * (gx + 1)
    wth = np.pi / 2 * gw
    # t = (pi/4)(1 - cos th) clusters nodes at both ends of the cut
    t = (np.pi / 4) * (1 - np.cos(th))
    dt = (np.pi / 4) * np.sin(th)
    return t, wth * dt


@lru_cache(maxsize=32)
def _tail_data(c, kmax):
    """Pole rates/weights and cut nodes/weights (exponent rates s, weights w)."""
    t, wt = _gauss_cut_nodes()
    rates, weights = [], []
    for k in range(kmax):
        b = k * np.pi + np.pi / 2
        ss = b + t
        mu = np.sqrt((np.cos(t) / np.sin(t)) / ss)
        if c is None:
            cw = wt * mu / np.pi
        else:
            c2 = c * c
            f = lambda e: np.cos(e) - c2 * (b - e) * np.sin(e)
            top = np.pi / 2 - 1e-12 if k == 0 else np.pi / 2
            eps = optimize.brentq(f, 0.0, top, xtol=1e-300, rtol=1e-15)
            s = b - eps
            dT = 1 / (np.sin(eps) ** 2 * s) - (np.cos(eps) / np.sin(eps)) / s ** 2
            rates.append(s)
            weights.append(2 * c2 / dT)
            cw = wt * c * mu / (c2 + mu * mu) / np.pi
        rates.extend(ss)
        weights.extend(cw)
    return np.array(rates), np.array(weights)


def tail_value(x, c=None, x_min=0.5):
    """Kernel at |x| >= x_min from the exponential expansion.

    c=None gives the Whitham kernel K, otherwise the resolvent kernel H_c.
    """
    ax = np.abs(np.asarray(x, dtype=float))
    kmax = int(np.ceil(40.0 / (np.pi * x_min))) + 4
    rates, weights = _tail_data(None if c is None else float(c), kmax)
    out = np.empty(ax.shape)
    flat = ax.ravel()
    res = out.ravel()
    step = 4096
    for i in range(0, flat.size, step):
        blk = flat[i:i + step]
        res[i:i + step] = np.exp(-np.outer(blk, rates)) @ weights
    return out
