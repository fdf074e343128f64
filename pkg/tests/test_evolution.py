import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from whithamlab.errors import AmbiguityError, BlowUpError, PreconditionError
from whithamlab.evolution import evolve, stable_dt, step, symmetry_axis_track, verify_traveling
from whithamlab.grid import Grid, SpectralField
from whithamlab.steady import petviashvili_solve
from whithamlab.symbols import whitham_symbol

G = Grid(50.0, 512)


@pytest.fixture(scope="module")
def small_waves():
    return {N: petviashvili_solve(1.1, Grid(50.0, N), tol=1e-11) for N in (512, 1024, 2048)}


def test_zero_is_fixed():
    u = SpectralField(G, np.zeros(G.N))
    assert np.all(step(u, 0.01).values == 0)


@settings(max_examples=20, deadline=None)
@given(st.floats(-2, 2))
def test_constant_stays_constant(a):
    u = SpectralField(G, np.full(G.N, a))
    out = step(u, 0.5 * stable_dt(u))
    assert np.max(np.abs(out.values - a)) <= 1e-14 * max(1, abs(a))


def test_sine_phase_speed():
    x = np.asarray(G.x)
    u = SpectralField(G, 0.01 * np.sin(np.pi * x / G.L))
    dt = 0.01
    out = step(u, dt)
    ratio = out.hat[1] / u.hat[1]
    xi = np.pi / G.L
    speed = -np.angle(ratio) / (xi * dt)
    assert speed == pytest.approx(float(whitham_symbol(xi)), rel=1e-8)


@pytest.mark.parametrize("k", [1, 5, 20, 60, 120])
def test_linear_regime_phase_speed(k):
    x = np.asarray(G.x)
    xi = np.pi * k / G.L
    u0 = SpectralField(G, 1e-6 * np.cos(xi * x))
    T = 1.0
    state, _ = evolve(u0, T, dt=0.01)
    r = state.u.hat[k] / u0.hat[k]
    speed = -np.angle(r) / (xi * T)
    assert speed == pytest.approx(float(whitham_symbol(xi)), rel=1e-7)


def test_step_rejects_large_dt(small_waves):
    u = small_waves[512].phi
    with pytest.raises(PreconditionError):
        step(u, 2 * stable_dt(u))


def test_blow_up_reported():
    x = np.asarray(G.x)
    u = SpectralField(G, 1e200 * np.exp(-x ** 2))
    with pytest.raises(BlowUpError):
        step(u, stable_dt(u))


def test_evolve_T0_unchanged(small_waves):
    u = small_waves[512].phi
    state, snaps = evolve(u, 0.0)
    assert state.u is u and snaps == [(0.0, u)]


def test_evolve_negative_T():
    with pytest.raises(PreconditionError):
        evolve(SpectralField(G, np.zeros(G.N)), -1.0)


def test_mass_conserved(small_waves):
    w = small_waves[2048]
    state, snaps = evolve(w.phi, 10 / 1.1)
    assert state.mass_drift <= 1e-10
    assert state.momentum_drift <= 1e-8
    assert len(snaps) == 51


def test_self_convergence_order(small_waves):
    w = small_waves[512]
    dt = stable_dt(w.phi)
    us = [np.asarray(evolve(w.phi, 1.0, dt / k)[0].u.values) for k in (1, 2, 4)]
    e1 = np.max(np.abs(us[0] - us[1]))
    e2 = np.max(np.abs(us[1] - us[2]))
    assert math.log2(e1 / e2) >= 3.5


def test_traveling_refinement(small_waves):
    errs = [verify_traveling(small_waves[N], 5.0).traveling_error for N in (512, 1024, 2048)]
    assert errs[0] >= 4 * errs[1] and errs[1] >= 4 * errs[2]


def test_traveling_T0(small_waves):
    rep = verify_traveling(small_waves[1024], 0.0)
    assert rep.traveling_error == 0.0


def test_traveling_perturbed(small_waves):
    w = small_waves[1024]
    x = np.asarray(w.grid.x)
    pert = SpectralField(w.grid, w.phi.values + 0.1 / np.cosh(x - 3) ** 2)
    rep = verify_traveling(w, 5.0, phi0=pert)
    assert rep.traveling_error > 1e-2
    assert math.isnan(rep.axis_speed_fit)


def test_traveling_wraparound_rejected(small_waves):
    with pytest.raises(PreconditionError):
        verify_traveling(small_waves[512], 20.0)


def test_traveling_axis(small_waves):
    rep = verify_traveling(small_waves[2048], 5.0)
    assert abs(rep.axis_speed_fit - 1.1) <= 1e-3
    assert rep.max_symmetry_error <= 1e-6
    assert rep.to_dict()["c"] == 1.1


def test_axis_track_ambiguous():
    x = np.asarray(G.x)
    u = SpectralField(G, np.exp(-(x + 5) ** 2) + np.exp(-(x - 5) ** 2))
    with pytest.raises(AmbiguityError) as ei:
        symmetry_axis_track([(0.0, u)])
    assert len(ei.value.crests) == 2


def test_axis_track_fixed_profile():
    x = np.asarray(G.x)
    u = SpectralField(G, np.exp(-(x - 0.3) ** 2))
    snaps = [(t, u.shifted(0.5 * t)) for t in np.linspace(0, 4, 9)]
    ts, lams, errs, speed = symmetry_axis_track(snaps)
    assert np.allclose(lams, 0.3 + 0.5 * ts, atol=1e-6)
    assert speed == pytest.approx(0.5, abs=1e-6)


def test_linear_flow_axis_matches_exact_linear_solution():
    # a tiny even bump is carried by the linear flow; its axis follows the exact
    # linear evolution u_hat(t) = u_hat(0) exp(-i xi m(xi) t)
    g = Grid(50.0, 1024)
    x = np.asarray(g.x)
    u0 = SpectralField(g, 1e-8 * np.exp(-x ** 2))
    T = 8.0
    _, snaps = evolve(u0, T, n_snapshots=8)
    xi = np.asarray(g.xi)
    exact = [(t, SpectralField.from_hat(g, np.asarray(u0.hat) * np.exp(-1j * xi * whitham_symbol(xi) * t)))
             for t, _ in snaps]
    _, lam_num, _, _ = symmetry_axis_track(snaps)
    _, lam_ex, _, _ = symmetry_axis_track(exact)
    assert np.max(np.abs(lam_num - lam_ex)) <= g.h
    assert lam_num[0] == pytest.approx(0.0, abs=g.h)
