import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from whithamlab.analysis import count_crests
from whithamlab.errors import DependencyError, NoRealShiftError, NonConvergenceError, PreconditionError
from whithamlab.grid import Grid, SpectralField
from whithamlab.kernels import resolvent_kernel
from whithamlab.steady import (GalileanShift, SolitaryWave, continuation_sweep, kdv_guess,
                               normalize_galilean, petviashvili_solve, residual, within_bounds)

SMALL = Grid(50.0, 2 ** 12)


# ---------------------------------------------------------------- Galilean shift
def test_normalize_noop():
    phi = np.array([0.1, 0.2])
    out = normalize_galilean(phi, 1.4, 0.0)
    assert out.gamma == 0.0 and out.c == 1.4 and out.B == 0.0
    assert np.array_equal(out.phi, phi)


def test_normalize_quadratic_root():
    out = normalize_galilean(0.0, 2.0, 0.1)
    oracle = (-1 + math.sqrt(1 + 0.4)) / 2
    assert out.gamma == pytest.approx(oracle, rel=1e-15)
    assert round(out.gamma, 4) == 0.0916
    assert out.c == pytest.approx(2 + 2 * oracle)
    # new constant vanishes
    assert abs(GalileanShift(out.gamma).apply(0.0, 2.0, 0.1)[2]) < 1e-15


def test_normalize_no_real_root():
    with pytest.raises(NoRealShiftError):
        normalize_galilean(0.0, 1.5, -1.0)


def test_shift_round_trip_exact_fields():
    phi = np.linspace(0, 1, 11)
    s = GalileanShift(0.25)
    p2, c2, b2 = s.inverse().apply(*s.apply(phi, 1.5, 0.0))
    assert np.max(np.abs(p2 - phi)) <= 2.3e-16 and c2 == 1.5 and abs(b2) <= 1e-16


@settings(max_examples=200, deadline=None)
@given(st.floats(-1, 1), st.floats(1.01, 3), st.floats(-0.5, 0.5))
def test_shift_round_trip_property(gamma, c, B):
    s = GalileanShift(gamma)
    p2, c2, b2 = s.inverse().apply(*s.apply(0.3, c, B))
    assert p2 == pytest.approx(0.3, abs=4e-16)
    assert c2 == pytest.approx(c, abs=1e-15)
    assert b2 == pytest.approx(B, abs=1e-14)


@settings(max_examples=200, deadline=None)
@given(st.floats(1.01, 3), st.floats(-0.1, 1))
def test_normalize_property(c, B):
    if (c - 1) ** 2 + 4 * B < 0:
        with pytest.raises(NoRealShiftError):
            normalize_galilean(0.0, c, B)
        return
    out = normalize_galilean(0.0, c, B)
    g = out.gamma
    assert abs(g * g + (c - 1) * g - B) <= 1e-12 * max(1.0, abs(B))
    other = -(c - 1) - g
    assert abs(g) <= abs(other) + 1e-12


# ---------------------------------------------------------------- solver
def test_solve_c11_default_grid(grid):
    w = petviashvili_solve(1.1, grid, tol=1e-10)
    assert w.converged
    assert 0 < w.amplitude < 1.1
    assert len(count_crests(np.asarray(w.phi.values))) == 1
    assert w.residual_physical <= 1e-10


def test_zero_init_rejected():
    with pytest.raises(PreconditionError):
        petviashvili_solve(1.1, SMALL, init=SpectralField(SMALL, np.zeros(SMALL.N)))


def test_kdv_amplitude_c105(waves):
    assert waves[1.05].amplitude == pytest.approx(1.5 * 0.05, rel=0.15)


def test_kdv_guess_shape():
    g = kdv_guess(1.1, SMALL)
    assert g.values[SMALL.origin] == pytest.approx(0.15)


@pytest.mark.parametrize("c,tol", [(0.9, 1e-10), (1.0, 1e-10), (3.5, 1e-10), (1.1, 1e-14)])
def test_solver_preconditions(c, tol):
    with pytest.raises(PreconditionError):
        petviashvili_solve(c, SMALL, tol=tol)


def test_iteration_cap_reports_residual():
    with pytest.raises(NonConvergenceError) as ei:
        petviashvili_solve(1.1, SMALL, max_iter=3)
    assert ei.value.iterations == 3
    assert 0 < ei.value.residual < 1


def test_stabilizer_tends_to_one(waves):
    for w in waves.values():
        assert abs(w.stabilizer - 1) <= 1e-10


# ---------------------------------------------------------------- residuals
def test_residuals_c11(wave11):
    r1, r2 = residual(wave11)
    assert r1 <= 1e-9 and r2 <= 1e-9
    assert (r1, r2) == (wave11.residual_physical, wave11.residual_convolution)


def _const_wave(grid, value, c):
    return SolitaryWave(grid, SpectralField(grid, np.full(grid.N, value)), c, converged=True)


def test_residual_zero_field(grid):
    assert residual(_const_wave(grid, 0.0, 1.1)) == (0.0, 0.0)


def test_residual_constant_field(grid):
    r1, r2 = residual(_const_wave(grid, 0.1, 1.1))
    assert r1 <= 1e-12 and r2 <= 1e-12


def test_residual_table_mismatch(wave11):
    with pytest.raises(DependencyError):
        residual(wave11, resolvent_kernel(1.2, wave11.grid))


def test_residual_inconsistent_field(grid):
    f = SpectralField(grid, np.zeros(grid.N), hat=np.ones(grid.N // 2 + 1))
    with pytest.raises(PreconditionError):
        residual(SolitaryWave(grid, f, 1.1))


def test_residual_missing_table():
    g = Grid(200.0, 2 ** 12)  # too coarse for a kernel table
    w = petviashvili_solve(1.1, g)
    assert w.converged and math.isnan(w.residual_convolution)
    with pytest.raises(DependencyError):
        residual(w)


# ---------------------------------------------------------------- sweep
def test_continuation_increasing():
    ws = continuation_sweep([1.05, 1.1, 1.15], SMALL)
    amps = [w.amplitude for w in ws]
    assert all(w.converged for w in ws)
    assert amps[0] < amps[1] < amps[2]
    assert all("decay_rate" in w.diagnostics for w in ws)


def test_continuation_empty():
    assert continuation_sweep([], SMALL) == []


def test_continuation_unsorted():
    with pytest.raises(PreconditionError):
        continuation_sweep([1.1, 1.05], SMALL)


# ---------------------------------------------------------------- invariants
def test_positivity_and_bounds(waves):
    for c, w in waves.items():
        v = np.asarray(w.phi.values)
        assert within_bounds(w)
        assert np.max(v) < c
        # far tail sits at roundoff
        assert np.min(v) > -1e-15


def test_inf_bound(waves):
    for c, w in waves.items():
        assert -1e-8 <= np.min(w.phi.values) <= c - 1 + 1e-8


def test_residual_agreement(waves):
    for w in waves.values():
        assert abs(w.residual_physical - w.residual_convolution) <= 1e-6 * max(1.0, w.residual_physical)


def test_even_after_centering(waves):
    for w in waves.values():
        v = np.asarray(w.phi.values)
        assert np.max(np.abs(v - v[(-np.arange(v.size)) % v.size])) <= 1e-8 * w.amplitude


def test_refinement_amplitude(wave11, grid):
    fine = petviashvili_solve(1.1, grid.refined())
    assert abs(fine.amplitude - wave11.amplitude) <= 1e-8
