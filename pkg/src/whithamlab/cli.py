"""Command-line front end: ``whithamlab {kernel,solve,verify,evolve,sweep,appendix}``.

Exit status is 0 when every requested check passes, 1 when a check fails,
and 2 for configuration errors.
"""
from __future__ import annotations

import argparse
import math
import os
import sys
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import List, Optional, Tuple

import numpy as np

from . import io
from .errors import DependencyError, DomainError, NonConvergenceError, PreconditionError, WhithamError

COMMANDS = ("kernel", "solve", "verify", "evolve", "sweep", "appendix")


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    command: str
    c: Optional[float] = None
    c_list: List[float] = field(default_factory=list)
    L: float = 200.0
    N: int = 2 ** 16
    tol: float = 1e-12
    dt: Optional[float] = None
    T: float = 10.0
    out: str = "whitham_out"
    seed: int = 0
    window: Optional[Tuple[float, float]] = None
    all: bool = False
    wave: Optional[str] = None
    workers: int = 0
    config: Optional[str] = None


def _float(s):
    return float(s)


def _floats(s):
    if isinstance(s, (list, tuple)):
        return [float(v) for v in s]
    return [float(v) for v in str(s).replace(" ", "").split(",") if v]


def _window(s):
    if isinstance(s, (list, tuple)):
        v = [float(a) for a in s]
    else:
        v = _floats(s)
    if len(v) != 2:
        raise ValueError("window needs two numbers lo,hi")
    return (v[0], v[1])


def _bool(s):
    if isinstance(s, bool):
        return s
    t = str(s).strip().lower()
    if t in ("1", "true", "yes", "on"):
        return True
    if t in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {s!r}")


def _int(s):
    v = float(s)
    if v != int(v):
        raise ValueError(f"not an integer: {s!r}")
    return int(v)


CONVERTERS = {
    "c": _float, "c_list": _floats, "L": _float, "N": _int, "tol": _float, "dt": _float,
    "T": _float, "out": str, "seed": _int, "window": _window, "all": _bool, "wave": str,
    "workers": _int,
}


def read_config_file(path) -> dict:
    """Flat key=value file; '#' starts a comment."""
    out = {}
    try:
        lines = Path(path).read_text().splitlines()
    except OSError as exc:
        raise ConfigError(f"{path}: cannot read config: {exc}")
    for n, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"{path}:{n}: expected key=value, got {raw.strip()!r}")
        k, v = (s.strip() for s in line.split("=", 1))
        key = k.replace("-", "_")
        if key not in CONVERTERS:
            raise ConfigError(f"{path}:{n}: unknown field {k!r}")
        try:
            out[key] = CONVERTERS[key](v)
        except ValueError as exc:
            raise ConfigError(f"{path}:{n}: field {k!r}: {exc}")
    return out


def validate(cfg: RunConfig) -> RunConfig:
    speeds = ([cfg.c] if cfg.c is not None else []) + list(cfg.c_list)
    for c in speeds:
        if not (math.isfinite(c) and c > 1):
            raise ConfigError("supercritical speed required: c > 1")
    if cfg.command in ("solve", "verify", "evolve") and cfg.c is None and not (cfg.command != "solve" and cfg.wave):
        raise ConfigError(f"field 'c': required for {cfg.command}")
    if cfg.command == "sweep" and not cfg.c_list:
        raise ConfigError("field 'c-list': required for sweep")
    if cfg.command in ("solve", "verify", "evolve", "sweep") and any(c > 3 for c in speeds):
        raise ConfigError("field 'c': solver supports 1 < c <= 3")
    N = cfg.N
    if N < 16 or N & (N - 1):
        raise ConfigError(f"field 'N': must be a power of two >= 16, got {N}")
    if not (cfg.L > 0 and math.isfinite(cfg.L)):
        raise ConfigError(f"field 'L': must be positive, got {cfg.L}")
    if not cfg.tol >= 1e-13:
        raise ConfigError(f"field 'tol': must be >= 1e-13, got {cfg.tol}")
    if cfg.dt is not None and not cfg.dt > 0:
        raise ConfigError(f"field 'dt': must be positive, got {cfg.dt}")
    if not cfg.T >= 0:
        raise ConfigError(f"field 'T': must be >= 0, got {cfg.T}")
    if cfg.window is not None and not (0 <= cfg.window[0] < cfg.window[1]):
        raise ConfigError(f"field 'window': need 0 <= lo < hi, got {cfg.window}")
    if cfg.workers < 0:
        raise ConfigError("field 'workers': must be >= 0")
    return cfg


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--config", help="key=value file; flags override its entries")
    common.add_argument("--c", type=float, help="wave speed (> 1)")
    common.add_argument("--c-list", dest="c_list", type=_floats, help="comma-separated speeds")
    common.add_argument("--L", type=float, help="half-length of the periodic box")
    common.add_argument("--N", type=int, help="number of grid points (power of two)")
    common.add_argument("--tol", type=float, help="solver residual tolerance")
    common.add_argument("--dt", type=float, help="time step (default: stability bound)")
    common.add_argument("--T", type=float, help="final time")
    common.add_argument("--out", help="output directory")
    common.add_argument("--seed", type=int, help="seed for randomized batteries")
    common.add_argument("--window", type=_window, help="decay-fit window lo,hi")
    common.add_argument("--all", action="store_const", const=True, default=None,
                        help="verify: run the full battery")
    common.add_argument("--wave", help="verify/evolve: ingest a profile CSV written by solve")
    common.add_argument("--workers", type=int, help="sweep: worker processes (0 = cpu count)")
    p = argparse.ArgumentParser(prog="whithamlab",
                                description="Whitham kernels, solitary waves and their certificates.")
    sub = p.add_subparsers(dest="command", required=True)
    helps = {
        "kernel": "synthesize K or H_c and check positivity, monotonicity, tail rate",
        "solve": "compute a solitary wave",
        "verify": "re-check residuals, symmetry and decay of a wave",
        "evolve": "evolve a wave in time and check rigid translation",
        "sweep": "solve and verify several speeds in parallel",
        "appendix": "run the auxiliary inequality oracles",
    }
    for name in COMMANDS:
        sub.add_parser(name, parents=[common], help=helps[name])
    return p


def make_config(argv=None) -> RunConfig:
    args = build_parser().parse_args(argv)
    merged = {}
    if args.config:
        merged.update(read_config_file(args.config))
    for f in fields(RunConfig):
        if f.name in ("command", "config"):
            continue
        v = getattr(args, f.name, None)
        if v is not None:
            merged[f.name] = v
    cfg = RunConfig(command=args.command, config=args.config, **merged)
    return validate(cfg)


# ------------------------------------------------------------------ commands
def _tag(c):
    return "whitham" if c is None else f"c{c:g}"


class _Run:
    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.out = Path(cfg.out)
        self.out.mkdir(parents=True, exist_ok=True)
        self.lines = []
        self.failed = []

    def note(self, msg):
        self.lines.append(msg)
        print(msg)

    def check(self, ok, label, report_path):
        rel = Path(report_path).relative_to(self.out) if Path(report_path).is_relative_to(self.out) else report_path
        self.note(f"{'PASS' if ok else 'FAIL'} {label} ({rel})")
        if not ok:
            self.failed.append(str(report_path))

    def finish(self) -> int:
        (self.out / "summary.txt").write_text("\n".join(self.lines) + "\n")
        if self.failed:
            print("failing reports: " + ", ".join(self.failed), file=sys.stderr)
            return 1
        return 0

    @property
    def grid(self):
        from .grid import Grid
        return Grid(self.cfg.L, self.cfg.N)


def cmd_kernel(run: _Run):
    from .kernels import (check_complete_monotone, fit_decay_rate, kernel_positivity_monotonicity,
                          synthesize_kernel)
    from .symbols import Multiplier, strip_halfwidth
    c = run.cfg.c
    sym = Multiplier.whitham() if c is None else Multiplier.resolvent(c)
    table = synthesize_kernel(sym, run.grid)
    shape = kernel_positivity_monotonicity(table)
    report = {"table": table.to_dict(), "shape": shape.to_dict()}
    ok = shape.passed
    if c is not None:
        cm = check_complete_monotone(c, 4, np.geomspace(1e-2, 10, 50))
        lo, hi = run.cfg.window or (2.0, 8.0)
        x = np.asarray(table.grid.x)
        nu = fit_decay_rate((x, table.values), (lo, hi), floor_reference=np.max(np.abs(table.values)))
        delta = strip_halfwidth(c)
        report.update(complete_monotone=cm.to_dict(), tail={"nu": nu, "delta_c": delta, "window": [lo, hi],
                                                             "passed": nu >= 0.9 * delta})
        ok = ok and cm.passed and nu >= 0.9 * delta
    tag = _tag(c)
    io.write_kernel_csv(run.out / f"kernel_{tag}.csv", table)
    path = io.write_json(run.out / f"kernel_{tag}.json", report, "kernel_report")
    run.check(ok, f"kernel {sym.name}", path)


def _wave_payload(wave, nu, window):
    d = wave.to_dict()
    d.update(decay_rate=nu, decay_window=list(window) if window else None)
    return d


def _solve(run: _Run, c):
    from .steady import petviashvili_solve
    return petviashvili_solve(c, run.grid, tol=run.cfg.tol)


def _fit(wave, window):
    from .steady import profile_decay_rate
    try:
        return profile_decay_rate(wave.phi, window)
    except WhithamError:
        return float("nan"), None


def cmd_solve(run: _Run):
    c = run.cfg.c
    tag = _tag(c)
    try:
        wave = _solve(run, c)
    except NonConvergenceError as exc:
        path = io.write_json(run.out / f"wave_{tag}.json",
                             {"c": c, "converged": False, "error": str(exc), "residual": exc.residual},
                             "wave")
        run.check(False, f"solve c={c:g}: {exc}", path)
        return
    nu, win = _fit(wave, run.cfg.window)
    io.write_profile_csv(run.out / f"wave_{tag}.csv", wave.grid.x, wave.phi.values,
                         c=repr(c), L=wave.grid.L, N=wave.grid.N)
    path = io.write_json(run.out / f"wave_{tag}.json", _wave_payload(wave, nu, win), "wave")
    run.check(wave.converged, f"solve c={c:g} sup={wave.amplitude:.6g} iterations={wave.iterations}", path)


def _load_wave(path, c_flag):
    from .grid import Grid, SpectralField
    from .steady import SolitaryWave
    x, v, meta = io.read_profile_csv(path)
    side = Path(path).with_suffix(".json")
    stored = io.read_json(side) if side.exists() else {}
    c = float(meta.get("c", stored.get("c", "nan")))
    if c_flag is not None and c_flag != c:
        raise ConfigError(f"field 'c': {c_flag} disagrees with the wave file ({c})")
    grid = Grid(float(meta["L"]), int(meta["N"]))
    if not np.allclose(x, grid.x, rtol=0, atol=1e-12 * grid.L):
        raise ConfigError(f"{path}: x column does not match the declared grid")
    wave = SolitaryWave(grid, SpectralField(grid, v), c, converged=bool(stored.get("converged", True)),
                        iterations=int(stored.get("iterations", 0)))
    return wave, stored


def cmd_verify(run: _Run):
    from .analysis import decay_report, touching_check, verify_symmetry
    from .kernels import resolvent_kernel
    from .steady import residual, within_bounds
    cfg = run.cfg
    if cfg.wave:
        wave, stored = _load_wave(cfg.wave, cfg.c)
    else:
        try:
            wave = _solve(run, cfg.c)
        except NonConvergenceError as exc:
            path = io.write_json(run.out / f"verify_{_tag(cfg.c)}.json", {"error": str(exc)}, "verify_report")
            run.check(False, f"verify c={cfg.c:g}: {exc}", path)
            return
        stored = None
    c = wave.c
    tag = _tag(c)
    r1, r2 = residual(wave)
    res = {"residual_physical": r1, "residual_convolution": r2, "passed": max(r1, r2) <= 1e-9}
    if stored is not None and stored.get("residual_physical") is not None:
        d1 = abs(r1 - stored["residual_physical"])
        d2 = abs(r2 - stored["residual_convolution"])
        res.update(stored_physical=stored["residual_physical"], stored_convolution=stored["residual_convolution"],
                   roundtrip_deviation=max(d1, d2))
        res["passed"] = res["passed"] and max(d1, d2) <= 1e-12
    res["positivity"] = within_bounds(wave)
    sym = verify_symmetry(wave.phi, 1e-7, c)
    sym_path = io.write_json(run.out / f"symmetry_{tag}.json", sym.to_dict(), "symmetry_report")
    report = {"c": c, "residuals": res, "symmetry": sym.to_dict()}
    ok = res["passed"] and sym.passed
    if cfg.all:
        dec = decay_report(wave.phi, c, cfg.window)
        io.write_json(run.out / f"decay_{tag}.json", dec.to_dict(), "decay_report")
        table = resolvent_kernel(c, wave.grid)
        lam0 = sym.crest_location
        t_eq = touching_check(wave.phi, wave.phi.reflected(lam0), lam0, table)
        t_ord = touching_check(wave.phi, wave.phi.reflected(lam0 - 1), lam0 - 1, table)
        report.update(decay=dec.to_dict(), touching=[t_eq.to_dict(), t_ord.to_dict()])
        ok = (ok and res["positivity"] and dec.passed and t_eq.verdict == "identically equal"
              and t_ord.verdict == "strictly ordered")
    path = io.write_json(run.out / f"verify_{tag}.json", report, "verify_report")
    run.check(ok, f"verify c={c:g}", path if ok else (sym_path if not sym.passed else path))


def cmd_evolve(run: _Run):
    from .evolution import verify_traveling
    cfg = run.cfg
    if cfg.wave:
        wave, _ = _load_wave(cfg.wave, cfg.c)
    else:
        wave = _solve(run, cfg.c)
    c = wave.c
    if c * cfg.T > wave.grid.L / 4:
        raise ConfigError(f"field 'T': c*T = {c * cfg.T:g} exceeds L/4 = {wave.grid.L / 4:g}")
    rep = verify_traveling(wave, cfg.T, cfg.dt)
    tag = _tag(c)
    stride = max(1, wave.grid.N // 4096)
    snaps = rep.snapshots[::5]
    io.write_trajectory_csv(run.out / f"trajectory_{tag}.csv", snaps, stride, c=repr(c), L=wave.grid.L,
                            N=wave.grid.N)
    manifest = {"L": wave.grid.L, "N": wave.grid.N, "dt": rep.dt, "T": rep.T, "c": c,
                "mass_drift": rep.mass_drift, "momentum_drift": rep.momentum_drift,
                "trajectory": f"trajectory_{tag}.csv", "stride": stride}
    io.write_json(run.out / f"run_{tag}.json", manifest, "run_manifest")
    ok = (rep.traveling_error <= 1e-4 and abs(rep.axis_speed_fit - c) <= 1e-3
          and rep.mass_drift <= 1e-10 and rep.momentum_drift <= 1e-8)
    d = rep.to_dict()
    d["passed"] = ok
    path = io.write_json(run.out / f"evolution_{tag}.json", d, "evolution_report")
    run.check(ok, f"evolve c={c:g} T={cfg.T:g} traveling_error={rep.traveling_error:.3e}", path)


def _sweep_one(args):
    c, L, N, tol, window = args
    from .analysis import decay_report, verify_symmetry
    from .grid import Grid
    from .steady import petviashvili_solve
    from .symbols import strip_halfwidth
    try:
        wave = petviashvili_solve(c, Grid(L, N), tol=tol)
    except NonConvergenceError as exc:
        return {"c": c, "sup_phi": float("nan"), "nu": float("nan"), "delta_c": strip_halfwidth(c),
                "reflection_error": float("nan"), "crest_count": 0, "passed": False, "error": str(exc)}, None
    sym = verify_symmetry(wave.phi, 1e-7, c)
    dec = decay_report(wave.phi, c, window)
    row = {"c": c, "sup_phi": wave.amplitude, "nu": dec.fitted_rate, "delta_c": dec.reference_rate,
           "reflection_error": sym.reflection_error, "crest_count": sym.crest_count,
           "residual_physical": wave.residual_physical, "residual_convolution": wave.residual_convolution,
           "iterations": wave.iterations, "passed": bool(sym.passed and dec.passed)}
    return row, np.asarray(wave.phi.values)


def cmd_sweep(run: _Run):
    cfg = run.cfg
    jobs = [(c, cfg.L, cfg.N, cfg.tol, cfg.window) for c in cfg.c_list]
    workers = cfg.workers or os.cpu_count() or 1
    if workers == 1 or len(jobs) == 1:
        results = [_sweep_one(j) for j in jobs]
    else:
        with ProcessPoolExecutor(max_workers=min(workers, len(jobs))) as ex:
            results = list(ex.map(_sweep_one, jobs))
    rows = [r for r, _ in results]
    for (row, vals) in results:
        if vals is not None:
            io.write_profile_csv(run.out / f"wave_{_tag(row['c'])}.csv", run.grid.x, vals,
                                 c=repr(row["c"]), L=cfg.L, N=cfg.N)
    io.write_batch_csv(run.out / "sweep.csv", rows)
    path = io.write_json(run.out / "sweep.json", {"rows": rows}, "sweep_report")
    for row in rows:
        run.check(row["passed"], f"sweep c={row['c']:g}", path)


def cmd_appendix(run: _Run):
    from .analysis import (convolution_moment_identity, factorial_inequality_holds, moment_sides,
                           random_compact_pair, weight_inequality_constant, weight_ratio)
    from .grid import Grid
    fac = all(factorial_inequality_holds(n, q) for n in range(21) for q in range(1, 6))
    rng = np.random.default_rng(run.cfg.seed)
    g = Grid(20.0, 1024)
    devs = []
    for _ in range(20):
        f, h = random_compact_pair(g, rng)
        n = int(rng.integers(0, 7))
        _, lhs, rhs = moment_sides(f, h, n)
        devs.append({"n": n, "relative_deviation": float(np.max(np.abs(lhs - rhs)) / np.max(np.abs(lhs)))})
    mom_ok = all(d["relative_deviation"] <= 1e-8 for d in devs)
    xs, es = [1.0, 10.0, 20.0, 100.0], [0.01, 0.5, 0.99]
    B = weight_inequality_constant(1.0, 3.0, xs, es)
    ratios = {f"x={x:g},eps={e:g}": weight_ratio(1.0, 3.0, x, e) for x in xs for e in es}
    w_ok = math.isfinite(B) and all(r <= B for r in ratios.values())
    report = {"factorial": {"n_max": 20, "q_max": 5, "passed": fac},
              "moment_identity": {"seed": run.cfg.seed, "pairs": devs, "passed": mom_ok},
              "weight_inequality": {"l": 1.0, "m": 3.0, "B_measured": B, "ratios": ratios, "passed": w_ok}}
    path = io.write_json(run.out / "appendix.json", report, "appendix_report")
    run.check(fac and mom_ok and w_ok, "appendix oracles", path)


HANDLERS = {"kernel": cmd_kernel, "solve": cmd_solve, "verify": cmd_verify, "evolve": cmd_evolve,
            "sweep": cmd_sweep, "appendix": cmd_appendix}


def run(cfg: RunConfig) -> int:
    r = _Run(cfg)
    HANDLERS[cfg.command](r)
    return r.finish()


def main(argv=None) -> int:
    try:
        cfg = make_config(argv)
        return run(cfg)
    except (ConfigError, PreconditionError, DomainError, DependencyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except WhithamError as exc:
        print(f"check failed: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # argparse
        return int(exc.code) if isinstance(exc.code, int) else 2


if __name__ == "__main__":
    sys.exit(main())
