"""Command-line front end: configure, simulate, verify, benchmark.

One JSON config file describes the kernel, grid, boundary models, initial
datum, time stepping, and per-check settings. Subcommands:

* ``simulate``          march the datum and dump snapshots
* ``verify-subsolution`` certify the barrier residual sign on a sample grid
* ``verify-flattening`` measure the renormalized tail against kappa a t
* ``verify-proposition`` half-line persistence plus the mirror identity
* ``reference-compare`` solver error against the exact plateau solution
* ``bench``             direct vs FFT operator application timings

Artifacts are deterministic for a fixed config (bench timings excepted):
fixed column orders, floats printed with 17 significant digits, sorted JSON
keys, and no wall-clock metadata.

Exit codes: 0 success / all checks pass, 1 at least one check failed,
2 configuration error, 3 internal error.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
import time
from pathlib import Path

import numpy as np

from . import __version__
from .evolution import Trajectory, evolve, stable_dt
from .kernels import (
    KernelSpec,
    compact_plus_tail,
    pure_fractional,
    truncated_fractional,
    validate_hypothesis,
)
from .mesh import BoundaryModel, Field, Grid
from .operator import DiscreteOperator, discretize
from .reference import reference_solution
from .subsolution import SubsolutionParams, residual_grid, scaling_constants
from .verification import (
    InitialDatum,
    VerificationReport,
    flattening_ratio,
    halfline_bound_check,
    mirror_identity_check,
)

log = logging.getLogger("flatdiff")

EXIT_OK = 0
EXIT_CHECK_FAILED = 1
EXIT_CONFIG = 2
EXIT_INTERNAL = 3


class ConfigError(ValueError):
    """The run configuration is malformed or inconsistent."""


def _fmt(v: float) -> str:
    return f"{float(v):.17g}"


def _check_keys(mapping: dict, allowed: set[str], path: str) -> None:
    if not isinstance(mapping, dict):
        raise ConfigError(f"{path} must be a JSON object")
    unknown = set(mapping) - allowed
    if unknown:
        raise ConfigError(f"unknown key(s) {sorted(unknown)} in {path}")


def _need(mapping: dict, key: str, path: str):
    if key not in mapping:
        raise ConfigError(f"missing required key {key!r} in {path}")
    return mapping[key]


def load_config(path: str | Path) -> dict:
    """Read and structurally validate the JSON config; unknown keys reject."""
    p = Path(path)
    try:
        raw = json.loads(p.read_text())
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {p}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    _check_keys(
        raw,
        {
            "kernel",
            "grid",
            "boundary",
            "initial",
            "times",
            "solver",
            "checks",
            "reference",
            "bench",
            "output",
        },
        "config",
    )
    if "kernel" in raw:
        _check_keys(
            raw["kernel"],
            {"family", "s", "amplitude", "j0", "j1", "r0", "cutoff", "near_profile", "near_scale"},
            "config.kernel",
        )
    if "grid" in raw:
        _check_keys(raw["grid"], {"x_min", "x_max", "n"}, "config.grid")
    if "boundary" in raw:
        _check_keys(
            raw["boundary"], {"left_value", "right", "right_value"}, "config.boundary"
        )
    if "initial" in raw:
        _check_keys(raw["initial"], {"kind", "a", "b", "eps"}, "config.initial")
    if "times" in raw:
        _check_keys(raw["times"], {"t_final", "snapshots"}, "config.times")
    if "solver" in raw:
        _check_keys(
            raw["solver"], {"safety", "method", "startup_ramp"}, "config.solver"
        )
    if "checks" in raw:
        _check_keys(
            raw["checks"],
            {"flattening", "halfline", "mirror", "subsolution"},
            "config.checks",
        )
        checks = raw["checks"]
        if "flattening" in checks:
            _check_keys(
                checks["flattening"], {"t", "window", "tol_rel"}, "config.checks.flattening"
            )
        if "halfline" in checks:
            _check_keys(checks["halfline"], {"tol"}, "config.checks.halfline")
        if "mirror" in checks:
            _check_keys(
                checks["mirror"],
                {"eps", "t_final", "tol", "grid"},
                "config.checks.mirror",
            )
            if "grid" in checks["mirror"]:
                _check_keys(
                    checks["mirror"]["grid"],
                    {"x_min", "x_max", "n"},
                    "config.checks.mirror.grid",
                )
        if "subsolution" in checks:
            _check_keys(
                checks["subsolution"],
                {"c", "nt", "nx", "x_max", "quad_tol"},
                "config.checks.subsolution",
            )
    if "reference" in raw:
        _check_keys(
            raw["reference"], {"interior", "refine_levels"}, "config.reference"
        )
    if "bench" in raw:
        _check_keys(raw["bench"], {"sizes", "reps", "domain"}, "config.bench")
    if "output" in raw:
        _check_keys(raw["output"], {"directory", "format"}, "config.output")
    return raw


def build_kernel(cfg: dict) -> KernelSpec:
    section = _need(cfg, "kernel", "config")
    family = _need(section, "family", "config.kernel")
    s = float(_need(section, "s", "config.kernel"))
    amplitude = float(section.get("amplitude", 1.0))
    j0 = float(_need(section, "j0", "config.kernel"))
    j1 = float(_need(section, "j1", "config.kernel"))
    r0 = float(_need(section, "r0", "config.kernel"))
    try:
        if family == "pure_fractional":
            return pure_fractional(s, amplitude, j0=j0, j1=j1, r0=r0)
        if family == "truncated_fractional":
            cutoff = float(_need(section, "cutoff", "config.kernel"))
            return truncated_fractional(s, amplitude, cutoff, j0=j0, j1=j1, r0=r0)
        if family == "compact_plus_tail":
            return compact_plus_tail(
                s,
                amplitude,
                near_profile=section.get("near_profile", "flat"),
                near_scale=float(section.get("near_scale", 1.0)),
                j0=j0,
                j1=j1,
                r0=r0,
            )
    except ValueError as exc:
        raise ConfigError(f"invalid kernel parameters: {exc}") from exc
    raise ConfigError(f"unknown kernel family {family!r}")


def build_grid(section: dict, path: str = "config.grid") -> Grid:
    try:
        return Grid(
            x_min=float(_need(section, "x_min", path)),
            x_max=float(_need(section, "x_max", path)),
            n=int(_need(section, "n", path)),
        )
    except ValueError as exc:
        raise ConfigError(f"invalid grid: {exc}") from exc


def build_boundary(cfg: dict, datum_a: float) -> BoundaryModel:
    section = cfg.get("boundary", {})
    try:
        return BoundaryModel(
            left_value=float(section.get("left_value", datum_a)),
            right=section.get("right", "zero"),
            right_value=float(section.get("right_value", 0.0)),
        )
    except ValueError as exc:
        raise ConfigError(f"invalid boundary model: {exc}") from exc


def build_datum(cfg: dict) -> InitialDatum:
    section = _need(cfg, "initial", "config")
    kind = section.get("kind", "step")
    a = float(_need(section, "a", "config.initial"))
    b = float(_need(section, "b", "config.initial"))
    try:
        if kind == "step":
            return InitialDatum.step(a, b)
        if kind == "mollified_step":
            return InitialDatum.mollified_step(a, b, float(section.get("eps", 0.5)))
    except ValueError as exc:
        raise ConfigError(f"invalid initial datum: {exc}") from exc
    raise ConfigError(f"unsupported initial datum kind {kind!r} in config")


def _solver_options(cfg: dict) -> dict:
    section = cfg.get("solver", {})
    method = section.get("method", "auto")
    if method not in ("auto", "direct", "fft"):
        raise ConfigError(f"unknown solver method {method!r}")
    safety = float(section.get("safety", 0.45))
    if not 0.0 < safety <= 1.0:
        raise ConfigError("solver safety must lie in (0, 1]")
    return {
        "safety": safety,
        "method": method,
        "startup_ramp": bool(section.get("startup_ramp", True)),
    }


def _times(cfg: dict) -> tuple[float, tuple[float, ...]]:
    section = _need(cfg, "times", "config")
    t_final = float(_need(section, "t_final", "config.times"))
    snapshots = tuple(float(t) for t in section.get("snapshots", []))
    if t_final < 0 or any(t < 0 for t in snapshots):
        raise ConfigError("times must be nonnegative")
    return t_final, snapshots


def _build_operator(cfg: dict, grid: Grid, boundary: BoundaryModel) -> DiscreteOperator:
    spec = build_kernel(cfg)
    cert = validate_hypothesis(spec)
    if not cert.verified:
        raise ConfigError(
            "kernel fails its declared hypothesis constants "
            f"(upper margin {cert.upper_margin:.3g}, lower margin "
            f"{cert.lower_margin:.3g}, near moment {cert.near_moment:.3g})"
        )
    return discretize(spec, grid, boundary, certificate=cert)


def _run_simulation(cfg: dict, threads: int) -> tuple[Trajectory, DiscreteOperator, InitialDatum]:
    datum = build_datum(cfg)
    grid = build_grid(_need(cfg, "grid", "config"))
    boundary = build_boundary(cfg, datum.a)
    op = _build_operator(cfg, grid, boundary)
    t_final, snapshots = _times(cfg)
    opts = _solver_options(cfg)
    traj = evolve(
        op,
        datum.sample(grid),
        t_final,
        output_times=snapshots,
        safety=opts["safety"],
        startup_ramp=opts["startup_ramp"],
        method=opts["method"],
        workers=threads,
    )
    return traj, op, datum


def _write_trajectory_csv(path: Path, traj: Trajectory) -> None:
    x = traj.grid.points()
    with path.open("w") as fh:
        fh.write("t,x,u\n")
        for t, state in zip(traj.times, traj.states):
            ts = _fmt(t)
            for xi, ui in zip(x, state.values):
                fh.write(f"{ts},{_fmt(xi)},{_fmt(ui)}\n")


def _write_trajectory_json(path: Path, traj: Trajectory) -> None:
    x = traj.grid.points()
    payload = [
        {"t": float(t), "x": [float(v) for v in x], "u": [float(v) for v in st.values]}
        for t, st in zip(traj.times, traj.states)
    ]
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _write_json(path: Path, payload) -> None:
    path.write_text(json.dumps(payload, indent=2, sort_keys=True) + "\n")


def _metadata(cfg: dict, op: DiscreteOperator, traj: Trajectory | None) -> dict:
    cert = op.certificate
    meta = {
        "package_version": __version__,
        "config": cfg,
        "derived": {
            "h": op.grid.h,
            "row_sum": op.row_sum,
            "dt_stable": stable_dt(op, _solver_options(cfg)["safety"]),
            "kernel_certificate": {
                "verified": cert.verified,
                "upper_margin": cert.upper_margin,
                "lower_margin": cert.lower_margin,
                "near_moment": cert.near_moment,
                "sample_count": cert.sample_count,
            },
        },
    }
    if traj is not None:
        meta["derived"]["snapshot_times"] = [float(t) for t in traj.times]
    return meta


def cmd_simulate(cfg: dict, out: Path, fmt: str, threads: int) -> int:
    traj, op, _ = _run_simulation(cfg, threads)
    if fmt in ("csv", "both"):
        _write_trajectory_csv(out / "trajectory.csv", traj)
    if fmt in ("json", "both"):
        _write_trajectory_json(out / "trajectory.json", traj)
    _write_json(out / "metadata.json", _metadata(cfg, op, traj))
    log.info("wrote %d snapshots to %s", len(traj.times), out)
    return EXIT_OK


def _report_exit(reports: list[VerificationReport], out: Path) -> int:
    _write_json(out / "report.json", [r.as_dict() for r in reports])
    for r in reports:
        log.info(
            "%s: measured=%.6g bound=%.6g -> %s",
            r.check,
            r.measured,
            r.bound,
            "pass" if r.passed else "FAIL",
        )
    return EXIT_OK if all(r.passed for r in reports) else EXIT_CHECK_FAILED


def cmd_verify_flattening(cfg: dict, out: Path, fmt: str, threads: int) -> int:
    section = cfg.get("checks", {}).get("flattening", {})
    traj, op, datum = _run_simulation(cfg, threads)
    t = float(section.get("t", traj.times[-1]))
    window = section.get("window")
    if window is not None:
        window = (float(window[0]), float(window[1]))
    report = flattening_ratio(
        traj,
        op.spec,
        t,
        window,
        a=datum.a,
        b=datum.b,
        tol_rel=float(section.get("tol_rel", 0.1)),
    )
    return _report_exit([report], out)


def cmd_verify_proposition(cfg: dict, out: Path, fmt: str, threads: int) -> int:
    checks = cfg.get("checks", {})
    traj, op, datum = _run_simulation(cfg, threads)
    tol = checks.get("halfline", {}).get("tol")
    reports = [
        halfline_bound_check(
            traj, datum.a, datum.plateau_edge, None if tol is None else float(tol)
        )
    ]
    mirror = checks.get("mirror", {})
    t_final, _ = _times(cfg)
    grid = (
        build_grid(mirror["grid"], "config.checks.mirror.grid")
        if "grid" in mirror
        else traj.grid
    )
    try:
        reports.append(
            mirror_identity_check(
                op.spec,
                datum.a,
                datum.b,
                float(mirror.get("eps", 0.5)),
                float(mirror.get("t_final", t_final)),
                float(mirror.get("tol", 0.02 * datum.a)),
                grid,
                method=_solver_options(cfg)["method"],
                safety=_solver_options(cfg)["safety"],
            )
        )
    except ValueError as exc:
        raise ConfigError(f"mirror check setup failed: {exc}") from exc
    return _report_exit(reports, out)


def cmd_verify_subsolution(cfg: dict, out: Path, fmt: str, threads: int) -> int:
    spec = build_kernel(cfg)
    section = cfg.get("checks", {}).get("subsolution", {})
    c = float(_need(section, "c", "config.checks.subsolution"))
    params = SubsolutionParams.from_kernel(spec, c)
    t_star, r_star = scaling_constants(spec, c)
    x_max = section.get("x_max")
    samples = residual_grid(
        spec,
        params,
        nt=int(section.get("nt", 20)),
        nx=int(section.get("nx", 20)),
        x_max=None if x_max is None else float(x_max),
        quad_tol=float(section.get("quad_tol", 1e-8)),
    )
    worst = max(s.residual - s.budget for s in samples)
    all_pass = all(s.passed for s in samples)
    report = VerificationReport(
        check="subsolution_residual_grid",
        passed=all_pass,
        measured=worst,
        bound=0.0,
        tolerance=0.0,
        relation="upper_bound",
        worst_t=max(samples, key=lambda s: s.residual - s.budget).t,
        worst_x=max(samples, key=lambda s: s.residual - s.budget).x,
        details={
            "kernel": spec.describe(),
            "kappa": params.kappa,
            "c": c,
            "t_star": t_star,
            "r_star": r_star,
            "samples": [s.as_row() for s in samples],
        },
    )
    return _report_exit([report], out)


def cmd_reference_compare(cfg: dict, out: Path, fmt: str, threads: int) -> int:
    section = cfg.get("reference", {})
    levels = int(section.get("refine_levels", 2))
    if levels < 1:
        raise ConfigError("refine_levels must be at least 1")
    datum = build_datum(cfg)
    base = build_grid(_need(cfg, "grid", "config"))
    spec = build_kernel(cfg)
    interior = section.get("interior")
    if interior is None:
        interior = (base.x_min + 50.0, 0.8 * base.x_max)
    else:
        interior = (float(interior[0]), float(interior[1]))
    t_final, snapshots = _times(cfg)
    if t_final <= 0:
        raise ConfigError("reference comparison needs t_final > 0")
    rows = []
    for level in range(levels):
        factor = 2**level
        grid = Grid(base.x_min * factor, base.x_max * factor, (base.n - 1) * factor**2 + 1)
        boundary = build_boundary(cfg, datum.a)
        op = _build_operator(cfg, grid, boundary)
        opts = _solver_options(cfg)
        traj = evolve(
            op,
            datum.sample(grid),
            t_final,
            safety=opts["safety"],
            startup_ramp=opts["startup_ramp"],
            method=opts["method"],
            workers=threads,
        )
        x = grid.points()
        sel = (x >= interior[0]) & (x <= interior[1])
        if not np.any(sel):
            raise ConfigError("interior window contains no grid points")
        exact = reference_solution(spec.s, datum.a, datum.b, t_final, x[sel])
        err = float(np.max(np.abs(traj.state_at(t_final).values[sel] - exact)))
        rows.append((grid.h, grid.x_max - grid.x_min, err))
        log.info("level %d: h=%.5g err=%.3e", level, grid.h, err)
    with (out / "reference_errors.csv").open("w") as fh:
        fh.write("h,domain_size,linf_interior\n")
        for h, span, err in rows:
            fh.write(f"{_fmt(h)},{_fmt(span)},{_fmt(err)}\n")
    return EXIT_OK


def run_bench(
    spec: KernelSpec, sizes, reps: int, domain: tuple[float, float], seed: int
) -> list[dict]:
    """Time direct vs FFT operator application; returns one row per size."""
    rng = np.random.default_rng(seed)
    cert = validate_hypothesis(spec)
    rows = []
    for n in sizes:
        grid = Grid(domain[0], domain[1], int(n))
        op = discretize(
            spec, grid, BoundaryModel(left_value=1.0), certificate=cert, force=True
        )
        u = Field(grid, 0.0, rng.uniform(0.0, 1.0, grid.n))
        op.apply(u)
        op.apply_fft(u)
        t0 = time.perf_counter()
        for _ in range(reps):
            op.apply(u)
        direct_ms = (time.perf_counter() - t0) * 1e3 / reps
        t0 = time.perf_counter()
        for _ in range(reps):
            op.apply_fft(u)
        fft_ms = (time.perf_counter() - t0) * 1e3 / reps
        rows.append(
            {
                "n": int(n),
                "direct_ms": direct_ms,
                "fft_ms": fft_ms,
                "speedup": direct_ms / fft_ms,
            }
        )
    return rows


def cmd_bench(cfg: dict, out: Path, fmt: str, threads: int, seed: int) -> int:
    section = cfg.get("bench", {})
    sizes = [int(n) for n in section.get("sizes", [256, 1024, 4096])]
    reps = int(section.get("reps", 5))
    domain = section.get("domain", [-10.0, 10.0])
    spec = build_kernel(cfg)
    rows = run_bench(spec, sizes, reps, (float(domain[0]), float(domain[1])), seed)
    with (out / "bench.csv").open("w") as fh:
        fh.write("n,direct_ms,fft_ms,speedup\n")
        for row in rows:
            fh.write(
                f"{row['n']},{_fmt(row['direct_ms'])},{_fmt(row['fft_ms'])},"
                f"{_fmt(row['speedup'])}\n"
            )
    for row in rows:
        log.info(
            "n=%d direct=%.3fms fft=%.3fms speedup=%.2fx",
            row["n"],
            row["direct_ms"],
            row["fft_ms"],
            row["speedup"],
        )
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="flatdiff",
        description="Nonlocal diffusion simulator and verification harness.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)
    for name, helptext in [
        ("simulate", "run the solver and dump snapshots"),
        ("verify-subsolution", "certify the barrier residual sign"),
        ("verify-flattening", "measure the tail flattening bound"),
        ("verify-proposition", "half-line persistence and mirror identity"),
        ("reference-compare", "solver error against the exact solution"),
        ("bench", "time direct vs FFT operator application"),
    ]:
        p = sub.add_parser(name, help=helptext)
        p.add_argument("--config", required=True, help="path to the JSON run config")
        p.add_argument("--out", default=None, help="output directory")
        p.add_argument(
            "--format", choices=("csv", "json", "both"), default=None,
            help="trajectory artifact format (simulate only)",
        )
        p.add_argument("--threads", type=int, default=1, help="FFT worker threads")
        p.add_argument("--seed", type=int, default=0, help="RNG seed (bench input)")
        p.add_argument("-v", "--verbose", action="store_true")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(
        level=logging.DEBUG if args.verbose else logging.INFO,
        format="%(levelname)s %(name)s: %(message)s",
    )
    try:
        cfg = load_config(args.config)
        out_section = cfg.get("output", {})
        out = Path(args.out or out_section.get("directory", "."))
        fmt = args.format or out_section.get("format", "csv")
        if fmt not in ("csv", "json", "both"):
            raise ConfigError(f"unknown output format {fmt!r}")
        out.mkdir(parents=True, exist_ok=True)
        if args.command == "simulate":
            return cmd_simulate(cfg, out, fmt, args.threads)
        if args.command == "verify-flattening":
            return cmd_verify_flattening(cfg, out, fmt, args.threads)
        if args.command == "verify-proposition":
            return cmd_verify_proposition(cfg, out, fmt, args.threads)
        if args.command == "verify-subsolution":
            return cmd_verify_subsolution(cfg, out, fmt, args.threads)
        if args.command == "reference-compare":
            return cmd_reference_compare(cfg, out, fmt, args.threads)
        if args.command == "bench":
            return cmd_bench(cfg, out, fmt, args.threads, args.seed)
        raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        log.error("configuration error: %s", exc)
        return EXIT_CONFIG
    except ValueError as exc:
        log.error("invalid input: %s", exc)
        return EXIT_CONFIG
    except Exception:
        log.exception("internal error")
        return EXIT_INTERNAL


if __name__ == "__main__":
    sys.exit(main())
