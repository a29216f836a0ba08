"""Command-line front end.

Commands
--------
analyze   certified gain bounds for one sector, per multiplier class
sweep     gain bounds over a grid of sector bounds; CSV (+ figure) output
margin    largest certifiable sector bound per class
norm      nominal induced-gain of the loop-free channel
verify    run the constructive verification suites

Exit codes: 0 success, 1 verification failure, 2 input error, 3 solver
failure.
"""

from __future__ import annotations

import argparse
import concurrent.futures
import dataclasses
import json
import os
import sys as _sys
import time

import numpy as np

from . import lmi, verification
from .errors import ParseError, SectorboundError, SolverFailure
from .multipliers import MincMode, MultiplierKind
from .system import Sector, StateSpace, new_statespace, nominal_hinf_norm

_CLASS_FLAGS = {
    "md": MultiplierKind.DIAGONAL,
    "mc": MultiplierKind.VERTEX_CONVEX,
    "minc": MultiplierKind.INCREMENTAL_COMPLETE,
}
_CSV_HEADER = ("beta,gamma_md,gamma_mc,gamma_minc,"
               "status_md,status_mc,status_minc,"
               "time_md_s,time_mc_s,time_minc_s")


@dataclasses.dataclass
class RunConfig:
    command: str
    system_path: str | None = None
    alpha: float = 0.0
    beta: float = 1.0
    sweep: tuple[float, float, int] | None = None
    classes: tuple[str, ...] = ("md", "mc", "minc")
    resolution: float = 0.01
    seed: int = 0
    out: str | None = None
    eps: float | None = None
    mode: MincMode = MincMode.PSD_PLUS_N
    jobs: int = 0
    plot: bool = True

    def __post_init__(self):
        if not self.classes:
            raise ParseError("class list must be nonempty")
        if self.sweep is not None:
            lo, hi, count = self.sweep
            if count < 2:
                raise ParseError("sweep count must be >= 2")
            if lo > hi:
                raise ParseError("sweep requires MIN <= MAX")


def parse_system_file(path) -> StateSpace:
    """Read a state-space system from the JSON schema (keys A, B1, B2, C1,
    C2, D11, D12, D21, D22 as row-major arrays of arrays); dimensions are
    inferred and cross-checked."""
    try:
        with open(path) as fh:
            raw = json.load(fh)
    except FileNotFoundError as exc:
        raise ParseError(f"system file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ParseError(
            f"invalid JSON in {path} at line {exc.lineno}: {exc.msg}"
        ) from exc
    if not isinstance(raw, dict):
        raise ParseError(f"{path}: top level must be an object")
    mats = {}
    for key in ("A", "B1", "B2", "C1", "C2", "D11", "D12", "D21", "D22"):
        if key not in raw:
            raise ParseError(f"{path}: missing field {key!r}")
        try:
            mat = np.atleast_2d(np.asarray(raw[key], dtype=float))
        except (TypeError, ValueError) as exc:
            raise ParseError(
                f"{path}: field {key!r} is not a numeric matrix"
            ) from exc
        if mat.ndim != 2:
            raise ParseError(f"{path}: field {key!r} is not two-dimensional")
        mats[key] = mat
    dims = (
        mats["A"].shape[0],
        mats["B1"].shape[1],
        mats["B2"].shape[1],
        mats["C2"].shape[0],
    )
    return new_statespace(mats, dims)


def packaged_example_path() -> str:
    """Path of the shipped third-order example system."""
    from importlib import resources

    return str(resources.files("sectorbound.data") / "paper_sec5.json")


def _fmt(x) -> str:
    return "" if x is None else f"{x:.6g}"


def _analyze_one(sys: StateSpace, sector: Sector, kind: MultiplierKind,
                 eps, mode: MincMode):
    t0 = time.perf_counter()
    prob = lmi.AnalysisProblem(
        sys=sys, sector=sector,
        mclass=lmi.MultiplierClass(kind, sector, sys.m),
        eps=eps, check_mode=mode,
    )
    res = lmi.analyze(prob)
    return res, time.perf_counter() - t0


def _sweep_point(args):
    """One grid point of the sweep (top level for process pools)."""
    sys, beta, class_keys, eps, mode = args
    row = {"beta": beta}
    if beta == 0.0:
        t0 = time.perf_counter()
        gnom = nominal_hinf_norm(sys)
        dt = time.perf_counter() - t0
        for key in ("md", "mc", "minc"):
            sel = key in class_keys
            row[f"gamma_{key}"] = gnom if sel else None
            row[f"status_{key}"] = "NOMINAL" if sel else ""
            row[f"time_{key}_s"] = dt if sel else None
        return row
    sector = Sector(0.0, beta)
    for key in ("md", "mc", "minc"):
        if key not in class_keys:
            row[f"gamma_{key}"] = None
            row[f"status_{key}"] = ""
            row[f"time_{key}_s"] = None
            continue
        try:
            res, dt = _analyze_one(sys, sector, _CLASS_FLAGS[key], eps, mode)
            row[f"gamma_{key}"] = res.gamma
            row[f"status_{key}"] = res.status
            row[f"time_{key}_s"] = dt
        except SectorboundError as exc:
            row[f"gamma_{key}"] = None
            row[f"status_{key}"] = "FAILED"
            row[f"time_{key}_s"] = None
            row.setdefault("errors", []).append(f"{key}: {exc}")
    return row


def run_sweep(config: RunConfig, sys: StateSpace) -> list[dict]:
    """Evaluate all grid points; rows come back in grid order regardless of
    completion order."""
    lo, hi, count = config.sweep
    grid = np.linspace(lo, hi, count)
    tasks = [(sys, float(b), tuple(config.classes), config.eps, config.mode)
             for b in grid]
    jobs = config.jobs or min(os.cpu_count() or 1, len(tasks))
    if jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as pool:
            rows = list(pool.map(_sweep_point, tasks))
    else:
        rows = [_sweep_point(t) for t in tasks]
    return rows


def sweep_csv(rows: list[dict]) -> str:
    lines = [_CSV_HEADER]
    for r in rows:
        lines.append(",".join([
            _fmt(r["beta"]),
            _fmt(r.get("gamma_md")), _fmt(r.get("gamma_mc")),
            _fmt(r.get("gamma_minc")),
            r.get("status_md", ""), r.get("status_mc", ""),
            r.get("status_minc", ""),
            _fmt(r.get("time_md_s")), _fmt(r.get("time_mc_s")),
            _fmt(r.get("time_minc_s")),
        ]))
    return "\n".join(lines) + "\n"


def run_verify(config: RunConfig, sys: StateSpace | None = None):
    """Run the verification suites; returns (report text, all passed)."""
    names = list(verification.ALL_SUITES)
    if sys is not None:
        names.append("simulation_invariants")
    results = verification.run_suites(config.seed, names, sys=sys)
    lines = [f"verification report (seed={config.seed})"]
    lines += [r.line() for r in results]
    ok = all(r.passed for r in results)
    lines.append("ALL SUITES PASSED" if ok else "SUITE FAILURES PRESENT")
    return "\n".join(lines) + "\n", ok


def _write_out(text: str, out: str | None) -> None:
    if out in (None, "-"):
        _sys.stdout.write(text)
    else:
        with open(out, "w") as fh:
            fh.write(text)


def _build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog="sectorbound",
        description="Certified l2-gain bounds for discrete-time Lur'e systems",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    def common(p, needs_system=True):
        if needs_system:
            p.add_argument("--system", required=True,
                           help="path to the system JSON file")
        p.add_argument("--class", dest="classes", default="all",
                       help="md|mc|minc|all (comma-separated list allowed)")
        p.add_argument("--eps", type=float, default=None,
                       help="strictness margin override")
        p.add_argument("--mode", choices=("psdn", "brute"), default="psdn",
                       help="copositivity mode for verification paths")
        p.add_argument("--seed", type=int, default=0)
        p.add_argument("--out", default=None, help="output path ('-' stdout)")

    p = sub.add_parser("analyze", help="gain bounds for one sector")
    common(p)
    p.add_argument("--alpha", type=float, default=0.0)
    p.add_argument("--beta", type=float, default=1.0)

    p = sub.add_parser("sweep", help="gain bounds over a sector-bound grid")
    common(p)
    p.add_argument("--sweep", default="0:1.3:15", metavar="MIN:MAX:COUNT")
    p.add_argument("--jobs", type=int, default=0,
                   help="parallel workers (0 = auto)")
    p.add_argument("--no-plot", action="store_true",
                   help="skip rendering the figure next to the CSV")

    p = sub.add_parser("margin", help="largest certifiable sector bound")
    common(p)
    p.add_argument("--beta-max", type=float, default=2.0)
    p.add_argument("--resolution", type=float, default=0.01)

    p = sub.add_parser("norm", help="nominal induced gain (loop input zero)")
    common(p)

    p = sub.add_parser("verify", help="run the verification suites")
    common(p, needs_system=False)
    p.add_argument("--system", default=None,
                   help="optional system for the simulation suite")
    return ap


def _config_from_args(args) -> RunConfig:
    classes = args.classes.lower()
    if classes == "all":
        keys: tuple[str, ...] = ("md", "mc", "minc")
    else:
        keys = tuple(k.strip() for k in classes.split(","))
        for k in keys:
            if k not in _CLASS_FLAGS:
                raise ParseError(f"unknown multiplier class {k!r}")
    sweep = None
    if getattr(args, "sweep", None):
        try:
            lo, hi, count = args.sweep.split(":")
            sweep = (float(lo), float(hi), int(count))
        except ValueError as exc:
            raise ParseError(
                f"bad sweep specification {args.sweep!r}; expected MIN:MAX:COUNT"
            ) from exc
    return RunConfig(
        command=args.command,
        system_path=getattr(args, "system", None),
        alpha=getattr(args, "alpha", 0.0),
        beta=getattr(args, "beta", 1.0),
        sweep=sweep,
        classes=keys,
        resolution=getattr(args, "resolution", 0.01),
        seed=args.seed,
        out=args.out,
        eps=args.eps,
        mode=MincMode.BRUTE_FORCE if args.mode == "brute" else MincMode.PSD_PLUS_N,
        jobs=getattr(args, "jobs", 0),
        plot=not getattr(args, "no_plot", False),
    )


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    try:
        config = _config_from_args(args)
        sys_model = None
        if config.system_path is not None:
            sys_model = parse_system_file(config.system_path)
    except (ParseError,) as exc:
        print(f"input error: {exc}", file=_sys.stderr)
        return 2

    try:
        if config.command == "analyze":
            sector = Sector(config.alpha, config.beta)
            lines = [f"sector {sector}  (m={sys_model.m}, n_x={sys_model.n_x})"]
            if sys_model.wellposedness_warning:
                lines.append("warning: D11 != 0, loop well-posedness assumed")
            for key in config.classes:
                res, dt = _analyze_one(sys_model, sector, _CLASS_FLAGS[key],
                                       config.eps, config.mode)
                g = _fmt(res.gamma) if res.gamma is not None else "-"
                lines.append(
                    f"{key:5s} status={res.status:10s} gamma={g:12s} "
                    f"time={dt:.3f}s iterations={res.iterations}"
                )
            _write_out("\n".join(lines) + "\n", config.out)
        elif config.command == "sweep":
            rows = run_sweep(config, sys_model)
            csv_text = sweep_csv(rows)
            _write_out(csv_text, config.out)
            if config.plot and config.out not in (None, "-"):
                from . import plotting

                gnom = next(
                    (r["gamma_md"] for r in rows if r["beta"] == 0.0), None
                )
                base, _ = os.path.splitext(config.out)
                plotting.render_sweep(rows, base + ".png", gamma_nom=gnom)
            failures = [e for r in rows for e in r.get("errors", [])]
            for e in failures:
                print(f"note: {e}", file=_sys.stderr)
        elif config.command == "margin":
            lines = []
            for key in config.classes:
                m = lmi.margin_search(
                    sys_model, _CLASS_FLAGS[key],
                    beta_max=args.beta_max, resolution=config.resolution,
                    eps=config.eps,
                )
                lines.append(f"{key:5s} margin_beta={m:.4f} "
                             f"(resolution {config.resolution:g})")
            _write_out("\n".join(lines) + "\n", config.out)
        elif config.command == "norm":
            g = nominal_hinf_norm(sys_model)
            _write_out(f"nominal_hinf_norm={g:.8g}\n", config.out)
        elif config.command == "verify":
            report, ok = run_verify(config, sys_model)
            _write_out(report, config.out)
            return 0 if ok else 1
    except SolverFailure as exc:
        print(f"solver failure: {exc}", file=_sys.stderr)
        return 3
    except SectorboundError as exc:
        print(f"input error: {exc}", file=_sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
