"""Command-line driver.

    regdual solve   --config FILE | --preset NAME
    regdual path    --config FILE | --preset NAME  --points N --tol T [--out FILE]
    regdual audit   --dim N --s S --p P --inequality NAME|all --samples K --seed SEED [--out FILE]
    regdual compare --config FILE | --preset NAME  --schemes a,b,c [--out FILE]
    regdual presets

Exit status: 0 completed, 2 validation/usage, 3 divergence, 4 inner solver
failure, 5 I/O.
"""

from __future__ import annotations

import argparse
import logging
import math
import sys
import time
from dataclasses import dataclass, field
from typing import Optional

from ..errors import ConfigurationError, DivergenceError, RegdualError, ResolventError
from ..geometry import SpaceSpec
from ..lyapunov import INEQUALITIES, run_audit
from ..operators import estimate_stats
from ..solver.diagnostics import track_diagnostics
from ..solver.engines import HILBERT_ONLY, SCHEMES, run_scheme
from ..solver.resolvent import regularization_path, resolvents_at
from ..solver.schedule import validate_schedule
from .config import ConfigError, ExperimentConfig, load_config, load_preset, preset_names
from .io import write_csv, write_json

log = logging.getLogger("regdual")

EXIT_OK, EXIT_USAGE, EXIT_DIVERGED, EXIT_INNER, EXIT_IO = 0, 2, 3, 4, 5

TRACE_HEADER = ("n", "lambda", "theta", "err", "residual", "phi_star", "phi_track", "step_size")
PATH_HEADER = ("n", "theta", "residual", "err", "newton_iters")
COMPARE_HEADER = ("scheme", "final_err", "final_residual", "iterations_used", "wall_time_seconds")
STATS_SAMPLES = 256
TRACK_TOL = 1e-10


@dataclass
class ExperimentSummary:
    final_err: Optional[float]
    final_residual: float
    iterations_used: int
    schedule_valid: dict
    wall_time_seconds: Optional[float]
    config_echo: dict
    status: str = "completed"
    scheme: str = ""
    stop_reason: str = ""
    final_x: list = field(default_factory=list)
    operator_stats: dict = field(default_factory=dict)
    diagnostics: dict = field(default_factory=dict)

    def to_json(self):
        return {
            "status": self.status,
            "scheme": self.scheme,
            "final_err": _finite_or_none(self.final_err),
            "final_residual": _finite_or_none(self.final_residual),
            "iterations_used": self.iterations_used,
            "stop_reason": self.stop_reason,
            "final_x": self.final_x,
            "schedule_valid": self.schedule_valid,
            "operator_stats": self.operator_stats,
            "diagnostics": {k: _finite_or_none(v) for k, v in self.diagnostics.items()},
            "wall_time_seconds": self.wall_time_seconds,
            "config_echo": self.config_echo,
        }


def _finite_or_none(v):
    return None if v is None or not math.isfinite(v) else float(v)


def _trace_rows(trace):
    for r in trace.rows:
        yield (r.n, r.lambda_n, r.theta_n, r.err, r.residual, r.phi_star, r.phi_track, r.step_size)


def _stats_radius(space, A, x1):
    anchor = space.norm(x1)
    other = space.norm(A.known_zero) if A.known_zero is not None else anchor
    return 1.0 + anchor + other


def run_experiment(cfg: ExperimentConfig, scheme: Optional[str] = None, track_path=None):
    """Run one scheme on the configured problem; returns ``(trace, summary)``.

    Raises DivergenceError (with ``summary`` attached) or ResolventError.
    """
    scheme = scheme or cfg.run.scheme
    track_path = cfg.run.track_path if track_path is None else track_path
    space = cfg.build_space()
    A = cfg.build_operator(space)
    sched = cfg.build_schedule()
    solve_cfg = cfg.build_solve_config(space)
    regularized = scheme in ("regularized", "accretive")
    report = validate_schedule(sched, horizon=max(2, min(cfg.run.max_iter, 10**6)), regularized=regularized)
    if not report.valid:
        log.warning("schedule fails: %s", "; ".join(report.messages))

    stats = estimate_stats(A, _stats_radius(space, A, solve_cfg.x1.coords), STATS_SAMPLES, cfg.run.seed)
    t0 = time.perf_counter()
    status = "completed"
    try:
        trace = run_scheme(scheme, A, sched, solve_cfg)
    except DivergenceError as exc:
        trace = exc.trace
        status = "diverged"
    wall = time.perf_counter() - t0

    path = None
    if status == "completed" and track_path and regularized:
        path = resolvents_at(A, trace.column("theta_n"), solve_cfg.x1, TRACK_TOL, indices=trace.column("n"))
    trace = track_diagnostics(trace, A, path)
    last = trace.final
    diag = {k: trace.meta[k] for k in ("radius", "m0_hat") if k in trace.meta}
    if path is not None:
        diag["final_phi_track"] = last.phi_track
        diag["final_track_gap"] = space.norm(last.x - path[-1].y.coords)
    summary = ExperimentSummary(
        final_err=last.err,
        final_residual=last.residual,
        iterations_used=trace.iterations_used,
        schedule_valid=report.to_json(),
        wall_time_seconds=wall,
        config_echo=cfg.to_json(),
        status=status,
        scheme=scheme,
        stop_reason=trace.stop_reason,
        final_x=last.x.tolist(),
        operator_stats=stats.to_json(),
        diagnostics=diag,
    )
    if status == "diverged":
        err = DivergenceError(f"{scheme} run diverged after n = {trace.iterations_used}", trace)
        err.summary = summary
        raise err
    return trace, summary


def cmd_solve(cfg: ExperimentConfig, csv_path=None, json_path=None, record_timing=False) -> int:
    """Run the configured scheme, write the trace CSV and the JSON summary.

    Wall time goes into the summary only with ``record_timing`` so that
    reruns produce byte-identical files.
    """
    csv_path = csv_path or cfg.output.csv_path
    json_path = json_path or cfg.output.json_path
    code = EXIT_OK
    try:
        trace, summary = run_experiment(cfg)
    except DivergenceError as exc:
        log.error("%s", exc)
        trace, summary, code = exc.trace, exc.summary, EXIT_DIVERGED
    except ResolventError as exc:
        log.error("path tracking failed at n = %s: %s", exc.index, exc)
        return EXIT_INNER
    if not record_timing:
        summary.wall_time_seconds = None
    try:
        write_csv(csv_path, TRACE_HEADER, _trace_rows(trace))
        write_json(json_path, summary.to_json())
    except OSError as exc:
        log.error("cannot write output: %s", exc)
        return EXIT_IO
    return code


def cmd_path(cfg: ExperimentConfig, n_points: int, tol: float, out="path.csv") -> int:
    """Write the regularization path at ``theta_1..theta_n_points``."""
    if not (isinstance(n_points, int) and n_points >= 1):
        log.error("--points must be a positive integer")
        return EXIT_USAGE
    if not (math.isfinite(tol) and tol > 0):
        log.error("--tol must be positive, got %r", tol)
        return EXIT_USAGE
    space = cfg.build_space()
    A = cfg.build_operator(space)
    sched = cfg.build_schedule()
    if not sched.has_theta:
        log.error("schedule has no theta sequence")
        return EXIT_USAGE
    x1 = space.point(cfg.run.x1)
    code = EXIT_OK
    try:
        path = regularization_path(A, sched, x1, n_points, tol)
    except ResolventError as exc:
        log.error("resolvent solve failed at n = %s: %s", exc.index, exc)
        path, code = getattr(exc, "partial", []), EXIT_INNER
    rows = ((r.n, r.theta, r.residual, r.err, r.newton_iters) for r in path)
    try:
        write_csv(out, PATH_HEADER, rows)
    except OSError as exc:
        log.error("cannot write output: %s", exc)
        return EXIT_IO
    return code


def cmd_audit(dim, s, p, inequality, samples, seed=42, out=None, radius=1.0) -> int:
    """Run one or all inequality audits and write a JSON array of reports.

    Violations are findings, not failures: the exit status is 0 whenever
    the audits complete.
    """
    if inequality != "all" and inequality not in INEQUALITIES:
        log.error("unknown inequality %r; expected one of %s or 'all'", inequality, list(INEQUALITIES))
        return EXIT_USAGE
    try:
        space = SpaceSpec(dim, s, p)
        reports = run_audit(space, inequality, samples, seed, radius)
    except RegdualError as exc:
        log.error("%s", exc)
        return EXIT_USAGE
    payload = [r.to_json() for r in reports]
    if out is None:
        import json
        sys.stdout.write(json.dumps(payload, indent=2) + "\n")
        return EXIT_OK
    try:
        write_json(out, payload)
    except OSError as exc:
        log.error("cannot write output: %s", exc)
        return EXIT_IO
    return EXIT_OK


def cmd_compare(cfg: ExperimentConfig, schemes, out="compare.csv") -> int:
    """Run several schemes on the same problem and tabulate final errors."""
    schemes = [s for s in schemes if s]
    if not schemes:
        log.error("scheme list is empty")
        return EXIT_USAGE
    space = cfg.build_space()
    for s in schemes:
        if s not in SCHEMES:
            log.error("unknown scheme %r; expected one of %s", s, list(SCHEMES))
            return EXIT_USAGE
        if s in HILBERT_ONLY and not space.is_hilbert:
            log.error("scheme %r requires s = 2 and gauge_p = 2", s)
            return EXIT_USAGE
        if s in ("regularized", "accretive") and not cfg.build_schedule().has_theta:
            log.error("scheme %r needs a theta sequence", s)
            return EXIT_USAGE
    rows = []
    code = EXIT_OK
    for s in schemes:
        try:
            _, summary = run_experiment(cfg, scheme=s, track_path=False)
        except DivergenceError as exc:
            summary, code = exc.summary, EXIT_DIVERGED
        rows.append((s, summary.final_err, summary.final_residual, summary.iterations_used,
                     summary.wall_time_seconds))
    try:
        write_csv(out, COMPARE_HEADER, rows)
    except OSError as exc:
        log.error("cannot write output: %s", exc)
        return EXIT_IO
    return code


def _load(args) -> ExperimentConfig:
    if args.preset:
        return load_preset(args.preset)
    return load_config(args.config)


def build_parser():
    ap = argparse.ArgumentParser(prog="regdual", description=__doc__.split("\n\n")[0])
    sub = ap.add_subparsers(dest="command", required=True)

    def add_source(p):
        g = p.add_mutually_exclusive_group(required=True)
        g.add_argument("--config", help="experiment JSON file")
        g.add_argument("--preset", help="name of a bundled preset")

    p = sub.add_parser("solve", help="run one scheme and write trace + summary")
    add_source(p)
    p.add_argument("--csv", help="override output.csv_path")
    p.add_argument("--json", help="override output.json_path")
    p.add_argument("--record-timing", action="store_true",
                   help="store wall time in the summary (makes reruns differ)")

    p = sub.add_parser("path", help="compute the regularization path")
    add_source(p)
    p.add_argument("--points", type=int, default=100)
    p.add_argument("--tol", type=float, default=1e-10)
    p.add_argument("--out", default="path.csv")

    p = sub.add_parser("audit", help="audit the Lyapunov inequalities")
    p.add_argument("--dim", type=int, required=True)
    p.add_argument("--s", type=float, default=2.0)
    p.add_argument("--p", type=float, default=2.0)
    p.add_argument("--inequality", default="all")
    p.add_argument("--samples", type=int, default=10_000)
    p.add_argument("--seed", type=int, default=42)
    p.add_argument("--radius", type=float, default=1.0, help="ball radius for lemma_ball")
    p.add_argument("--out")

    p = sub.add_parser("compare", help="run several schemes on one problem")
    add_source(p)
    p.add_argument("--schemes", required=True, help="comma-separated scheme names")
    p.add_argument("--out", default="compare.csv")

    sub.add_parser("presets", help="list bundled presets")
    return ap


def main(argv=None) -> int:
    logging.basicConfig(level=logging.INFO, format="%(levelname)s: %(message)s", stream=sys.stderr)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_USAGE
    try:
        if args.command == "presets":
            print("\n".join(preset_names()))
            return EXIT_OK
        if args.command == "audit":
            return cmd_audit(args.dim, args.s, args.p, args.inequality, args.samples, args.seed,
                             args.out, args.radius)
        cfg = _load(args)
        if args.command == "solve":
            return cmd_solve(cfg, args.csv, args.json, args.record_timing)
        if args.command == "path":
            return cmd_path(cfg, args.points, args.tol, args.out)
        return cmd_compare(cfg, args.schemes.split(","), args.out)
    except (ConfigError, ConfigurationError, RegdualError) as exc:
        log.error("%s", exc)
        return EXIT_USAGE
    except OSError as exc:
        log.error("%s", exc)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
