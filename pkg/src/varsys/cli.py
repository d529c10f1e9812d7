"""Command-line front end: ``varsys {analyze,solve,cascade,grid} CONFIG``.

Exit codes: 0 success, 2 failed hypothesis without ``--override-hypotheses``,
3 configuration error, 4 numerical failure.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import warnings
from dataclasses import replace
from pathlib import Path

from .asymptotics import lambda_interval, oscillation_condition
from .config import load_config
from .energy import EnergyFunctional, ProblemInstance
from .errors import ConfigError, HypothesisError, NumericalError, VarsysError
from .grid import GridProblemSpec, alternate_grid_constant, emit_plot_data, run_grid
from .solver import cascade, multistart_solve, unboundedness_witness

EXIT_OK = 0
EXIT_HYPOTHESIS = 2
EXIT_CONFIG = 3
EXIT_NUMERICAL = 4
WATERMARK = "WARNING: hypotheses overridden; results carry no existence guarantee"

log = logging.getLogger("varsys")


def _num(x):
    return f"{float(x):.17g}"


def analyze_report(cfg):
    """Deterministic text report of spectrum, Lipschitz check, conditions and intervals."""
    a = cfg.matrix
    p = ProblemInstance(a, cfg.f, cfg.h, cfg.lam)
    is_grid = cfg.grid is not None
    label = "lambda_A" if is_grid else "lambda_1"
    lines = [
        "varsys analyze report",
        f"seed: {cfg.seed}",
        f"dimension: {a.order}",
        f"structural_tag: {a.structural_tag}",
        "spectrum:",
        *(f"  {_num(v)}" for v in a.spectrum),
        f"{label}: {_num(a.lambda1)}",
        f"L: {_num(p.L)}",
        f"lipschitz_condition: {'pass' if p.lipschitz.passed else 'fail'} (L < {label})",
        f"coercivity_coefficient: {_num(p.lipschitz.coercivity)}",
        f"T: {_num(p.constant_T)}",
    ]
    if is_grid:
        m, n = cfg.grid["m"], cfg.grid["n"]
        lines.append(f"T_alternate_form: {_num(alternate_grid_constant(m, n, p.L))} ((2 + L_h)(m + n), printed for comparison)")
    if cfg.profile is None:
        lines.append("profile: none (oscillation conditions not evaluated)")
    else:
        for regime in ("infinity", "zero"):
            try:
                verdict = oscillation_condition(cfg.profile, a, p.L, regime)
            except VarsysError:
                continue
            interval = lambda_interval(cfg.profile, a, p.L, regime)
            kind = "analytic" if cfg.profile.is_certificate(regime) else "empirical estimate"
            lines.append(f"regime {regime}: profile {kind}")
            lines.append(f"regime {regime}: {verdict.describe()}")
            lines.append(f"regime {regime}: lambda interval ]{_num(interval.lower)}, {_num(interval.upper)}[")
            for lam in cfg.lambdas:
                where = "inside" if lam in interval else "outside"
                lines.append(f"regime {regime}: lambda {_num(lam)} {where}")
    return "\n".join(lines) + "\n"


def _header(cfg, overridden):
    rows = [f"# seed={cfg.seed}"]
    if overridden:
        rows.append(f"# {WATERMARK}")
        rows += [f"# overridden: {msg}" for msg in overridden]
    return rows


def write_solutions(records, lam, path, cfg, overridden, fmt="csv"):
    """Export records as CSV or JSON: index, Phi, Psi, J, residual, norms, components."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    if fmt == "json":
        doc = {
            "seed": cfg.seed,
            "lambda": lam,
            "overridden": list(overridden),
            "solutions": [
                {
                    "index": k,
                    "phi": rec.phi,
                    "psi": (rec.phi - rec.j_value) / lam,
                    "j": rec.j_value,
                    "residual": rec.residual,
                    "norm2": rec.norm2,
                    "norm_inf": rec.norm_inf,
                    "type": rec.stationary_type,
                    "u": [float(x) for x in rec.u],
                }
                for k, rec in enumerate(records, start=1)
            ],
        }
        if overridden:
            doc["warning"] = WATERMARK
        path.write_text(json.dumps(doc, indent=2) + "\n")
        return path
    n = len(records[0].u) if records else 0
    with path.open("w", newline="") as fh:
        for line in _header(cfg, overridden):
            fh.write(line + "\n")
        writer = csv.writer(fh)
        writer.writerow(["index", "phi", "psi", "j", "residual", "norm2", "norm_inf", "type"]
                        + [f"u{k}" for k in range(1, n + 1)])
        for k, rec in enumerate(records, start=1):
            psi = (rec.phi - rec.j_value) / lam
            writer.writerow([k, *(_num(v) for v in (rec.phi, psi, rec.j_value, rec.residual, rec.norm2, rec.norm_inf)),
                             rec.stationary_type, *(_num(x) for x in rec.u)])
    return path


def _write_failures(failures, path):
    if not failures:
        return
    with Path(path).open("w") as fh:
        for k, fail in enumerate(failures, start=1):
            fh.write(f"{k}: {fail.reason}; |grad| = {_num(fail.gradient_norm)} after {fail.iterations} iterations\n")


def _summary(records, overridden, out):
    if overridden:
        print(WATERMARK, file=out)
    print(f"{len(records)} distinct solutions", file=out)
    for k, rec in enumerate(records, start=1):
        print(f"  {k}: phi={_num(rec.phi)} norm_inf={_num(rec.norm_inf)} residual={rec.residual:.3e} ({rec.stationary_type})",
              file=out)


def _run_solver(cfg, args, out):
    out_dir = Path(args.out or cfg.output_dir or "varsys_out")
    ext = "json" if cfg.output_format == "json" else "csv"
    for idx, lam in enumerate(cfg.lambdas):
        suffix = "" if len(cfg.lambdas) == 1 else f"_lambda{idx + 1}"
        J = EnergyFunctional(ProblemInstance(cfg.matrix, cfg.f, cfg.h, lam))
        print(f"lambda = {_num(lam)}", file=out)
        if args.command == "cascade" or cfg.strategy == "cascade":
            result = cascade(J, cfg.solve, cfg.regime, cfg.profile, cfg.witness_peaks, cfg.plateau_ends)
            emit_plot_data(result.records, out_dir / f"plots{suffix}")
            print(result.evidence, file=out)
            if cfg.witness_peaks:
                report = unboundedness_witness(J, cfg.witness_peaks)
                print(f"witness along peaks: {report.verdict}", file=out)
            failures = []
        else:
            result = multistart_solve(J, cfg.solve)
            failures = result.failures
        records, overridden = result.records, result.overridden
        write_solutions(records, lam, out_dir / f"solutions{suffix}.{ext}", cfg, overridden, cfg.output_format)
        _write_failures(failures, out_dir / f"nonconvergence{suffix}.log")
        _summary(records, overridden, out)
        if not records and failures:
            raise NumericalError("no start converged", failures=len(failures))
    return EXIT_OK


def _run_grid(cfg, args, out):
    out_dir = Path(args.out or cfg.output_dir or "varsys_out")
    for idx, lam in enumerate(cfg.lambdas):
        target = out_dir if len(cfg.lambdas) == 1 else out_dir / f"lambda{idx + 1}"
        spec = GridProblemSpec(cfg.grid["m"], cfg.grid["n"], cfg.grid_f, cfg.grid_h, cfg.lipschitz_h, lam)
        mode = "cascade" if cfg.strategy == "cascade" else "multistart"
        run = run_grid(spec, cfg.solve, mode, cfg.regime, cfg.profile, cfg.witness_peaks, cfg.plateau_ends, target)
        index = spec.assemble()[1]
        emit_plot_data(run.records, target / "plots", index_map=index)
        overridden = run.result.overridden
        write_solutions(run.records, lam, target / "solutions.csv", cfg, overridden)
        if overridden:
            (target / "WARNING.txt").write_text(WATERMARK + "\n" + "".join(f"{m}\n" for m in overridden))
        print(f"lambda = {_num(lam)}", file=out)
        _summary(run.records, overridden, out)
        print(f"grid round-trip max error: {run.max_roundtrip_error:.3e}", file=out)
    return EXIT_OK


def build_parser():
    parser = argparse.ArgumentParser(prog="varsys", description="Multiple solutions of A u = lambda f(u) + h(u).")
    parser.add_argument("-v", "--verbose", action="store_true", help="log solver progress")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (
        ("analyze", "report spectrum, hypotheses and lambda-intervals"),
        ("solve", "multistart search for solutions"),
        ("cascade", "sublevel cascade producing a monotone solution sequence"),
        ("grid", "2-D Dirichlet grid problem end to end"),
    ):
        cmd = sub.add_parser(name, help=text)
        cmd.add_argument("config", help="JSON configuration file")
        cmd.add_argument("--override-hypotheses", action="store_true",
                         help="proceed past failed checks; outputs are watermarked")
        cmd.add_argument("--seed", type=int, default=None, help="override the config seed")
        cmd.add_argument("--out", default=None, help="output directory")
    return parser


def main(argv=None, out=None):
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(name)s: %(message)s")
    try:
        cfg = load_config(args.config, args.command)
        if args.seed is not None:
            cfg.seed = args.seed
            cfg.solve = replace(cfg.solve, seed=args.seed)
        if args.override_hypotheses:
            cfg.solve = replace(cfg.solve, override_hypotheses=True)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore")
            if args.command == "analyze":
                report = analyze_report(cfg)
                out.write(report)
                if args.out:
                    Path(args.out).mkdir(parents=True, exist_ok=True)
                    (Path(args.out) / "analysis.txt").write_text(report)
                return EXIT_OK
            if args.command == "grid":
                return _run_grid(cfg, args, out)
            return _run_solver(cfg, args, out)
    except HypothesisError as exc:
        print(f"hypothesis check failed: {exc}", file=sys.stderr)
        print("rerun with --override-hypotheses to proceed without guarantee", file=sys.stderr)
        return EXIT_HYPOTHESIS
    except NumericalError as exc:
        print(f"numerical failure: {exc} {exc.diagnostics or ''}".rstrip(), file=sys.stderr)
        return EXIT_NUMERICAL
    except (ConfigError, VarsysError, ValueError) as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except ArithmeticError as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
