"""Batch command-line surface.

One subcommand per analysis: scan, reflect, series, zeros, count, order,
eigencount, witness, plus ``examples`` which writes re-runnable bundled
configs.  Tables go to stdout (or --output) as CSV or JSON with numbers at
17 significant digits; runs are deterministic.

Exit codes: 0 success, 1 usage/config error, 2 degenerate (b identically
zero), 3 solver failure.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

import numpy as np

from . import catalog, config as cfg, series, spectral, zeros
from .errors import (
    ConfigError,
    DegenerateFunctionError,
    ScatterError,
    WitnessNotFoundError,
)
from .scattering import coefficients_batch, realify, reflection

_ENV_JOBS = "CCSCATTER_JOBS"


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # usage errors exit 1, not argparse's 2
        self.print_usage(sys.stderr)
        raise SystemExit(self._fail(message))

    @staticmethod
    def _fail(message: str) -> int:
        print(f"error: {message}", file=sys.stderr)
        return 1


def _fmt(value) -> str:
    if isinstance(value, float):
        return format(value, ".17g")
    return str(value)


def _emit(rows: list[dict], fmt: str, output: str | None) -> None:
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        if rows:
            writer.writerow(rows[0].keys())
            for row in rows:
                writer.writerow(_fmt(v) for v in row.values())
        text = buf.getvalue()
    else:
        text = json.dumps(rows, indent=2) + "\n"
    if output:
        Path(output).write_text(text)
    else:
        sys.stdout.write(text)


def _resolve_lambdas(flag: str | None, block: dict) -> list[float]:
    if flag:
        if ":" in flag:
            lo, hi, count = flag.split(":")
            return list(np.linspace(float(lo), float(hi), int(count)))
        return [float(tok) for tok in flag.split(",") if tok]
    spec = block.get("lambdas")
    if isinstance(spec, dict):
        count = int(spec.get("count", 0))
        if count < 2:
            raise ConfigError("coupling grids need at least 2 points", "command")
        return list(np.linspace(float(spec["start"]), float(spec["stop"]), count))
    if isinstance(spec, list):
        return [float(v) for v in spec]
    return list(np.linspace(-5.0, 5.0, 21))


def _jobs(args) -> int:
    if args.jobs is not None:
        return max(1, args.jobs)
    return max(1, int(os.environ.get(_ENV_JOBS, "1")))


def _ordered_map(fn, items, jobs: int):
    if jobs <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(fn, items))


def _real_problem(run: cfg.RunConfig):
    """Realify for the real-axis analyses, with a notice when it matters."""
    if run.problem.ref.u0_is_real:
        return run.problem
    print(
        "note: reference solution realified for real-axis analysis",
        file=sys.stderr,
    )
    return realify(run.problem)


# ---------------------------------------------------------------------------
# subcommands


def _cmd_scan(run: cfg.RunConfig, args) -> list[dict]:
    lams = _resolve_lambdas(args.lambdas, run.command.get("scan", {}))
    a, b, err = coefficients_batch(run.problem, np.asarray(lams, dtype=complex))
    return [
        {
            "lambda_re": float(l.real),
            "lambda_im": float(l.imag),
            "a_re": float(av.real),
            "a_im": float(av.imag),
            "b_re": float(bv.real),
            "b_im": float(bv.imag),
            "err": float(e),
            "method": "ode",
        }
        for l, av, bv, e in zip(np.asarray(lams, dtype=complex), a, b, err)
    ]


def _cmd_reflect(run: cfg.RunConfig, args) -> list[dict]:
    lams = _resolve_lambdas(args.lambdas, run.command.get("reflect", {}))

    def one(lam: float) -> dict:
        res = reflection(run.problem, lam)
        return {
            "lambda": float(lam),
            "alpha_re": res.alpha.real,
            "alpha_im": res.alpha.imag,
            "beta_re": res.beta.real,
            "beta_im": res.beta.imag,
            "R": res.R,
            "flux_defect": res.flux_defect,
            "method": "ode",
        }

    return _ordered_map(one, lams, _jobs(args))


def _cmd_series(run: cfg.RunConfig, args) -> list[dict]:
    block = run.command.get("series", {})
    order = args.order if args.order is not None else int(block.get("N", 16))
    lams = _resolve_lambdas(args.lambdas, block)
    expansion = series.series_coefficients(run.problem, order)
    rows = []
    for lam in lams:
        val = series.evaluate_series(expansion, lam)
        rows.append(
            {
                "lambda_re": float(complex(lam).real),
                "lambda_im": float(complex(lam).imag),
                "a_re": val.a.real,
                "a_im": val.a.imag,
                "b_re": val.b.real,
                "b_im": val.b.imag,
                "certified_err": val.err,
                "usable": int(val.is_usable()),
                "method": "series",
            }
        )
    return rows


def _cmd_zeros(run: cfg.RunConfig, args) -> list[dict]:
    block = run.command.get("zeros", {})
    interval = block.get("interval", [-50.0, 50.0])
    if args.interval:
        lo, hi = args.interval.split(":")
        interval = [float(lo), float(hi)]
    grid_points = args.grid_points or int(block.get("grid_points", 400))
    if zeros.is_identically_zero(run.problem):
        raise DegenerateFunctionError("b identically zero")
    report = zeros.real_zero_scan(
        _real_problem(run), (interval[0], interval[1]), grid_points
    )
    return [
        {
            "zero_re": z.real,
            "zero_im": z.imag,
            "multiplicity": mult,
            "residual": res,
            "method": "ode",
        }
        for z, mult, res in report.zeros
    ]


def _cmd_count(run: cfg.RunConfig, args) -> list[dict]:
    block = run.command.get("count", {})
    radii = [float(args.radius)] if args.radius else None
    if radii is None:
        raw = block.get("radius", 50.0)
        radii = [float(r) for r in raw] if isinstance(raw, list) else [float(raw)]
    nodes = args.nodes or int(block.get("nodes", 64))
    return [
        {
            "radius": r,
            "count": zeros.disk_zero_count(run.problem, r, nodes),
            "method": "ode",
        }
        for r in radii
    ]


def _cmd_order(run: cfg.RunConfig, args) -> list[dict]:
    block = run.command.get("order", {})
    radii = (
        [float(tok) for tok in args.radii.split(",")]
        if args.radii
        else [float(r) for r in block.get("radii", [1e2, 1e3, 1e4, 1e5])]
    )
    fit = zeros.order_fit(run.problem, radii)
    return [
        {
            "radius": r,
            "count": c,
            "log_max_modulus": lm,
            "count_exponent": fit.count_exponent,
            "growth_exponent": fit.growth_exponent,
            "fit_residual": fit.fit_residual,
            "method": "ode",
        }
        for r, c, lm in zip(fit.radii, fit.counts, fit.log_max_modulus)
    ]


def _cmd_eigencount(run: cfg.RunConfig, args) -> list[dict]:
    lams = _resolve_lambdas(args.lambdas, run.command.get("eigencount", {}))
    problem = _real_problem(run)
    angles = spectral.boundary_angles(problem)

    def one(lam: float) -> dict:
        count = spectral.negative_eigenvalue_count(problem, lam, angles)
        return {
            "lambda": float(lam),
            "count": int(count),
            "boundary_degenerate": int(count.boundary_degenerate),
            "method": "prufer",
        }

    return _ordered_map(one, lams, _jobs(args))


def _cmd_witness(run: cfg.RunConfig, args) -> list[dict]:
    block = run.command.get("witness", {})
    lam = args.coupling if args.coupling is not None else float(
        block.get("lambda", -1e4)
    )
    tents = args.tents if args.tents is not None else int(block.get("tents", 5))
    problem = _real_problem(run)
    try:
        witness = spectral.tent_witness(problem, lam, tents)
    except WitnessNotFoundError as exc:
        print(f"witness: inconclusive ({exc})", file=sys.stderr)
        return []
    return [
        {
            "center": c,
            "epsilon": witness.epsilon,
            "rayleigh": q,
            "method": "tent",
        }
        for c, q in zip(witness.centers, witness.rayleigh_values)
    ]


_EXAMPLE_BUNDLE = (
    ("delta_pair.json", catalog.delta_pair, {"scan": {"lambdas": {"start": -5.0, "stop": 5.0, "count": 41}}}),
    ("sine_well.json", catalog.sine_well, {
        "zeros": {"interval": [-5.0, 100.0], "grid_points": 400},
        "count": {"radius": 500.0},
        "order": {"radii": [1e2, 1e3, 1e4, 1e5]},
        "eigencount": {"lambdas": [0.0, 5.0 * math.pi**2, 35.0 * math.pi**2]},
    }),
    ("box_barrier.json", catalog.box_barrier, {
        "zeros": {"interval": [-50.0, 1.0], "grid_points": 400},
        "witness": {"lambda": -1e4, "tents": 5},
    }),
    ("noise_bed.json", catalog.noise_bed, {"series": {"N": 16}}),
    ("traveling_barrier.json", catalog.traveling_barrier, {
        "reflect": {"lambdas": {"start": -2.0, "stop": 2.0, "count": 21}},
    }),
)


def _cmd_examples(args) -> list[dict]:
    out_dir = Path(args.output_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    rows = []
    for name, builder, command in _EXAMPLE_BUNDLE:
        path = out_dir / name
        path.write_text(cfg.config_to_text(builder(), command))
        rows.append({"name": name, "path": str(path)})
    return rows


# ---------------------------------------------------------------------------


def _build_parser() -> _Parser:
    parser = _Parser(
        prog="ccscatter",
        description="Coupling-constant scattering analysis on [0, 1]",
    )
    parser.add_argument("--format", choices=("csv", "json"), default="csv")
    parser.add_argument("--output", help="write the table to this path")
    parser.add_argument(
        "--jobs",
        type=int,
        help=f"worker threads for sweeps (default ${_ENV_JOBS} or 1)",
    )
    # accept the output flags after the subcommand too; SUPPRESS keeps the
    # globally parsed value when the trailing flag is absent
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument(
        "--format", choices=("csv", "json"), default=argparse.SUPPRESS
    )
    common.add_argument("--output", default=argparse.SUPPRESS)
    common.add_argument("--jobs", type=int, default=argparse.SUPPRESS)
    sub = parser.add_subparsers(dest="cmd", required=True)

    def add(name: str, help_text: str, needs_config: bool = True):
        p = sub.add_parser(name, help=help_text, parents=[common])
        if needs_config:
            p.add_argument("config", help="problem configuration file")
        return p

    p = add("scan", "sweep (a, b) over a coupling grid")
    p.add_argument("--lambdas", help="lo:hi:count or comma list")
    p = add("reflect", "reflection probability over real couplings")
    p.add_argument("--lambdas")
    p = add("series", "power-series evaluation with certified error")
    p.add_argument("--lambdas")
    p.add_argument("--order", type=int, help="truncation order N")
    p = add("zeros", "real zeros of b")
    p.add_argument("--interval", help="lo:hi")
    p.add_argument("--grid-points", type=int, dest="grid_points")
    p = add("count", "zeros of b in a disk (argument principle)")
    p.add_argument("--radius", type=float)
    p.add_argument("--nodes", type=int)
    p = add("order", "growth and zero-count exponents")
    p.add_argument("--radii", help="comma list of increasing radii")
    p = add("eigencount", "negative eigenvalues under the u0 boundary angles")
    p.add_argument("--lambdas")
    p = add("witness", "tent-function minimax witness")
    p.add_argument("--coupling", type=float, help="coupling value")
    p.add_argument("--tents", type=int, help="number of tents N")
    p = add("examples", "write bundled example configs", needs_config=False)
    p.add_argument("--output-dir", default="ccscatter-examples")
    return parser


_HANDLERS = {
    "scan": _cmd_scan,
    "reflect": _cmd_reflect,
    "series": _cmd_series,
    "zeros": _cmd_zeros,
    "count": _cmd_count,
    "order": _cmd_order,
    "eigencount": _cmd_eigencount,
    "witness": _cmd_witness,
}


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.cmd == "examples":
            rows = _cmd_examples(args)
        else:
            run = cfg.load_config(args.config)
            rows = _HANDLERS[args.cmd](run, args)
        _emit(rows, args.format, args.output)
        return 0
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 1
    except DegenerateFunctionError as exc:
        print(f"degenerate: {exc}", file=sys.stderr)
        return 2
    except ScatterError as exc:
        print(f"solver error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    raise SystemExit(main())
