"""Command-line front end.

Subcommands: canonicalize, compare, generate, count, sweep-count,
box-measure, nu-l2, lp-slopes, plus `run` for declarative experiment
files.  All artifacts are UTF-8 with '.' decimals; JSON artifacts carry a
"schema": "areatype/v1" field; stochastic commands require --seed and
produce output that depends only on the configuration, never on
--threads.

Exit codes: 0 success, 2 configuration or input errors, 3 enumeration
budget exceeded, 4 I/O failures.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from pathlib import Path

import numpy as np

from . import experiments
from .canonical import canonical_distance, canonical_form, same_area_type, stability_check
from .core import Configuration
from .counting import count_area_types_float, resolve_budget, scaling_fit
from .errors import AreaTypeError, BudgetExceeded
from .generators import (
    LatticeSpec,
    annulus_cloud,
    cantor_measure_grid,
    lattice_points,
    neighborhood_positions,
    polar_image,
    save_grid_measure,
    segment_cloud,
)

SCHEMA = "areatype/v1"

EXIT_OK = 0
EXIT_CONFIG = 2
EXIT_BUDGET = 3
EXIT_IO = 4


def _fmt(v) -> str:
    """Deterministic, locale-free cell formatting (floats via repr)."""
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _parse_int_list(text: str) -> list[int]:
    """Accept '4,6,8', '4..12', '4..12:2', or a single integer."""
    out: list[int] = []
    for part in text.split(","):
        part = part.strip()
        if ".." in part:
            span, _, step_s = part.partition(":")
            lo_s, _, hi_s = span.partition("..")
            lo, hi = int(lo_s), int(hi_s)
            step = int(step_s) if step_s else 1
            if step < 1 or hi < lo:
                raise argparse.ArgumentTypeError(f"bad range {part!r}")
            out.extend(range(lo, hi + 1, step))
        elif part:
            out.append(int(part))
    if not out:
        raise argparse.ArgumentTypeError(f"empty integer list: {text!r}")
    return out


def _parse_float_list(text: str) -> list[float]:
    try:
        vals = [float(p) for p in text.split(",") if p.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(str(exc))
    if not vals:
        raise argparse.ArgumentTypeError(f"empty float list: {text!r}")
    return vals


def _read_json(path: str):
    if path == "-":
        return json.load(sys.stdin)
    with open(path, "r", encoding="utf-8") as fh:
        return json.load(fh)


def _write_text(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _json_artifact(payload: dict) -> str:
    return json.dumps({"schema": SCHEMA, **payload}, indent=2, sort_keys=True) + "\n"


def _csv_text(header: list[str], rows: list[list], comments: list[str] | None = None) -> str:
    lines = [",".join(header)]
    lines += [",".join(_fmt(v) for v in row) for row in rows]
    lines += comments or []
    return "\n".join(lines) + "\n"


def _load_configuration(path: str) -> Configuration:
    return Configuration.from_json(_read_json(path))


# ---------------------------------------------------------------------------
# subcommand implementations


def _cmd_canonicalize(args) -> int:
    conf = _load_configuration(args.input)
    form = canonical_form(conf)
    _write_text(args.out, _json_artifact(form.to_json()))
    return EXIT_OK


def _cmd_compare(args) -> int:
    x = _load_configuration(args.x)
    y = _load_configuration(args.y)
    payload: dict = {"same_area_type": same_area_type(x, y, args.tol), "tol": args.tol}
    try:
        payload["canonical_distance"] = canonical_distance(x, y)
    except AreaTypeError:
        payload["canonical_distance"] = None
    if args.c is not None and args.eps is not None:
        payload["stability"] = stability_check(x, y, args.c, args.eps).to_json()
    _write_text(args.out, _json_artifact(payload))
    return EXIT_OK


def _cmd_generate(args) -> int:
    kind = args.kind
    if kind == "lattice":
        spec = LatticeSpec(args.q, args.s)
        pts = lattice_points(spec)
        if args.format == "json":
            payload = {
                "kind": kind,
                "q": spec.q,
                "s": spec.s,
                "points": [[p.r, p.a] for p in pts],
            }
            _write_text(args.out, _json_artifact(payload))
        else:
            rows = []
            for p in pts:
                pos = polar_image(p)
                rows.append([p.r, p.a, float(pos.x), float(pos.y)])
            _write_text(args.out, _csv_text(["r", "a", "x", "y"], rows))
        print(f"lattice q={spec.q}: {len(pts)} points")
        return EXIT_OK

    if kind in ("neighborhood", "annulus", "segment"):
        if args.seed is None:
            raise ValueError(f"--seed is required for {kind}")
        if kind == "neighborhood":
            spec = LatticeSpec(args.q, args.s)
            pts = neighborhood_positions(
                spec, args.points_per_cell, np.random.default_rng(args.seed)
            )
        elif kind == "annulus":
            pts = annulus_cloud(args.count, np.random.default_rng(args.seed))
        else:
            pts = segment_cloud(
                args.count, np.random.default_rng(args.seed), half_thickness=args.half_thickness
            )
        if args.format == "json":
            payload = {"kind": kind, "points": [[float(x), float(y)] for x, y in pts]}
            _write_text(args.out, _json_artifact(payload))
        else:
            _write_text(args.out, _csv_text(["x", "y"], [[float(x), float(y)] for x, y in pts]))
        print(f"{kind}: {len(pts)} points")
        return EXIT_OK

    if kind == "cantor":
        if args.seed is None:
            raise ValueError("--seed is required for cantor")
        if args.out in (None, "-"):
            raise ValueError("cantor output is binary; --out must be a file path")
        measure = cantor_measure_grid(args.s, args.grid_n, np.random.default_rng(args.seed))
        save_grid_measure(measure, args.out)
        print(f"cantor s={args.s} N={args.grid_n}: wrote {args.out} (+ sidecar)")
        return EXIT_OK

    raise ValueError(f"unknown kind {kind!r}")


def _count_rows(qs: list[int], args) -> list[list]:
    rows = []
    for q in qs:
        spec = LatticeSpec(q, args.s)
        t0 = time.perf_counter()
        report = count_area_types_float(
            spec, args.k, tol=args.tol, budget=args.budget, threads=args.threads
        )
        seconds = time.perf_counter() - t0
        rows.append(
            [
                report.q,
                report.k,
                report.exact_upper,
                report.float_count,
                report.degenerate_excluded,
                report.tolerance,
                round(seconds, 3),
            ]
        )
    return rows


_COUNT_HEADER = ["q", "k", "exact_upper", "float_count", "degenerate_excluded", "tolerance", "seconds"]


def _cmd_count(args) -> int:
    rows = _count_rows([args.q], args)
    if args.format == "json":
        payload = {"rows": [dict(zip(_COUNT_HEADER, r)) for r in rows]}
        _write_text(args.out, _json_artifact(payload))
    else:
        _write_text(args.out, _csv_text(_COUNT_HEADER, rows))
    r = rows[0]
    print(f"count q={r[0]} k={r[1]}: exact_upper={r[2]} float_count={r[3]}")
    return EXIT_OK


def _cmd_sweep_count(args) -> int:
    qs = args.q
    if len(qs) < 3:
        raise ValueError("sweep needs at least 3 q values for the slope fit")
    rows = _count_rows(qs, args)
    fit = scaling_fit([(r[0], r[2]) for r in rows])
    comment = f"# slope={fit.slope!r} r2={fit.r2!r} reference={2 * args.k + 1}"
    if args.format == "json":
        payload = {
            "rows": [dict(zip(_COUNT_HEADER, r)) for r in rows],
            "slope": fit.slope,
            "r2": fit.r2,
            "reference_exponent": 2 * args.k + 1,
        }
        _write_text(args.out, _json_artifact(payload))
    else:
        _write_text(args.out, _csv_text(_COUNT_HEADER, rows, [comment]))
    print(f"sweep-count k={args.k} q={qs}: slope={fit.slope:.3f} r2={fit.r2:.4f}")
    return EXIT_OK


def _cmd_box_measure(args) -> int:
    qs = args.q
    rows = []
    hists = []
    for q in qs:
        row, hist = experiments.box_measure_point(
            q,
            args.k,
            args.s,
            args.seed,
            points_per_cell=args.points_per_cell,
            c0=args.c0,
            eps=args.eps,
            budget=args.budget,
            threads=args.threads,
        )
        rows.append(row)
        hists.append(hist)
    if args.save_cells:
        for row, hist in zip(rows, hists):
            dim = 2 * args.k - 1
            header = [f"i{d + 1}" for d in range(dim)] + ["count"]
            cells = sorted(hist.cells.items())
            body = [list(key) + [c] for key, c in cells]
            _write_text(f"{args.save_cells}.q{row.q}.csv", _csv_text(header, body))
    header = ["q", "k", "s", "eps", "points", "tuples", "occupied", "estimate"]
    body = [[r.q, r.k, r.s, r.eps, r.points, r.tuples, r.occupied, r.estimate] for r in rows]
    comments = []
    payload: dict = {"rows": [r.to_json() for r in rows]}
    if len(rows) >= 3:
        fit = scaling_fit([(r.q, r.estimate) for r in rows])
        reference = (2 * args.k + 1) - 2 * (2 * args.k - 1) / args.s
        comments.append(f"# slope={fit.slope!r} r2={fit.r2!r} reference={reference!r}")
        payload.update({"slope": fit.slope, "r2": fit.r2, "reference_exponent": reference})
    if args.format == "json":
        _write_text(args.out, _json_artifact(payload))
    else:
        _write_text(args.out, _csv_text(header, body, comments))
    print(f"box-measure k={args.k} s={args.s}: estimates={[round(r.estimate, 5) for r in rows]}")
    return EXIT_OK


def _cmd_nu_l2(args) -> int:
    mu = experiments.build_measure(
        args.measure,
        args.seed,
        cloud_size=args.cloud_size,
        s=args.s,
        grid_n=args.grid_n,
        half_thickness=args.half_thickness,
    )
    rows = experiments.nu_l2_ladder(
        mu,
        args.k,
        args.eps,
        args.samples,
        args.seed,
        pieces=args.pieces,
        delta=args.delta,
        threads=args.threads,
        share_draws=args.share_draws,
    )
    if args.format == "json":
        payload = {"measure": args.measure, "k": args.k, "rows": [r.to_json() for r in rows]}
        _write_text(args.out, _json_artifact(payload))
    else:
        body = [[r.eps, r.occupied, r.total, r.l2] for r in rows]
        _write_text(args.out, _csv_text(["eps", "occupied", "total", "l2"], body))
    print(f"nu-l2 measure={args.measure} k={args.k}: l2={[round(r.l2, 6) for r in rows]}")
    return EXIT_OK


def _cmd_lp_slopes(args) -> int:
    table = experiments.lp_slope_run(args.s, args.grid_n, args.j, args.seed, cutoff=args.cutoff)
    if args.format == "json":
        payload = {"s": args.s, "N": args.grid_n, **table.to_json()}
        _write_text(args.out, _json_artifact(payload))
    else:
        body = [[r.j, r.sup_norm, r.l2_norm] for r in table.rows]
        comments = [
            f"# sup_slope={table.sup_slope!r} l2_slope={table.l2_slope!r} "
            f"expected_sup={table.expected_sup_slope!r} expected_l2={table.expected_l2_slope!r}"
        ]
        _write_text(args.out, _csv_text(["j", "sup_norm", "l2_norm"], body, comments))
    print(
        f"lp-slopes s={args.s}: sup_slope={table.sup_slope:.3f} "
        f"(expect {table.expected_sup_slope}), l2_slope={table.l2_slope:.3f} "
        f"(expect {table.expected_l2_slope})"
    )
    return EXIT_OK


def _cmd_run(args) -> int:
    spec = _read_json(args.config)
    if not isinstance(spec, dict) or "command" not in spec:
        raise ValueError("experiment file must be a JSON object with a 'command' field")
    argv = [str(spec["command"])]
    for key, val in spec.items():
        if key in ("command", "schema"):
            continue
        flag = "--" + key.replace("_", "-")
        if isinstance(val, bool):
            if val:
                argv.append(flag)
        elif isinstance(val, list):
            argv.extend([flag, ",".join(str(v) for v in val)])
        else:
            argv.extend([flag, str(val)])
    return main(argv)


# ---------------------------------------------------------------------------
# parser


def _add_common(p: argparse.ArgumentParser, fmt: bool = True) -> None:
    p.add_argument("--out", default=None, help="output path ('-' or omitted = stdout)")
    if fmt:
        p.add_argument("--format", choices=["csv", "json"], default="csv")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="areatype",
        description="Area-type invariants of planar configurations: canonical forms, "
        "counting, and scaling experiments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("canonicalize", help="canonical form of a configuration (JSON in/out)")
    p.add_argument("--input", default="-", help="configuration JSON path ('-' = stdin)")
    _add_common(p, fmt=False)
    p.set_defaults(fn=_cmd_canonicalize)

    p = sub.add_parser("compare", help="orbit-equivalence test for two configurations")
    p.add_argument("--x", required=True, help="first configuration JSON path")
    p.add_argument("--y", required=True, help="second configuration JSON path")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--c", type=float, default=None, help="degeneracy constant for the stability report")
    p.add_argument("--eps", type=float, default=None, help="eps for the stability report")
    _add_common(p, fmt=False)
    p.set_defaults(fn=_cmd_compare)

    p = sub.add_parser("generate", help="lattices, thickened clouds, and grid measures")
    p.add_argument("--kind", required=True, choices=["lattice", "neighborhood", "cantor", "annulus", "segment"])
    p.add_argument("--q", type=int, default=8)
    p.add_argument("--s", type=float, default=1.0)
    p.add_argument("--points-per-cell", type=int, default=1)
    p.add_argument("--count", type=int, default=1000, help="cloud size for annulus/segment")
    p.add_argument("--half-thickness", type=float, default=1e-3)
    p.add_argument("--grid-n", type=int, default=256)
    p.add_argument("--seed", type=int, default=None)
    _add_common(p)
    p.set_defaults(fn=_cmd_generate)

    p = sub.add_parser("count", help="distinct area types at one q")
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--s", type=float, default=1.0, help="only sets the lattice spec label")
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--threads", type=int, default=1)
    _add_common(p)
    p.set_defaults(fn=_cmd_count)

    p = sub.add_parser("sweep-count", help="count sweep over q plus slope fit")
    p.add_argument("--q", type=_parse_int_list, required=True, help="e.g. 4..12:2 or 4,6,8")
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--s", type=float, default=1.0)
    p.add_argument("--tol", type=float, default=1e-9)
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--threads", type=int, default=1)
    _add_common(p)
    p.set_defaults(fn=_cmd_sweep_count)

    p = sub.add_parser("box-measure", help="covering-measure estimate of the form image")
    p.add_argument("--q", type=_parse_int_list, required=True)
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--points-per-cell", type=int, default=3)
    p.add_argument("--c0", type=float, default=0.1, help="first-pair degeneracy cutoff")
    p.add_argument("--eps", type=float, default=None, help="override cell size (default q^(-2/s))")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--budget", type=int, default=None)
    p.add_argument("--threads", type=int, default=1)
    p.add_argument("--save-cells", default=None, help="prefix for per-q cell-occupancy CSVs")
    _add_common(p)
    p.set_defaults(fn=_cmd_box_measure)

    p = sub.add_parser("nu-l2", help="density L2 ladder for a source measure")
    p.add_argument("--measure", required=True, choices=["annulus", "segment", "cantor", "uniform"])
    p.add_argument("--k", type=int, required=True)
    p.add_argument("--eps", type=_parse_float_list, required=True, help="comma-separated cell sizes")
    p.add_argument("--samples", type=int, required=True)
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--cloud-size", type=int, default=1_000_000)
    p.add_argument("--s", type=float, default=None, help="dimension for --measure cantor")
    p.add_argument("--grid-n", type=int, default=256)
    p.add_argument("--half-thickness", type=float, default=1e-3)
    p.add_argument("--pieces", type=int, default=None, help="angle-separated pieces (k+1)")
    p.add_argument("--delta", type=float, default=None, help="sector width for --pieces")
    p.add_argument(
        "--share-draws",
        action="store_true",
        help="replay one sample stream across the eps ladder (paired comparison)",
    )
    p.add_argument("--threads", type=int, default=1)
    _add_common(p)
    p.set_defaults(fn=_cmd_nu_l2)

    p = sub.add_parser("lp-slopes", help="dyadic-frequency norm slopes of a generated measure")
    p.add_argument("--s", type=float, required=True)
    p.add_argument("--grid-n", type=int, default=1024)
    p.add_argument("--j", type=_parse_int_list, default=list(range(3, 8)), help="e.g. 3..7")
    p.add_argument("--seed", type=int, required=True)
    p.add_argument("--cutoff", choices=["bump", "partition"], default="bump")
    _add_common(p)
    p.set_defaults(fn=_cmd_lp_slopes)

    p = sub.add_parser("run", help="run a declarative experiment file")
    p.add_argument("--config", required=True, help="JSON file with a 'command' field plus flags")
    p.set_defaults(fn=_cmd_run)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except BudgetExceeded as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (AreaTypeError, ValueError, KeyError, json.JSONDecodeError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO


if __name__ == "__main__":
    sys.exit(main())
