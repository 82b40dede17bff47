"""Command-line front end: analyze, neighbors, render, search, dim.

Exit codes: 0 = analysis completed (the verdict itself is data, not an exit
status), 2 = parse or parameter error, 3 = precondition violation such as a
non-expanding matrix, 4 = size guard exceeded.
"""

from __future__ import annotations

import argparse
import itertools
import json
import os
import sys
import time
from concurrent.futures import ProcessPoolExecutor

from .connectivity import count_rows, decide_connected, dimension_test, singular_value_dimension
from .errors import NotExpandingError, PreconditionError, SizeGuardError
from .lattice import (
    DigitSet,
    IntMatrix2,
    char_data,
    is_expanding,
    is_reducible,
    rect_grid,
    triangular_form,
)
from .neighbors import brute_force_neighbors, closed_form_neighbors, neighbor_lower_bound
from .render import approximate, export_pgm, export_svg, rasterize

EXIT_OK = 0
EXIT_PARSE = 2
EXIT_PRECONDITION = 3
EXIT_SIZE_GUARD = 4


class ParseFailure(Exception):
    """Instance file or parameter could not be interpreted."""


def _fail(msg: str) -> "ParseFailure":
    return ParseFailure(msg)


def load_instance(path: str) -> tuple[IntMatrix2, DigitSet, str]:
    try:
        with open(path, encoding="utf-8") as fh:
            doc = json.load(fh)
    except OSError as exc:
        raise _fail(f"cannot read {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise _fail(f"invalid JSON in {path}: {exc}") from exc
    if not isinstance(doc, dict):
        raise _fail(f"{path}: instance must be a JSON object")
    rows = doc.get("T")
    digits = doc.get("D")
    label = doc.get("label", os.path.basename(path))
    if (
        not isinstance(rows, list)
        or len(rows) != 2
        or any(not isinstance(r, list) or len(r) != 2 for r in rows)
        or any(not isinstance(e, int) or isinstance(e, bool) for r in rows for e in r)
    ):
        raise _fail(f"{path}: 'T' must be a 2x2 integer array")
    if (
        not isinstance(digits, list)
        or not digits
        or any(
            not isinstance(p, list)
            or len(p) != 2
            or any(not isinstance(e, int) or isinstance(e, bool) for e in p)
            for p in digits
        )
    ):
        raise _fail(f"{path}: 'D' must be a non-empty list of [x, y] integer pairs")
    if not isinstance(label, str):
        raise _fail(f"{path}: 'label' must be a string")
    T = IntMatrix2.from_rows(rows)
    ds = DigitSet.of(tuple(map(tuple, digits)))  # duplicate digits -> precondition error
    return T, ds, label


def _vec_list(vecs) -> list[list[int]]:
    return [list(v) for v in sorted(vecs)]


def _matrix_block(T: IntMatrix2) -> dict:
    cd = char_data(T)
    nf = triangular_form(T)
    return {
        "entries": [list(r) for r in T.rows()],
        "trace": cd.trace,
        "det": cd.det,
        "discriminant": cd.discriminant,
        "expanding": is_expanding(T),
        "reducible": is_reducible(T),
        "eigenvalues": list(cd.eigenvalues) if cd.eigenvalues else None,
        "triangular_form": {"n": nf[0], "m": nf[1], "t": nf[2]} if nf else None,
    }


def _dimension_block(dim) -> dict | None:
    if dim is None:
        return None
    return {
        "n": dim.n,
        "m": dim.m,
        "q": dim.q,
        "r": dim.r,
        "branch": dim.branch,
        "lhs": dim.lhs,
        "dim_value": dim.dim_value,
        "triggered": dim.triggered,
        "formula": "closed-form-two-branch",
    }


def _collinear_block(info) -> dict | None:
    if info is None:
        return None
    return {
        "direction": list(info["direction"]),
        "offsets": list(info["offsets"]),
        "scale": info["scale"],
        "hull": [str(info["hull"][0]), str(info["hull"][1])],
        "gap": [str(info["gap"][0]), str(info["gap"][1])] if info["gap"] else None,
    }


def build_report(label, T, ds, verdict, analysis, elapsed) -> dict:
    witness = None
    if verdict.witness is not None:
        witness = [list(analysis.digits.digits[i]) for i in verdict.witness]
    closed = analysis.closed_form
    report = {
        "label": label,
        "matrix": _matrix_block(T),
        "digits": [list(d) for d in ds.digits],
        "verdict": verdict.status,
        "rules_fired": list(analysis.rules),
        "witness": witness,
        "certificate": verdict.certificate,
        "neighbor_set_closed_form": (
            _vec_list(closed.neighbors) if closed and not closed.is_disconnected else None
        ),
        "closed_form_clause": closed.clause if closed else None,
        "neighbor_set_oracle": _vec_list(analysis.oracle) if analysis.oracle is not None else None,
        "neighbor_agreement": analysis.neighbor_agreement,
        "dimension_test": _dimension_block(analysis.dimension),
        "collinear": _collinear_block(analysis.collinear),
        "reductions": analysis.reductions,
        "notes": list(analysis.notes),
        "timing_seconds": round(elapsed, 6),
    }
    if analysis.reductions:
        report["reduced_matrix"] = [list(r) for r in analysis.matrix.rows()]
        report["reduced_digits"] = [list(d) for d in analysis.digits.digits]
    return report


def dump_report(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2)


def _print_report_text(report: dict) -> None:
    print(f"label:     {report['label']}")
    print(f"matrix:    {report['matrix']['entries']}  det={report['matrix']['det']}")
    print(f"digits:    {len(report['digits'])}")
    print(f"verdict:   {report['verdict']}")
    print(f"rules:     {', '.join(report['rules_fired'])}")
    if report["closed_form_clause"]:
        print(f"clause:    {report['closed_form_clause']}")
    if report["neighbor_set_closed_form"] is not None:
        print(f"closed-form neighbors: {report['neighbor_set_closed_form']}")
    if report["neighbor_set_oracle"] is not None:
        print(f"oracle neighbors:      {report['neighbor_set_oracle']}")
    if report["neighbor_agreement"]:
        print(f"agreement: {report['neighbor_agreement']}")
    dim = report["dimension_test"]
    if dim:
        print(
            f"dimension: lhs={dim['lhs']:.6f} dim={dim['dim_value']:.6f} "
            f"triggered={dim['triggered']}"
        )
    if report["notes"]:
        print(f"notes:     {'; '.join(report['notes'])}")
    print(f"time:      {report['timing_seconds']} s")


def cmd_analyze(args) -> int:
    T, ds, label = load_instance(args.instance)
    start = time.perf_counter()
    verdict, analysis = decide_connected(
        T, ds, skip_closed_form=args.no_closed_form, cross_check=args.oracle
    )
    elapsed = time.perf_counter() - start
    report = build_report(label, T, ds, verdict, analysis, elapsed)
    if args.json:
        print(dump_report(report))
    else:
        _print_report_text(report)
    return EXIT_OK


def cmd_neighbors(args) -> int:
    T, ds, label = load_instance(args.instance)
    nf = triangular_form(T)
    closed_set = None
    closed_clause = None
    closed_state = "not-applicable"
    if nf is not None and nf[0] >= 2 and nf[1] >= 2:
        try:
            outcome = closed_form_neighbors(nf[0], nf[1], nf[2], ds)
            if outcome.is_disconnected:
                closed_clause = outcome.clause
                closed_state = "disconnected-clause"
            else:
                closed_set = outcome.neighbors
                closed_state = "ok"
        except PreconditionError as exc:
            closed_state = f"not-applicable ({exc})"
    try:
        lower = neighbor_lower_bound(T, ds)
        lower_list = _vec_list(lower)
    except PreconditionError:
        lower = None
        lower_list = None
    oracle = brute_force_neighbors(T, ds)
    agreement = None
    if closed_set is not None:
        agreement = "exact" if closed_set == oracle else "mismatch"
    report = {
        "label": label,
        "closed_form": _vec_list(closed_set) if closed_set is not None else None,
        "closed_form_status": closed_state,
        "closed_form_clause": closed_clause,
        "lower_bound": lower_list,
        "lower_bound_sound": lower <= oracle if lower is not None else None,
        "oracle": _vec_list(oracle),
        "agreement": agreement,
    }
    print(dump_report(report))
    return EXIT_OK


def cmd_render(args) -> int:
    T, ds, label = load_instance(args.instance)
    try:
        width_s, height_s = args.size.lower().split("x")
        width, height = int(width_s), int(height_s)
    except ValueError:
        raise _fail(f"--size must look like 512x512, got {args.size!r}") from None
    approx = approximate(T, ds, args.level)
    if args.format == "pgm":
        bitmap = rasterize(approx, width, height, margin=args.margin)
        export_pgm(bitmap, args.out)
    else:
        export_svg(approx, args.out)
    xs = [p[0] for p in approx.points]
    ys = [p[1] for p in approx.points]
    print(f"label:        {label}")
    print(f"points:       {len(approx.points)}")
    print(f"bounding box: [{min(xs)}, {max(xs)}] x [{min(ys)}, {max(ys)}]")
    print(f"wrote:        {args.out}")
    return EXIT_OK


def _canonical(combo) -> bool:
    min_x = min(p[0] for p in combo)
    min_y = min(p[1] for p in combo)
    return min_x == 0 and min_y == 0


def _search_worker(payload) -> str:
    n, m, t, combo = payload
    T = IntMatrix2(n, 0, t, m)
    ds = DigitSet.of(combo)
    verdict, analysis = decide_connected(T, ds, cross_check=True)
    record = {
        "digits": [list(d) for d in combo],
        "verdict": verdict.status,
        "rules": list(analysis.rules),
        "agreement": analysis.neighbor_agreement,
    }
    return json.dumps(record, sort_keys=True, separators=(",", ":"))


def cmd_search(args) -> int:
    n, m, t, q = args.n, args.m, args.t, args.q
    if not (n >= m >= 2):
        raise _fail(f"need n >= m >= 2, got n={n} m={m}")
    if not (2 <= q <= n * m):
        raise _fail(f"need 2 <= q <= n*m={n * m}, got q={q}")
    points = sorted(rect_grid(n, m).digits)
    combos = [
        combo
        for combo in itertools.combinations(points, q)
        if not args.dedup_translation or _canonical(combo)
    ]
    payloads = [(n, m, t, combo) for combo in combos]
    threads = args.threads if args.threads else (os.cpu_count() or 1)
    if threads > 1 and len(payloads) > 1:
        with ProcessPoolExecutor(max_workers=threads) as pool:
            lines = list(pool.map(_search_worker, payloads, chunksize=16))
    else:
        lines = [_search_worker(p) for p in payloads]

    out = open(args.jsonl, "w", encoding="utf-8") if args.jsonl else None
    try:
        counts: dict[str, int] = {}
        for line in lines:
            counts_key = json.loads(line)["verdict"]
            counts[counts_key] = counts.get(counts_key, 0) + 1
            if out:
                out.write(line + "\n")
            else:
                print(line)
        summary = json.dumps(
            {"summary": {"total": len(lines), "verdicts": counts}},
            sort_keys=True,
            separators=(",", ":"),
        )
        if out:
            out.write(summary + "\n")
            print(f"wrote {len(lines)} records to {args.jsonl}")
        print(summary)
    finally:
        if out:
            out.close()
    return EXIT_OK


def cmd_dim(args) -> int:
    try:
        branch, value = singular_value_dimension(args.n, args.m, args.q)
    except PreconditionError as exc:
        raise _fail(str(exc)) from exc
    print(f"branch: {branch}")
    print(f"dim:    {value:.10f}")
    if args.r is not None:
        try:
            dim = dimension_test(args.n, args.m, args.q, args.r)
        except PreconditionError as exc:
            raise _fail(str(exc)) from exc
        print(f"lhs:    {dim.lhs:.10f}")
        print(f"triggers: {'disconnected' if dim.triggered else 'inconclusive'}")
    return EXIT_OK


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="afftile",
        description="Connectedness analysis for planar integral self-affine attractors",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("analyze", help="decide connectedness of an instance file")
    p.add_argument("instance", help="JSON instance {\"T\": [[..]], \"D\": [[..]], \"label\"?}")
    p.add_argument("--json", action="store_true", help="emit the full JSON report")
    p.add_argument("--oracle", action="store_true", help="also run the brute-force oracle")
    p.add_argument(
        "--no-closed-form", action="store_true", help="skip the closed form, force the oracle"
    )
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("neighbors", help="report neighbor sets by all methods")
    p.add_argument("instance")
    p.set_defaults(func=cmd_neighbors)

    p = sub.add_parser("render", help="render the attractor approximation to PGM or SVG")
    p.add_argument("instance")
    p.add_argument("--level", type=int, default=6, help="approximation depth (default 6)")
    p.add_argument("--size", default="512x512", help="bitmap size WxH (default 512x512)")
    p.add_argument("--format", choices=("pgm", "svg"), default="pgm")
    p.add_argument("--out", required=True, help="output file path")
    p.add_argument("--margin", type=int, default=0, help="margin in pixels (default 0)")
    p.set_defaults(func=cmd_render)

    p = sub.add_parser("search", help="classify every q-subset of the n-by-m grid")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--t", type=int, choices=(0, 1), required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument(
        "--dedup-translation",
        action="store_true",
        help="keep only subsets already translated against the grid corner",
    )
    p.add_argument("--jsonl", help="write JSON lines to this file instead of stdout")
    p.add_argument(
        "--threads", type=int, default=0, help="worker processes (default: all cores)"
    )
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("dim", help="closed-form dimension and the disconnectedness test")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--q", type=int, required=True)
    p.add_argument("--r", type=int, default=None)
    p.set_defaults(func=cmd_dim)

    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseFailure as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE
    except SizeGuardError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_SIZE_GUARD
    except PreconditionError as exc:  # includes NotExpandingError
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PARSE


if __name__ == "__main__":
    sys.exit(main())
