"""Command-line front end: verify / scan / construct with reproducible reports.

Exit codes: 0 = all assertions passed, 1 = an assertion failed,
2 = usage or precondition error (bad field parameters, cap exceeded, ...).

Reports are JSON (always) plus per-point CSV when --format is csv or both,
written under --out with stable names {command}-{p}-{s}.json.  Identical
invocations with the same seed reproduce identical payloads except for the
wall-time fields in the manifest.
"""

from __future__ import annotations

import argparse
import math
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict
from pathlib import Path

import numpy as np

from . import constructions, kernels, operators, weil
from .characters import (
    ComplexFn,
    additive_char_table,
    fourier,
    fourier_inverse,
    gauss_sum,
    mult_fourier,
    mult_fourier_inverse,
    random_fn,
    unit_root_powers,
)
from .field import build_field, get_field, prime_power, subfield_embed
from .reporting import (
    CheckResult,
    RunManifest,
    fit_slope_vs_logq,
    relative_error,
    report_name,
    write_csv,
    write_json,
)

VERIFY_TARGETS = ("kernels", "fourier", "operators", "weil", "constructions")
DEFAULT_Q_LIST = [3, 5, 7, 9, 11, 13, 25, 27, 49]


# ---------------------------------------------------------------------------
# verification suites
# ---------------------------------------------------------------------------


def _suite_kernels(ctx, args) -> list[CheckResult]:
    return [
        kernels.quad_kernel_check(ctx, args.tolerance_abs),
        kernels.pair_kernel_check(ctx, args.tolerance_abs),
        kernels.decomposition_check(ctx, args.tolerance_abs),
    ]


def _suite_fourier(ctx, args) -> list[CheckResult]:
    out = []
    e = additive_char_table(ctx)
    codes = ctx.elements()
    # additive orthogonality, exhaustive in a
    max_err = 0.0
    for a in range(ctx.q):
        total = e[ctx.mul_vec(a, codes)].sum()
        expected = ctx.q if a == 0 else 0.0
        max_err = max(max_err, abs(total - expected))
    out.append(CheckResult("additive-orthogonality", max_err < args.tolerance_abs, ctx.q, max_err))
    # multiplicative orthogonality, exhaustive in t
    max_err = 0.0
    roots = unit_root_powers(ctx)
    logs = ctx.log_table[ctx.units()]
    for t in range(ctx.q - 1):
        total = roots[(t * logs) % (ctx.q - 1)].sum()
        expected = ctx.q - 1 if t == 0 else 0.0
        max_err = max(max_err, abs(total - expected))
    out.append(
        CheckResult("multiplicative-orthogonality", max_err < args.tolerance_abs, ctx.q - 1, max_err)
    )
    # Parseval, both conventions, on random functions
    rng = np.random.default_rng(args.seed)
    max_rel = 0.0
    max_round = 0.0
    for _ in range(args.trials):
        f = random_fn(ctx, rng)
        fh = fourier(f)
        max_rel = max(max_rel, relative_error(f.norm_avg(2.0), fh.norm_count()))
        max_round = max(max_round, float(np.abs(fourier_inverse(fh).values - f.values).max()))
        g = random_fn(ctx, rng)
        gv = g.values.copy()
        gv[0] = 0.0
        g = ComplexFn(ctx, gv)
        coeffs = mult_fourier(g)
        lhs = float((np.abs(coeffs) ** 2).sum() / (ctx.q - 1))
        rhs = float((np.abs(gv) ** 2).sum())
        max_rel = max(max_rel, relative_error(lhs, rhs))
        back = mult_fourier_inverse(ctx, coeffs)
        max_round = max(max_round, float(np.abs(back.values - gv).max()))
    out.append(CheckResult("parseval-both-conventions", max_rel < args.tolerance_rel, 2 * args.trials, max_rel))
    out.append(CheckResult("transform-round-trip", max_round < 1e-9, 2 * args.trials, max_round))
    # measured gauss unit
    info = gauss_sum(ctx)
    err = abs(abs(info.sigma) - 1.0)
    out.append(CheckResult("gauss-unit-modulus", err < args.tolerance_rel * 10, 1, err))
    return out


def _suite_operators(ctx, args) -> list[CheckResult]:
    out = []
    rng = np.random.default_rng(args.seed)
    max_err = 0.0
    max_form = 0.0
    for _ in range(args.trials):
        f1, f2 = random_fn(ctx, rng), random_fn(ctx, rng)
        direct = operators.averaging_apply(f1, f2)
        via = operators.averaging_apply_fourier(f1, f2)
        max_err = max(max_err, float(np.abs(direct.values - via.values).max()))
        norms = operators.deviation_norm(f1, f2)
        form = operators.sliced_square_form(f1, f2)
        max_form = max(max_form, abs(form - norms.fourier_side**2))
    out.append(CheckResult("averaging-two-routes", max_err < 1e-8, args.trials, max_err))
    out.append(CheckResult("slice-expansion-identity", max_form < 1e-8, args.trials, max_form))
    # sliced operator on a point mass: product of multipliers, modulus 1/q
    h = 1
    v0 = next(v for v in range(2, ctx.q) if v not in (0, ctx.neg(h)))
    g = np.zeros(ctx.q, dtype=complex)
    g[v0] = 1.0
    applied = operators.sliced_operator_apply(ctx, h, ComplexFn(ctx, g))
    err = float(np.abs(np.abs(applied.values) - 1.0 / ctx.q).max())
    out.append(CheckResult("slice-point-mass-modulus", err < 1e-9, ctx.q, err))
    return out


def _suite_weil(ctx, args) -> list[CheckResult]:
    out = [weil.envelope_check(ctx)]
    if ctx.q <= 49:
        out.append(weil.substitution_check(ctx))
        out.append(weil.ratio_sum_check(ctx))
    rs = ctx.q - 3  # scanned terms per sum
    out.append(CheckResult("scan-term-count", True, max(rs, 0), 0.0, data={"terms": max(rs, 0)}))
    return out


def _suite_constructions(ctx, args) -> list[CheckResult]:
    out = []
    greedy = constructions.greedy_progression_free(ctx)
    ok, witness = constructions.is_progression_free(greedy)
    out.append(
        CheckResult(
            "greedy-certified",
            ok,
            greedy.size,
            0.0,
            None if ok else f"witness {witness}",
            data={"size": greedy.size, "sqrt_q": math.sqrt(ctx.q)},
        )
    )
    if ctx.q**2 <= args.cap:
        emb = subfield_embed(ctx, get_field(ctx.p, 2 * ctx.s))
        line = constructions.quadratic_extension_line(emb)
        out.append(CheckResult("line-certified", line.size == ctx.q, line.size, 0.0))
    if ctx.q**3 <= args.cap:
        emb = subfield_embed(ctx, get_field(ctx.p, 3 * ctx.s))
        census = constructions.plane_census(emb)
        out.append(
            CheckResult(
                "plane-census",
                True,
                census.total_planes,
                0.0,
                data={
                    "total": census.total_planes,
                    "containing_one": census.planes_containing_one,
                    "avoiding_one": census.planes_avoiding_one,
                    "bad": census.bad_count,
                    "good": census.good_count,
                },
            )
        )
    return out


_SUITES = {
    "kernels": _suite_kernels,
    "fourier": _suite_fourier,
    "operators": _suite_operators,
    "weil": _suite_weil,
    "constructions": _suite_constructions,
}


def _verify_one_field(payload: dict) -> dict:
    """Worker: run the selected suites on one field (picklable for --jobs)."""
    args = argparse.Namespace(**payload["args"])
    ctx = get_field(payload["p"], payload["s"])
    results = {}
    timings = {}
    for target in payload["targets"]:
        t0 = time.perf_counter()
        checks = _SUITES[target](ctx, args)
        timings[target] = time.perf_counter() - t0
        results[target] = [asdict(c) for c in checks]
    return {
        "field": ctx.descriptor(),
        "q": ctx.q,
        "results": results,
        "timings": timings,
    }


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def _parse_fields(args) -> list[tuple[int, int]]:
    if args.q_list:
        out = []
        for q in args.q_list:
            p, s = prime_power(q)
            out.append((p, s))
        return out
    if args.p is not None:
        return [(args.p, args.s)]
    return [prime_power(q) for q in DEFAULT_Q_LIST]


def _fan_out(worker, payloads: list[dict], jobs: int) -> list[dict]:
    if jobs <= 1 or len(payloads) <= 1:
        return [worker(p) for p in payloads]
    with ProcessPoolExecutor(max_workers=jobs) as pool:
        return list(pool.map(worker, payloads))


def cmd_verify(args) -> int:
    targets = args.targets or list(VERIFY_TARGETS)
    unknown = [t for t in targets if t not in VERIFY_TARGETS]
    if unknown:
        raise ValueError(f"unknown verify targets {unknown}; choose from {list(VERIFY_TARGETS)}")
    fields = _parse_fields(args)
    for p, s in fields:
        build_field(p, s, cap=args.cap)  # precondition gate before fan-out
    payloads = [
        {"p": p, "s": s, "targets": targets, "args": _plain_args(args)} for p, s in fields
    ]
    reports = _fan_out(_verify_one_field, payloads, args.jobs)

    all_passed = True
    for (p, s), rep in zip(fields, reports):
        failures = [
            c for target in rep["results"].values() for c in target if not c["passed"]
        ]
        passed = not failures
        all_passed &= passed
        manifest = _manifest(args, "verify", [rep["field"]], rep["timings"])
        payload = {"manifest": manifest, "passed": passed, "suites": rep["results"]}
        if failures:
            payload["first_failure"] = failures[0]
        out = args.out / report_name("verify", p, s)
        write_json(out, payload)
        if args.format in ("csv", "both"):
            rows = [
                (rep["q"], c["name"], c["cases"], c["max_err"], c["passed"])
                for target in rep["results"].values()
                for c in target
            ]
            write_csv(args.out / report_name("verify", p, s, "csv"),
                      ["q", "check", "cases_checked", "max_abs_error", "passed"], rows)
        status = "pass" if passed else f"FAIL ({failures[0]['name']}: {failures[0]['first_failure']})"
        print(f"verify p={p} s={s} q={rep['q']}: {status}")
    return 0 if all_passed else 1


def _scan_one_field(payload: dict) -> dict:
    args = argparse.Namespace(**payload["args"])
    ctx = get_field(payload["p"], payload["s"])
    kind = payload["kind"]
    t0 = time.perf_counter()
    if kind == "delta":
        rep = operators.deviation_scan(
            ctx, trials=args.trials, seed=args.seed, include_alternating=args.alternating
        )
        summary = {
            "q": ctx.q,
            "max_ratio": rep.max_ratio,
            "ratio_times_q_delta": rep.ratio_times_q_delta,
            "witness": rep.witness,
            "alternating_ratio": rep.alternating_ratio,
        }
        rows = [(ctx.q, k, i, r, r * ctx.q**0.25) for k, i, r in rep.per_trial]
        header = ["q", "kind", "trial", "ratio", "ratio_times_q_delta"]
        trend_value = rep.ratio_times_q_delta
    elif kind == "slices":
        rep = operators.sliced_norm_scan(ctx)
        summary = {
            "q": ctx.q,
            "max_norm": rep.max_norm,
            "max_norm_times_sqrt_q": rep.max_norm_times_sqrt_q,
        }
        rows = [(ctx.q, h + 1, n, n * math.sqrt(ctx.q)) for h, n in enumerate(rep.norms)]
        header = ["q", "h", "norm", "norm_times_sqrt_q"]
        trend_value = rep.max_norm_times_sqrt_q
    elif kind == "weil":
        rep = weil.weil_scan(ctx, keep_grid=args.format in ("csv", "both"))
        summary = {
            "q": ctx.q,
            "max_abs_sum": rep.max_abs_sum,
            "max_ratio": rep.max_ratio,
            "argmax_t": rep.argmax_t,
            "argmax_lambda": rep.argmax_lambda,
            "below_sanity_floor": rep.below_sanity_floor,
        }
        rows = []
        if rep.grid is not None:
            lams = ctx.units()
            for t in range(ctx.q - 1):
                for j, lam in enumerate(lams):
                    a = float(rep.grid[t, j])
                    rows.append((ctx.q, t, int(lam), a, a / math.sqrt(ctx.q)))
        header = ["q", "t", "lambda", "abs_sum", "ratio"]
        trend_value = rep.max_ratio
    else:  # pragma: no cover
        raise ValueError(kind)
    return {
        "field": ctx.descriptor(),
        "q": ctx.q,
        "summary": summary,
        "rows": rows,
        "header": header,
        "trend_value": trend_value,
        "elapsed": time.perf_counter() - t0,
    }


def cmd_scan(args) -> int:
    fields = _parse_fields(args)
    for p, s in fields:
        build_field(p, s, cap=args.cap)
    payloads = [
        {"p": p, "s": s, "kind": args.kind, "args": _plain_args(args)} for p, s in fields
    ]
    reports = _fan_out(_scan_one_field, payloads, args.jobs)

    qs, trend = [], []
    for (p, s), rep in zip(fields, reports):
        manifest = _manifest(args, f"scan-{args.kind}", [rep["field"]], {"scan": rep["elapsed"]})
        write_json(args.out / report_name(f"scan-{args.kind}", p, s), {
            "manifest": manifest,
            "summary": rep["summary"],
        })
        if args.format in ("csv", "both") and rep["rows"]:
            write_csv(args.out / report_name(f"scan-{args.kind}", p, s, "csv"), rep["header"], rep["rows"])
        qs.append(rep["q"])
        trend.append(rep["trend_value"])
        print(f"scan {args.kind} p={p} s={s} q={rep['q']}: {rep['summary']}")

    cross = {
        "kind": args.kind,
        "q": qs,
        "values": trend,
        "slope_vs_log_q": fit_slope_vs_logq(qs, trend) if len(qs) > 1 else 0.0,
    }
    if args.kind == "slices" and trend:
        cross["band_ratio"] = max(trend) / min(trend)
    write_json(args.out / f"scan-{args.kind}-summary.json", {
        "manifest": _manifest(args, f"scan-{args.kind}-summary",
                              [{"p": p, "s": s} for p, s in fields], {}),
        "cross_q": cross,
    })
    print(f"scan {args.kind} cross-q: {cross}")
    return 0


def cmd_construct(args) -> int:
    p, s = args.p, args.s
    try:
        small = build_field(p, s, cap=args.cap)
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    t0 = time.perf_counter()
    if args.kind == "greedy":
        eset = constructions.greedy_progression_free(small)
        extra = {"size": eset.size, "sqrt_q": math.sqrt(small.q)}
        field_desc = small.descriptor()
    elif args.kind == "line":
        big = build_field(p, 2 * s, cap=args.cap)
        emb = subfield_embed(small, big)
        eset = constructions.quadratic_extension_line(emb)
        extra = {"size": eset.size}
        field_desc = big.descriptor()
    elif args.kind == "plane":
        big = build_field(p, 3 * s, cap=args.cap)
        emb = subfield_embed(small, big)
        census = constructions.plane_census(emb)
        eset = constructions.ElementSet(big, census.good_example.mask)
        extra = {
            "size": eset.size,
            "census": {
                "q": census.q,
                "total": census.total_planes,
                "containing_one": census.planes_containing_one,
                "avoiding_one": census.planes_avoiding_one,
                "bad": census.bad_count,
                "good": census.good_count,
                "min_bad_witnesses": census.min_bad_witnesses,
            },
            "basis": list(census.good_example.basis),
        }
        field_desc = big.descriptor()
    else:  # pragma: no cover
        raise ValueError(args.kind)

    ok, witness = constructions.is_progression_free(eset)
    if not ok:
        print(f"error: construction failed re-certification, witness {witness}", file=sys.stderr)
        return 1
    manifest = _manifest(args, f"construct-{args.kind}", [field_desc],
                         {"construct": time.perf_counter() - t0})
    payload = {"manifest": manifest, "certified": True, "set": eset.to_json(), **extra}
    out = args.out / report_name(f"construct-{args.kind}", p, s)
    write_json(out, payload)
    print(f"construct {args.kind} p={p} s={s}: size {eset.size}, certified, -> {out}")
    return 0


# ---------------------------------------------------------------------------
# wiring
# ---------------------------------------------------------------------------


def _manifest(args, command: str, fields: list[dict], timings: dict) -> dict:
    return RunManifest(
        command=command,
        fields=fields,
        seed=getattr(args, "seed", None),
        tolerance_abs=args.tolerance_abs,
        tolerance_rel=args.tolerance_rel,
        timings=timings,
    ).to_dict()


def _plain_args(args) -> dict:
    keep = ("seed", "trials", "tolerance_abs", "tolerance_rel", "cap", "alternating", "format")
    return {k: getattr(args, k, None) for k in keep}


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--p", type=int, help="field characteristic")
    parser.add_argument("--s", type=int, default=1, help="extension degree")
    parser.add_argument("--q-list", type=lambda v: [int(x) for x in v.split(",")],
                        help="comma-separated prime powers")
    parser.add_argument("--seed", type=int, default=1, help="RNG seed recorded in reports")
    parser.add_argument("--trials", type=int, default=50, help="random trials per field")
    parser.add_argument("--jobs", type=int, default=1, help="parallel field workers")
    parser.add_argument("--out", type=Path, default=Path("reports"), help="output directory")
    parser.add_argument("--format", choices=("json", "csv", "both"), default="json")
    parser.add_argument("--tolerance-abs", type=float, default=1e-6)
    parser.add_argument("--tolerance-rel", type=float, default=1e-9)
    parser.add_argument("--cap", type=int, default=10_000, help="desk-scale field size cap")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="qprog", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    pv = sub.add_parser("verify", help="run exhaustive identity suites")
    pv.add_argument("targets", nargs="*", metavar="TARGET",
                    help=f"suites to run, from {', '.join(VERIFY_TARGETS)} (default: all)")
    _add_common(pv)
    pv.set_defaults(func=cmd_verify)

    ps = sub.add_parser("scan", help="cross-q scans with trend summaries")
    ps.add_argument("kind", choices=("delta", "slices", "weil"))
    ps.add_argument("--alternating", action="store_true",
                    help="include alternating maximization in the delta scan")
    _add_common(ps)
    ps.set_defaults(func=cmd_scan)

    pc = sub.add_parser("construct", help="build and certify progression-free sets")
    pc.add_argument("kind", choices=("greedy", "line", "plane"))
    _add_common(pc)
    pc.set_defaults(func=cmd_construct)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.command == "construct" and args.p is None:
        parser.error("construct requires --p")
    try:
        return args.func(args)
    except (ValueError, ZeroDivisionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except RuntimeError as exc:
        print(f"internal consistency failure: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":  # pragma: no cover
    raise SystemExit(main())
