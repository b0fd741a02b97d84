"""Command-line surface: ingestion, statistics, curves, appraisals, checks.

Every command is deterministic given identical inputs and store state; text
output is stable enough to pin byte-exactly in golden tests. Exit codes: 0
success (warnings never change it), 1 user or domain error, 2 store
corruption. JSON output carries full-precision numbers; text output rounds
for display only.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from typing import Callable

from . import dataset, registry, stats, uplift
from .errors import RefcastError, StoreCorruptError

TEXT, JSON_FMT, CSV_FMT = "text", "json", "csv"

DEFAULT_RISK_GRID = tuple(k / 20 for k in range(19, 0, -1))  # 0.95 .. 0.05


class _Parser(argparse.ArgumentParser):
    # argparse exits 2 on usage errors by default; 2 is reserved for store
    # corruption here, so usage problems become exit 1.
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _fmt_money(amount: float, currency: str, millions: bool) -> str:
    symbol = "£" if currency in ("GBP", "£") else ""
    suffix = "" if symbol else f" {currency}"
    if millions:
        m = amount / 1e6
        body = f"{m:,.0f}m" if abs(m) >= 10 else f"{m:.1f}m"
    else:
        body = f"{amount:,.2f}"
    return f"{symbol}{body}{suffix}"


def _fmt_pct(fraction: float, decimals: int = 1) -> str:
    return f"{100.0 * fraction:.{decimals}f}"


def _fmt_risk(risk: float) -> str:
    return f"{100.0 * risk:g}%"


def _fmt_p(p: float) -> str:
    return "p < 0.001" if p < 0.001 else f"p = {p:.4f}"


def _emit_json(payload: dict) -> None:
    print(json.dumps(payload, indent=2))


def _resolve_store(args: argparse.Namespace) -> str:
    store = args.store or os.environ.get("REFCAST_STORE")
    if not store:
        raise RefcastError("no store configured: pass --store or set REFCAST_STORE")
    return store


def _millions(args: argparse.Namespace) -> bool:
    if args.display_millions is None:
        return args.format == TEXT
    return args.display_millions


def _reject_csv(args: argparse.Namespace) -> None:
    if args.format == CSV_FMT:
        raise RefcastError("csv format is only available for the curve command")


# ---------------------------------------------------------------- ingest


def _infer_uniform(values: set[str], what: str) -> str:
    if len(values) != 1:
        raise RefcastError(f"records carry mixed {what} values {sorted(values)}; pass an explicit flag")
    return next(iter(values))


def cmd_ingest(args: argparse.Namespace) -> int:
    _reject_csv(args)
    store = _resolve_store(args)
    try:
        with open(args.csv_path, encoding="utf-8", newline="") as fh:
            text = fh.read()
    except OSError as exc:
        raise RefcastError(f"cannot read {args.csv_path!r}: {exc}") from exc
    records, diagnostics = dataset.parse_records(text)
    if not records:
        raise RefcastError(f"no valid records in {args.csv_path!r}")
    category = args.category or _infer_uniform({r.category for r in records}, "category")
    metric = dataset.Metric(_infer_uniform({r.metric.value for r in records}, "metric"))
    kept = [r for r in records if r.category == category]
    if not kept:
        raise RefcastError(f"no records with category {category!r} in {args.csv_path!r}")
    dropped_category = len(records) - len(kept)
    ref_class = dataset.ReferenceClass(name=args.name, category=category, metric=metric, records=tuple(kept))
    registry.save_class(ref_class, store, overwrite=args.overwrite)

    completed = len(ref_class.completed_records)
    abandoned = len(kept) - completed
    warnings = ref_class.quality_warnings()
    taxonomy = registry.CategoryTaxonomy.default()
    if category not in taxonomy:
        warnings.append(f"category {category!r} is not in the seeded taxonomy")
    if dropped_category:
        diagnostics = list(diagnostics) + [
            dataset.RowDiagnostic(0, f"{dropped_category} rows skipped: category differs from {category!r}")
        ]

    if args.format == JSON_FMT:
        _emit_json(
            {
                "name": ref_class.name,
                "category": category,
                "metric": metric.value,
                "records": len(kept),
                "completed": completed,
                "abandoned": abandoned,
                "attrition_rate": abandoned / len(kept),
                "diagnostics": [{"row": d.row, "reason": d.reason} for d in diagnostics],
                "warnings": warnings,
            }
        )
        return 0
    print(f"stored class '{ref_class.name}' (category {category}, metric {metric.value})")
    print(f"{len(kept)} records ({completed} completed, {abandoned} abandoned)")
    print(f"attrition rate: {_fmt_pct(abandoned / len(kept))}%")
    for d in diagnostics:
        where = f"row {d.row}" if d.row else "rows"
        print(f"skipped {where}: {d.reason}")
    for w in warnings:
        print(f"warning: {w}")
    return 0


# ---------------------------------------------------------------- stats


def cmd_stats(args: argparse.Namespace) -> int:
    _reject_csv(args)
    ref_class = registry.load_class(args.class_name, _resolve_store(args))
    overruns = ref_class.overruns()
    summ = stats.summary(overruns)

    t_report = t_reason = None
    if summ.n < 3:
        t_reason = "n < 3"
    elif summ.sd == 0.0:
        t_reason = "zero variance"
    else:
        t_report = stats.t_test_mean_zero(overruns)
    jb_report = jb_reason = None
    if summ.n < 8:
        jb_reason = "n < 8"
    elif summ.sd == 0.0:
        jb_reason = "zero variance"
    else:
        jb_report = stats.jarque_bera_normality(overruns)
    warnings = ref_class.quality_warnings()

    if args.format == JSON_FMT:
        _emit_json(
            {
                "name": ref_class.name,
                "category": ref_class.category,
                "metric": ref_class.metric.value,
                "n": summ.n,
                "mean": summ.mean,
                "sd": summ.sd,
                "min": summ.min,
                "median": summ.median,
                "max": summ.max,
                "t_test": None
                if t_report is None
                else {"statistic": t_report.statistic, "p_value": t_report.p_value, "n": t_report.n},
                "normality": None
                if jb_report is None
                else {"statistic": jb_report.statistic, "p_value": jb_report.p_value, "n": jb_report.n},
                "warnings": warnings,
            }
        )
        return 0
    print(f"class: {ref_class.name} (category {ref_class.category}, metric {ref_class.metric.value})")
    print(f"n (completed): {summ.n}")
    print(f"average inaccuracy (%): {_fmt_pct(summ.mean)}")
    sd_text = "n/a" if summ.sd is None else _fmt_pct(summ.sd)
    print(f"standard deviation (%): {sd_text}")
    print(f"min (%): {_fmt_pct(summ.min)}")
    print(f"median (%): {_fmt_pct(summ.median)}")
    print(f"max (%): {_fmt_pct(summ.max)}")
    if t_report is None:
        print(f"t-test (mean inaccuracy = 0): unavailable ({t_reason})")
    else:
        print(f"t-test (mean inaccuracy = 0): t = {t_report.statistic:.3f}, {_fmt_p(t_report.p_value)}")
    if jb_report is None:
        print(f"normality (Jarque-Bera): unavailable ({jb_reason})")
    else:
        print(f"normality (Jarque-Bera): JB = {jb_report.statistic:.3f}, {_fmt_p(jb_report.p_value)}")
    for w in warnings:
        print(f"warning: {w}")
    return 0


# ---------------------------------------------------------------- curve


def _parse_grid(args: argparse.Namespace) -> tuple[float, ...]:
    if args.points:
        try:
            return tuple(float(tok) for tok in args.points.split(","))
        except ValueError as exc:
            raise RefcastError(f"bad --points value {args.points!r}: {exc}") from exc
    if args.grid:
        parts = args.grid.split(":")
        if len(parts) != 3:
            raise RefcastError(f"bad --grid value {args.grid!r}: expected start:stop:step")
        try:
            start, stop, step = (float(tok) for tok in parts)
        except ValueError as exc:
            raise RefcastError(f"bad --grid value {args.grid!r}: {exc}") from exc
        if step == 0:
            raise RefcastError("grid step cannot be zero")
        count = int(round((stop - start) / step))
        if count < 0:
            raise RefcastError(f"grid step {step} never reaches {stop} from {start}")
        return tuple(round(start + i * step, 12) for i in range(count + 1))
    return DEFAULT_RISK_GRID


def cmd_curve(args: argparse.Namespace) -> int:
    ref_class = registry.load_class(args.class_name, _resolve_store(args))
    dist = stats.build_distribution(ref_class.overruns())
    curve = uplift.uplift_curve(dist, _parse_grid(args))
    if args.format == JSON_FMT:
        rendered = json.dumps(
            {"class": ref_class.name, "source_n": curve.source_n, "points": [[r, u] for r, u in curve.points]},
            indent=2,
        ) + "\n"
    else:
        rendered = uplift.curve_to_csv(curve)
    if args.output:
        with open(args.output, "w", encoding="utf-8", newline="") as fh:
            fh.write(rendered)
    else:
        sys.stdout.write(rendered)
    return 0


# ---------------------------------------------------------------- uplift


def _class_distribution(args: argparse.Namespace) -> tuple[stats.OverrunDistribution, dataset.ReferenceClass]:
    ref_class = registry.load_class(args.class_name, _resolve_store(args))
    return stats.build_distribution(ref_class.overruns()), ref_class


def cmd_uplift(args: argparse.Namespace) -> int:
    _reject_csv(args)
    if args.class_name:
        dist, ref_class = _class_distribution(args)
        value = uplift.required_uplift(dist, args.risk)
        source = f"class {ref_class.name} (n={dist.n})"
    else:
        entry = uplift.lookup_table_entry(args.category)
        if entry.kind == uplift.RANGE_ONLY:
            raise RefcastError(f"{uplift.NO_DISTRIBUTION_MSG} for category {entry.category!r}")
        value = uplift.table_uplift(entry, args.risk)
        source = f"built-in table, {entry.display_name}"
    warnings = [uplift.WARN_NEGATIVE_UPLIFT] if value < 0 else []
    if args.format == JSON_FMT:
        _emit_json(
            {"acceptable_risk": args.risk, "uplift": value, "source": source, "warnings": warnings}
        )
        return 0
    print(f"required uplift at acceptable risk {_fmt_risk(args.risk)}: {_fmt_pct(value)}%")
    print(f"source: {source}")
    for w in warnings:
        print(f"warning: {w}")
    return 0


# ---------------------------------------------------------------- appraise


def cmd_appraise(args: argparse.Namespace) -> int:
    _reject_csv(args)
    currency = "GBP"
    if args.class_name:
        dist, ref_class = _class_distribution(args)
        target: stats.OverrunDistribution | uplift.UpliftTableEntry = dist
        currencies = {r.currency_or_unit for r in ref_class.completed_records}
        if len(currencies) == 1:
            currency = next(iter(currencies))
    else:
        target = uplift.lookup_table_entry(args.category)
    result = uplift.appraise(
        target,
        base_budget=args.base,
        acceptable_risk=args.risk,
        downward_adjustment=args.adjust,
        adjustment_evidence=args.evidence,
        pre_business_case=args.pre_business_case,
    )
    millions = _millions(args)

    if args.format == JSON_FMT:
        _emit_json(
            {
                "base_budget": result.base_budget,
                "acceptable_risk": result.acceptable_risk,
                "uplift": result.uplift_applied,
                "final_budget": result.final_budget,
                "uplift_range": list(result.uplift_range) if result.uplift_range else None,
                "budget_range": list(result.budget_range) if result.budget_range else None,
                "adjustment_note": result.adjustment_note,
                "warnings": list(result.warnings),
            }
        )
        return 0
    print(f"base budget: {_fmt_money(result.base_budget, currency, millions)}")
    if result.budget_range is not None:
        low, high = result.uplift_range  # type: ignore[misc]
        print(f"uplift range: {_fmt_pct(low, 0)}% to {_fmt_pct(high, 0)}%")
        lo_m, hi_m = result.budget_range
        print(f"budget interval: {_fmt_money(lo_m, currency, millions)}-{_fmt_money(hi_m, currency, millions)}")
    else:
        print(f"acceptable risk: {_fmt_risk(result.acceptable_risk)}")
        print(f"uplift: {_fmt_pct(result.uplift_applied)}%")
        print(f"final budget: {_fmt_money(result.final_budget, currency, millions)}")
    if result.adjustment_note:
        print(f"adjustment: {result.adjustment_note}")
    for w in result.warnings:
        print(f"warning: {w}")
    return 0


# ---------------------------------------------------------------- backtest


def cmd_backtest(args: argparse.Namespace) -> int:
    _reject_csv(args)
    ref_class = registry.load_class(args.class_name, _resolve_store(args))
    report = registry.backtest(ref_class, args.percentile)
    if args.format == JSON_FMT:
        _emit_json(
            {
                "class": ref_class.name,
                "percentile": report.percentile,
                "trials": report.trials,
                "covered": report.covered,
                "coverage": report.coverage,
                "binomial_95_interval": list(report.binomial_95_interval),
            }
        )
        return 0
    low, high = report.binomial_95_interval
    print(f"class: {ref_class.name}")
    print(f"percentile: {report.percentile:g}")
    print(f"trials: {report.trials}")
    print(f"covered: {report.covered}")
    print(f"coverage: {report.coverage:.4f}")
    print(f"binomial 95% interval: [{low:.4f}, {high:.4f}]")
    return 0


# ---------------------------------------------------------------- pool-check


def cmd_pool_check(args: argparse.Namespace) -> int:
    _reject_csv(args)
    store = _resolve_store(args)
    a = registry.load_class(args.class_a, store)
    b = registry.load_class(args.class_b, store)
    decision = registry.pool_check(a, b, alpha=args.alpha)
    rep = decision.report
    if args.format == JSON_FMT:
        _emit_json(
            {
                "class_a": a.name,
                "class_b": b.name,
                "decision": decision.decision,
                "alpha": decision.alpha,
                "statistic": rep.statistic,
                "p_value": rep.p_value,
                "n": rep.n,
                "n2": rep.n2,
            }
        )
        return 0
    print(f"classes: {a.name} (n={rep.n}) vs {b.name} (n={rep.n2})")
    print(f"KS statistic: {rep.statistic:.4f}")
    print(f"{_fmt_p(rep.p_value)}")
    print(f"decision (alpha {decision.alpha:g}): {decision.decision}")
    return 0


# ---------------------------------------------------------------- table


def _table_cells(entry: uplift.UpliftTableEntry) -> tuple[str, str]:
    if entry.kind == uplift.DISTRIBUTION_BACKED:
        return f"{round(100 * entry.p50_uplift)}%", f"{round(100 * entry.p80_uplift)}%"
    return f"{round(100 * entry.range_low)}-{round(100 * entry.range_high)}%*", ""


def cmd_table(args: argparse.Namespace) -> int:
    entries = uplift.builtin_table()
    if args.format == JSON_FMT:
        _emit_json(
            {
                "entries": [
                    {
                        "category": e.category,
                        "display_name": e.display_name,
                        "kind": e.kind,
                        "p50_uplift": e.p50_uplift,
                        "p80_uplift": e.p80_uplift,
                        "range_low": e.range_low,
                        "range_high": e.range_high,
                        "source_note": e.source_note,
                    }
                    for e in entries
                ],
                "footnote": uplift.NO_DISTRIBUTION_MSG,
            }
        )
        return 0
    if args.format == CSV_FMT:
        print("category,p50_uplift,p80_uplift,range_low,range_high,kind")
        for e in entries:
            fields = [
                e.category,
                "" if e.p50_uplift is None else f"{e.p50_uplift:.2f}",
                "" if e.p80_uplift is None else f"{e.p80_uplift:.2f}",
                "" if e.range_low is None else f"{e.range_low:.2f}",
                "" if e.range_high is None else f"{e.range_high:.2f}",
                e.kind,
            ]
            print(",".join(fields))
        return 0
    name_w = max(len(e.display_name) for e in entries) + 2
    print(f"{'Category':<{name_w}}{'50% percentile':<16}{'80% percentile'}")
    for e in entries:
        p50, p80 = _table_cells(e)
        print(f"{e.display_name:<{name_w}}{p50:<16}{p80}".rstrip())
    print()
    print(f"*) {uplift.NO_DISTRIBUTION_MSG}.")
    return 0


# ---------------------------------------------------------------- wiring


def _add_common(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--store", help="store directory (default: $REFCAST_STORE)")
    parser.add_argument("--format", choices=(TEXT, JSON_FMT, CSV_FMT), default=TEXT)
    parser.add_argument(
        "--display-millions",
        action=argparse.BooleanOptionalAction,
        default=None,
        help="round money to millions for display (default: on for text, off for json)",
    )


def _add_target_group(parser: argparse.ArgumentParser, risk_required: bool) -> None:
    group = parser.add_mutually_exclusive_group(required=True)
    group.add_argument("--class", dest="class_name", help="stored reference class name")
    group.add_argument("--category", help="built-in uplift table category")
    parser.add_argument("--risk", type=float, required=risk_required, help="acceptable risk of overrun")


def build_parser() -> _Parser:
    parser = _Parser(prog="refcast", description="Reference class forecasting for project cost overruns.")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("ingest", help="parse, validate and store a CSV of project outcomes")
    p.add_argument("csv_path")
    p.add_argument("--name", required=True, help="name for the stored reference class")
    p.add_argument("--category", help="class category (default: inferred from the records)")
    p.add_argument("--overwrite", action="store_true")
    _add_common(p)
    p.set_defaults(func=cmd_ingest)

    p = sub.add_parser("stats", help="summary statistics and hypothesis tests for a stored class")
    p.add_argument("class_name")
    _add_common(p)
    p.set_defaults(func=cmd_stats)

    p = sub.add_parser("curve", help="required-uplift curve over an acceptable-risk grid")
    p.add_argument("class_name")
    p.add_argument("--grid", help="risk grid as start:stop:step (default 0.95:0.05:-0.05)")
    p.add_argument("--points", help="comma-separated risk points, e.g. 0.5,0.2")
    p.add_argument("-o", "--output", help="write to file instead of stdout")
    _add_common(p)
    p.set_defaults(func=cmd_curve)

    p = sub.add_parser("uplift", help="required uplift at one acceptable risk")
    _add_target_group(p, risk_required=True)
    _add_common(p)
    p.set_defaults(func=cmd_uplift)

    p = sub.add_parser("appraise", help="debiased budget for a project")
    _add_target_group(p, risk_required=False)
    p.add_argument("--base", type=float, required=True, help="base budget (plain decimal)")
    p.add_argument("--adjust", type=float, help="downward uplift adjustment (fraction)")
    p.add_argument("--evidence", help="evidence supporting a downward adjustment")
    p.add_argument("--pre-business-case", action="store_true", help="project has not reached full business case")
    _add_common(p)
    p.set_defaults(func=cmd_appraise)

    p = sub.add_parser("backtest", help="leave-one-out calibration backtest of a stored class")
    p.add_argument("class_name")
    p.add_argument("--percentile", type=float, default=0.8)
    _add_common(p)
    p.set_defaults(func=cmd_backtest)

    p = sub.add_parser("pool-check", help="test whether two stored classes may be pooled")
    p.add_argument("class_a")
    p.add_argument("class_b")
    p.add_argument("--alpha", type=float, default=registry.DEFAULT_POOL_ALPHA)
    _add_common(p)
    p.set_defaults(func=cmd_pool_check)

    p = sub.add_parser("table", help="print the built-in capital expenditure uplift table")
    _add_common(p)
    p.set_defaults(func=cmd_table)

    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    func: Callable[[argparse.Namespace], int] = args.func
    try:
        return func(args)
    except StoreCorruptError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (RefcastError, ValueError, ArithmeticError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
