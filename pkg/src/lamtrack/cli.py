"""Batch front-end: validate | curves | intersections | limits | timeline | probe.

Every command reads a JSON configuration (see :mod:`lamtrack.config`),
writes deterministic CSV/JSON reports (plus figures on the report paths)
into the output directory, and uses exit codes 0 (ok), 1 (verdict
failure or module error), 2 (usage / malformed configuration).
"""

from __future__ import annotations

import argparse
import sys
from fractions import Fraction
from pathlib import Path

from . import report
from .config import ConfigError, RunConfig, load_config
from .curves import (
    CurveIndex,
    SequenceValidationError,
    comparability_series,
    doubled_twist_product,
    growth_check,
    intersection,
)
from .lengthmodel import limit_set_probe
from .measures import blend, limit_measure, singularity_table
from .timeline import layout, little_o_diagnostics, ordering_verdict
from .traintrack import CURVE2_WEIGHTS, mat_vec, prefix_products, twist_matrix


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="lamtrack",
        description="exact curve-family computations and geodesic timeline reports",
    )
    sub = p.add_subparsers(dest="command", required=True)
    for name, helptext in (
        ("validate", "check sequence constraints and growth conditions"),
        ("curves", "emit the carried weight vectors of the family"),
        ("intersections", "exact intersection number and comparability ratio"),
        ("limits", "limit measures and mutual-singularity diagnostics"),
        ("timeline", "balance times, active intervals, ordering verdicts"),
        ("probe", "boundary limit-set probe along the modeled ray"),
    ):
        q = sub.add_parser(name, help=helptext)
        q.add_argument("--config", required=True, help="path to the JSON configuration")
        q.add_argument("--out", default="out", help="output directory (default: out)")
        q.add_argument("--max-index", type=int, default=None, help="override max_index")
        q.add_argument("--tol", type=Fraction, default=None, help="override convergence tolerances")
        if name == "intersections":
            q.add_argument("--j", type=int, required=True)
            q.add_argument("--k", type=int, required=True)
    return p


def _effective(cfg: RunConfig, args) -> tuple[RunConfig, Fraction, Fraction, int]:
    """Apply CLI overrides; returns (config, measure_tol, ratio_tol, max_index)."""
    measure_tol = cfg.tolerances.measure
    ratio_tol = cfg.tolerances.ratio
    if args.tol is not None:
        measure_tol = ratio_tol = args.tol
    max_index = cfg.max_index if args.max_index is None else args.max_index
    return cfg, measure_tol, ratio_tol, max_index


def _outdir(args) -> Path:
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)
    return out


def cmd_validate(cfg: RunConfig, args) -> int:
    out = _outdir(args)
    payload: dict = {"sequence_ok": False, "violations": [], "weights_ok": True}
    code = 0
    if cfg.weight_even == 0 and cfg.weight_odd == 0:
        payload["weights_ok"] = False
        code = 1
    try:
        seq = cfg.build_sequence()
        payload["sequence_ok"] = True
        payload["length"] = seq.length
        payload["epsilon"] = report.fraction_str(seq.epsilon)
        growth = growth_check(seq, Fraction(cfg.tolerances.little_o))
        payload["growth"] = {
            "interleaving_onset": growth.interleaving_onset,
            "interleaving_ok": growth.interleaving_ok,
            "decay_even_ok": growth.decay_even_ok,
            "decay_odd_ok": growth.decay_odd_ok,
        }
        if not growth.all_ok:
            code = 1
    except SequenceValidationError as exc:
        payload["violations"] = list(exc.violations)
        code = 1
    report.write_json(out / "validate.json", payload)
    status = "PASS" if code == 0 else "FAIL"
    print(f"validate: {status} ({out / 'validate.json'})")
    return code


def cmd_curves(cfg: RunConfig, args) -> int:
    out = _outdir(args)
    seq = cfg.build_sequence()
    _, _, _, max_index = _effective(cfg, args)
    i_top = min(seq.max_curve, 2 * max_index + 1)
    mats = [twist_matrix(seq.r_at(t)).entries for t in range(1, i_top - 1)]
    prefixes = prefix_products(mats, parallel=cfg.parallel_scan)
    rows = [["2", *map(str, CURVE2_WEIGHTS.entries)]]
    for i in range(3, i_top + 1):
        vec = mat_vec(prefixes[i - 3], CURVE2_WEIGHTS.entries)
        rows.append([str(i), *map(str, vec)])
    report.write_csv(out / "curves.csv", ["i", "s1", "s2", "s3", "s4", "s5"], rows)
    print(f"curves: wrote {len(rows)} weight vectors ({out / 'curves.csv'})")
    return 0


def cmd_intersections(cfg: RunConfig, args) -> int:
    out = _outdir(args)
    seq = cfg.build_sequence()
    j, k = args.j, args.k
    value = intersection(seq, j, k)
    payload: dict = {"j": j, "k": k, "value": str(value)}
    if (k - j) % 2 == 0 and k >= j + 2:
        ref = doubled_twist_product(seq, j, k)
        ratio = Fraction(value, ref)
        payload["reference_product"] = str(ref)
        payload["ratio"] = report.fraction_str(ratio)
        payload["ratio_float"] = report.fmt(ratio)
        series = comparability_series(seq, j, k)
        ratios = [r for _, r in series]
        payload["ratio_min"] = report.fraction_str(min(ratios))
        payload["ratio_max"] = report.fraction_str(max(ratios))
        report.write_csv(
            out / "comparability.csv",
            ["k", "ratio", "ratio_float"],
            [[str(kk), report.fraction_str(r), report.fmt(r)] for kk, r in series],
        )
    report.write_json(out / "intersections.json", payload)
    print(f"intersections: i({j},{k}) = {value} ({out / 'intersections.json'})")
    return 0


def cmd_limits(cfg: RunConfig, args) -> int:
    out = _outdir(args)
    seq = cfg.build_sequence()
    _, measure_tol, ratio_tol, max_index = _effective(cfg, args)
    payload = {}
    measures = {}
    for parity in ("even", "odd"):
        m = limit_measure(seq, parity, measure_tol)
        measures[parity] = m
        payload[parity] = {
            "entries": [report.fraction_str(x) for x in m.entries],
            "entries_float": [report.fmt(x) for x in m.entries],
            "achieved_stage": m.achieved_stage,
            "achieved_gap": report.fmt(m.achieved_gap),
        }
    i_lo, i_hi = 3, max_index
    rows = singularity_table(seq, range(i_lo, i_hi + 1), ratio_tol)
    report.write_csv(
        out / "singularity.csv",
        ["i", "even_band", "even_cross", "odd_band", "odd_cross", "even_ratio", "odd_ratio"],
        [
            [
                str(r.i),
                report.fmt(r.even_band),
                report.fmt(r.even_cross),
                report.fmt(r.odd_band),
                report.fmt(r.odd_cross),
                report.fmt(r.even_ratio),
                report.fmt(r.odd_ratio),
            ]
            for r in rows
        ],
    )
    report.singularity_figure(rows, out / "singularity.png")
    report.write_json(out / "limits.json", payload)
    print(f"limits: stages {measures['even'].achieved_stage}/{measures['odd'].achieved_stage} "
          f"({out / 'limits.json'})")
    return 0


def _build_layout(cfg: RunConfig, measure_tol, ratio_tol, i_max):
    seq = cfg.build_sequence()
    m_even = limit_measure(seq, "even", measure_tol)
    m_odd = limit_measure(seq, "odd", measure_tol)
    mixed = blend(m_even, m_odd, cfg.weight_even, cfg.weight_odd)
    lay = layout(seq, mixed, i_min=2, i_max=i_max, rel_tol=ratio_tol)
    return seq, m_even, m_odd, lay


def cmd_timeline(cfg: RunConfig, args) -> int:
    out = _outdir(args)
    _, measure_tol, ratio_tol, max_index = _effective(cfg, args)
    seq, _, _, lay = _build_layout(cfg, measure_tol, ratio_tol, max_index)
    report.write_csv(
        out / "timeline.csv",
        ["i", "a", "b", "a_lo", "a_hi", "b_lo", "b_hi"],
        [
            [
                str(r.i),
                report.fmt(r.a),
                report.fmt(r.b),
                report.fmt(r.a_lo),
                report.fmt(r.a_hi),
                report.fmt(r.b_lo),
                report.fmt(r.b_hi),
            ]
            for r in lay.rows
        ],
    )
    verdict = ordering_verdict(
        lay,
        divergence_factor=cfg.tolerances.divergence_factor,
        offset_tolerance=cfg.tolerances.offset,
    )
    gap_rows = []
    for idx, i in enumerate(verdict.indices):
        row = [str(i)]
        for link in verdict.links:
            row.append(report.fmt(link.gaps[idx]))
        lay_row = lay.row(i)
        row.append(report.fmt(lay_row.a - lay_row.formula_a))
        row.append(report.fmt(lay_row.b - lay_row.formula_b))
        gap_rows.append(row)
    header = ["i"] + [f"gap{n}" for n in range(1, len(verdict.links) + 1)] + ["dev_a", "dev_b"]
    report.write_csv(out / "ordering.csv", header, gap_rows)
    diag = little_o_diagnostics(seq, lay, cfg.tolerances.little_o)
    payload = {
        "case": verdict.case,
        "chain_holds": verdict.chain_holds,
        "all_ok": verdict.all_ok,
        "links": [
            {
                "name": link.name,
                "kind": link.kind,
                "positive": link.all_positive,
                "increasing": link.strictly_increasing,
                "diverged": link.doubled,
                "first_gap": report.fmt(link.gaps[0]),
                "last_gap": report.fmt(link.gaps[-1]),
            }
            for link in verdict.links
        ],
        "offsets": [
            {"name": o.name, "bounded": o.bounded, "max_slack": report.fmt(max(o.slacks))}
            for o in verdict.offsets
        ],
        "little_o_ok": diag.all_ok,
        "small_gap_rows": [r.i for r in lay.rows if r.small_gap_even or r.small_gap_odd],
    }
    report.write_json(out / "timeline.json", payload)
    report.timeline_figure(lay, out / "timeline.png")
    code = 0 if verdict.all_ok else 1
    print(f"timeline: case {verdict.case}, chain "
          f"{'PASS' if verdict.all_ok else 'FAIL'} ({out / 'timeline.csv'})")
    return code


def cmd_probe(cfg: RunConfig, args) -> int:
    out = _outdir(args)
    _, measure_tol, ratio_tol, max_index = _effective(cfg, args)
    seq = cfg.build_sequence()
    m_even = limit_measure(seq, "even", measure_tol)
    m_odd = limit_measure(seq, "odd", measure_tol)
    trace = limit_set_probe(
        seq,
        m_even,
        m_odd,
        cfg.weight_even,
        cfg.weight_odd,
        (CurveIndex(cfg.probe_curves[0]), CurveIndex(cfg.probe_curves[1])),
        i_min=3,
        i_max=max_index,
        target_parity=cfg.probe_target,
        rel_tol=ratio_tol,
    )
    report.write_csv(
        out / "probe_trace.csv",
        ["i", "t", "ratio", "target", "diagnostic"],
        [
            [str(r.i), report.fmt(r.t), report.fmt(r.ratio), report.fmt(r.target), report.fmt(r.diagnostic)]
            for r in trace.rows
        ],
    )
    report.write_json(
        out / "probe_summary.json",
        {
            "case": trace.case,
            "target_parity": trace.target_parity,
            "curves": [trace.curve_a.i, trace.curve_b.i],
            "target": report.fmt(trace.target),
            "converged": trace.converged,
            "final_relative_error": report.fmt(trace.final_relative_error),
        },
    )
    report.probe_figure(trace, out / "probe.png")
    code = 0 if trace.converged else 1
    print(f"probe: {'converged' if trace.converged else 'NOT converged'} "
          f"(final relative error {trace.final_relative_error:.3e})")
    return code


_COMMANDS = {
    "validate": cmd_validate,
    "curves": cmd_curves,
    "intersections": cmd_intersections,
    "limits": cmd_limits,
    "timeline": cmd_timeline,
    "probe": cmd_probe,
}


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    try:
        cfg = load_config(args.config)
    except ConfigError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 2
    try:
        return _COMMANDS[args.command](cfg, args)
    except SequenceValidationError as exc:
        print(f"sequence invalid: {exc}", file=sys.stderr)
        return 1
    except (ValueError, IndexError, OverflowError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
