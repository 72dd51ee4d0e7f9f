"""Deterministic CSV/JSON writers and the report figures.

Floats are fixed at 12 significant digits everywhere, big integers and
exact rationals are serialized as decimal / "p/q" strings, and JSON keys
are sorted, so two runs with the same configuration produce byte-identical
files.  Figures are rendered with the Agg backend, which is likewise
deterministic.
"""

from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path
from typing import Iterable, Sequence

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt

from .lengthmodel import ProbeTrace
from .measures import SingularityRow
from .timeline import TimelineLayout


def fmt(x: float) -> str:
    """Fixed 12-significant-digit rendering of a float."""
    return format(float(x), ".12g")


def fraction_str(q: Fraction | int) -> str:
    q = Fraction(q)
    return f"{q.numerator}/{q.denominator}"


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[str]]) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(row) + "\n")


def write_json(path: Path, payload) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        json.dump(payload, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _save(fig, path: Path) -> None:
    fig.savefig(path, dpi=120, metadata={"Software": None})
    plt.close(fig)


def timeline_figure(lay: TimelineLayout, path: Path) -> None:
    """Active intervals of both families along the time axis, one lane per index."""
    fig, ax = plt.subplots(figsize=(9, 0.35 * len(lay.rows) + 1.5))
    for row in lay.rows:
        ax.broken_barh([(row.a_lo, row.a_hi - row.a_lo)], (row.i - 0.18, 0.36), color="tab:blue", alpha=0.6)
        ax.broken_barh([(row.b_lo, row.b_hi - row.b_lo)], (row.i + 0.18, 0.36), color="tab:orange", alpha=0.6)
        ax.plot([row.a], [row.i], "k|", markersize=9)
        ax.plot([row.b], [row.i + 0.36], "k|", markersize=9)
    ax.set_xlabel("time")
    ax.set_ylabel("index")
    ax.set_title(
        f"active intervals (even: blue, odd: orange), weights {float(lay.c_even):g}/{float(lay.c_odd):g}"
    )
    fig.tight_layout()
    _save(fig, path)


def probe_figure(trace: ProbeTrace, path: Path) -> None:
    """Ratio trace against its target, and the off-family diagnostic decay."""
    idx = [r.i for r in trace.rows]
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(7, 6), sharex=True)
    ax1.plot(idx, [r.ratio for r in trace.rows], "o-", label="length ratio")
    ax1.axhline(trace.target, color="tab:red", ls="--", label="measure ratio target")
    ax1.set_ylabel("ratio")
    ax1.legend()
    ax1.set_title(f"boundary probe ({trace.case}, target {trace.target_parity})")
    ax2.semilogy(idx, [max(r.diagnostic, 1e-300) for r in trace.rows], "s-", color="tab:green")
    ax2.set_ylabel("off-family / on-family")
    ax2.set_xlabel("index")
    fig.tight_layout()
    _save(fig, path)


def singularity_figure(rows: Sequence[SingularityRow], path: Path) -> None:
    """Band products staying bounded while the cross products decay."""
    idx = [r.i for r in rows]
    fig, ax = plt.subplots(figsize=(7, 4.5))

    def clamp(x):
        return max(float(x), 1e-300)

    ax.semilogy(idx, [clamp(r.even_band) for r in rows], "o-", label="even band")
    ax.semilogy(idx, [clamp(r.odd_band) for r in rows], "s-", label="odd band")
    ax.semilogy(idx, [clamp(r.even_cross) for r in rows], "o--", label="even cross")
    ax.semilogy(idx, [clamp(r.odd_cross) for r in rows], "s--", label="odd cross")
    ax.set_xlabel("index")
    ax.set_ylabel("marking-weighted intersection")
    ax.set_title("mutual singularity of the two limit measures")
    ax.legend()
    fig.tight_layout()
    _save(fig, path)
