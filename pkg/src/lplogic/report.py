"""Tab-separated tables with a matching PNG figure, written side by side.

Figures are drawn on a bare :class:`matplotlib.figure.Figure` with the Agg
canvas so nothing depends on a display or on pyplot's global state.
"""

from __future__ import annotations

import csv
from pathlib import Path
from typing import Iterable, List, Sequence, Tuple

from matplotlib.backends.backend_agg import FigureCanvasAgg
from matplotlib.figure import Figure

from lplogic.axioms import CHECKS, SuiteReport
from lplogic.bayes import NegationReport
from lplogic.entail import Interval
from lplogic.printer import format_rational

_PNG_META = {"Software": None}


def write_table(path, header: Sequence[str], rows: Iterable[Sequence]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with open(path, "w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, delimiter="\t", lineterminator="\n")
        w.writerow(header)
        w.writerows(rows)
    return path


def _save(fig: Figure, path) -> Path:
    path = Path(path)
    FigureCanvasAgg(fig)
    fig.savefig(path, dpi=100, metadata=_PNG_META)
    return path


def interval_report(out_dir, name: str, items: Sequence[Tuple[str, Interval]]) -> List[Path]:
    """One row per labelled interval; the figure draws each as a bar on [0, 1]."""
    out_dir = Path(out_dir)
    rows = [(label, format_rational(iv.lo), format_rational(iv.hi), int(iv.lo_open), int(iv.hi_open))
            for label, iv in items]
    table = write_table(out_dir / f"{name}.tsv", ("term", "lo", "hi", "lo_open", "hi_open"), rows)

    fig = Figure(figsize=(6, 0.6 + 0.5 * max(1, len(items))))
    ax = fig.add_subplot()
    for i, (label, iv) in enumerate(items):
        lo, hi = float(iv.lo), float(iv.hi)
        ax.plot([lo, hi], [i, i], color="tab:blue", linewidth=4, solid_capstyle="butt")
        for x, is_open in ((lo, iv.lo_open), (hi, iv.hi_open)):
            ax.plot([x], [i], marker="o", markersize=7, color="tab:blue",
                    markerfacecolor="white" if is_open else "tab:blue")
    ax.set_yticks(range(len(items)))
    ax.set_yticklabels([label for label, _ in items], fontsize=8)
    ax.set_xlim(-0.05, 1.05)
    ax.set_ylim(-0.7, len(items) - 0.3)
    ax.set_xlabel("probability")
    fig.tight_layout()
    return [table, _save(fig, out_dir / f"{name}.png")]


def axiom_report(out_dir, report: SuiteReport, name: str = "axioms") -> List[Path]:
    out_dir = Path(out_dir)
    rows = [(c, report.tallies[c].passed, report.tallies[c].failed, report.tallies[c].undefined)
            for c in CHECKS]
    table = write_table(out_dir / f"{name}.tsv", ("check", "passed", "failed", "undefined"), rows)

    fig = Figure(figsize=(8, 3.5))
    ax = fig.add_subplot()
    xs = range(len(CHECKS))
    passed = [r[1] for r in rows]
    failed = [r[2] for r in rows]
    undefined = [r[3] for r in rows]
    ax.bar(xs, passed, color="tab:green", label="passed")
    ax.bar(xs, undefined, bottom=passed, color="tab:gray", label="undefined")
    ax.bar(xs, failed, bottom=[p + u for p, u in zip(passed, undefined)], color="tab:red", label="failed")
    ax.set_xticks(list(xs))
    ax.set_xticklabels(CHECKS, rotation=45, ha="right", fontsize=8)
    ax.set_ylabel("instances")
    ax.set_title(f"{report.models} models, {report.pairs} formula pairs", fontsize=9)
    ax.legend(fontsize=8)
    fig.tight_layout()
    return [table, _save(fig, out_dir / f"{name}.png")]


def negation_report(out_dir, report: NegationReport, name: str = "negation") -> List[Path]:
    """Left side against right side of every signed product decomposition."""
    out_dir = Path(out_dir)
    rows = [(c.pattern, c.status,
             "" if c.lhs is None else format_rational(c.lhs),
             "" if c.rhs is None else format_rational(c.rhs)) for c in report.checks]
    table = write_table(out_dir / f"{name}.tsv", ("signs", "status", "lhs", "rhs"), rows)

    fig = Figure(figsize=(4.5, 4.5))
    ax = fig.add_subplot()
    defined = [c for c in report.checks if c.rhs is not None]
    top = max([float(c.lhs) for c in defined] + [float(c.rhs) for c in defined] + [0.01])
    ax.plot([0, top], [0, top], color="lightgray", linewidth=1)
    for status, color in (("holds", "tab:green"), ("fails", "tab:red")):
        pts = [c for c in defined if c.status == status]
        ax.scatter([float(c.lhs) for c in pts], [float(c.rhs) for c in pts], color=color, label=status, s=18)
    ax.set_xlabel("joint term")
    ax.set_ylabel("product of factors")
    ax.legend(fontsize=8)
    fig.tight_layout()
    return [table, _save(fig, out_dir / f"{name}.png")]
