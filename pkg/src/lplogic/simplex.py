"""Exact two-phase simplex over the rationals with Bland's anti-cycling rule.

Problems are ``min/max c.x  s.t.  rows, x >= 0`` where each row is
``(coefficients, sense, rhs)`` with sense one of ``<=``, ``>=``, ``=``.
The tableau is dense and every entry is a :class:`fractions.Fraction`.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple

OPTIMAL = "optimal"
INFEASIBLE = "infeasible"
UNBOUNDED = "unbounded"

Row = Tuple[Sequence, str, object]


@dataclass
class LPResult:
    status: str
    value: Optional[Fraction] = None
    x: Optional[List[Fraction]] = None
    pivots: int = 0


class _Tableau:
    def __init__(self, rows: List[List[Fraction]], basis: List[int], ncols: int):
        self.rows = rows            # each row: ncols coefficients + rhs
        self.basis = basis
        self.ncols = ncols
        self.pivots = 0

    def pivot(self, i: int, j: int, cost: List[Fraction]) -> None:
        row = self.rows[i]
        p = row[j]
        if p != 1:
            self.rows[i] = row = [v / p for v in row]
        for k, other in enumerate(self.rows):
            if k != i and other[j] != 0:
                f = other[j]
                self.rows[k] = [a - f * b for a, b in zip(other, row)]
        if cost[j] != 0:
            f = cost[j]
            cost[:] = [a - f * b for a, b in zip(cost, row)]
        self.basis[i] = j
        self.pivots += 1

    def run(self, cost: List[Fraction], allowed: Sequence[bool]) -> str:
        """Minimize; ``cost`` holds reduced costs with ``-objective`` in the last slot."""
        n = self.ncols
        while True:
            entering = next((j for j in range(n) if allowed[j] and cost[j] < 0), None)
            if entering is None:
                return OPTIMAL
            best = None
            for i, row in enumerate(self.rows):
                a = row[entering]
                if a > 0:
                    key = (row[n] / a, self.basis[i])
                    if best is None or key < best[0]:
                        best = (key, i)
            if best is None:
                return UNBOUNDED
            self.pivot(best[1], entering, cost)


def _reduced(costs: Sequence[Fraction], tab: _Tableau) -> List[Fraction]:
    r = list(costs) + [Fraction(0)]
    for i, b in enumerate(tab.basis):
        cb = r[b]
        if cb != 0:
            row = tab.rows[i]
            r = [a - cb * v for a, v in zip(r, row)]
    return r


def solve(c: Sequence, rows: Sequence[Row], maximize: bool = False) -> LPResult:
    """Optimize ``c.x`` over ``{x >= 0 : rows}`` exactly."""
    n = len(c)
    c = [Fraction(v) for v in c]
    norm = []
    for coeffs, sense, rhs in rows:
        if len(coeffs) != n:
            raise ValueError("row length does not match the number of variables")
        if sense not in ("<=", ">=", "="):
            raise ValueError(f"unknown row sense {sense!r}")
        coeffs = [Fraction(v) for v in coeffs]
        rhs = Fraction(rhs)
        if rhs < 0:
            coeffs = [-v for v in coeffs]
            rhs = -rhs
            sense = {"<=": ">=", ">=": "<=", "=": "="}[sense]
        norm.append((coeffs, sense, rhs))

    n_slack = sum(1 for _, s, _ in norm if s != "=")
    n_art = sum(1 for _, s, _ in norm if s != "<=")
    ncols = n + n_slack + n_art
    zero = Fraction(0)
    tab_rows, basis = [], []
    slack_at, art_at = n, n + n_slack
    for coeffs, sense, rhs in norm:
        row = coeffs + [zero] * (n_slack + n_art) + [rhs]
        if sense == "<=":
            row[slack_at] = Fraction(1)
            basis.append(slack_at)
            slack_at += 1
        else:
            if sense == ">=":
                row[slack_at] = Fraction(-1)
                slack_at += 1
            row[art_at] = Fraction(1)
            basis.append(art_at)
            art_at += 1
        tab_rows.append(row)
    tab = _Tableau(tab_rows, basis, ncols)
    first_art = n + n_slack

    if n_art:
        phase1 = [zero] * first_art + [Fraction(1)] * n_art
        cost = _reduced(phase1, tab)
        tab.run(cost, [True] * ncols)
        if -cost[ncols] != 0:
            return LPResult(INFEASIBLE, pivots=tab.pivots)
        # drive zero-valued artificials out of the basis; drop redundant rows
        i = 0
        while i < len(tab.rows):
            if tab.basis[i] >= first_art:
                j = next((j for j in range(first_art) if tab.rows[i][j] != 0), None)
                if j is None:
                    del tab.rows[i]
                    del tab.basis[i]
                    continue
                tab.pivot(i, j, [zero] * (ncols + 1))
            i += 1

    sign = -1 if maximize else 1
    phase2 = [sign * v for v in c] + [zero] * (ncols - n)
    cost = _reduced(phase2, tab)
    allowed = [j < first_art for j in range(ncols)]
    status = tab.run(cost, allowed)
    if status == UNBOUNDED:
        return LPResult(UNBOUNDED, pivots=tab.pivots)
    x = [zero] * n
    for i, b in enumerate(tab.basis):
        if b < n:
            x[b] = tab.rows[i][ncols]
    value = sum((ci * xi for ci, xi in zip(c, x)), zero)
    return LPResult(OPTIMAL, value, x, tab.pivots)


def feasible(n: int, rows: Sequence[Row]) -> bool:
    return solve([0] * n, rows).status == OPTIMAL
