"""Reference computations that share no code with the package under test.

Formulas reach these helpers as package AST nodes, but they are walked
here by class name only; no package function is called.
"""

import itertools
from fractions import Fraction


def holds(f, world):
    """Truth of a quantifier-free monadic formula; ``world`` maps atom names to bools."""
    kind = type(f).__name__
    if kind == "Pred":
        return world[f.name]
    if kind == "Not":
        return not holds(f.body, world)
    if kind == "And":
        return holds(f.left, world) and holds(f.right, world)
    if kind == "Or":
        return holds(f.left, world) or holds(f.right, world)
    if kind == "Implies":
        return (not holds(f.left, world)) or holds(f.right, world)
    raise ValueError(kind)


def _rref(rows):
    """Row-reduce an augmented matrix of Fractions; returns (rows, pivot columns) or None if inconsistent."""
    m = [list(r) for r in rows]
    ncols = len(m[0]) - 1
    pivots, r = [], 0
    for c in range(ncols):
        pr = next((i for i in range(r, len(m)) if m[i][c] != 0), None)
        if pr is None:
            continue
        m[r], m[pr] = m[pr], m[r]
        inv = 1 / m[r][c]
        m[r] = [v * inv for v in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c] != 0:
                f = m[i][c]
                m[i] = [a - f * b for a, b in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
    for row in m[r:]:
        if row[-1] != 0:
            return None
    return m[:r], pivots


def _solve_square(rows, cols):
    sub = [[row[c] for c in cols] + [row[-1]] for row in rows]
    red = _rref(sub)
    if red is None:
        return None
    reduced, piv = red
    if len(piv) != len(cols):
        return None
    return [reduced[i][-1] for i in range(len(cols))]


def vertices(a_rows, b):
    """Basic feasible solutions of ``{z >= 0 : A z = b}`` by trying every column basis."""
    aug = [[Fraction(v) for v in row] + [Fraction(rhs)] for row, rhs in zip(a_rows, b)]
    red = _rref(aug)
    if red is None:
        return []
    rows, _ = red
    n = len(aug[0]) - 1
    if not rows:
        return [tuple([Fraction(0)] * n)]
    found = set()
    for cols in itertools.combinations(range(n), len(rows)):
        sol = _solve_square(rows, cols)
        if sol is None or any(v < 0 for v in sol):
            continue
        z = [Fraction(0)] * n
        for c, v in zip(cols, sol):
            z[c] = v
        found.add(tuple(z))
    return sorted(found)


def world_list(atoms):
    return [dict(zip(atoms, bits)) for bits in itertools.product((True, False), repeat=len(atoms))]


def polytope_vertices(atoms, constraints):
    """Vertices of the world-weight polytope, projected onto the world coordinates.

    ``constraints`` holds ``(formula, sense, value)`` with sense ``=``, ``>=`` or ``<=``.
    """
    worlds = world_list(atoms)
    n = len(worlds)
    k = sum(1 for _, s, _ in constraints if s != "=")
    a_rows, b = [], []
    slack = 0
    for formula, sense, value in constraints:
        row = [Fraction(int(holds(formula, w))) for w in worlds] + [Fraction(0)] * k
        if sense == ">=":
            row[n + slack] = Fraction(-1)
            slack += 1
        elif sense == "<=":
            row[n + slack] = Fraction(1)
            slack += 1
        a_rows.append(row)
        b.append(Fraction(value))
    a_rows.append([Fraction(1)] * n + [Fraction(0)] * k)
    b.append(Fraction(1))
    return worlds, [v[:n] for v in vertices(a_rows, b)]


def extreme_values(atoms, constraints, query, given=None):
    """(min, max) of the query over polytope vertices; None if infeasible.

    For a conditional query the ratio is used, and ``"undefined"`` is
    returned when some vertex gives the condition zero weight.
    """
    worlds, verts = polytope_vertices(atoms, constraints)
    if not verts:
        return None
    values = []
    for p in verts:
        num = sum((pi for pi, w in zip(p, worlds) if holds(query, w) and (given is None or holds(given, w))),
                  Fraction(0))
        if given is None:
            values.append(num)
            continue
        den = sum((pi for pi, w in zip(p, worlds) if holds(given, w)), Fraction(0))
        if den == 0:
            return "undefined"
        values.append(num / den)
    return min(values), max(values)


def lp_extreme(c, rows, maximize):
    """Optimum of ``c.x`` over ``{x >= 0 : rows}`` by vertex enumeration (bounded problems only)."""
    n = len(c)
    k = sum(1 for _, s, _ in rows if s != "=")
    a_rows, b, slack = [], [], 0
    for coeffs, sense, rhs in rows:
        row = [Fraction(v) for v in coeffs] + [Fraction(0)] * k
        if sense != "=":
            row[n + slack] = Fraction(1 if sense == "<=" else -1)
            slack += 1
        a_rows.append(row)
        b.append(Fraction(rhs))
    verts = vertices(a_rows, b)
    if not verts:
        return None
    vals = [sum((Fraction(ci) * xi for ci, xi in zip(c, v[:n])), Fraction(0)) for v in verts]
    return max(vals) if maximize else min(vals)


def brute_force_conditional(joint, target, evidence):
    """P(target | evidence) from an explicit table ``{assignment tuple: probability}``.

    ``target`` and each evidence item are ``(index, value)`` pairs.
    """
    num = den = Fraction(0)
    for assignment, p in joint.items():
        if all(assignment[i] == v for i, v in evidence):
            den += p
            if assignment[target[0]] == target[1]:
                num += p
    return num / den


def diamond_joint(x1, x2_given, x3_given, x4_given):
    """Joint table of the four-variable net from explicit CPT callables."""
    table = {}
    for a in itertools.product((True, False), repeat=4):
        v1, v2, v3, v4 = a
        p1 = x1 if v1 else 1 - x1
        p2 = x2_given(v1) if v2 else 1 - x2_given(v1)
        p3 = x3_given(v1) if v3 else 1 - x3_given(v1)
        p4 = x4_given(v2, v3) if v4 else 1 - x4_given(v2, v3)
        table[a] = p1 * p2 * p3 * p4
    return table
