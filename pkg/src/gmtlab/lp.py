"""Exact rational simplex with branch-and-bound, and a HiGHS fallback for large programs.

All programs are in the form: minimize ``c @ x`` subject to ``A x = b`` and
``lower <= x <= upper``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

ZERO = Fraction(0)


@dataclass
class LPResult:
    status: str
    x: list = field(default_factory=list)
    value: Fraction | None = None
    pivots: int = 0


def _pivot(tab: list[list[Fraction]], row: int, col: int) -> None:
    prow = tab[row]
    inv = 1 / prow[col]
    nz = [j for j, v in enumerate(prow) if v]
    for j in nz:
        prow[j] *= inv
    for i, r in enumerate(tab):
        if i == row:
            continue
        f = r[col]
        if f:
            for j in nz:
                r[j] -= f * prow[j]


def _simplex(tab, basis, cost, allowed) -> str:
    """Minimize ``cost`` over the tableau with Bland's rule.

    The last row of ``tab`` is the reduced-cost row, the last column the rhs.
    """
    n = len(tab[0]) - 1
    obj = tab[-1]
    while True:
        enter = next((j for j in range(n) if allowed[j] and obj[j] < 0), None)
        if enter is None:
            return "optimal"
        best, leave = None, None
        for i in range(len(tab) - 1):
            a = tab[i][enter]
            if a > 0:
                ratio = tab[i][-1] / a
                if best is None or ratio < best or (ratio == best and basis[i] < basis[leave]):
                    best, leave = ratio, i
        if leave is None:
            return "unbounded"
        _pivot(tab, leave, enter)
        basis[leave] = enter


def simplex_exact(c: Sequence, A: Sequence[Sequence], b: Sequence,
                  upper: Sequence | None = None) -> LPResult:
    """Two-phase exact simplex for ``min c x, A x = b, 0 <= x <= upper``.

    Entering variable: smallest index with negative reduced cost (Bland), so
    the pivot sequence and the returned vertex are deterministic.
    """
    c = [Fraction(v) for v in c]
    n = len(c)
    rows = [[Fraction(v) for v in r] for r in A]
    rhs = [Fraction(v) for v in b]
    if upper is not None:
        for j, u in enumerate(upper):
            if u is None or (isinstance(u, float) and math.isinf(u)):
                continue
            row = [ZERO] * n
            row[j] = Fraction(1)
            rows.append(row)
            rhs.append(Fraction(u))
    m = len(rows)
    n_slack = m - len(A)
    # columns: original n | upper-bound slacks | artificials | rhs
    width = n + n_slack + m
    tab = []
    for i in range(m):
        r = rows[i] + [ZERO] * (n_slack + m) + [rhs[i]]
        if i >= len(A):
            r[n + i - len(A)] = Fraction(1)
        if r[-1] < 0:
            r = [-v for v in r]
        r[n + n_slack + i] = Fraction(1)
        tab.append(r)
    basis = [n + n_slack + i for i in range(m)]
    phase1 = [ZERO] * (width + 1)
    for r in tab:
        for j in range(n + n_slack):
            phase1[j] -= r[j]
        phase1[-1] -= r[-1]
    tab.append(phase1)
    allowed = [True] * width
    _simplex(tab, basis, None, allowed)
    if tab[-1][-1] != 0:
        return LPResult("infeasible")
    # drive remaining artificials out of the basis; drop redundant rows
    art0 = n + n_slack
    i = 0
    while i < len(tab) - 1:
        if basis[i] >= art0:
            j = next((j for j in range(art0) if tab[i][j] != 0), None)
            if j is None:
                del tab[i]
                del basis[i]
                continue
            _pivot(tab, i, j)
            basis[i] = j
        i += 1
    allowed = [j < art0 for j in range(width)]
    full_cost = c + [ZERO] * (width - n)
    obj = list(full_cost) + [ZERO]
    for i, bj in enumerate(basis):
        cb = full_cost[bj]
        if cb:
            r = tab[i]
            for j in range(width + 1):
                if r[j]:
                    obj[j] -= cb * r[j]
    tab[-1] = obj
    status = _simplex(tab, basis, None, allowed)
    if status != "optimal":
        return LPResult(status)
    x = [ZERO] * width
    for i, bj in enumerate(basis):
        x[bj] = tab[i][-1]
    x = x[:n]
    return LPResult("optimal", x, sum((ci * xi for ci, xi in zip(c, x)), ZERO))


@dataclass
class ILPResult:
    status: str
    x: list = field(default_factory=list)
    value: Fraction | None = None
    stage: str = ""
    nodes: int = 0
    lp_value: Fraction | None = None


def ilp_exact(c, A, b, lower=None, upper=None, node_limit: int = 20000) -> ILPResult:
    """Integer program by depth-first branch-and-bound over exact LP relaxations.

    ``stage`` is ``lp_relaxation`` when the root relaxation is already
    integral, ``certified_integral`` when the tree was exhausted, and
    ``incumbent`` when the node limit stopped the search early.
    """
    n = len(c)
    c = [Fraction(v) for v in c]
    A = [[Fraction(v) for v in r] for r in A]
    b = [Fraction(v) for v in b]
    lo0 = [Fraction(0) if lower is None or lower[j] is None else Fraction(lower[j]) for j in range(n)]
    up0 = [None if upper is None or upper[j] is None else Fraction(upper[j]) for j in range(n)]

    best: ILPResult | None = None
    root_value = None
    stack = [(lo0, up0)]
    nodes = 0
    while stack:
        if nodes >= node_limit:
            if best is not None:
                best.stage = "incumbent"
                best.nodes = nodes
                return best
            return ILPResult("node_limit", nodes=nodes)
        lo, up = stack.pop()
        nodes += 1
        shift = [bi - sum((a * l for a, l in zip(row, lo) if a and l), ZERO) for row, bi in zip(A, b)]
        ub = [None if u is None else u - l for u, l in zip(up, lo)]
        if any(u is not None and u < 0 for u in ub):
            continue
        res = simplex_exact(c, A, shift, ub)
        if res.status == "unbounded":
            return ILPResult("unbounded", nodes=nodes)
        if res.status != "optimal":
            if nodes == 1:
                return ILPResult("infeasible", nodes=nodes)
            continue
        x = [xi + li for xi, li in zip(res.x, lo)]
        val = res.value + sum((ci * li for ci, li in zip(c, lo)), ZERO)
        if nodes == 1:
            root_value = val
        if best is not None and val >= best.value:
            continue
        frac = next((j for j, xj in enumerate(x) if xj.denominator != 1), None)
        if frac is None:
            best = ILPResult("optimal", x, val, "lp_relaxation" if nodes == 1 else "certified_integral",
                             nodes, root_value)
            continue
        fl = Fraction(math.floor(x[frac]))
        up_branch = (list(lo), list(up))
        up_branch[0][frac] = fl + 1
        down_branch = (list(lo), list(up))
        down_branch[1][frac] = fl
        stack.append(up_branch)
        stack.append(down_branch)
    if best is None:
        return ILPResult("infeasible", nodes=nodes)
    if best.stage != "lp_relaxation":
        best.stage = "certified_integral"
    best.nodes = nodes
    best.lp_value = root_value
    return best


def ilp_highs(c, A, b, lower=None, upper=None, time_limit: float | None = None) -> ILPResult:
    """Same program solved by HiGHS in floating point (scipy ``milp``)."""
    from scipy.optimize import Bounds, LinearConstraint, milp
    from scipy.sparse import csr_matrix

    c = np.asarray(c, dtype=float)
    n = len(c)
    A = csr_matrix(A, dtype=float)
    b = np.asarray(b, dtype=float)
    lb = np.zeros(n) if lower is None else np.asarray([0 if v is None else v for v in lower], dtype=float)
    ub = np.full(n, np.inf) if upper is None else np.asarray(
        [np.inf if v is None else v for v in upper], dtype=float)
    opts = {"mip_rel_gap": 0.0, "presolve": True}
    if time_limit is not None:
        opts["time_limit"] = time_limit
    res = milp(c, constraints=LinearConstraint(A, b, b), integrality=np.ones(n),
               bounds=Bounds(lb, ub), options=opts)
    if res.status == 2:
        return ILPResult("infeasible")
    if res.x is None:
        return ILPResult("error")
    x = [int(round(v)) for v in res.x]
    stage = "certified_integral" if res.status == 0 else "incumbent"
    return ILPResult("optimal", x, None, stage)
