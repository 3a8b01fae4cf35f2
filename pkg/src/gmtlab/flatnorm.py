"""Filling volume, flat norm and Rips filling radius.

Fillings are integer programs over the simplices of an ambient complex:
variables are the positive and negative parts of the filling chain ``S``
(and of the remainder ``X`` for the flat norm), costs are simplex volumes.
Small programs are solved exactly over the rationals; large ones go to HiGHS.
Either way the returned witness is re-checked in integer arithmetic.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np
from scipy import sparse

from .chains import EmbeddedComplex, IntegralChain, boundary, mass, perm_sign
from .errors import CapExceeded, ComplexError, NotNullHomologous
from .lp import ilp_exact, ilp_highs

EXACT_VAR_CAP = 400
RIPS_SIMPLEX_CAP = 200_000
GRID_RTOL = 1e-9


@dataclass
class FillingProblem:
    ambient: EmbeddedComplex
    target: IntegralChain
    objective: str = "fill_volume"
    coefficient_bound: int | None = None

    def __post_init__(self):
        if self.objective not in ("fill_volume", "flat_norm"):
            raise ComplexError(f"unknown objective {self.objective!r}")
        if self.target.complex is not self.ambient:
            raise ComplexError("target must live on the ambient complex")
        if self.objective == "fill_volume" and self.target.dim >= 1 and not boundary(self.target).is_zero():
            raise ComplexError("fill_volume target must be a cycle")


@dataclass
class FillingWitness:
    S: IntegralChain
    X: IntegralChain
    value: float
    value_exact: Fraction
    optimality: str
    solver: str = "exact"
    meta: dict = field(default_factory=dict)

    def verify(self, target: IntegralChain) -> bool:
        """Exact integer re-check of ``target = X + dS`` and of the value."""
        # with no (m+1)-simplices in the ambient, S is an empty placeholder
        if self.S.dim == target.dim + 1:
            dS = boundary(self.S)
        elif self.S.is_zero():
            dS = IntegralChain(target.complex, target.dim)
        else:
            return False
        if (self.X + dS) != target:
            return False
        v = _exact_mass(self.S) + _exact_mass(self.X)
        return v == self.value_exact


def _exact_mass(T: IntegralChain) -> Fraction:
    vol = T.complex.volumes(T.dim) if T.dim <= T.complex.dim else np.zeros(0)
    return sum((abs(c) * Fraction(float(vol[p])) for p, c in T.terms.items()), Fraction(0))


def _boundary_matrix(K: EmbeddedComplex, k: int) -> sparse.csc_matrix:
    """Matrix of the boundary map from k-chains to (k-1)-chains."""
    rows, cols, vals = [], [], []
    for pos, s in enumerate(K.simplices[k]):
        for i in range(len(s)):
            fpos, sign = K.lookup(s[:i] + s[i + 1:])
            rows.append(fpos)
            cols.append(pos)
            vals.append((-1) ** i * sign)
    shape = (K.count(k - 1), K.count(k))
    return sparse.csc_matrix((vals, (rows, cols)), shape=shape, dtype=np.int64)


def _solve(P: FillingProblem, solver: str) -> FillingWitness:
    K, T = P.ambient, P.target
    m = T.dim
    flat = P.objective == "flat_norm"
    nS = K.count(m + 1)
    nX = K.count(m) if flat else 0
    zero_S = IntegralChain(K, m + 1) if m + 1 <= K.dim else None
    if T.is_zero() or (nS == 0 and not flat):
        if not T.is_zero():
            raise NotNullHomologous("target not null-homologous in ambient")
        S = zero_S if zero_S is not None else IntegralChain(K, m)
        return FillingWitness(S, IntegralChain(K, m), 0.0, Fraction(0), "certified_integral", "trivial")

    D = _boundary_matrix(K, m + 1) if nS else sparse.csc_matrix((K.count(m), 0), dtype=np.int64)
    I = sparse.identity(K.count(m), dtype=np.int64, format="csc")
    blocks = [D, -D] + ([I, -I] if flat else [])
    A = sparse.hstack(blocks, format="csr")
    volS = K.volumes(m + 1) if nS else np.zeros(0)
    volX = K.volumes(m) if flat else np.zeros(0)
    costs_f = np.concatenate([volS, volS, volX, volX])
    b = np.zeros(K.count(m), dtype=np.int64)
    for p, c in T.terms.items():
        b[p] = c
    nvar = A.shape[1]
    upper = None
    if P.coefficient_bound is not None:
        cb = int(P.coefficient_bound)
        upper = [cb] * (2 * nS) + [None] * (2 * nX)

    if solver == "auto":
        solver = "exact" if nvar <= EXACT_VAR_CAP else "highs"
    if solver == "exact":
        # drop rows that are identically zero with zero rhs
        dense = A.toarray()
        keep = [i for i in range(dense.shape[0]) if dense[i].any() or b[i]]
        if any(not dense[i].any() for i in keep):
            raise NotNullHomologous("target not null-homologous in ambient")
        costs = [Fraction(float(v)) for v in costs_f]
        res = ilp_exact(costs, dense[keep].tolist(), b[keep].tolist(), upper=upper)
        if res.status == "infeasible":
            raise NotNullHomologous("target not null-homologous in ambient")
        if res.status != "optimal":
            raise ComplexError(f"filling solve ended with status {res.status}")
        x = [int(v) for v in res.x]
        stage = res.stage
    elif solver == "highs":
        x, stage = _solve_highs(A, b, costs_f, upper)
    else:
        raise ComplexError(f"unknown solver {solver!r}")

    s = np.asarray(x[:nS], dtype=np.int64) - np.asarray(x[nS:2 * nS], dtype=np.int64)
    S = IntegralChain(K, m + 1, {i: int(v) for i, v in enumerate(s) if v}) if nS else IntegralChain(K, m)
    if flat:
        xx = np.asarray(x[2 * nS:2 * nS + nX], dtype=np.int64) - np.asarray(x[2 * nS + nX:], dtype=np.int64)
        X = IntegralChain(K, m, {i: int(v) for i, v in enumerate(xx) if v})
    else:
        X = IntegralChain(K, m)
    value_exact = _exact_mass(S) + _exact_mass(X)
    value = float(mass(S).total + mass(X).total) if nS else float(mass(X).total)
    W = FillingWitness(S, X, value, value_exact, stage, solver)
    if not W.verify(T):
        raise ComplexError("filling witness failed exact verification")
    return W


def _solve_highs(A, b, costs, upper):
    """LP relaxation first; fall back to the MILP when it is fractional."""
    from scipy.optimize import linprog

    n = A.shape[1]
    bounds = [(0, None)] * n if upper is None else [(0, u) for u in upper]
    lp = linprog(costs, A_eq=A, b_eq=b, bounds=bounds, method="highs")
    if lp.status == 2:
        raise NotNullHomologous("target not null-homologous in ambient")
    if lp.status == 0:
        xr = np.round(lp.x)
        if np.all(np.abs(lp.x - xr) <= 1e-9) and np.array_equal(A @ xr.astype(np.int64), b):
            return [int(v) for v in xr], "lp_relaxation"
    res = ilp_highs(costs, A, b, upper=upper)
    if res.status == "infeasible":
        raise NotNullHomologous("target not null-homologous in ambient")
    if res.status != "optimal":
        raise ComplexError(f"HiGHS ended with status {res.status}")
    return res.x, res.stage


def filling_volume(P: FillingProblem | IntegralChain, ambient: EmbeddedComplex | None = None,
                   solver: str = "auto", coefficient_bound: int | None = None) -> FillingWitness:
    """Least-mass integer (m+1)-chain ``S`` with ``dS = target``."""
    if isinstance(P, IntegralChain):
        P = FillingProblem(ambient or P.complex, P, "fill_volume", coefficient_bound)
    if P.objective != "fill_volume":
        P = FillingProblem(P.ambient, P.target, "fill_volume", P.coefficient_bound)
    return _solve(P, solver)


def flat_norm(T: IntegralChain, ambient: EmbeddedComplex | None = None, solver: str = "auto",
              coefficient_bound: int | None = None) -> FillingWitness:
    """Minimum of ``mass(X) + mass(S)`` over integer decompositions ``T = X + dS``."""
    P = FillingProblem(ambient or T.complex, T, "flat_norm", coefficient_bound)
    return _solve(P, solver)


def flat_distance(T1: IntegralChain, T2: IntegralChain, **kw) -> float:
    return flat_norm(T1 - T2, **kw).value


# ---------------------------------------------------------------- Rips

def _pairwise(X) -> np.ndarray:
    if hasattr(X, "dist"):
        return np.asarray(X.dist, dtype=float)
    return np.asarray(X, dtype=float)


def rips_complex(X, r: float, max_dim: int = 3, cap: int = RIPS_SIMPLEX_CAP,
                 volume_fn: Callable[[tuple], float] | None = None) -> EmbeddedComplex:
    """Abstract Vietoris-Rips complex: all vertex sets of diameter <= r, up to ``max_dim``."""
    if r < 0:
        raise ComplexError("rips scale must be nonnegative")
    D = _pairwise(X)
    n = D.shape[0]
    adj = [set(np.nonzero(D[i] <= r)[0].tolist()) - {i} for i in range(n)]
    simp: dict[int, list[tuple]] = {0: [(i,) for i in range(n)]}
    total = n
    layer = [(i,) for i in range(n)]
    for k in range(1, max_dim + 1):
        nxt = []
        for s in layer:
            common = set.intersection(*(adj[v] for v in s))
            for v in sorted(common):
                if v > s[-1]:
                    nxt.append(s + (v,))
        total += len(nxt)
        if total > cap:
            raise CapExceeded(f"rips complex has more than {cap} simplices ({total} so far)")
        if not nxt:
            break
        simp[k] = nxt
        layer = nxt
    return EmbeddedComplex(None, simp, n_vertices=n, volume_fn=volume_fn, validate=False)


class _RationalReducer:
    """Incremental column basis over Q with distinct pivots (largest row index)."""

    def __init__(self):
        self.pivots: dict[int, dict[int, Fraction]] = {}

    def reduce(self, col: dict[int, Fraction]) -> dict[int, Fraction]:
        col = dict(col)
        while col:
            low = max(col)
            basis = self.pivots.get(low)
            if basis is None:
                return col
            f = col[low]
            for row, v in basis.items():
                nv = col.get(row, 0) - f * v
                if nv:
                    col[row] = nv
                else:
                    col.pop(row, None)
        return col

    def add(self, col: dict[int, Fraction]) -> bool:
        col = self.reduce(col)
        if not col:
            return False
        low = max(col)
        inv = 1 / col[low]
        self.pivots[low] = {r: v * inv for r, v in col.items()}
        return True


@dataclass
class FillRadiusResult:
    value: float
    halved: float
    grid: list
    index: int | None
    coefficients: str = "rational"
    vertices: list = field(default_factory=list)


def filling_radius(T: IntegralChain, r_grid: Sequence[float] | None = None, max_dim: int = 2,
                   metric: np.ndarray | None = None) -> FillRadiusResult:
    """Smallest grid scale at which the cycle ``T`` bounds in the Rips complex of its vertices.

    The homology test is an exact rational column reduction, run incrementally
    as simplices enter in order of diameter. ``value`` is ``inf`` when the
    cycle never bounds on the grid.
    """
    m = T.dim
    if m + 1 > max_dim:
        raise ComplexError("max_dim must exceed the cycle dimension")
    K = T.complex
    if m >= 1 and not boundary(T).is_zero():
        raise ComplexError("filling radius needs a cycle")
    V = sorted({v for p in T.terms for v in K.simplices[m][p]})
    if metric is None:
        if K.coords is None:
            raise ComplexError("abstract complex needs an explicit metric")
        P = K.coords[V]
        diff = P[:, None, :] - P[None, :, :]
        D = np.abs(diff).max(-1) if K.norm == "sup" else np.sqrt((diff ** 2).sum(-1))
    else:
        D = np.asarray(metric, dtype=float)[np.ix_(V, V)]
    local = {v: i for i, v in enumerate(V)}
    tsimp = {tuple(local[v] for v in K.simplices[m][p]): c for p, c in T.terms.items()}
    t_diam = max((max((D[a, b] for a, b in itertools.combinations(s, 2)), default=0.0)
                  for s in tsimp), default=0.0)
    n = len(V)
    if r_grid is None:
        iu = np.triu_indices(n, 1)
        dists = np.unique(D[iu]) if n > 1 else np.zeros(0)
        # merge distances equal up to rounding; keep the largest of each cluster
        merged: list[float] = []
        for d in dists:
            if merged and d <= merged[-1] * (1 + GRID_RTOL):
                merged[-1] = float(d)
            else:
                merged.append(float(d))
        r_grid = [float(t_diam)] + [d for d in merged if d > t_diam * (1 + GRID_RTOL)]
    grid = sorted(float(r) for r in r_grid)
    if not grid:
        raise ComplexError("empty radius grid")
    if T.is_zero():
        return FillRadiusResult(grid[0], grid[0] / 2, grid, 0, vertices=V)
    if t_diam > grid[0] * (1 + GRID_RTOL):
        raise ComplexError("cycle is not supported on the Rips complex at the smallest grid value")

    # candidate m- and (m+1)-simplices with their diameters, sorted for entry order
    def diam(s):
        return max(D[a, b] for a, b in itertools.combinations(s, 2))

    r_max = grid[-1]
    adj = [set(np.nonzero(D[i] <= r_max)[0].tolist()) - {i} for i in range(n)]
    faces_m = {}
    cofaces = []
    for s in _cliques(adj, m + 1):
        faces_m[s] = len(faces_m)
    for s in _cliques(adj, m + 2):
        cofaces.append((diam(s), s))
        if len(cofaces) > RIPS_SIMPLEX_CAP:
            raise CapExceeded(f"rips complex has more than {RIPS_SIMPLEX_CAP} candidate simplices")
    cofaces.sort()
    # order m-simplices so that row index follows entry order (pivot = latest face)
    order = sorted(faces_m, key=lambda s: (diam(s) if m >= 1 else 0.0, s))
    row = {s: i for i, s in enumerate(order)}
    z: dict[int, Fraction] = {}
    for s, c in tsimp.items():
        key = tuple(sorted(s))
        z[row[key]] = z.get(row[key], 0) + Fraction(c * perm_sign(s))
    z = {k: v for k, v in z.items() if v}
    red = _RationalReducer()
    j = 0
    for gi, r in enumerate(grid):
        while j < len(cofaces) and cofaces[j][0] <= r * (1 + GRID_RTOL):
            s = cofaces[j][1]
            col = {}
            for i in range(len(s)):
                col[row[s[:i] + s[i + 1:]]] = Fraction((-1) ** i)
            red.add(col)
            j += 1
        z = red.reduce(z)
        if not z:
            return FillRadiusResult(r, r / 2, grid, gi, vertices=V)
    return FillRadiusResult(math.inf, math.inf, grid, None, vertices=V)


def _cliques(adj: list[set], size: int):
    """All sorted cliques with ``size`` vertices in the graph ``adj``."""
    n = len(adj)
    if size == 1:
        yield from ((i,) for i in range(n))
        return

    def extend(s, cand):
        if len(s) == size:
            yield s
            return
        for v in sorted(cand):
            if v > s[-1]:
                yield from extend(s + (v,), cand & adj[v])

    for i in range(n):
        yield from extend((i,), adj[i])
