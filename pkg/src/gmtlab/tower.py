"""Stacked-tower polyhedral spaces with a concave contractibility function.

Stage ``n`` starts from the square ``[0, L lam]^m`` cut into ``N = L^m``
cells. On every cell sits a box of side ``lam^k`` and height ``a^k`` with its
base removed; on each roof the centred block of ``L^m`` cells of side
``lam^(k+1)`` carries the next stage. The space is realized in R^3 (``m = 2``)
as a union of rectangles; sibling walls that touch in R^3 are kept apart by
keying vertices on the sheet (tower) they belong to, so the metric is the
length metric of the glued space, approximated by shortest paths through a
graph that joins all boundary samples of each flat face.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import dijkstra

from .errors import CapExceeded, GmtError
from .metric import FiniteMetricSpace

MAX_STAGE = 4


@dataclass(frozen=True)
class TowerParams:
    m: int = 2
    L: int = 2
    alpha: float = 0.5
    n: int = 2
    mesh: int = 2

    def __post_init__(self):
        if self.m < 2 or self.L < 2:
            raise GmtError("tower needs m >= 2 and L >= 2")
        if self.n < 0 or self.mesh < 1:
            raise GmtError("stage n must be >= 0 and mesh >= 1")
        if self.alpha <= 0:
            raise GmtError("alpha must lie in (0, 1)")
        # mu < 1 holds for every alpha in (0, 1); alpha >= 1 is reported through mu
        if self.mu >= 1:
            raise GmtError(f"mu = a N lam^(m-1) = {self.mu:.6g} must be < 1")
        if self.alpha >= 1:
            raise GmtError("alpha must lie in (0, 1)")

    @property
    def a(self) -> float:
        return 1.0 / self.L

    @property
    def N(self) -> int:
        return self.L ** self.m

    @property
    def lam(self) -> float:
        return self.a ** (1.0 / self.alpha)

    @property
    def mu(self) -> float:
        return self.a * self.N * self.lam ** (self.m - 1)


@dataclass
class TowerFormulas:
    area_closed_form: float
    contractibility_C: float
    params: TowerParams

    def rho_at(self, s: float) -> float:
        p = self.params
        if not 0 <= s < p.lam / 2:
            raise GmtError(f"s = {s} outside the domain [0, {p.lam / 2:.6g})")
        return self.contractibility_C * s ** p.alpha

    def contraction_radius(self, s: float) -> float:
        """Worst-case ``lam^k + a^k (m+1)/(1-a)`` for ``lam^(k+1) <= 2s < lam^k``."""
        p = self.params
        if not 0 < s < p.lam / 2:
            raise GmtError(f"s = {s} outside the domain (0, {p.lam / 2:.6g})")
        k = math.floor(math.log(2 * s) / math.log(p.lam))
        while p.lam ** (k + 1) > 2 * s:
            k += 1
        while p.lam ** k <= 2 * s:
            k -= 1
        return p.lam ** k + p.a ** k * (p.m + 1) / (1 - p.a)


def tower_formulas(p: TowerParams) -> TowerFormulas:
    area = (p.L * p.lam) ** p.m + 2 * p.m * sum(p.mu ** k for k in range(1, p.n + 1))
    C = 2 ** p.alpha * (p.m + 2 - p.a) / (1 - p.a) * p.L
    return TowerFormulas(area, C, p)


@dataclass
class Tower:
    tid: int
    k: int
    origin: tuple
    base_h: float
    parent: int


@dataclass
class TowerSpace:
    params: TowerParams
    coords: np.ndarray
    edges: np.ndarray
    weights: np.ndarray
    faces: list
    towers: list
    markers: dict = field(default_factory=dict)

    @property
    def n_vertices(self) -> int:
        return len(self.coords)

    @property
    def facet_area(self) -> float:
        return math.fsum(w * h for _, w, h in self.faces)

    def graph(self):
        n = self.n_vertices
        e = self.edges
        G = coo_matrix((np.r_[self.weights, self.weights], (np.r_[e[:, 0], e[:, 1]], np.r_[e[:, 1], e[:, 0]])),
                       shape=(n, n)).tocsr()
        return G

    def distances_from(self, sources) -> np.ndarray:
        return dijkstra(self.graph(), indices=np.asarray(sources, dtype=int))

    def metric_space(self, vertices=None) -> FiniteMetricSpace:
        """Graph metric restricted to ``vertices`` (default: all marker vertices)."""
        if vertices is None:
            vertices = sorted({v for ms in self.markers.values() for v in ms})
        vertices = list(vertices)
        D = self.distances_from(vertices)[:, vertices]
        D = np.minimum(D, D.T)
        np.fill_diagonal(D, 0.0)
        return FiniteMetricSpace(D, labels=vertices, validate=False)


def gen_tower(p: TowerParams) -> TowerSpace:
    if p.m != 2:
        raise GmtError("only m = 2 towers are realized")
    if p.n > MAX_STAGE:
        raise CapExceeded(f"stage {p.n} exceeds the cap {MAX_STAGE}")
    lam, a, L = p.lam, p.a, p.L
    unit = lam ** p.n if p.n >= 1 else L * lam

    keys: dict[tuple, int] = {}
    coords: list[tuple] = []
    edges: dict[tuple, float] = {}
    faces: list[tuple] = []
    towers: list[Tower] = []
    markers: dict[str, list[int]] = {}

    def vid(sheet, pt) -> int:
        key = (sheet,) + tuple(round(c, 11) for c in pt)
        i = keys.get(key)
        if i is None:
            i = len(coords)
            keys[key] = i
            coords.append(tuple(float(c) for c in pt))
        return i

    def segment(P, Q, sheet_of, mesh=p.mesh):
        """Sample a segment (canonical direction) and return vertex ids in order."""
        P, Q = np.asarray(P, float), np.asarray(Q, float)
        flip = tuple(np.round(Q, 11)) < tuple(np.round(P, 11))
        if flip:
            P, Q = Q, P
        length = float(np.linalg.norm(Q - P))
        cnt = mesh * max(1, math.ceil(length / unit - 1e-9))
        ids = [vid(sheet_of(pt), pt) for pt in (P + (Q - P) * i / cnt for i in range(cnt + 1))]
        return ids[::-1] if flip else ids

    def face(corners, breaks, sheet_of, register=True):
        """Rectangle given by 4 corners in cyclic order; ``breaks[i]`` lists interior
        breakpoints (fractions) on side i. Joins all boundary samples pairwise."""
        ids = []
        for i in range(4):
            P, Q = np.asarray(corners[i], float), np.asarray(corners[(i + 1) % 4], float)
            ts = [0.0] + sorted(breaks[i]) + [1.0]
            for t0, t1 in zip(ts, ts[1:]):
                ids += segment(P + (Q - P) * t0, P + (Q - P) * t1, sheet_of)
        ids = sorted(set(ids))
        X = np.array([coords[i] for i in ids])
        for u in range(len(ids)):
            d = np.linalg.norm(X[u + 1:] - X[u], axis=1)
            for w, dw in zip(ids[u + 1:], d):
                key = (ids[u], w)
                if key not in edges or dw < edges[key]:
                    edges[key] = float(dw)
        if register:
            w = float(np.linalg.norm(np.subtract(corners[1], corners[0])))
            h = float(np.linalg.norm(np.subtract(corners[3], corners[0])))
            faces.append((len(faces), w, h))
        return ids

    def marker_points(corners, breaks, sheet_of):
        out = set()
        for i in range(4):
            P, Q = np.asarray(corners[i], float), np.asarray(corners[(i + 1) % 4], float)
            ts = [0.0] + sorted(breaks[i]) + [1.0]
            for t0, t1 in zip(ts, ts[1:]):
                out.update(segment(P + (Q - P) * t0, P + (Q - P) * t1, sheet_of, mesh=1))
        return out

    side0 = L * lam
    if p.n == 0:
        sq = [(0, 0, 0), (side0, 0, 0), (side0, side0, 0), (0, side0, 0)]
        face(sq, [[j / L for j in range(1, L)]] * 4, lambda pt: -1)
        markers["X0"] = sorted(range(len(coords)))
        return _finish(p, coords, edges, faces, towers, markers)

    def roof_grid(w, k):
        """Fractions of the roof side where the next-stage grid lines sit."""
        if k >= p.n:
            return []
        cell = lam ** (k + 1)
        margin = (w - L * cell) / 2
        return [(margin + j * cell) / w for j in range(L + 1)]

    def build(k, origin, base_h, parent):
        tid = len(towers)
        towers.append(Tower(tid, k, origin, base_h, parent))
        w, h = lam ** k, a ** k
        x0, y0 = origin
        top = base_h + h

        def sheet_of(pt, tid=tid, parent=parent, base_h=base_h):
            return parent if abs(pt[2] - base_h) < 1e-12 else tid

        grid = roof_grid(w, k)
        b = [(x0, y0), (x0 + w, y0), (x0 + w, y0 + w), (x0, y0 + w)]
        base_ring, roof_pts = set(), set()
        for i in range(4):
            (ax, ay), (bx, by) = b[i], b[(i + 1) % 4]
            corners = [(ax, ay, base_h), (bx, by, base_h), (bx, by, top), (ax, ay, top)]
            top_breaks = [1 - t for t in grid] if i >= 2 else grid
            breaks = [[], [], sorted(1 - t for t in top_breaks), []]
            face(corners, breaks, sheet_of)
            mk = marker_points(corners, breaks, sheet_of)
            base_ring |= {v for v in mk if abs(coords[v][2] - base_h) < 1e-12}
        # roof pieces
        cuts = [0.0] + grid + [1.0] if grid else [0.0, 1.0]
        nc = len(cuts) - 1
        centre = set(range(1, nc - 1)) if grid else set()
        for i in range(nc):
            for j in range(nc):
                if i in centre and j in centre:
                    continue
                xa, xb = x0 + cuts[i] * w, x0 + cuts[i + 1] * w
                ya, yb = y0 + cuts[j] * w, y0 + cuts[j + 1] * w
                corners = [(xa, ya, top), (xb, ya, top), (xb, yb, top), (xa, yb, top)]
                face(corners, [[], [], [], []], sheet_of)
                roof_pts |= marker_points(corners, [[], [], [], []], sheet_of)
        markers[f"tower{tid}_k{k}_base"] = sorted(base_ring)
        markers[f"tower{tid}_k{k}_roof"] = sorted(roof_pts)
        if grid:
            cell = lam ** (k + 1)
            start = grid[0] * w
            for i in range(L):
                for j in range(L):
                    build(k + 1, (x0 + start + i * cell, y0 + start + j * cell), top, tid)

    for i in range(L):
        for j in range(L):
            build(1, (i * lam, j * lam), 0.0, -1)
    return _finish(p, coords, edges, faces, towers, markers)


def _finish(p, coords, edges, faces, towers, markers) -> TowerSpace:
    E = np.array(sorted(edges), dtype=np.int64).reshape(-1, 2)
    W = np.array([edges[tuple(e)] for e in E], dtype=float)
    return TowerSpace(p, np.array(coords), E, W, faces, towers, markers)


@dataclass
class SandwichRecord:
    tower: int
    k: int
    d_min: float
    d_max: float
    lower: float
    upper: float


def base_roof_distances(X: TowerSpace) -> list[SandwichRecord]:
    """Min and max graph distance from each tower's base ring to its roof."""
    out = []
    p = X.params
    G = X.graph()
    for t in X.towers:
        base = X.markers[f"tower{t.tid}_k{t.k}_base"]
        roof = X.markers[f"tower{t.tid}_k{t.k}_roof"]
        D = dijkstra(G, indices=np.asarray(base))[:, roof]
        out.append(SandwichRecord(t.tid, t.k, float(D.min()), float(D.max()),
                                  p.a ** t.k, (p.m + 1) * p.a ** t.k))
    return out


def diameter_upper(X: TowerSpace, source: int = 0) -> float:
    """``2 * eccentricity(source)``, an upper bound on the graph diameter."""
    d = dijkstra(X.graph(), indices=[source])[0]
    return 2 * float(d.max())
