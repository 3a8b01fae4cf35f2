"""Deterministic meshes, chains and metric spaces for the experiment families."""
from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass
from fractions import Fraction

import numpy as np

from .chains import EmbeddedComplex, IntegralChain, fundamental_chain
from .errors import CapExceeded, GmtError
from .metric import FiniteMetricSpace, WeightedMeasure

ULTRAMETRIC_POINT_CAP = 4096
FAMILIES = ("torus", "ellipsoid", "sphere", "tower", "ultrametric")


@dataclass(frozen=True)
class FamilyDescriptor:
    family: str
    n: int = 1
    mesh: int = 8
    seed: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise GmtError(f"unknown family {self.family!r}")

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass
class Surface:
    """A generated closed surface: its complex, fundamental chain and optional solid ambient."""
    complex: EmbeddedComplex
    chain: IntegralChain
    ambient: EmbeddedComplex | None = None
    ambient_chain: IntegralChain | None = None


def _orient_outward(K: EmbeddedComplex, T: IntegralChain, center=None) -> IntegralChain:
    """Flip ``T`` so that its first triangle's normal points away from ``center``."""
    if not T.terms:
        return T
    pos, c = next(iter(T.terms.items()))
    s = K.simplices[2][pos]
    p = K.coords[list(s)]
    nrm = np.cross(p[1] - p[0], p[2] - p[0])
    ctr = np.zeros(3) if center is None else np.asarray(center)
    return T if c * (nrm @ (p.mean(0) - ctr)) > 0 else -T


# ------------------------------------------------------------------ sphere

def gen_sphere(mesh: int = 0) -> Surface:
    """Unit sphere by ``mesh`` rounds of midpoint subdivision of the octahedron."""
    if mesh < 0:
        raise GmtError("mesh must be >= 0")
    pts = [np.array(p, dtype=float) for p in
           [(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)]]
    tris = [(a, b, c) for a in (0, 1) for b in (2, 3) for c in (4, 5)]
    for _ in range(mesh):
        mid: dict[tuple, int] = {}

        def midpoint(u, v):
            key = (u, v) if u < v else (v, u)
            if key not in mid:
                q = pts[u] + pts[v]
                pts.append(q / np.linalg.norm(q))
                mid[key] = len(pts) - 1
            return mid[key]

        new = []
        for a, b, c in tris:
            ab, bc, ca = midpoint(a, b), midpoint(b, c), midpoint(c, a)
            new += [(a, ab, ca), (ab, b, bc), (ca, bc, c), (ab, bc, ca)]
        tris = new
    K = EmbeddedComplex.from_top(np.array(pts), tris)
    return Surface(K, _orient_outward(K, fundamental_chain(K)))


# ------------------------------------------------------------------- torus

def _staircase(lo: tuple, hi: tuple) -> list[tuple]:
    """Three tetrahedra splitting the prism ``lo x [0,1]``; ``lo``/``hi`` are matching
    vertex triples already sorted by the shared local order."""
    a0, b0, c0 = lo
    a1, b1, c1 = hi
    return [(a0, b0, c0, c1), (a0, b0, b1, c1), (a0, a1, b1, c1)]


def gen_torus(n: int = 1, mesh: int = 64, ambient: bool = False) -> Surface:
    """Flat torus ``(cos t, sin t, cos p / n, sin p / n)`` in R^4 on a ``mesh x mesh`` grid.

    With ``ambient`` the solid torus (circle times disc of radius ``1/n``) is
    tetrahedralized around it so the surface bounds.
    """
    if n < 1:
        raise GmtError("torus index n must be >= 1")
    if mesh < 8:
        raise GmtError("torus mesh must be >= 8")
    M = mesh
    th = 2 * np.pi * np.arange(M) / M
    T_, P_ = np.meshgrid(th, th, indexing="ij")
    coords = np.stack([np.cos(T_), np.sin(T_), np.cos(P_) / n, np.sin(P_) / n], -1).reshape(-1, 4)

    def v(i, j):
        return (i % M) * M + (j % M)

    def ring_order(j):
        # local order around one meridian disc: center first, then ring index
        return j % M

    tris = []
    for i in range(M):
        for j in range(M):
            lo_j, hi_j = sorted((j % M, (j + 1) % M), key=ring_order)
            # diagonal from (i, lo) to (i+1, hi), matching the prism staircase
            tris.append((v(i, lo_j), v(i, hi_j), v(i + 1, hi_j)))
            tris.append((v(i, lo_j), v(i + 1, lo_j), v(i + 1, hi_j)))
    K = EmbeddedComplex.from_top(coords, tris)
    T = fundamental_chain(K)
    if not ambient:
        return Surface(K, T)
    centers = np.stack([np.cos(th), np.sin(th), np.zeros(M), np.zeros(M)], -1)
    allc = np.vstack([coords, centers])

    def c(i):
        return M * M + (i % M)

    tets = []
    for i in range(M):
        for j in range(M):
            lo_j, hi_j = sorted((j % M, (j + 1) % M), key=ring_order)
            tets += _staircase((c(i), v(i, lo_j), v(i, hi_j)), (c(i + 1), v(i + 1, lo_j), v(i + 1, hi_j)))
    A = EmbeddedComplex.from_top(allc, tets)
    AT = IntegralChain.from_simplices(A, T.as_dict(), dim=2)
    return Surface(K, T, A, AT)


# --------------------------------------------------------------- ellipsoid

ELLIPSOID_SHELLS = (0.5, 1.0, 1.2)


def gen_ellipsoid(n: int = 1, mesh: int = 32, ambient: bool = False) -> Surface:
    """Ellipsoid ``x^2 + y^2 + n z^2 = 1`` on a longitude/latitude grid.

    ``mesh`` longitude segments and ``mesh // 2`` latitude bands. The optional
    ambient is a tetrahedralized ball: a cone over an inner shell plus prism
    layers through the surface out to a scaled copy at factor 1.2, so the
    surface is a subcomplex that bounds the inner region.
    """
    if n < 1:
        raise GmtError("ellipsoid index n must be >= 1")
    if mesh < 8 or mesh % 2:
        raise GmtError("ellipsoid mesh must be an even integer >= 8")
    M, B = mesh, mesh // 2
    s = 1.0 / math.sqrt(n)
    pts = [(0.0, 0.0, s)]
    for b in range(1, B):
        phi = math.pi * b / B
        for j in range(M):
            t = 2 * math.pi * j / M
            pts.append((math.sin(phi) * math.cos(t), math.sin(phi) * math.sin(t), s * math.cos(phi)))
    pts.append((0.0, 0.0, -s))
    base = np.array(pts)
    NP = len(base)
    south = NP - 1

    def v(b, j):
        return 1 + (b - 1) * M + (j % M)

    tris = []
    for j in range(M):
        lo, hi = sorted((v(1, j), v(1, j + 1)))
        tris.append((0, lo, hi))
        lo, hi = sorted((v(B - 1, j), v(B - 1, j + 1)))
        tris.append((lo, hi, south))
    for b in range(1, B - 1):
        for j in range(M):
            a0, a1 = v(b, j), v(b, j + 1)
            b0, b1 = v(b + 1, j), v(b + 1, j + 1)
            tris.append(tuple(sorted((a0, a1, b1))))
            tris.append(tuple(sorted((a0, b0, b1))))
    tris = [tuple(sorted(t)) for t in tris]
    # quads are split along (a0, b1); the shell staircase below must agree, which it
    # does because it orders every triangle by these same surface labels.
    K = EmbeddedComplex.from_top(base, tris)
    T = _orient_outward(K, fundamental_chain(K))
    if not ambient:
        return Surface(K, T)
    shells = ELLIPSOID_SHELLS
    surf_idx = shells.index(1.0)
    layers = []
    coords = [base]
    for k, sc in enumerate(shells):
        if k == surf_idx:
            layers.append(0)
        else:
            layers.append(len(np.vstack(coords)))
            coords.append(base * sc)
    center = len(np.vstack(coords))
    coords.append(np.zeros((1, 3)))
    allc = np.vstack(coords)
    tets = []
    for t in tris:
        tets.append((center,) + tuple(layers[0] + x for x in t))
        for k in range(len(shells) - 1):
            tets += _staircase(tuple(layers[k] + x for x in t), tuple(layers[k + 1] + x for x in t))
    A = EmbeddedComplex.from_top(allc, tets)
    AT = IntegralChain.from_simplices(A, T.as_dict(), dim=2)
    return Surface(K, T, A, AT)


def ellipsoid_volume(n: int) -> float:
    return 4.0 / 3.0 * math.pi / math.sqrt(n)


# ------------------------------------------------------------- ultrametric

def _ultrametric_base(N: int, m: int) -> Fraction | None:
    """``N^(-1/m)`` as a rational when ``N`` is a perfect m-th power, else None."""
    L = round(N ** (1.0 / m))
    for c in (L - 1, L, L + 1):
        if c >= 1 and c ** m == N:
            return Fraction(1, c)
    return None


class UltrametricSpace(FiniteMetricSpace):
    """Words of length ``depth`` over ``N`` letters with ``d = a^j``.

    ``j`` is the first index (1-based) where two words differ and
    ``a = N^(-1/m)``. ``exponents`` stores ``j`` exactly (0 on the diagonal).
    """

    def __init__(self, N: int, m: int, depth: int, cap: int = ULTRAMETRIC_POINT_CAP):
        if N < 2 or m < 1 or depth < 1:
            raise GmtError("ultrametric space needs N >= 2, m >= 1, depth >= 1")
        if N ** depth > cap:
            raise CapExceeded(f"{N}^{depth} points exceed the cap of {cap}")
        words = list(itertools.product(range(1, N + 1), repeat=depth))
        W = np.array(words, dtype=np.int64)
        diff = W[:, None, :] != W[None, :, :]
        any_diff = diff.any(-1)
        first = np.where(any_diff, diff.argmax(-1) + 1, 0)
        self.N, self.m, self.depth = N, m, depth
        self.a_exact = _ultrametric_base(N, m)
        self.a = float(self.a_exact) if self.a_exact is not None else N ** (-1.0 / m)
        self.exponents = first
        self.exponents.setflags(write=False)
        D = np.where(first > 0, self.a ** first.astype(float), 0.0)
        exact = self.a_exact is not None and (self.a_exact.denominator & (self.a_exact.denominator - 1)) == 0
        super().__init__(D, labels=words, ultrametric=True, exact=exact,
                         validate=len(words) <= 400)

    def exact_value(self, i: int, j: int) -> Fraction:
        e = int(self.exponents[i, j])
        if e == 0:
            return Fraction(0)
        if self.a_exact is not None:
            return self.a_exact ** e
        return Fraction(float(self.dist[i, j]))


def gen_ultrametric(N: int, m: int, depth: int, cap: int = ULTRAMETRIC_POINT_CAP) -> UltrametricSpace:
    return UltrametricSpace(N, m, depth, cap)


def frostman_weights(N: int, depth: int, X: FiniteMetricSpace | None = None) -> WeightedMeasure:
    """Uniform cylinder measure: every word of length ``depth`` gets ``N^-depth``."""
    count = N ** depth
    if X is not None and X.n != count:
        raise GmtError(f"space has {X.n} points, measure expects {count}")
    w = Fraction(1, count)
    return WeightedMeasure(np.full(count, float(w)), exact=[w] * count)


def regenerate(desc: FamilyDescriptor, **kw):
    if desc.family == "torus":
        return gen_torus(desc.n, desc.mesh, **kw)
    if desc.family == "ellipsoid":
        return gen_ellipsoid(desc.n, desc.mesh, **kw)
    if desc.family == "sphere":
        return gen_sphere(desc.mesh)
    raise GmtError(f"family {desc.family!r} is not a surface family")
