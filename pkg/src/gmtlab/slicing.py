"""Restriction of chains to closed balls and slicing by the distance function."""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .chains import EmbeddedComplex, IntegralChain, boundary, mass, restrict_barycenter
from .errors import ComplexError

ARC_STEP = math.pi / 16
NUDGE = 1e-9


class _BallClipper:
    """Cuts simplices of one complex against the closed ball ``B(z, r)``.

    New vertices are keyed so that cuts shared by several simplices (edge
    crossings) resolve to a single vertex; all chains clipped by one instance
    therefore land on a common refined complex.
    """

    def __init__(self, K: EmbeddedComplex, z, r: float, arc_step: float):
        self.K = K
        self.z = np.asarray(z, dtype=float)
        self.r = float(r)
        self.arc_step = float(arc_step)
        self.coords = [row for row in K.coords]
        self.keys: dict[tuple, int] = {}
        self.d = K.distance_to(self.z, K.coords)
        self.inside = self.d <= self.r
        self._crossings: dict[tuple, list] = {}
        self.tops: list[tuple] = []

    def vertex(self, key, point) -> int:
        idx = self.keys.get(key)
        if idx is None:
            idx = len(self.coords)
            self.coords.append(np.asarray(point, dtype=float))
            self.keys[key] = idx
        return idx

    def crossings(self, a: int, b: int) -> list[tuple[int, str]]:
        """Sphere crossings on edge a->b as ``(vertex, 'enter'|'exit')`` in travel order."""
        u, w = (a, b) if a < b else (b, a)
        key = (u, w)
        if key not in self._crossings:
            pu, pw = self.K.coords[u], self.K.coords[w]
            e, f = pw - pu, pu - self.z
            A, B, C = e @ e, 2 * (e @ f), f @ f - self.r ** 2
            out = []
            disc = B * B - 4 * A * C
            if disc > 0:
                sq = math.sqrt(disc)
                roots = sorted(((-B - sq) / (2 * A), (-B + sq) / (2 * A)))
                iu, iw = self.inside[u], self.inside[w]
                if iu and not iw:
                    picks = [(roots[1], "exit")]
                elif iw and not iu:
                    picks = [(roots[0], "enter")]
                elif not iu and not iw and 0 < roots[0] and roots[1] < 1:
                    picks = [(roots[0], "enter"), (roots[1], "exit")]
                else:
                    picks = []
                for j, (t, kind) in enumerate(picks):
                    t = min(max(t, 0.0), 1.0)
                    out.append((self.vertex(("e", u, w, j), pu + t * e), kind))
            self._crossings[key] = out
        out = self._crossings[key]
        if (a, b) == key:
            return list(out)
        flip = {"enter": "exit", "exit": "enter"}
        return [(v, flip[k]) for v, k in reversed(out)]

    def clip_edge(self, s: tuple) -> list[tuple]:
        a, b = s
        pts = []
        if self.inside[a]:
            pts.append(a)
        for v, kind in self.crossings(a, b):
            pts.append(v)
        if self.inside[b]:
            pts.append(b)
        return [(pts[i], pts[i + 1]) for i in range(0, len(pts) - 1, 2)]

    def clip_triangle(self, pos: int, s: tuple) -> list[tuple]:
        K = self.K
        if all(self.inside[v] for v in s):
            return [s]
        p0, p1, p2 = (K.coords[v] for v in s)
        e1 = p1 - p0
        e1 = e1 / np.linalg.norm(e1)
        e2 = (p2 - p0) - ((p2 - p0) @ e1) * e1
        e2 = e2 / np.linalg.norm(e2)
        zc = self.z - p0
        c2 = np.array([zc @ e1, zc @ e2])
        rho2 = self.r ** 2 - (zc @ zc - c2 @ c2)
        if rho2 <= 0:
            return []
        rho = math.sqrt(rho2)

        def angle(v):
            q = self.coords[v] - p0
            return math.atan2(q @ e2 - c2[1], q @ e1 - c2[0])

        def arc_point(j, th):
            loc = c2 + rho * np.array([math.cos(th), math.sin(th)])
            return self.vertex(("a", pos, j), p0 + loc[0] * e1 + loc[1] * e2)

        events: list[tuple[int, str]] = []
        for i in range(3):
            a, b = s[i], s[(i + 1) % 3]
            if self.inside[a]:
                events.append((a, "vertex"))
            events.extend(self.crossings(a, b))

        n_arc = 0
        if not events:
            loc2 = [np.array([(K.coords[v] - p0) @ e1, (K.coords[v] - p0) @ e2]) for v in s]
            if not _point_in_triangle(c2, *loc2):
                return []
            steps = max(3, math.ceil(2 * math.pi / self.arc_step))
            poly = [arc_point(j, 2 * math.pi * j / steps) for j in range(steps)]
        else:
            poly = []
            k = len(events)
            for i, (v, kind) in enumerate(events):
                poly.append(v)
                if kind == "exit":
                    nxt = events[(i + 1) % k][0]
                    t0, t1 = angle(v), angle(nxt)
                    span = (t1 - t0) % (2 * math.pi)
                    steps = max(1, math.ceil(span / self.arc_step))
                    for j in range(1, steps):
                        poly.append(arc_point(n_arc, t0 + span * j / steps))
                        n_arc += 1
        dedup = [v for i, v in enumerate(poly) if v != poly[i - 1]] if len(poly) > 1 else poly
        if len(dedup) < 3:
            return []
        if len(dedup) == 3 and set(dedup) == set(s):
            return [s]
        center = np.mean([self.coords[v] for v in dedup], axis=0)
        c = self.vertex(("c", pos), center)
        return [(c, dedup[i], dedup[(i + 1) % len(dedup)]) for i in range(len(dedup))]

    def clip(self, T: IntegralChain) -> dict[tuple, int]:
        lst = self.K.simplices[T.dim]
        out: dict[tuple, int] = {}
        if not T.terms:
            return out
        # a simplex meeting the ball has a vertex within r + (its longest edge)
        pos_arr = np.fromiter(T.terms, dtype=int)
        S = np.asarray(lst, dtype=int)[pos_arr]
        dv = self.d[S]
        reach = self.r
        if T.dim >= 1:
            P = self.K.coords[S]
            reach = self.r + np.max(np.linalg.norm(P[:, :, None, :] - P[:, None, :, :], axis=-1), axis=(1, 2))
        near = dv.min(axis=1) <= reach
        for pos in pos_arr[near].tolist():
            c = T.terms[pos]
            s = lst[pos]
            if T.dim == 0:
                pieces = [s] if self.inside[s[0]] else []
            elif T.dim == 1:
                pieces = self.clip_edge(s)
            else:
                pieces = self.clip_triangle(pos, s)
            for piece in pieces:
                out[piece] = out.get(piece, 0) + c
        return out


def _point_in_triangle(p, a, b, c) -> bool:
    def cross(o, u, v):
        return (u[0] - o[0]) * (v[1] - o[1]) - (u[1] - o[1]) * (v[0] - o[0])
    d1, d2, d3 = cross(a, b, p), cross(b, c, p), cross(c, a, p)
    return (d1 >= 0 and d2 >= 0 and d3 >= 0) or (d1 <= 0 and d2 <= 0 and d3 <= 0)


def _nudged_radius(chains, z, r: float) -> float:
    K = chains[0].complex
    verts = sorted(set().union(*(
        {v for p in T.terms for v in K.simplices[T.dim][p]} for T in chains)))
    if not verts:
        return r
    d = K.distance_to(z, K.coords[verts])
    for _ in range(8):
        if not np.any(np.abs(d - r) <= 1e-12 * max(r, 1.0)):
            return r
        r = r * (1 + NUDGE)
    return r


def restrict_many(chains: list[IntegralChain], z, r: float, arc_step: float = ARC_STEP) -> list[IntegralChain]:
    """Subdivide-policy restriction of several chains onto one refined complex.

    Crossed simplices are replaced by the polygon ``simplex ∩ ball`` (edge
    crossings found exactly, the spherical part sampled every ``arc_step``
    radians) fanned from its centroid. Radii hitting a vertex distance are
    nudged by ``+1e-9 r``; the nudge is recorded in each chain's ``meta``.
    """
    if r <= 0:
        raise ComplexError("radius must be positive")
    K = chains[0].complex
    if any(T.complex is not K for T in chains):
        raise ComplexError("chains must share a complex")
    if K.abstract or K.norm != "euclidean":
        raise ComplexError("subdivide policy requires a euclidean embedded complex")
    if any(T.dim > 2 for T in chains):
        raise ComplexError("subdivide policy supports chains of dimension <= 2")
    r_used = _nudged_radius(chains, z, r)
    clipper = _BallClipper(K, z, r_used, arc_step)
    pieces = [clipper.clip(T) for T in chains]
    tops = [s for p in pieces for s in p]
    coords = np.array(clipper.coords)
    if tops:
        R = EmbeddedComplex.from_top(coords, tops)
    else:
        R = EmbeddedComplex(coords, {0: [(i,) for i in range(len(coords))]})
    meta = {"policy": "subdivide", "radius": r_used, "requested_radius": float(r),
            "nudged": r_used != r, "arc_step": arc_step}
    out = []
    for T, p in zip(chains, pieces):
        C = IntegralChain.from_simplices(R, p, dim=T.dim) if p else IntegralChain(R, T.dim)
        C.meta.update(meta)
        out.append(C)
    return out


def restrict_to_ball(T: IntegralChain, z, r: float, policy: str = "barycenter",
                     arc_step: float = ARC_STEP) -> IntegralChain:
    """Restriction of ``T`` to the closed ball ``B(z, r)``.

    ``barycenter`` keeps whole simplices on the original complex;
    ``subdivide`` cuts along the sphere and returns a chain on a refined complex.
    """
    if policy == "barycenter":
        return restrict_barycenter(T, z, r)
    if policy == "subdivide":
        return restrict_many([T], z, r, arc_step)[0]
    raise ComplexError(f"unknown policy {policy!r}")


@dataclass
class SliceRecord:
    radius: float
    chain: IntegralChain
    mass: float
    nudged: bool = False


def slice_at(T: IntegralChain, z, r: float, arc_step: float = ARC_STEP) -> IntegralChain:
    """``∂(T⌊B(z,r)) − (∂T)⌊B(z,r)``, computed on a common refined complex."""
    if T.dim == 0:
        raise ComplexError("0-chains have no slices")
    if T.is_zero():
        return T.__class__(T.complex, T.dim - 1)
    A, B = restrict_many([T, boundary(T)], z, r, arc_step)
    if A.is_zero() and B.is_zero():
        S = T.__class__(T.complex, T.dim - 1)
        S.meta.update(A.meta)
        return S
    S = boundary(A) - B
    S.meta.update(A.meta)
    return S


def slice_mass_profile(T: IntegralChain, z, radii, arc_step: float = ARC_STEP) -> list[SliceRecord]:
    radii = [float(r) for r in radii]
    if any(b <= a for a, b in zip(radii, radii[1:])) or (radii and radii[0] <= 0):
        raise ComplexError("radii must be positive and strictly increasing")
    if T.complex.norm != "euclidean":
        raise ComplexError("slicing requires a euclidean ambient")
    out = []
    for r in radii:
        S = slice_at(T, z, r, arc_step)
        out.append(SliceRecord(r, S, mass(S).total, bool(S.meta.get("nudged", False))))
    return out


def coarea_sum(profile: list[SliceRecord]) -> float:
    """Right Riemann sum of slice masses over the radius grid (starting at 0)."""
    total, prev = 0.0, 0.0
    for rec in profile:
        total += rec.mass * (rec.radius - prev)
        prev = rec.radius
    return total
