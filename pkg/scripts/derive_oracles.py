#!/usr/bin/env python3
"""Recompute the reference values frozen in the test suite.

Each oracle is independent of the package code paths it checks: brute-force
enumeration, closed forms, Monte Carlo or a dense linear-algebra rank test.
"""
from __future__ import annotations

import itertools
import math

import numpy as np
from scipy.spatial.distance import cdist, directed_hausdorff


def hausdorff_square_center() -> float:
    A = np.array([[0, 0], [1, 0], [0, 1], [1, 1]], float)
    B = np.array([[0.5, 0.5]])
    return max(directed_hausdorff(A, B)[0], directed_hausdorff(B, A)[0])


def gh_bruteforce(DX, DY) -> float:
    """Half the least distortion over every correspondence (relations onto both sides)."""
    nx, ny = len(DX), len(DY)
    cells = [(i, j) for i in range(nx) for j in range(ny)]
    best = math.inf
    for mask in range(1, 1 << len(cells)):
        R = [c for k, c in enumerate(cells) if mask >> k & 1]
        if {i for i, _ in R} != set(range(nx)) or {j for _, j in R} != set(range(ny)):
            continue
        dis = max(abs(DX[i][k] - DY[j][l]) for i, j in R for k, l in R)
        best = min(best, dis)
    return best / 2


def min_cover_line(points, eps) -> int:
    P = np.asarray(points, float)
    for k in range(1, len(P) + 1):
        for C in itertools.combinations(range(len(P)), k):
            if np.all(np.min(np.abs(P[:, None] - P[None, list(C)]), axis=1) <= eps + 1e-12):
                return k
    return len(P)


def maximal_separated_subsets(points, eps):
    P = list(points)
    out = []
    for k in range(1, len(P) + 1):
        for C in itertools.combinations(range(len(P)), k):
            sep = all(abs(P[a] - P[b]) > eps for a, b in itertools.combinations(C, 2))
            maximal = all(any(abs(P[i] - P[c]) <= eps for c in C) for i in range(len(P)))
            if sep and maximal:
                out.append(C)
    return out


def nagata_multiplicity(n_points, members, s) -> tuple[int, tuple]:
    """Worst s-multiplicity over every subset of diameter <= s of the integer grid."""
    worst, wit = 0, ()
    for k in range(1, n_points + 1):
        for A in itertools.combinations(range(n_points), k):
            if max(A) - min(A) > s:
                continue
            mult = sum(1 for M in members if set(M) & set(A))
            if mult > worst:
                worst, wit = mult, A
    return worst, wit


def octahedron():
    V = np.array([(1, 0, 0), (-1, 0, 0), (0, 1, 0), (0, -1, 0), (0, 0, 1), (0, 0, -1)], float)
    F = [(a, b, c) for a in (0, 1) for b in (2, 3) for c in (4, 5)]
    return V, F


def tri_area(P) -> float:
    return 0.5 * float(np.linalg.norm(np.cross(P[1] - P[0], P[2] - P[1])))


def octahedron_equator_fill() -> float:
    """Least mass over integer 2-chains with coefficients in [-2, 2] bounding the equator."""
    V, F = octahedron()
    eq = [(0, 2), (2, 1), (1, 3), (3, 0)]
    target = {}
    for u, v in eq:
        key = (min(u, v), max(u, v))
        target[key] = target.get(key, 0) + (1 if u < v else -1)
    areas = [tri_area(V[list(f)]) for f in F]
    best = math.inf
    for coefs in itertools.product(range(-2, 3), repeat=len(F)):
        bd = {}
        for c, f in zip(coefs, F):
            if not c:
                continue
            for i in range(3):
                u, v = f[:i] + f[i + 1:]
                key = (min(u, v), max(u, v))
                sign = (-1) ** i * (1 if u < v else -1)
                bd[key] = bd.get(key, 0) + sign * c
        bd = {k: v for k, v in bd.items() if v}
        if bd == target or bd == {k: -v for k, v in target.items()}:
            best = min(best, sum(abs(c) * a for c, a in zip(coefs, areas)))
    return best


def right_triangle_flat() -> float:
    # T = boundary of the triangle; X = T - k * boundary, cost |k| * 0.5 + |1 - k| * perimeter
    per = 2 + math.sqrt(2)
    return min(abs(k) * 0.5 + abs(1 - k) * per for k in range(-2, 3))


def quarter_disc_monte_carlo(samples: int = 4_000_000, seed: int = 1) -> float:
    rng = np.random.default_rng(seed)
    P = rng.random((samples, 2))
    return float(np.mean((P ** 2).sum(1) <= 0.25))


def hexagon_fillrad() -> float:
    ang = np.arange(6) * np.pi / 3
    P = np.c_[np.cos(ang), np.sin(ang)]
    D = cdist(P, P)
    grid = sorted({round(float(d), 12) for d in D[np.triu_indices(6, 1)]})
    cycle = [(i, (i + 1) % 6) for i in range(6)]
    for r in grid:
        edges = [e for e in itertools.combinations(range(6), 2) if D[e] <= r + 1e-9]
        tris = [t for t in itertools.combinations(range(6), 3)
                if all(D[a, b] <= r + 1e-9 for a, b in itertools.combinations(t, 2))]
        idx = {e: i for i, e in enumerate(edges)}
        if any((min(u, v), max(u, v)) not in idx for u, v in cycle):
            continue
        z = np.zeros(len(edges))
        for u, v in cycle:
            z[idx[(min(u, v), max(u, v))]] += 1 if u < v else -1
        B = np.zeros((len(edges), len(tris)))
        for j, t in enumerate(tris):
            for i in range(3):
                B[idx[t[:i] + t[i + 1:]], j] += (-1) ** i
        rank_b = np.linalg.matrix_rank(B) if tris else 0
        if rank_b == np.linalg.matrix_rank(np.c_[B, z]):
            return r
    return math.inf


def cap_exponent(s_grid) -> float:
    area = [2 * math.pi * (1 - math.cos(s)) for s in s_grid]
    return float(np.polyfit(np.log(s_grid), np.log(area), 1)[0])


def main() -> None:
    s_grid = [0.05 * 10 ** (i / 9) for i in range(10)]
    rows = {
        "hausdorff square corners vs centre": hausdorff_square_center(),
        "gh two points vs one": gh_bruteforce([[0, 1], [1, 0]], [[0]]),
        "gh distance 1 vs distance 3": gh_bruteforce([[0, 1], [1, 0]], [[0, 3], [3, 0]]),
        "cover grid 0..1 eps 0.3": min_cover_line(np.linspace(0, 1, 11), 0.3),
        "separated nets {0,1,2} eps 1.5": maximal_separated_subsets([0, 1, 2], 1.5),
        "nagata multiplicity (grid 0..10, pairs)": nagata_multiplicity(11, [(2 * i, 2 * i + 1) for i in range(5)] + [(10,)], 1),
        "octahedron mass": 8 * tri_area(octahedron()[0][[0, 2, 4]]),
        "octahedron equator fill": octahedron_equator_fill(),
        "right triangle boundary flat norm": right_triangle_flat(),
        "quarter disc r=0.5 area": quarter_disc_monte_carlo(),
        "hexagon rips filling radius": hexagon_fillrad(),
        "spherical cap exponent": cap_exponent(s_grid),
        "tower area (m=2,L=2,alpha=0.5,n=2)": 0.25 + 4 * (0.5 + 0.25),
        "tower constant C": 2 ** 0.5 * (4 - 0.5) / 0.5 * 2,
        "ellipsoid n=16 enclosed volume": 4 / 3 * math.pi / 4,
    }
    for k, v in rows.items():
        print(f"{k:45s} {v!r}")


if __name__ == "__main__":
    main()
