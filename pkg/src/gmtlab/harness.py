"""Executable checks of the density, filling-radius and covering bounds, the
collapse / cancellation diagnostics, and the ultrametric and tower constructions.

Every check returns an :class:`ExperimentReport` carrying its inputs, measured
and bound series, tolerances and a verdict.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import asdict, dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .chains import EmbeddedComplex, IntegralChain, boundary, mass, support
from .config import Calibration, Tolerances
from .errors import ComplexError, GmtError, WindowError
from .flatnorm import filling_radius, filling_volume, flat_norm, rips_complex
from .generators import (ellipsoid_volume, frostman_weights, gen_ellipsoid, gen_sphere, gen_torus,
                         gen_ultrametric)
from .metric import (PointCloud, covering_number, hausdorff_distance_points, hausdorff_measure_bounds,
                     rectifiability_witness_check, unit_ball_volume)
from .report import ExperimentReport
from .slicing import restrict_to_ball, slice_at
from .tower import TowerParams, base_roof_distances, diameter_upper, gen_tower, tower_formulas

FILLRAD_ARC_STEP = math.pi / 8


def _q(x) -> Fraction:
    return x if isinstance(x, Fraction) else Fraction(x)


def radius_window(m: int, lam, r) -> Fraction:
    """``2^-(m+6) lam^-(m+1) r`` in exact arithmetic."""
    return Fraction(1, 2 ** (m + 6)) / _q(lam) ** (m + 1) * _q(r)


# ------------------------------------------------------------------ density

@dataclass
class DensityBoundParams:
    m: int = 2
    contractibility_lambda: float = 2.0
    r: float = 1.0
    C_mode: str = "fitted"
    C: float | None = None

    def __post_init__(self):
        if self.contractibility_lambda < 1:
            raise GmtError("lambda must be >= 1")
        if self.r <= 0:
            raise GmtError("scale r must be positive")
        if self.C_mode not in ("fitted", "supplied"):
            raise GmtError("C_mode is 'fitted' or 'supplied'")
        if self.C_mode == "supplied" and (self.C is None or self.C <= 0):
            raise GmtError("supplied C must be positive")

    @property
    def window(self) -> Fraction:
        return radius_window(self.m, self.contractibility_lambda, self.r)


def check_density_bound(T: IntegralChain, z, p: DensityBoundParams, s_grid: Sequence[float],
                        policy: str = "subdivide", inputs: dict | None = None,
                        tol: Tolerances | None = None) -> ExperimentReport:
    tol = tol or Tolerances()
    s_grid = [float(s) for s in s_grid]
    win = p.window
    if not s_grid or any(s <= 0 or _q(s) > win for s in s_grid):
        raise WindowError(f"radius grid must lie in (0, {float(win):.6g}]")
    m = p.m
    masses = [mass(restrict_to_ball(T, z, s, policy)).total for s in s_grid]
    lam_factor = _q(p.contractibility_lambda) ** (-m * (m + 1))
    rep = ExperimentReport("density", {"z": list(map(float, z)), "params": asdict(p), **(inputs or {})},
                           tolerances={"exponent_abs": tol.exponent_abs},
                           notes={"policy": policy, "lambda": "assumed", "window": win})
    if any(v <= 0 for v in masses):
        rep.add("mass", s_grid, masses)
        rep.verdict = "fail"
        rep.notes["reason"] = "zero measure on the grid"
        return rep
    slope = float(np.polyfit(np.log(s_grid), np.log(masses), 1)[0]) if len(s_grid) > 1 else float("nan")
    unit = [float(lam_factor) * s ** m for s in s_grid]
    ratios = [v / u for v, u in zip(masses, unit)]
    C = p.C if p.C_mode == "supplied" else min(ratios)
    bound = [C * u for u in unit]
    rep.add("mass", s_grid, masses, bound)
    rep.notes.update({"exponent": slope, "C": C, "C_mode": p.C_mode})
    ok_exp = abs(slope - m) <= tol.exponent_abs
    # compare ratios so the fitted constant dominates at its own argmin without rounding
    ok_bound = all(q >= C for q in ratios)
    rep.subchecks = {"exponent": ok_exp, "dominates": ok_bound}
    rep.verdict = "pass" if ok_exp and ok_bound else "fail"
    return rep


# ---------------------------------------------------------------- fillrad

def fillrad_bound(r, lam, m: int) -> Fraction:
    return _q(r) / (8 * (2 * _q(lam)) ** (m + 1))


def check_fillrad_bound(T: IntegralChain, z, lam: float, r_grid: Sequence[float], r0: float,
                        arc_step: float = FILLRAD_ARC_STEP, inputs: dict | None = None) -> ExperimentReport:
    """Slice ``T`` at each radius and compare the Rips filling radius of the slice to
    ``r / (8 (2 lam)^(m+1))``. Both the raw Rips scale and its half are reported;
    the verdict uses the half."""
    r_grid = [float(r) for r in r_grid]
    dT = boundary(T)
    d_bdry = math.inf
    if not dT.is_zero():
        pts = T.complex.coords[sorted(support(dT))]
        d_bdry = float(T.complex.distance_to(z, pts).min())
    limit = min(radius_window(T.dim, lam, r0), _q(d_bdry) if math.isfinite(d_bdry) else radius_window(T.dim, lam, r0))
    if not r_grid or any(r <= 0 or _q(r) > limit for r in r_grid):
        raise WindowError(f"radius grid must lie in (0, {float(limit):.6g}]")
    raw, halved, bounds, steps, states = [], [], [], [], []
    for r in r_grid:
        S = slice_at(T, z, r, arc_step)
        b = fillrad_bound(r, lam, T.dim)
        bounds.append(float(b))
        if S.is_zero():
            raw.append(0.0)
            halved.append(0.0)
            steps.append(0.0)
            states.append("pass")
            continue
        fr = filling_radius(S)
        raw.append(fr.value)
        halved.append(fr.halved)
        if fr.index is None:
            steps.append(math.inf)
            states.append("inconclusive")
            continue
        step = fr.grid[fr.index] - fr.grid[fr.index - 1] if fr.index > 0 else fr.grid[0]
        steps.append(step)
        if _q(fr.halved) >= b:
            states.append("pass")
        elif _q(fr.halved + step / 2) >= b:
            states.append("inconclusive")
        else:
            states.append("fail")
    rep = ExperimentReport("fillrad", {"z": list(map(float, z)), "lambda": lam, "r0": r0, "m": T.dim,
                                       **(inputs or {})},
                           notes={"proxy": "rips", "arc_step": arc_step, "lambda": "assumed",
                                  "grid_step": steps, "coefficients": "rational"})
    rep.add("fillrad_halved", r_grid, halved, bounds)
    rep.add("fillrad_raw", r_grid, raw, bounds)
    rep.subchecks = {f"r={r:g}": s for r, s in zip(r_grid, states)}
    rep.verdict = "fail" if "fail" in states else "inconclusive" if "inconclusive" in states else "pass"
    return rep


# ---------------------------------------------------------------- covering

def support_sample(T: IntegralChain, spacing: float) -> np.ndarray:
    """Points on the simplices of ``T`` on a barycentric lattice with roughly ``spacing`` gaps."""
    K = T.complex
    lst = K.simplices[T.dim]
    pts = []
    lattices: dict[int, np.ndarray] = {}
    for p in T.terms:
        V = K.coords[list(lst[p])]
        edge = max((np.linalg.norm(V[i] - V[j]) for i, j in itertools.combinations(range(len(V)), 2)),
                   default=0.0)
        k = max(1, math.ceil(edge / spacing))
        if k not in lattices:
            c = np.array([c for c in itertools.product(range(k + 1), repeat=T.dim) if sum(c) <= k],
                         dtype=float).reshape(-1, T.dim)
            lattices[k] = np.hstack([k - c.sum(1, keepdims=True), c]) / k
        pts.append(lattices[k] @ V)
    if not pts:
        return np.zeros((0, K.ambient_dim))
    P = np.round(np.vstack(pts), 12)
    return np.unique(P, axis=0)


def check_covering_bound(T: IntegralChain, lam: float, r0: float, eps_grid: Sequence[float],
                         K: float, spacing: float | None = None, inputs: dict | None = None) -> ExperimentReport:
    m = T.dim
    eps_grid = [float(e) for e in eps_grid]
    if not eps_grid:
        raise GmtError("empty epsilon grid")
    win = radius_window(m, lam, r0)
    if any(e <= 0 or _q(e) >= win for e in eps_grid):
        raise WindowError(f"epsilon grid must lie in (0, {float(win):.6g})")
    spacing = spacing or min(eps_grid) / 4
    P = PointCloud(support_sample(T, spacing))
    M = mass(T).total
    rhs = float(_q(K) * _q(lam) ** (m * (m + 1)) * _q(M))
    counts = [covering_number(P, e, mode="greedy") for e in eps_grid]
    scaled = [c * e ** m for c, e in zip(counts, eps_grid)]
    rep = ExperimentReport("covering", {"lambda": lam, "r0": r0, "m": m, "K": K, **(inputs or {})},
                           notes={"sample_points": P.n, "spacing": spacing, "counts": counts,
                                  "mode": "greedy", "lambda": "assumed"})
    rep.add("N_eps_m", eps_grid, scaled, [rhs] * len(eps_grid))
    rep.verdict = "pass" if all(v <= rhs for v in scaled) else "fail"
    return rep


# ---------------------------------------------------------- cancellation

@dataclass
class FamilyMember:
    chain: IntegralChain
    ambient_chain: IntegralChain | None = None
    label: object = None


def _strictly_decreasing(xs) -> bool:
    return all(b < a for a, b in zip(xs, xs[1:]))


def cancellation_diagnostics(family: Sequence[FamilyMember], candidate_limit_set,
                             reference: IntegralChain | None = None, mass_floor: float = 1.0,
                             ratio: float = 0.2, expected: str | None = None,
                             support_spacing: float | None = None,
                             inputs: dict | None = None) -> ExperimentReport:
    """Per-member mass, flat norm and Hausdorff distance to a candidate limit set,
    classified as collapse, cancellation or stable from finite trends.

    The support is sampled at its vertices, or on a lattice of the given
    ``support_spacing`` over every simplex."""
    family = [f if isinstance(f, FamilyMember) else FamilyMember(*f) for f in family]
    if len(family) < 3:
        raise GmtError("trend needs ≥ 3 points")
    labels = [f.label if f.label is not None else i for i, f in enumerate(family)]
    masses = [mass(f.chain).total for f in family]
    flats = [flat_norm(f.ambient_chain).value if f.ambient_chain is not None else None for f in family]
    dH = []
    Q = np.asarray(candidate_limit_set, dtype=float)
    for f in family:
        K = f.chain.complex
        if support_spacing is None:
            P = K.coords[sorted(support(f.chain))]
        else:
            P = support_sample(f.chain, support_spacing)
        dH.append(hausdorff_distance_points(P, Q) if len(P) else math.inf)
    ref = reference if reference is not None else family[-1].chain
    dist_ref = None
    if all(f.chain.complex is ref.complex and f.chain.dim == ref.dim for f in family):
        dist_ref = [flat_norm(f.chain - ref).value for f in family]

    cls = "none"
    if masses[-1] < ratio * masses[0]:
        cls = "collapse"
    elif dist_ref is not None and (max(dist_ref) == 0 or
                                   (_strictly_decreasing(dist_ref) and dist_ref[-1] < ratio * dist_ref[0])):
        cls = "stable"
    elif (min(masses) >= mass_floor and all(v is not None for v in flats)
          and _strictly_decreasing(flats) and flats[-1] < ratio * flats[0]):
        cls = "cancellation"
    rep = ExperimentReport("cancellation", {"family": [str(l) for l in labels], **(inputs or {})},
                           classification=cls,
                           tolerances={"collapse_ratio": ratio, "mass_floor": mass_floor},
                           notes={"trend": "finite family; ratios, not limits",
                                  "support_spacing": support_spacing})
    rep.add("mass", labels, masses)
    if all(v is not None for v in flats):
        rep.add("flat_norm", labels, flats)
    rep.add("hausdorff_to_candidate", labels, dH)
    if dist_ref is not None:
        rep.add("flat_distance_to_reference", labels, dist_ref)
    rep.verdict = "pass" if expected is None or cls == expected else "fail"
    if expected is not None:
        rep.notes["expected"] = expected
    return rep


def disc_sample(radius: float = 1.0, rings: int = 64) -> np.ndarray:
    """Polar sample of the flat disc in the plane z = 0 (centre included)."""
    pts = [(0.0, 0.0, 0.0)]
    for i in range(1, rings + 1):
        rho = radius * i / rings
        k = max(6, int(round(2 * math.pi * i)))
        t = 2 * math.pi * np.arange(k) / k
        pts += list(zip(rho * np.cos(t), rho * np.sin(t), np.zeros(k)))
    return np.array(pts)


def circle_sample(points: int = 2048) -> np.ndarray:
    t = 2 * math.pi * np.arange(points) / points
    return np.stack([np.cos(t), np.sin(t), np.zeros(points), np.zeros(points)], -1)


def torus_family(ns=(1, 2, 4, 8), mesh: int = 64, ambient: bool = False) -> list[FamilyMember]:
    out = []
    for n in ns:
        S = gen_torus(n, mesh, ambient=ambient)
        out.append(FamilyMember(S.chain, S.ambient_chain, n))
    return out


def ellipsoid_family(ns=(1, 4, 16, 64), mesh: int = 32, ambient: bool = True) -> list[FamilyMember]:
    out = []
    for n in ns:
        S = gen_ellipsoid(n, mesh, ambient=ambient)
        out.append(FamilyMember(S.chain, S.ambient_chain, n))
    return out


def sphere_family(count: int = 3, mesh: int = 2) -> list[FamilyMember]:
    S = gen_sphere(mesh)
    return [FamilyMember(S.chain, None, i) for i in range(count)]


# ------------------------------------------------------------ ultrametric

def ultrametric_growth_radii(a: float, depth: int) -> list[float]:
    """``a^j`` for ``j = 2..depth+2`` and the midpoints between consecutive ones (all < a)."""
    pw = [a ** j for j in range(2, depth + 3)]
    mids = [(x + y) / 2 for x, y in zip(pw, pw[1:])]
    return sorted(pw + mids, reverse=True)


def check_ultrametric_lemma(N: int, m: int, depth: int, X=None) -> ExperimentReport:
    """Covering upper bound, Frostman growth, lower bound and the witness check,
    all in exact arithmetic when ``a`` is dyadic."""
    U = gen_ultrametric(N, m, depth) if X is None else X
    a_ex = getattr(U, "a_exact", None)
    if a_ex is None:
        a_ex = gen_ultrametric(N, m, 1).a_exact
    a = float(a_ex) if a_ex is not None else N ** (-1.0 / m)
    exact = bool(U.exact) and a_ex is not None
    A = a_ex if exact else a
    mu = frostman_weights(N, depth, U)
    K = A ** (-2 * m)
    deltas = [2 * a ** j for j in range(depth)]
    radii = ultrametric_growth_radii(a, depth)
    mb = hausdorff_measure_bounds(U, m, deltas, measure=mu, growth_constant=K, growth_radii=radii)
    per = [p["coeff"] for p in mb.per_delta]
    ok_a = all(c <= A ** m for c in per)
    ok_b = bool(mb.growth_certified)
    target_c = Fraction(1, 2 ** m) * A ** (2 * m) if exact else 2.0 ** -m * a ** (2 * m)
    ok_c = mb.lower_coeff is not None and mb.lower_coeff >= target_c
    try:
        wv = rectifiability_witness_check(U)
        ok_d, witness = wv.passed, wv.witness
    except GmtError as e:
        ok_d, witness = False, str(e)
    omega = unit_ball_volume(m)
    rep = ExperimentReport("ultrametric-lemma", {"N": N, "m": m, "depth": depth},
                           tolerances={"all": 0 if exact else "float"},
                           notes={"a": A, "omega_m": omega, "exact": exact, "lower_coeff": mb.lower_coeff,
                                  "lower_target": target_c, "growth_ratio_max": mb.growth_ratio_max,
                                  "growth_constant": K, "witness": witness})
    rep.add("upper_coeff", deltas, per, [A ** m] * len(per))
    rep.add("growth_ratio", radii, [max(float(mu.weights[U.row(z) <= r].sum()) for z in range(U.n)) / r ** m
                                    for r in radii], [float(K)] * len(radii))
    rep.subchecks = {"a_upper": ok_a, "b_growth": ok_b, "c_lower": ok_c, "d_witness": ok_d}
    rep.verdict = "pass" if all(rep.subchecks.values()) else "fail"
    return rep


def check_ultrametric_covering(N: int, m: int, depth: int, ks=None, cap: int = 64) -> ExperimentReport:
    """Exact covering numbers at radius ``a^(k+1)`` against ``N^k``."""
    U = gen_ultrametric(N, m, depth)
    ks = list(ks) if ks is not None else list(range(1, depth))
    radii = [U.a ** (k + 1) for k in ks]
    counts = [covering_number(U, r, mode="exact", cap=cap) for r in radii]
    expect = [N ** k for k in ks]
    rep = ExperimentReport("ultrametric-covering", {"N": N, "m": m, "depth": depth, "k": ks},
                           tolerances={"count": 0}, notes={"mode": "exact", "cap": cap, "radii": radii})
    rep.add("covering_number", ks, counts, expect)
    rep.verdict = "pass" if counts == expect else "fail"
    return rep


# ------------------------------------------------------------------ tower

def check_tower_geometry(p: TowerParams, tol: Tolerances | None = None) -> ExperimentReport:
    tol = tol or Tolerances()
    X = gen_tower(p)
    F = tower_formulas(p)
    area = X.facet_area
    ok_area = abs(area - F.area_closed_form) <= tol.area_abs
    recs = base_roof_distances(X)
    ks = sorted({r.k for r in recs})
    lo = [min(r.d_min for r in recs if r.k == k) for k in ks]
    hi = [max(r.d_max for r in recs if r.k == k) for k in ks]
    ok_sand = all(l >= p.a ** k * (1 - tol.graph_rel) and h <= (p.m + 1) * p.a ** k * (1 + tol.graph_rel)
                  for k, l, h in zip(ks, lo, hi))
    diam0 = math.sqrt(p.m) * p.L * p.lam
    diam_bound = diam0 + 2 * (p.m + 1) * p.a / (1 - p.a)
    diam = diameter_upper(X)
    ok_diam = diam <= diam_bound * (1 + tol.graph_rel)
    s_grid = [p.lam / 2 * t for t in (0.01, 0.05, 0.1, 0.25, 0.5, 0.75, 0.99)]
    rho = [F.rho_at(s) for s in s_grid]
    sprime = [F.contraction_radius(s) for s in s_grid]
    ok_rho = F.rho_at(0.0) == 0.0 and all(sp <= r for sp, r in zip(sprime, rho))
    try:
        F.rho_at(p.lam / 2)
        ok_rho = False
    except GmtError:
        pass
    rep = ExperimentReport("tower", {"params": asdict(p)},
                           tolerances={"area_abs": tol.area_abs, "graph_rel": tol.graph_rel},
                           notes={"area": area, "area_closed_form": F.area_closed_form,
                                  "C": F.contractibility_C, "diameter_upper": diam, "diameter_bound": diam_bound,
                                  "vertices": X.n_vertices, "edges": int(len(X.edges)),
                                  "contractibility": "metric consequences only"})
    if ks:
        rep.add("base_roof_min", ks, lo, [p.a ** k for k in ks])
        rep.add("base_roof_max", ks, hi, [(p.m + 1) * p.a ** k for k in ks])
    rep.add("contraction_radius", s_grid, sprime, rho)
    rep.subchecks = {"a_area": ok_area, "b_sandwich": ok_sand, "c_diameter": ok_diam, "d_rho": ok_rho}
    rep.verdict = "pass" if all(rep.subchecks.values()) else "fail"
    return rep


# ------------------------------------------------------- filling oracles

def enumerate_filling(T: IntegralChain, objective: str, box: int = 2) -> Fraction | None:
    """Exhaustive minimum over integer (m+1)-chains with coefficients in ``[-box, box]``.

    For the flat norm the remainder ``X = T - dS`` is whatever is left over.
    Returns the exact optimum, or None when no chain in the box fills ``T``.
    """
    K, m = T.complex, T.dim
    k = K.count(m + 1)
    nrow = K.count(m)
    t = np.zeros(nrow, dtype=np.int64)
    for p, c in T.terms.items():
        t[p] = c
    D = np.zeros((nrow, k), dtype=np.int64)
    for j, s in enumerate(K.simplices[m + 1] if k else []):
        for i in range(len(s)):
            fpos, sign = K.lookup(s[:i] + s[i + 1:])
            D[fpos, j] += (-1) ** i * sign
    vS = K.volumes(m + 1) if k else np.zeros(0)
    vX = K.volumes(m)
    vals = np.arange(-box, box + 1)
    best_f, best = math.inf, []
    chunk_dims = min(k, 6)
    tail = np.array(list(itertools.product(vals, repeat=chunk_dims)), dtype=np.int64).reshape(-1, chunk_dims)
    for head in itertools.product(vals, repeat=k - chunk_dims):
        S = np.hstack([np.broadcast_to(np.array(head, dtype=np.int64), (len(tail), k - chunk_dims)), tail])
        R = t[None, :] - S @ D.T
        cost = np.abs(S) @ vS
        if objective == "flat_norm":
            cost = cost + np.abs(R) @ vX
        else:
            cost = np.where(np.any(R != 0, axis=1), np.inf, cost)
        lo = cost.min()
        if lo < best_f - 1e-9:
            best_f, best = lo, []
        if lo <= best_f + 1e-9:
            for i in np.flatnonzero(cost <= best_f + 1e-9):
                best.append((S[i].copy(), R[i].copy()))
            best_f = min(best_f, lo)
    if not math.isfinite(best_f):
        return None

    def exact(S, R):
        v = sum((abs(int(s)) * Fraction(float(w)) for s, w in zip(S, vS)), Fraction(0))
        if objective == "flat_norm":
            v += sum((abs(int(r)) * Fraction(float(w)) for r, w in zip(R, vX)), Fraction(0))
        return v

    return min(exact(S, R) for S, R in best)


def random_filling_instance(rng: np.random.Generator, max_top: int = 10):
    """A small random complex with a target chain. Returns (target, objective)."""
    kind = rng.integers(3)
    if kind == 0:
        # planar triangulation, 1-chains
        from scipy.spatial import Delaunay
        while True:
            P = rng.random((int(rng.integers(4, 8)), 2))
            tri = Delaunay(P)
            tops = [tuple(int(v) for v in s) for s in tri.simplices][:max_top]
            try:
                K = EmbeddedComplex.from_top(P, tops)
                break
            except ComplexError:
                continue
    else:
        # random triangles among points in R^3; closed surfaces give a kernel
        while True:
            npts = int(rng.integers(4, 7))
            P = rng.random((npts, 3))
            allt = list(itertools.combinations(range(npts), 3))
            k = int(rng.integers(3, min(max_top, len(allt)) + 1))
            pick = sorted(rng.choice(len(allt), size=k, replace=False).tolist())
            try:
                K = EmbeddedComplex.from_top(P, [allt[i] for i in pick])
                break
            except ComplexError:
                continue
    objective = "flat_norm" if rng.random() < 0.5 else "fill_volume"
    k = K.count(2)
    if objective == "fill_volume":
        S = IntegralChain(K, 2, {i: int(c) for i, c in enumerate(rng.integers(-2, 3, size=k))})
        T = boundary(S)
    else:
        ne = K.count(1)
        picks = rng.choice(ne, size=min(ne, int(rng.integers(1, 6))), replace=False)
        T = IntegralChain(K, 1, {int(i): int(rng.choice([-2, -1, 1, 2])) for i in picks})
    return T, objective


def check_ilp_oracle(instances: int = 50, seed: int = 0, max_top: int = 10, box: int = 2) -> ExperimentReport:
    rng = np.random.default_rng(seed)
    ilp, brute, sizes, stages = [], [], [], []
    for _ in range(instances):
        T, obj = random_filling_instance(rng, max_top)
        if obj == "fill_volume":
            W = filling_volume(T, coefficient_bound=box)
        else:
            W = flat_norm(T, coefficient_bound=box)
        ilp.append(W.value_exact)
        brute.append(enumerate_filling(T, obj, box))
        sizes.append(T.complex.count(2))
        stages.append(f"{obj}:{W.optimality}")
    rep = ExperimentReport("ilp-oracle", {"instances": instances, "seed": seed, "max_top": max_top, "box": box},
                           tolerances={"value": 0}, notes={"sizes": sizes, "stages": stages})
    rep.add("value", list(range(instances)), ilp, brute)
    rep.verdict = "pass" if ilp == brute else "fail"
    return rep


def rips_boundary_oracle(points, grid: Sequence[float], max_dim: int = 2):
    """First grid value at which the polygon cycle through ``points`` (in order) is a
    rational boundary of the full Rips complex, by dense rank comparison."""
    P = np.asarray(points, dtype=float)
    D = np.sqrt(((P[:, None] - P[None]) ** 2).sum(-1))
    n = len(P)
    for r in sorted(grid):
        R = rips_complex(D, r, max_dim)
        edges = {s: i for i, s in enumerate(R.simplices[1])} if R.dim >= 1 else {}
        z = [Fraction(0)] * len(edges)
        ok = True
        for i in range(n):
            u, v = i, (i + 1) % n
            key = (min(u, v), max(u, v))
            if key not in edges:
                ok = False
                break
            z[edges[key]] += 1 if u < v else -1
        if not ok:
            continue
        cols = []
        if R.dim >= 2:
            for s in R.simplices[2]:
                c = [Fraction(0)] * len(edges)
                for i in range(3):
                    f = s[:i] + s[i + 1:]
                    c[edges[f]] += (-1) ** i
                cols.append(c)
        if _rank(cols) == _rank(cols + [z]):
            return r
    return math.inf


def _rank(vectors) -> int:
    rows = [list(v) for v in vectors]
    rank, col = 0, 0
    ncol = len(rows[0]) if rows else 0
    while rank < len(rows) and col < ncol:
        piv = next((i for i in range(rank, len(rows)) if rows[i][col] != 0), None)
        if piv is None:
            col += 1
            continue
        rows[rank], rows[piv] = rows[piv], rows[rank]
        pr = rows[rank]
        for i in range(rank + 1, len(rows)):
            f = rows[i][col] / pr[col]
            if f:
                rows[i] = [a - f * b for a, b in zip(rows[i], pr)]
        rank += 1
        col += 1
    return rank


def hexagon_cycle():
    ang = np.arange(6) * np.pi / 3
    P = np.c_[np.cos(ang), np.sin(ang)]
    K = EmbeddedComplex.from_top(P, [(i, (i + 1) % 6) for i in range(6)])
    return P, IntegralChain.from_simplices(K, {(i, (i + 1) % 6): 1 for i in range(6)})


def check_hexagon_fillrad() -> ExperimentReport:
    P, C = hexagon_cycle()
    fr = filling_radius(C)
    oracle = rips_boundary_oracle(P, fr.grid)
    rep = ExperimentReport("fillrad-hexagon", {"polygon": "regular hexagon, unit side"},
                           tolerances={"value": 0}, notes={"grid": fr.grid, "halved": fr.halved})
    rep.add("fillrad", [0], [fr.value], [oracle])
    rep.verdict = "pass" if fr.value == oracle else "fail"
    return rep


# ------------------------------------------------------ acceptance suite

SPHERE_S_GRID = [0.05 * (10 ** (i / 9)) for i in range(10)]


def density_params_for(s_max: float, lam: float = 2.0, m: int = 2, C: float | None = None) -> DensityBoundParams:
    """Params whose assumed scale ``r`` makes ``s_max`` the edge of the radius window."""
    r = float(Fraction(s_max) * 2 ** (m + 6) * Fraction(lam) ** (m + 1))
    if C is None:
        return DensityBoundParams(m, lam, r)
    return DensityBoundParams(m, lam, r, "supplied", C)


def sphere_sample_points(K: EmbeddedComplex, count: int = 20, seed: int = 0) -> list[int]:
    rng = np.random.default_rng(seed)
    return sorted(rng.choice(K.n_vertices, size=count, replace=False).tolist())


def suite_density(cal: Calibration, seed: int = 0, mesh: int = 4) -> ExperimentReport:
    S = gen_sphere(mesh)
    pts = sphere_sample_points(S.complex, 20, seed)
    p = density_params_for(max(SPHERE_S_GRID), C=cal.density_C)
    reps = [check_density_bound(S.chain, S.complex.coords[v], p, SPHERE_S_GRID) for v in pts]
    rep = ExperimentReport("density-sphere", {"family": "sphere", "mesh": mesh, "points": pts, "seed": seed,
                                              "params": asdict(p)},
                           tolerances={"exponent_abs": 0.15}, notes={"C": cal.density_C})
    rep.add("exponent", pts, [r.notes["exponent"] for r in reps], [2.0] * len(pts))
    rep.add("min_margin", pts, [min(v - b for v, b in zip(r.series[0].measured, r.series[0].bound)) for r in reps])
    rep.verdict = "pass" if all(r.verdict == "pass" for r in reps) else "fail"
    return rep


def suite_fillrad(mesh: int = 2) -> ExperimentReport:
    S = gen_sphere(mesh)
    z = np.array([0.0, 0.0, 1.0])
    rs = [0.2, 0.4, 0.6]
    r0 = float(radius_window(2, 2, 1) ** -1 * Fraction(0.6))
    rep = check_fillrad_bound(S.chain, z, 2.0, rs, r0, inputs={"family": "sphere", "mesh": mesh})
    hexa = check_hexagon_fillrad()
    rep.subchecks["hexagon"] = hexa.verdict
    rep.series += hexa.series
    if hexa.verdict != "pass":
        rep.verdict = "fail"
    return rep


def suite_torus(mesh: int = 64) -> ExperimentReport:
    fam = torus_family((1, 2, 4, 8), mesh)
    rep = cancellation_diagnostics(fam, circle_sample(), expected="collapse",
                                   inputs={"family": "torus", "mesh": mesh})
    closed = [4 * math.pi ** 2 / n for n in (1, 2, 4, 8)]
    m = rep.series[0].measured
    ok_mass = all(abs(v - c) <= 0.01 * c for v, c in zip(m, closed)) and _strictly_decreasing(m)
    rep.series[0].bound = closed
    rep.subchecks = {"mass_closed_form": ok_mass, "classification": rep.classification == "collapse"}
    rep.verdict = "pass" if all(rep.subchecks.values()) else "fail"
    return rep


def suite_ellipsoid(mesh: int = 32) -> ExperimentReport:
    ns = (1, 4, 16, 64)
    fam = ellipsoid_family(ns, mesh)
    rep = cancellation_diagnostics(fam, disc_sample(), expected="cancellation", mass_floor=1.0,
                                   support_spacing=0.02, inputs={"family": "ellipsoid", "mesh": mesh})
    ser = {s.name: s for s in rep.series}
    masses, flats, dH = ser["mass"].measured, ser["flat_norm"].measured, ser["hausdorff_to_candidate"].measured
    ser["hausdorff_to_candidate"].bound = [n ** -0.5 for n in ns]
    ser["flat_norm"].bound = [ellipsoid_volume(n) for n in ns]
    floor = 0.9 * 2 * math.pi
    sub = {
        "mass_floor": all(v >= 5.6 and v >= floor for v in masses),
        "hausdorff": all(abs(d - n ** -0.5) <= 0.05 * n ** -0.5 for d, n in zip(dH, ns)),
        "flat_decreasing": _strictly_decreasing(flats),
        "flat_n16": abs(flats[2] - ellipsoid_volume(16)) <= 0.10 * ellipsoid_volume(16),
        "classification": rep.classification == "cancellation",
    }
    rep.subchecks = sub
    rep.verdict = "pass" if all(sub.values()) else "fail"
    return rep


SUITE = {
    "cancellation-torus": lambda cfg: suite_torus(),
    "cancellation-ellipsoid": lambda cfg: suite_ellipsoid(),
    "ultrametric-lemma": lambda cfg: check_ultrametric_lemma(4, 2, 3),
    "tower": lambda cfg: check_tower_geometry(TowerParams(2, 2, 0.5, 2)),
    "ultrametric-covering": lambda cfg: check_ultrametric_covering(4, 2, 3, ks=(1, 2)),
    "ilp-oracle": lambda cfg: check_ilp_oracle(50, cfg.seed),
    "density-sphere": lambda cfg: suite_density(cfg.calibration, cfg.seed),
    "fillrad-sphere": lambda cfg: suite_fillrad(),
}
