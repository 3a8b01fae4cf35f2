#!/usr/bin/env python3
"""Fit the density constant C and covering constant K on the reference sphere.

The fitted values are rounded conservatively and, with ``--write``, frozen into
``src/gmtlab/config.py``. Acceptance runs never refit.
"""
from __future__ import annotations

import argparse
import math
import re
from pathlib import Path

from gmtlab.chains import mass
from gmtlab.generators import gen_sphere
from gmtlab.harness import (SPHERE_S_GRID, check_density_bound, density_params_for,
                            sphere_sample_points, support_sample)
from gmtlab.metric import PointCloud, covering_number

LAM = 2.0
EPS_GRID = (0.05, 0.1, 0.2, 0.4)


def fit_density(mesh: int, seed: int, margin: float) -> tuple[float, float]:
    S = gen_sphere(mesh)
    p = density_params_for(max(SPHERE_S_GRID), LAM)
    fitted = [check_density_bound(S.chain, S.complex.coords[v], p, SPHERE_S_GRID).notes["C"]
              for v in sphere_sample_points(S.complex, 20, seed)]
    lo = min(fitted)
    return lo, float(math.floor(margin * lo))


def fit_covering(meshes, margin: float) -> tuple[float, float]:
    worst = 0.0
    for mesh in meshes:
        S = gen_sphere(mesh)
        P = PointCloud(support_sample(S.chain, min(EPS_GRID) / 4))
        rhs_unit = LAM ** 6 * mass(S.chain).total
        for e in EPS_GRID:
            worst = max(worst, covering_number(P, e, mode="greedy") * e ** 2 / rhs_unit)
    return worst, math.ceil(margin * worst * 1000) / 1000


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--mesh", type=int, default=4)
    ap.add_argument("--seed", type=int, default=0)
    ap.add_argument("--margin", type=float, default=0.9, help="density safety factor (< 1)")
    ap.add_argument("--cover-margin", type=float, default=1.5, help="covering safety factor (> 1)")
    ap.add_argument("--write", action="store_true", help="freeze the constants into config.py")
    args = ap.parse_args()

    c_min, C = fit_density(args.mesh, args.seed, args.margin)
    k_max, K = fit_covering((2, 3, 4), args.cover_margin)
    print(f"density: min fitted C = {c_min:.6g}  -> frozen {C:g}")
    print(f"covering: max ratio K = {k_max:.6g}  -> frozen {K:g}")
    if args.write:
        path = Path(__file__).resolve().parents[1] / "src" / "gmtlab" / "config.py"
        text = path.read_text()
        text = re.sub(r"^DENSITY_C = .*$", f"DENSITY_C = {C!r}", text, flags=re.M)
        text = re.sub(r"^COVERING_K = .*$", f"COVERING_K = {K!r}", text, flags=re.M)
        path.write_text(text)
        print(f"wrote {path}")


if __name__ == "__main__":
    main()
