#!/usr/bin/env python3
"""Print mass, flat norm and Hausdorff distance along one surface family."""
from __future__ import annotations

import argparse

from gmtlab.chains import mass
from gmtlab.flatnorm import flat_norm
from gmtlab.harness import circle_sample, disc_sample, ellipsoid_family, support_sample, torus_family
from gmtlab.metric import hausdorff_distance_points


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("family", choices=("torus", "ellipsoid"))
    ap.add_argument("--ns", default=None, help="comma-separated family indices")
    ap.add_argument("--mesh", type=int, default=None)
    args = ap.parse_args()
    if args.family == "torus":
        ns = tuple(int(x) for x in (args.ns or "1,2,4,8").split(","))
        fam, ref = torus_family(ns, args.mesh or 64), circle_sample()
    else:
        ns = tuple(int(x) for x in (args.ns or "1,4,16,64").split(","))
        fam, ref = ellipsoid_family(ns, args.mesh or 32), disc_sample()
    print(f"{'n':>4} {'mass':>10} {'flat':>10} {'d_H':>8}")
    for n, mem in zip(ns, fam):
        T = mem.ambient_chain if mem.ambient_chain is not None else mem.chain
        fl = flat_norm(T).value if mem.ambient_chain is not None else float("nan")
        dh = hausdorff_distance_points(support_sample(mem.chain, 0.02), ref)
        print(f"{n:>4} {mass(mem.chain).total:>10.4f} {fl:>10.4f} {dh:>8.4f}")


if __name__ == "__main__":
    main()
