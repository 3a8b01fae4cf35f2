"""``gmtlab`` command line: generate families, compute quantities, run checks.

Exit codes: 0 success / pass, 1 usage or I/O error, 2 check failure,
3 inconclusive.
"""
from __future__ import annotations

import argparse
import sys
from concurrent.futures import ProcessPoolExecutor
from pathlib import Path


from . import harness
from . import io as gio
from .chains import IntegralChain, boundary, mass
from .config import RunConfig, parse_config_file, worker_count
from .errors import GmtError
from .flatnorm import filling_radius, filling_volume, flat_norm
from .generators import FamilyDescriptor, frostman_weights, gen_ellipsoid, gen_sphere, gen_torus, gen_ultrametric
from .metric import covering_number, gh_distance, hausdorff_distance, hausdorff_measure_bounds
from .report import ExperimentReport, content_hash, dumps, emit_report, plain, write_atomic
from .tower import TowerParams, gen_tower, tower_formulas

EXIT = {"pass": 0, "fail": 2, "inconclusive": 3}


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _common() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(add_help=False)
    p.add_argument("--out", default=argparse.SUPPRESS, help="output directory")
    p.add_argument("--format", choices=("json", "csv"), default=argparse.SUPPRESS)
    p.add_argument("--seed", type=int, default=argparse.SUPPRESS)
    p.add_argument("--mesh", type=int, default=argparse.SUPPRESS)
    p.add_argument("--grid", default=argparse.SUPPRESS, help="comma-separated reals")
    p.add_argument("--config", default=argparse.SUPPRESS, help="file of key=value lines")
    return p


def build_parser() -> argparse.ArgumentParser:
    common = _common()
    ap = _Parser(prog="gmtlab", description=__doc__, parents=[common],
                 formatter_class=argparse.RawDescriptionHelpFormatter)
    sub = ap.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("gen", parents=[common], help="generate a family member")
    g.add_argument("family", choices=("torus", "ellipsoid", "sphere", "ultrametric", "tower"))
    g.add_argument("--n", type=int, default=1)
    g.add_argument("--ambient", action="store_true", help="also write a solid ambient complex")
    g.add_argument("--N", type=int, default=4)
    g.add_argument("--m", type=int, default=2)
    g.add_argument("--depth", type=int, default=3)
    g.add_argument("--L", type=int, default=2)
    g.add_argument("--alpha", type=float, default=0.5)

    for name in ("mass", "boundary", "flatnorm", "fillvol", "fillrad"):
        c = sub.add_parser(name, parents=[common])
        c.add_argument("--complex", help="complex JSON (default OUT/complex.json)")
        c.add_argument("--chain", help="chain JSON (default OUT/chain.json)")
        c.add_argument("--in", dest="indir", help="directory holding complex.json and chain.json")
        if name in ("flatnorm", "fillvol"):
            c.add_argument("--solver", choices=("auto", "exact", "highs"), default="auto")

    h = sub.add_parser("hausdorff", parents=[common])
    h.add_argument("--space", required=True)
    h.add_argument("--A", required=True, help="comma-separated point indices")
    h.add_argument("--B", required=True)

    q = sub.add_parser("gh", parents=[common])
    q.add_argument("--space", required=True)
    q.add_argument("--space2", required=True)
    q.add_argument("--mode", choices=("exact", "lower_bound"), default="exact")

    c = sub.add_parser("cover", parents=[common])
    c.add_argument("--space", required=True)
    c.add_argument("--eps", type=float, required=True)
    c.add_argument("--mode", choices=("exact", "greedy"), default="exact")

    ms = sub.add_parser("measure", parents=[common])
    ms.add_argument("--space", required=True)
    ms.add_argument("--m", type=int, required=True)
    ms.add_argument("--measure", help="measure JSON for the lower estimate")
    ms.add_argument("--growth", type=float, help="growth constant K to certify")

    v = sub.add_parser("verify", parents=[common], help="run one check")
    v.add_argument("check", choices=sorted(CHECKS))
    v.add_argument("--family", choices=("torus", "ellipsoid", "sphere"), default="torus")
    v.add_argument("--N", type=int, default=4)
    v.add_argument("--m", type=int, default=2)
    v.add_argument("--depth", type=int, default=3)
    v.add_argument("--L", type=int, default=2)
    v.add_argument("--alpha", type=float, default=0.5)
    v.add_argument("--n", type=int, default=2)
    v.add_argument("--lam", type=float, default=2.0)

    sub.add_parser("suite", parents=[common], help="run every acceptance check")
    return ap


# ---------------------------------------------------------------- helpers

def _config(args) -> RunConfig:
    cfg = RunConfig(command=args.command)
    if getattr(args, "config", None):
        cfg.update(parse_config_file(args.config))
    for key in ("out", "format", "seed", "mesh", "grid"):
        if hasattr(args, key):
            cfg.update({key: getattr(args, key)})
    cfg.workers = worker_count(cfg.workers)
    skip = {"command", "family", "check", "config", "out", "format", "seed", "mesh", "grid", "indir"}
    cfg.inputs = {k: v for k, v in sorted(vars(args).items()) if k not in skip and v is not None}
    for k in ("family", "check"):
        if hasattr(args, k):
            cfg.inputs[k] = getattr(args, k)
    return cfg


def _provenance(cfg: RunConfig) -> dict:
    d = cfg.to_dict()
    # output location and worker count do not change results
    d.pop("out", None)
    d.pop("workers", None)
    argv = ["gmtlab", cfg.command]
    for k, v in sorted(cfg.inputs.items()):
        if k in ("family", "check"):
            argv.insert(2, str(v))
        elif isinstance(v, bool):
            if v:
                argv.append(f"--{k}")
        else:
            argv += [f"--{k}", str(v)]
    if cfg.mesh is not None:
        argv += ["--mesh", str(cfg.mesh)]
    if cfg.grid:
        argv += ["--grid", ",".join(repr(g) for g in cfg.grid)]
    argv += ["--seed", str(cfg.seed)]
    return {"config": d, "regenerate": " ".join(argv)}


def _write(cfg: RunConfig, name: str, payload: dict) -> Path:
    doc = dict(plain(payload))
    doc["provenance"] = {**_provenance(cfg), "content_hash": content_hash(payload)}
    return write_atomic(Path(cfg.out) / name, dumps(doc))


def _inputs(args, cfg):
    base = Path(args.indir) if getattr(args, "indir", None) else Path(cfg.out)
    cpath = args.complex or base / "complex.json"
    tpath = args.chain or base / "chain.json"
    K = gio.complex_from_json(gio.read_json(cpath))
    # an empty chain file (zero bytes or {}) is the zero chain one below the top
    if Path(tpath).exists() and Path(tpath).stat().st_size == 0:
        d = {}
    else:
        d = gio.read_json(tpath)
    if not d:
        return K, IntegralChain(K, max(K.dim - 1, 0))
    return K, gio.chain_from_json(d, K)


def _indices(s: str) -> list[int]:
    try:
        return [int(x) for x in s.split(",") if x.strip()]
    except ValueError:
        raise GmtError(f"expected comma-separated indices, got {s!r}") from None


# --------------------------------------------------------------- commands

def cmd_gen(args, cfg) -> int:
    mesh = cfg.mesh
    fam = args.family
    out = {}
    if fam in ("torus", "ellipsoid", "sphere"):
        if fam == "torus":
            mesh = 64 if mesh is None else mesh
            S = gen_torus(args.n, mesh, ambient=args.ambient)
        elif fam == "ellipsoid":
            mesh = 32 if mesh is None else mesh
            S = gen_ellipsoid(args.n, mesh, ambient=args.ambient)
        else:
            mesh = 4 if mesh is None else mesh
            S = gen_sphere(mesh)
        desc = FamilyDescriptor(fam, args.n, mesh, cfg.seed)
        _write(cfg, "complex.json", gio.complex_to_json(S.complex))
        _write(cfg, "chain.json", gio.chain_to_json(S.chain))
        if S.ambient is not None:
            _write(cfg, "ambient.json", gio.complex_to_json(S.ambient))
            _write(cfg, "ambient_chain.json", gio.chain_to_json(S.ambient_chain))
        out = {"descriptor": desc.to_dict(), "mass": mass(S.chain).total}
    elif fam == "ultrametric":
        U = gen_ultrametric(args.N, args.m, args.depth)
        _write(cfg, "space.json", gio.space_to_json(U))
        _write(cfg, "measure.json", gio.measure_to_json(frostman_weights(args.N, args.depth, U)))
        out = {"descriptor": {"family": "ultrametric", "N": args.N, "m": args.m, "depth": args.depth},
               "a": U.a_exact if U.a_exact is not None else U.a, "points": U.n}
    else:
        p = TowerParams(args.m, args.L, args.alpha, args.n, 2 if mesh is None else mesh)
        X = gen_tower(p)
        F = tower_formulas(p)
        _write(cfg, "space.json", gio.space_to_json(X.metric_space()))
        _write(cfg, "markers.json", {"markers": X.markers})
        out = {"descriptor": {"family": "tower", "m": p.m, "L": p.L, "alpha": p.alpha, "n": p.n, "mesh": p.mesh},
               "facet_area": X.facet_area, "area_closed_form": F.area_closed_form,
               "contractibility_C": F.contractibility_C}
    _write(cfg, "descriptor.json", out)
    print(dumps(out), end="")
    return 0


def cmd_chain_op(args, cfg) -> int:
    K, T = _inputs(args, cfg)
    if args.command == "mass":
        mb = mass(T)
        out = {"mass": mb.total, "simplices": len(mb.per_simplex), "volume_metric": K.volume_metric}
    elif args.command == "boundary":
        B = boundary(T)
        _write(cfg, "boundary_chain.json", gio.chain_to_json(B))
        out = {"dim": B.dim, "terms": len(B.terms), "mass": mass(B).total, "is_zero": B.is_zero()}
    elif args.command in ("flatnorm", "fillvol"):
        W = flat_norm(T, solver=args.solver) if args.command == "flatnorm" else filling_volume(T, solver=args.solver)
        _write(cfg, f"{args.command}_witness.json", gio.witness_to_json(W, T))
        out = {"value": W.value, "value_exact": W.value_exact, "optimality": W.optimality, "solver": W.solver,
               "verified": W.verify(T)}
    else:
        fr = filling_radius(T, r_grid=cfg.grid, max_dim=T.dim + 1)
        out = {"value": fr.value, "halved": fr.halved, "grid": fr.grid, "coefficients": fr.coefficients}
    _write(cfg, f"{args.command}.json", out)
    print(dumps(out), end="")
    return 0


def cmd_space_op(args, cfg) -> int:
    X = gio.space_from_json(gio.read_json(args.space))
    if args.command == "hausdorff":
        out = {"value": hausdorff_distance(_indices(args.A), _indices(args.B), X)}
    elif args.command == "gh":
        Y = gio.space_from_json(gio.read_json(args.space2))
        out = {"value": gh_distance(X, Y, args.mode), "mode": args.mode}
    elif args.command == "cover":
        out = {"value": covering_number(X, args.eps, args.mode), "mode": args.mode, "eps": args.eps}
    else:
        if not cfg.grid:
            raise GmtError("measure needs --grid with a decreasing delta schedule")
        mu = gio.measure_from_json(gio.read_json(args.measure)) if args.measure else None
        mb = hausdorff_measure_bounds(X, args.m, cfg.grid, measure=mu, growth_constant=args.growth)
        out = {"upper": mb.upper, "upper_coeff": mb.upper_coeff, "upper_delta": mb.upper_delta,
               "lower": mb.lower, "lower_coeff": mb.lower_coeff, "growth_certified": mb.growth_certified,
               "omega": mb.omega}
    _write(cfg, f"{args.command}.json", out)
    print(dumps(out), end="")
    return 0


def _verify_cancellation(args, cfg) -> ExperimentReport:
    if args.family == "torus":
        return harness.suite_torus(cfg.mesh or 64)
    if args.family == "ellipsoid":
        return harness.suite_ellipsoid(cfg.mesh or 32)
    fam = harness.sphere_family(3, cfg.mesh or 2)
    return harness.cancellation_diagnostics(fam, gen_sphere(cfg.mesh or 2).complex.coords, expected="stable",
                                            inputs={"family": "sphere"})


def _verify_covering(args, cfg) -> ExperimentReport:
    S = gen_sphere(cfg.mesh if cfg.mesh is not None else 3)
    grid = cfg.grid or [0.05, 0.1, 0.2, 0.4]
    r0 = float(harness.radius_window(2, args.lam, 1) ** -1) * max(grid) * 2
    return harness.check_covering_bound(S.chain, args.lam, r0, grid, cfg.calibration.covering_K,
                                        inputs={"family": "sphere", "mesh": cfg.mesh or 3})


def _verify_density(args, cfg) -> ExperimentReport:
    if cfg.grid:
        harness_grid = cfg.grid
    else:
        harness_grid = harness.SPHERE_S_GRID
    if harness_grid is harness.SPHERE_S_GRID and cfg.mesh in (None, 4):
        return harness.suite_density(cfg.calibration, cfg.seed)
    S = gen_sphere(cfg.mesh if cfg.mesh is not None else 4)
    p = harness.density_params_for(max(harness_grid), args.lam, C=cfg.calibration.density_C)
    return harness.check_density_bound(S.chain, S.complex.coords[0], p, harness_grid,
                                       inputs={"family": "sphere", "mesh": cfg.mesh})


CHECKS = {
    "ultrametric-lemma": lambda a, c: harness.check_ultrametric_lemma(a.N, a.m, a.depth),
    "ultrametric-covering": lambda a, c: harness.check_ultrametric_covering(a.N, a.m, a.depth),
    "tower": lambda a, c: harness.check_tower_geometry(TowerParams(a.m, a.L, a.alpha, a.n, c.mesh or 2)),
    "cancellation": _verify_cancellation,
    "density": _verify_density,
    "fillrad": lambda a, c: harness.suite_fillrad(c.mesh if c.mesh is not None else 2),
    "covering": _verify_covering,
    "ilp-oracle": lambda a, c: harness.check_ilp_oracle(50, c.seed),
    "hexagon": lambda a, c: harness.check_hexagon_fillrad(),
}


def _emit(cfg, rep: ExperimentReport, stem: str) -> None:
    ext = "csv" if cfg.format == "csv" else "json"
    emit_report(rep, Path(cfg.out) / f"{stem}.{ext}", cfg.format, _provenance(cfg))


def cmd_verify(args, cfg) -> int:
    rep = CHECKS[args.check](args, cfg)
    _emit(cfg, rep, args.check)
    print(f"{rep.name}: {rep.verdict}" + (f" ({rep.classification})" if rep.classification else ""))
    return EXIT[rep.verdict]


def _run_suite_job(name: str, cfg: RunConfig) -> ExperimentReport:
    return harness.SUITE[name](cfg)


def cmd_suite(args, cfg) -> int:
    names = list(harness.SUITE)
    if cfg.workers > 1:
        with ProcessPoolExecutor(cfg.workers) as ex:
            reports = list(ex.map(_run_suite_job, names, [cfg] * len(names)))
    else:
        reports = [_run_suite_job(n, cfg) for n in names]
    summary = {}
    for name, rep in zip(names, reports):
        _emit(cfg, rep, name)
        summary[name] = rep.verdict
        print(f"{name}: {rep.verdict}")
    _write(cfg, "suite.json", {"verdicts": summary})
    verdicts = set(summary.values())
    return 2 if "fail" in verdicts else 3 if "inconclusive" in verdicts else 0


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        cfg = _config(args)
        if args.command == "gen":
            return cmd_gen(args, cfg)
        if args.command in ("mass", "boundary", "flatnorm", "fillvol", "fillrad"):
            return cmd_chain_op(args, cfg)
        if args.command in ("hausdorff", "gh", "cover", "measure"):
            return cmd_space_op(args, cfg)
        if args.command == "verify":
            return cmd_verify(args, cfg)
        return cmd_suite(args, cfg)
    except (GmtError, OSError) as e:
        print(f"gmtlab: error: {e}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
