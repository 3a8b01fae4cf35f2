"""JSON formats for spaces, measures, complexes, chains and filling witnesses.

Reals are written as decimal strings (shortest round-trip ``repr``), so dyadic
values survive exactly.
"""
from __future__ import annotations

import json
from fractions import Fraction
from pathlib import Path

import numpy as np

from .chains import EmbeddedComplex, IntegralChain
from .errors import GmtError
from .flatnorm import FillingWitness
from .metric import FiniteMetricSpace, WeightedMeasure


def _real(x) -> str:
    return repr(float(x))


def _parse_real(s, field: str) -> float:
    try:
        return float(s)
    except (TypeError, ValueError):
        raise GmtError(f"field {field!r}: expected a real, got {s!r}") from None


def _need(d: dict, key: str, where: str):
    if not isinstance(d, dict) or key not in d:
        raise GmtError(f"{where}: missing field {key!r}")
    return d[key]


# --------------------------------------------------------------- spaces

def space_to_json(X: FiniteMetricSpace) -> dict:
    iu = np.triu_indices(X.n, 1)
    return {"n": X.n, "dist_upper": [_real(v) for v in X.dist[iu]], "ultrametric": bool(X.ultrametric),
            "exact": bool(X.exact)}


def space_from_json(d: dict) -> FiniteMetricSpace:
    n = int(_need(d, "n", "space"))
    up = _need(d, "dist_upper", "space")
    if len(up) != n * (n - 1) // 2:
        raise GmtError(f"field 'dist_upper': expected {n * (n - 1) // 2} entries, got {len(up)}")
    D = np.zeros((n, n))
    iu = np.triu_indices(n, 1)
    D[iu] = [_parse_real(v, "dist_upper") for v in up]
    D = D + D.T
    return FiniteMetricSpace(D, ultrametric=bool(d.get("ultrametric", False)), exact=bool(d.get("exact", False)))


def measure_to_json(mu: WeightedMeasure) -> dict:
    out = {"weights": [_real(w) for w in mu.weights]}
    if mu.exact is not None:
        out["exact"] = [str(Fraction(w)) for w in mu.exact]
    return out


def measure_from_json(d: dict) -> WeightedMeasure:
    w = [_parse_real(v, "weights") for v in _need(d, "weights", "measure")]
    ex = d.get("exact")
    return WeightedMeasure(np.array(w), [Fraction(v) for v in ex] if ex is not None else None)


# ------------------------------------------------------------- complexes

def complex_to_json(K: EmbeddedComplex) -> dict:
    return {
        "ambient_dim": K.ambient_dim,
        "norm": K.norm,
        "n_vertices": K.n_vertices,
        "vertices": None if K.coords is None else [[_real(c) for c in row] for row in K.coords],
        "simplices": {str(k): [list(s) for s in lst] for k, lst in enumerate(K.simplices)},
    }


def complex_from_json(d: dict) -> EmbeddedComplex:
    simp = _need(d, "simplices", "complex")
    verts = d.get("vertices")
    try:
        simplices = {int(k): [tuple(int(v) for v in s) for s in lst] for k, lst in simp.items()}
    except (TypeError, ValueError, AttributeError):
        raise GmtError("field 'simplices': expected {dim: [[v, ...], ...]}") from None
    if verts is None:
        return EmbeddedComplex(None, simplices, norm=d.get("norm", "euclidean"),
                               n_vertices=int(_need(d, "n_vertices", "complex")))
    V = np.array([[_parse_real(c, "vertices") for c in row] for row in verts], dtype=float)
    return EmbeddedComplex(V, simplices, norm=d.get("norm", "euclidean"))


def chain_to_json(T: IntegralChain) -> dict:
    return {"dim": T.dim, "terms": [[[T.dim, p], c] for p, c in T.terms.items()]}


def chain_from_json(d: dict, K: EmbeddedComplex) -> IntegralChain:
    dim = int(_need(d, "dim", "chain"))
    terms = {}
    for item in _need(d, "terms", "chain"):
        try:
            (k, pos), c = item
        except (TypeError, ValueError):
            raise GmtError("field 'terms': expected [[dim, position], coefficient] entries") from None
        if int(k) != dim:
            raise GmtError(f"field 'terms': simplex of dimension {k} in a {dim}-chain")
        terms[int(pos)] = terms.get(int(pos), 0) + int(c)
    return IntegralChain(K, dim, terms)


def witness_to_json(W: FillingWitness, target: IntegralChain) -> dict:
    return {
        "ambient": complex_to_json(target.complex),
        "target": chain_to_json(target),
        "S": chain_to_json(W.S),
        "X": chain_to_json(W.X),
        "value": W.value,
        "value_exact": str(W.value_exact),
        "optimality": W.optimality,
        "solver": W.solver,
    }


def witness_from_json(d: dict) -> tuple[FillingWitness, IntegralChain]:
    K = complex_from_json(_need(d, "ambient", "witness"))
    T = chain_from_json(_need(d, "target", "witness"), K)
    S = chain_from_json(_need(d, "S", "witness"), K)
    X = chain_from_json(_need(d, "X", "witness"), K)
    W = FillingWitness(S, X, float(d["value"]), Fraction(d["value_exact"]), d["optimality"], d.get("solver", ""))
    return W, T


# ------------------------------------------------------------------ files

def read_json(path) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except FileNotFoundError:
        raise GmtError(f"input file not found: {path}") from None
    except json.JSONDecodeError as e:
        raise GmtError(f"{path}: invalid JSON ({e.msg} at line {e.lineno})") from None


def load_complex_chain(complex_path, chain_path) -> tuple[EmbeddedComplex, IntegralChain]:
    K = complex_from_json(read_json(complex_path))
    return K, chain_from_json(read_json(chain_path), K)


def find_input(directory, name: str) -> Path:
    p = Path(directory) / name
    if not p.exists():
        raise GmtError(f"input file not found: {p}")
    return p
