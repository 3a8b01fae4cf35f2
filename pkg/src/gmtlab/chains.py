"""Oriented simplicial complexes and integer chains on them."""
from __future__ import annotations

import itertools
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable, Mapping, Sequence

import numpy as np

from .errors import ComplexError


def perm_sign(seq: Sequence[int]) -> int:
    """Sign of the permutation sorting ``seq`` (entries distinct)."""
    seq = list(seq)
    sign = 1
    for i in range(len(seq)):
        for j in range(i + 1, len(seq)):
            if seq[i] > seq[j]:
                sign = -sign
    return sign


def simplex_volumes(coords: np.ndarray, simplices: np.ndarray) -> np.ndarray:
    """Euclidean k-volumes via Gram determinants, vectorized over simplices."""
    if simplices.shape[1] == 1:
        return np.ones(len(simplices))
    k = simplices.shape[1] - 1
    base = coords[simplices[:, 0]]
    E = coords[simplices[:, 1:]] - base[:, None, :]
    G = np.einsum("nik,njk->nij", E, E)
    det = np.linalg.det(G) if k > 1 else G[:, 0, 0]
    return np.sqrt(np.clip(det, 0.0, None)) / math.factorial(k)


class EmbeddedComplex:
    """A simplicial complex, closed under faces, with optional vertex coordinates.

    ``simplices[k]`` lists the k-simplices as vertex tuples whose order fixes
    the orientation. Volumes come from Gram determinants in Euclidean
    coordinates even when ``norm == "sup"``; ``volume_metric`` records this.
    Without coordinates (``vertices is None``) the complex is abstract and
    simplices carry unit volume unless ``volume_fn`` is supplied.
    """

    volume_metric = "euclidean"

    def __init__(self, vertices, simplices: Mapping[int, Iterable[Sequence[int]]] | Sequence,
                 norm: str = "euclidean", n_vertices: int | None = None,
                 volume_fn: Callable[[tuple], float] | None = None, validate: bool = True):
        if norm not in ("euclidean", "sup"):
            raise ComplexError(f"unknown norm {norm!r}")
        self.norm = norm
        if vertices is None:
            self.coords = None
            if n_vertices is None:
                raise ComplexError("abstract complex needs n_vertices")
            self.n_vertices = int(n_vertices)
        else:
            self.coords = np.atleast_2d(np.asarray(vertices, dtype=float))
            self.coords.setflags(write=False)
            self.n_vertices = self.coords.shape[0]
        if not isinstance(simplices, Mapping):
            simplices = dict(enumerate(simplices))
        simplices = {int(k): [tuple(int(v) for v in s) for s in lst] for k, lst in simplices.items()}
        top = max((k for k, lst in simplices.items() if lst or k == 0), default=0)
        self.simplices: list[list[tuple]] = [simplices.get(k, []) for k in range(top + 1)]
        if not self.simplices[0]:
            self.simplices[0] = [(i,) for i in range(self.n_vertices)]
        self.volume_fn = volume_fn
        self._index: list[dict] = []
        for k, lst in enumerate(self.simplices):
            idx = {}
            for pos, s in enumerate(lst):
                if len(s) != k + 1:
                    raise ComplexError(f"simplex {s} listed in dimension {k}")
                if len(set(s)) != len(s):
                    raise ComplexError(f"simplex {s} repeats a vertex")
                key = tuple(sorted(s))
                if key in idx:
                    raise ComplexError(f"simplex {s} listed twice")
                idx[key] = (pos, perm_sign(s))
            self._index.append(idx)
        self._volumes: dict[int, np.ndarray] = {}
        if validate:
            self._validate()

    @classmethod
    def from_top(cls, vertices, tops: Sequence[Sequence[int]], norm: str = "euclidean",
                 extra: Sequence[Sequence[int]] = (), **kw) -> "EmbeddedComplex":
        """Close a list of top simplices (and any ``extra`` ones) under faces.

        Top simplices keep their vertex order; generated faces are stored sorted.
        """
        by_dim: dict[int, dict[tuple, tuple]] = {}
        for s in list(tops) + list(extra):
            s = tuple(int(v) for v in s)
            by_dim.setdefault(len(s) - 1, {}).setdefault(tuple(sorted(s)), s)
        top = max(by_dim) if by_dim else 0
        for k in range(top, 0, -1):
            for key in list(by_dim.get(k, {})):
                for face in itertools.combinations(key, k):
                    by_dim.setdefault(k - 1, {}).setdefault(face, face)
        n = None
        if vertices is None:
            n = kw.pop("n_vertices", None)
        simp = {k: list(by_dim.get(k, {}).values()) for k in range(top + 1)}
        if vertices is not None:
            nv = len(vertices)
            simp[0] = [(i,) for i in range(nv)]
        elif n is not None:
            simp[0] = [(i,) for i in range(n)]
        return cls(vertices, simp, norm=norm, n_vertices=n, **kw)

    def _validate(self) -> None:
        for s in self.simplices[0]:
            if not 0 <= s[0] < self.n_vertices:
                raise ComplexError(f"vertex {s[0]} out of range")
        for k in range(1, self.dim + 1):
            for s in self.simplices[k]:
                for face in itertools.combinations(sorted(s), k):
                    if face not in self._index[k - 1]:
                        raise ComplexError(f"face {face} of {s} is not listed")
        if self.coords is not None:
            for k in range(1, self.dim + 1):
                vol = self.volumes(k)
                if len(vol) and vol.min() <= 0:
                    bad = int(np.argmin(vol))
                    raise ComplexError(f"simplex {self.simplices[k][bad]} has zero volume")

    @property
    def dim(self) -> int:
        return len(self.simplices) - 1

    @property
    def ambient_dim(self) -> int:
        return 0 if self.coords is None else self.coords.shape[1]

    @property
    def abstract(self) -> bool:
        return self.coords is None

    def count(self, k: int) -> int:
        return len(self.simplices[k]) if 0 <= k <= self.dim else 0

    def lookup(self, verts: Sequence[int]) -> tuple[int, int] | None:
        """Return ``(position, sign)`` of the oriented simplex ``verts``, or None."""
        k = len(verts) - 1
        if k > self.dim:
            return None
        hit = self._index[k].get(tuple(sorted(verts)))
        if hit is None:
            return None
        pos, stored = hit
        return pos, stored * perm_sign(verts)

    def volumes(self, k: int) -> np.ndarray:
        if k not in self._volumes:
            lst = self.simplices[k] if k <= self.dim else []
            if not lst:
                vol = np.zeros(0)
            elif self.coords is None:
                fn = self.volume_fn or (lambda s: 1.0)
                vol = np.array([float(fn(s)) for s in lst])
            else:
                vol = simplex_volumes(self.coords, np.asarray(lst, dtype=int))
            vol.setflags(write=False)
            self._volumes[k] = vol
        return self._volumes[k]

    def barycenters(self, k: int) -> np.ndarray:
        if self.coords is None:
            raise ComplexError("abstract complex has no barycenters")
        return self.coords[np.asarray(self.simplices[k], dtype=int)].mean(axis=1)

    def distance_to(self, z, pts: np.ndarray) -> np.ndarray:
        diff = pts - np.asarray(z, dtype=float)
        if self.norm == "sup":
            return np.abs(diff).max(axis=-1)
        return np.sqrt((diff * diff).sum(axis=-1))

    def __repr__(self) -> str:
        counts = [len(s) for s in self.simplices]
        return f"EmbeddedComplex(counts={counts}, norm={self.norm!r})"


class IntegralChain:
    """Sparse integer-coefficient ``dim``-chain on an :class:`EmbeddedComplex`.

    ``terms`` maps simplex positions (in ``complex.simplices[dim]``) to nonzero
    integers. Chains are values: arithmetic returns new chains.
    """

    __slots__ = ("complex", "dim", "terms", "meta")

    def __init__(self, complex: EmbeddedComplex, dim: int, terms: Mapping[int, int] | None = None,
                 meta: dict | None = None):
        self.complex = complex
        self.dim = int(dim)
        clean = {}
        n = complex.count(self.dim)
        for pos, c in (terms or {}).items():
            c = int(c)
            pos = int(pos)
            if c == 0:
                continue
            if not 0 <= pos < n:
                raise ComplexError(f"no {self.dim}-simplex at position {pos}")
            clean[pos] = c
        self.terms = dict(sorted(clean.items()))
        self.meta = dict(meta or {})

    @classmethod
    def zero(cls, complex: EmbeddedComplex, dim: int) -> "IntegralChain":
        return cls(complex, dim)

    @classmethod
    def from_simplices(cls, complex: EmbeddedComplex, items: Mapping[tuple, int] | Iterable,
                       dim: int | None = None) -> "IntegralChain":
        """Build from oriented vertex tuples; orientation differences flip signs."""
        if isinstance(items, Mapping):
            items = items.items()
        else:
            items = [(s, 1) for s in items]
        terms: dict[int, int] = {}
        for s, c in items:
            d = len(s) - 1
            if dim is None:
                dim = d
            elif d != dim:
                raise ComplexError("mixed dimensions in chain")
            hit = complex.lookup(s)
            if hit is None:
                raise ComplexError(f"simplex {tuple(s)} is not in the complex")
            pos, sign = hit
            terms[pos] = terms.get(pos, 0) + sign * int(c)
        return cls(complex, 0 if dim is None else dim, terms)

    def as_dict(self) -> dict[tuple, int]:
        """Terms keyed by the stored oriented vertex tuples."""
        lst = self.complex.simplices[self.dim]
        return {lst[p]: c for p, c in self.terms.items()}

    def oriented(self) -> dict[tuple, int]:
        """Terms keyed by sorted vertex tuples, signs adjusted to that order."""
        out = {}
        for s, c in self.as_dict().items():
            out[tuple(sorted(s))] = c * perm_sign(s)
        return out

    def transfer(self, target: EmbeddedComplex) -> "IntegralChain":
        """The same chain on another complex sharing vertex numbering."""
        return IntegralChain.from_simplices(target, self.as_dict(), dim=self.dim)

    def is_zero(self) -> bool:
        return not self.terms

    def _check(self, other: "IntegralChain") -> None:
        if other.complex is not self.complex or other.dim != self.dim:
            raise ComplexError("chains live on different complexes or dimensions")

    def __add__(self, other: "IntegralChain") -> "IntegralChain":
        self._check(other)
        t = dict(self.terms)
        for p, c in other.terms.items():
            t[p] = t.get(p, 0) + c
        return IntegralChain(self.complex, self.dim, t)

    def __neg__(self) -> "IntegralChain":
        return IntegralChain(self.complex, self.dim, {p: -c for p, c in self.terms.items()})

    def __sub__(self, other: "IntegralChain") -> "IntegralChain":
        return self + (-other)

    def __mul__(self, k: int) -> "IntegralChain":
        return IntegralChain(self.complex, self.dim, {p: int(k) * c for p, c in self.terms.items()})

    __rmul__ = __mul__

    def __eq__(self, other) -> bool:
        if not isinstance(other, IntegralChain):
            return NotImplemented
        if other.complex is self.complex:
            return other.dim == self.dim and other.terms == self.terms
        return other.dim == self.dim and other.oriented() == self.oriented()

    def __hash__(self):
        return hash((self.dim, tuple(self.terms.items())))

    def __repr__(self) -> str:
        return f"IntegralChain(dim={self.dim}, terms={len(self.terms)})"


@dataclass
class MassBreakdown:
    total: float
    per_simplex: dict = field(default_factory=dict)


def boundary(T: IntegralChain) -> IntegralChain:
    if T.dim == 0:
        raise ComplexError("0-chains have no boundary")
    K = T.complex
    lst = K.simplices[T.dim]
    out: dict[int, int] = {}
    for pos, c in T.terms.items():
        s = lst[pos]
        for i in range(len(s)):
            face = s[:i] + s[i + 1:]
            fpos, sign = K.lookup(face)
            out[fpos] = out.get(fpos, 0) + (-1) ** i * sign * c
    return IntegralChain(K, T.dim - 1, out)


def mass(T: IntegralChain) -> MassBreakdown:
    vol = T.complex.volumes(T.dim)
    per = {p: abs(c) * float(vol[p]) for p, c in T.terms.items()}
    return MassBreakdown(math.fsum(per.values()), per)


def mass_exact(T: IntegralChain) -> Fraction:
    """Mass as the exact rational sum of the stored floating volumes."""
    vol = T.complex.volumes(T.dim)
    return sum((abs(c) * Fraction(float(vol[p])) for p, c in T.terms.items()), Fraction(0))


def support(T: IntegralChain) -> frozenset:
    lst = T.complex.simplices[T.dim]
    return frozenset(v for p in T.terms for v in lst[p])


def restrict_barycenter(T: IntegralChain, z, r: float) -> IntegralChain:
    """Keep the simplices whose barycenter lies in the closed ball ``B(z, r)``."""
    if r <= 0:
        raise ComplexError("radius must be positive")
    K = T.complex
    if not T.terms:
        return IntegralChain(K, T.dim, meta={"policy": "barycenter", "radius": r})
    pos = np.fromiter(T.terms, dtype=int)
    bary = K.coords[np.asarray(K.simplices[T.dim], dtype=int)[pos]].mean(axis=1)
    inside = K.distance_to(z, bary) <= r
    terms = {int(p): T.terms[int(p)] for p in pos[inside]}
    return IntegralChain(K, T.dim, terms, meta={"policy": "barycenter", "radius": r})


def push_forward(T: IntegralChain, f: Mapping[int, int] | Sequence[int],
                 target: EmbeddedComplex) -> IntegralChain:
    """Image of ``T`` under a simplicial vertex map into ``target``.

    Degenerate images contribute nothing; orientation follows the parity of
    the image vertex order.
    """
    lst = T.complex.simplices[T.dim]
    out: dict[int, int] = {}
    for pos, c in T.terms.items():
        img = tuple(int(f[v]) for v in lst[pos])
        if len(set(img)) < len(img):
            continue
        hit = target.lookup(img)
        if hit is None:
            raise ComplexError(f"image simplex {img} is absent from the target complex")
        tpos, sign = hit
        out[tpos] = out.get(tpos, 0) + sign * c
    return IntegralChain(target, T.dim, out)


def _facet_cofaces(K: EmbeddedComplex) -> dict[tuple, list[tuple[int, int]]]:
    """Map each sorted (m-1)-face to its top simplices with induced signs."""
    m = K.dim
    cof: dict[tuple, list[tuple[int, int]]] = {}
    for pos, s in enumerate(K.simplices[m]):
        for i in range(len(s)):
            face = s[:i] + s[i + 1:]
            key = tuple(sorted(face))
            cof.setdefault(key, []).append((pos, (-1) ** i * perm_sign(face)))
    return cof


def coherent_orientation(K: EmbeddedComplex) -> list[int]:
    """Per-top-simplex signs making adjacent simplices induce opposite facet signs.

    Breadth-first from the lowest index of each component. Raises with a
    witness facet when the manifold is non-orientable.
    """
    m = K.dim
    cof = _facet_cofaces(K)
    nbrs: list[list[tuple[int, int, tuple]]] = [[] for _ in K.simplices[m]]
    for key, lst in cof.items():
        if len(lst) > 2:
            raise ComplexError(f"non-manifold facet {key} has {len(lst)} cofaces")
        if len(lst) == 2:
            (p, a), (q, b) = lst
            nbrs[p].append((q, -a * b, key))
            nbrs[q].append((p, -a * b, key))
    signs = [0] * len(K.simplices[m])
    for start in range(len(signs)):
        if signs[start]:
            continue
        signs[start] = 1
        queue = deque([start])
        while queue:
            p = queue.popleft()
            for q, rel, key in nbrs[p]:
                want = signs[p] * rel
                if signs[q] == 0:
                    signs[q] = want
                    queue.append(q)
                elif signs[q] != want:
                    raise ComplexError(f"non-orientable at facet {key}")
    return signs


def fundamental_chain(K: EmbeddedComplex, orientation: Sequence[int] | str = "auto") -> IntegralChain:
    """Chain with coefficient +-1 on every top simplex of a pseudo-manifold ``K``.

    Every (m-1)-simplex must have at most two cofaces; where it has two, the
    supplied orientation must make their induced signs cancel, otherwise the
    shared facet is reported.
    """
    m = K.dim
    cof = _facet_cofaces(K)
    for key, lst in cof.items():
        if len(lst) > 2:
            raise ComplexError(f"non-manifold facet {key} has {len(lst)} cofaces")
    if isinstance(orientation, str):
        if orientation != "auto":
            raise ComplexError(f"unknown orientation mode {orientation!r}")
        signs = coherent_orientation(K)
    else:
        signs = [int(s) for s in orientation]
        if len(signs) != len(K.simplices[m]) or any(s not in (1, -1) for s in signs):
            raise ComplexError("orientation needs one +-1 sign per top simplex")
        for key, lst in sorted(cof.items()):
            if len(lst) == 2:
                (p, a), (q, b) = lst
                if signs[p] * a + signs[q] * b != 0:
                    raise ComplexError(f"incoherent orientation across facet {key}")
    return IntegralChain(K, m, dict(enumerate(signs)))
