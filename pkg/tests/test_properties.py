"""Randomized invariants. The acceptance suite reuses these with fixed example counts."""
import math

import numpy as np
from hypothesis import HealthCheck, given, settings
from hypothesis import strategies as st

from gmtlab.chains import EmbeddedComplex, IntegralChain, boundary, mass, push_forward
from gmtlab.flatnorm import flat_distance, flat_norm
from gmtlab.generators import gen_ellipsoid, gen_sphere
from gmtlab.metric import FiniteMetricSpace, PointCloud, covering_number, gh_distance, hausdorff_distance

SOLID = gen_ellipsoid(2, 8, ambient=True).ambient
SPHERE = gen_sphere(1).complex
OCTAHEDRON = gen_sphere(0).complex
SIMPLEX4 = EmbeddedComplex.from_top(np.vstack([np.zeros(4), np.eye(4)]), [(0, 1, 2, 3, 4)])
CLOUD = PointCloud(np.random.default_rng(7).random((24, 2)))

FAST = settings(max_examples=60, deadline=None, derandomize=True,
                suppress_health_check=[HealthCheck.too_slow])


def chains(K, dim, max_terms=8):
    n = K.count(dim)
    return st.dictionaries(st.integers(0, n - 1), st.integers(-3, 3).filter(bool),
                           max_size=max_terms).map(lambda t: IntegralChain(K, dim, t))


def any_chain():
    return st.one_of(chains(SOLID, 3), chains(SOLID, 2), chains(SPHERE, 2), chains(SIMPLEX4, 4, 1),
                     chains(SIMPLEX4, 3))


def subsets(n):
    return st.sets(st.integers(0, n - 1), min_size=1, max_size=n).map(sorted)


# -------------------------------------------------------------- properties

@given(any_chain())
def boundary_of_boundary(T):
    if T.dim >= 2:
        assert boundary(boundary(T)).is_zero()


@given(chains(OCTAHEDRON, 1, 4), chains(OCTAHEDRON, 1, 4), chains(OCTAHEDRON, 1, 4))
def flat_triangle_and_symmetry(A, B, C):
    ab, ba = flat_distance(A, B), flat_distance(B, A)
    assert math.isclose(ab, ba, rel_tol=1e-12, abs_tol=1e-12)
    assert flat_distance(A, C) <= ab + flat_distance(B, C) + 1e-9


@given(st.lists(st.integers(0, 4), min_size=5, max_size=5), st.one_of(chains(SIMPLEX4, 2), chains(SIMPLEX4, 3)))
def push_forward_commutes(f, T):
    assert boundary(push_forward(T, f, SIMPLEX4)) == push_forward(boundary(T), f, SIMPLEX4)


@given(subsets(CLOUD.n), subsets(CLOUD.n), subsets(CLOUD.n))
def hausdorff_triangle(A, B, C):
    assert hausdorff_distance(A, C, CLOUD) <= hausdorff_distance(A, B, CLOUD) + hausdorff_distance(B, C, CLOUD) + 1e-12


# ------------------------------------------------------------------ tests

def test_boundary_of_boundary():
    FAST(boundary_of_boundary)()


def test_flat_triangle_and_symmetry():
    settings(FAST, max_examples=25)(flat_triangle_and_symmetry)()


def test_push_forward_commutes():
    FAST(push_forward_commutes)()


def test_hausdorff_triangle():
    FAST(hausdorff_triangle)()


@FAST
@given(chains(SPHERE, 2), st.integers(-4, 4))
def test_mass_homogeneous(T, k):
    assert math.isclose(mass(T * k).total, abs(k) * mass(T).total, rel_tol=1e-12, abs_tol=1e-15)


@FAST
@given(chains(SPHERE, 2), chains(SPHERE, 2))
def test_mass_subadditive(S, T):
    assert mass(S + T).total <= mass(S).total + mass(T).total + 1e-12


@settings(FAST, max_examples=25)
@given(chains(OCTAHEDRON, 1, 4))
def test_flat_norm_at_most_mass(T):
    W = flat_norm(T)
    assert W.value <= mass(T).total + 1e-12
    assert W.verify(T)


@FAST
@given(subsets(CLOUD.n), subsets(CLOUD.n))
def test_hausdorff_symmetric_and_zero_on_diagonal(A, B):
    assert hausdorff_distance(A, B, CLOUD) == hausdorff_distance(B, A, CLOUD)
    assert hausdorff_distance(A, A, CLOUD) == 0


@settings(FAST, max_examples=30)
@given(st.lists(st.floats(0, 4, allow_nan=False), min_size=1, max_size=12, unique=True), st.floats(0.05, 2.0))
def test_greedy_cover_dominates_exact(xs, eps):
    X = FiniteMetricSpace.from_points(np.array(xs)[:, None])
    assert covering_number(X, eps, "greedy") >= covering_number(X, eps, "exact") >= 1


@settings(FAST, max_examples=30)
@given(st.lists(st.floats(0, 3, allow_nan=False), min_size=1, max_size=3, unique=True),
       st.lists(st.floats(0, 3, allow_nan=False), min_size=1, max_size=3, unique=True))
def test_gh_symmetric_and_below_diameter(xs, ys):
    X = FiniteMetricSpace.from_points(np.array(xs)[:, None])
    Y = FiniteMetricSpace.from_points(np.array(ys)[:, None])
    d = gh_distance(X, Y)
    assert math.isclose(d, gh_distance(Y, X), abs_tol=1e-12)
    assert d <= max(X.dist.max(), Y.dist.max()) / 2 + 1e-12
