import math

import numpy as np
import pytest

from gmtlab.chains import (EmbeddedComplex, IntegralChain, boundary, fundamental_chain, mass, mass_exact,
                           push_forward, restrict_barycenter, support)
from gmtlab.errors import ComplexError
from gmtlab.generators import gen_sphere
from gmtlab.slicing import coarea_sum, restrict_to_ball, slice_at, slice_mass_profile

OCTAHEDRON_MASS = 6.928203230275509      # 4 sqrt 3
QUARTER_DISC_AREA = 0.19662025          # Monte Carlo, 4e6 samples (pi / 16 = 0.19635)


def triangle(coef=1):
    K = EmbeddedComplex.from_top([[0, 0], [1, 0], [0, 1]], [(0, 1, 2)])
    return K, IntegralChain(K, 2, {0: coef})


def unit_square():
    K = EmbeddedComplex.from_top([[0, 0], [1, 0], [1, 1], [0, 1]], [(0, 1, 2), (0, 2, 3)])
    return K, fundamental_chain(K)


def octahedron():
    S = gen_sphere(0)
    return S.complex, S.chain


def disc_mesh(rings=40, sectors=160):
    """Polar triangulation of the unit disc: a centre fan plus quads split in two."""
    t = 2 * math.pi * np.arange(sectors) / sectors
    pts = [(0.0, 0.0)] + [(i / rings * math.cos(a), i / rings * math.sin(a))
                          for i in range(1, rings + 1) for a in t]

    def v(i, j):
        return 1 + (i - 1) * sectors + j % sectors

    tops = [(0, v(1, j), v(1, j + 1)) for j in range(sectors)]
    for i in range(1, rings):
        for j in range(sectors):
            tops += [(v(i, j), v(i + 1, j), v(i + 1, j + 1)), (v(i, j), v(i + 1, j + 1), v(i, j + 1))]
    K = EmbeddedComplex.from_top(np.array(pts), tops)
    return K, fundamental_chain(K)


class TestBoundary:
    def test_triangle_edges(self):
        K, T = triangle()
        assert boundary(T).oriented() == {(1, 2): 1, (0, 2): -1, (0, 1): 1}

    def test_octahedron_closed(self):
        assert boundary(octahedron()[1]).is_zero()

    def test_boundary_of_boundary(self):
        K, T = triangle(5)
        assert boundary(boundary(T)).is_zero()

    def test_zero_dim_rejected(self):
        K, _ = triangle()
        with pytest.raises(ComplexError, match="0-chains"):
            boundary(IntegralChain(K, 0, {0: 1}))


class TestMass:
    def test_triangle(self):
        assert mass(triangle()[1]).total == pytest.approx(0.5)

    def test_negative_coefficient(self):
        assert mass(triangle(-3)[1]).total == pytest.approx(1.5)

    def test_octahedron(self):
        assert mass(octahedron()[1]).total == pytest.approx(OCTAHEDRON_MASS, rel=1e-12)

    def test_breakdown_sums(self):
        mb = mass(gen_sphere(2).chain)
        assert mb.total == pytest.approx(math.fsum(mb.per_simplex.values()), rel=1e-12)

    def test_exact_mass_agrees(self):
        T = gen_sphere(1).chain
        assert float(mass_exact(T)) == pytest.approx(mass(T).total, rel=1e-12)


class TestSupport:
    def test_zero_chain(self):
        K, _ = triangle()
        assert support(IntegralChain(K, 2)) == frozenset()

    def test_one_triangle(self):
        assert support(triangle()[1]) == {0, 1, 2}

    def test_cancellation(self):
        _, T = triangle()
        assert support(T - T) == frozenset()


class TestRestriction:
    def test_whole_complex(self):
        _, T = octahedron()
        for policy in ("barycenter", "subdivide"):
            R = restrict_to_ball(T, [0, 0, 0], 5.0, policy)
            assert mass(R).total == pytest.approx(mass(T).total, rel=1e-12)
        assert restrict_to_ball(T, [0, 0, 0], 5.0) == T

    def test_disjoint_ball(self):
        _, T = octahedron()
        for policy in ("barycenter", "subdivide"):
            assert restrict_to_ball(T, [10, 10, 10], 1.0, policy).is_zero()

    def test_quarter_disc(self):
        _, T = unit_square()
        R = restrict_to_ball(T, [0, 0], 0.5, "subdivide")
        assert mass(R).total == pytest.approx(QUARTER_DISC_AREA, rel=0.02)
        assert R.meta["policy"] == "subdivide"

    def test_barycenter_policy_keeps_whole_simplices(self):
        _, T = unit_square()
        # barycenters (2/3, 1/3) and (1/3, 2/3) lie 0.47 and 0.94 from (1, 0)
        R = restrict_barycenter(T, [1, 0], 0.5)
        assert R.terms == {0: T.terms[0]}

    def test_vertex_radius_is_nudged(self):
        _, T = unit_square()
        R = restrict_to_ball(T, [0, 0], 1.0, "subdivide")
        assert R.meta["nudged"]
        assert R.meta["radius"] == pytest.approx(1.0 + 1e-9)

    def test_subdivision_stays_in_ball(self):
        _, T = octahedron()
        z, r = np.array([0.0, 0.0, 1.0]), 0.8
        R = restrict_to_ball(T, z, r, "subdivide")
        pts = R.complex.coords[sorted(support(R))]
        assert np.linalg.norm(pts - z, axis=1).max() <= r * (1 + 1e-9)


class TestSlices:
    def test_disjoint(self):
        _, T = octahedron()
        assert all(rec.chain.is_zero() for rec in slice_mass_profile(T, [5, 5, 5], [0.5, 1.0]))

    def test_disc_circles(self):
        _, T = disc_mesh()
        for rec in slice_mass_profile(T, [0, 0], [0.25, 0.5, 0.75]):
            assert rec.mass == pytest.approx(2 * math.pi * rec.radius, rel=0.05)
            assert boundary(rec.chain).is_zero()

    def test_octahedron_coarea(self):
        _, T = octahedron()
        radii = [0.1 * (i + 1) for i in range(20)]
        prof = slice_mass_profile(T, [0, 0, 1], radii)
        assert coarea_sum(prof) <= mass(T).total * 1.05

    def test_slice_identity(self):
        # slice of a cycle is a cycle
        T = gen_sphere(2).chain
        S = slice_at(T, [0, 0, 1], 0.7)
        assert not S.is_zero() and boundary(S).is_zero()

    def test_radii_order(self):
        with pytest.raises(ComplexError):
            slice_mass_profile(octahedron()[1], [0, 0, 1], [0.5, 0.4])


class TestPushForward:
    def test_identity(self):
        K, T = octahedron()
        assert push_forward(T, list(range(K.n_vertices)), K) == T

    def test_collapsed_edge(self):
        K, T = triangle()
        assert push_forward(T, [0, 0, 2], K).is_zero()

    def test_transposition(self):
        K, T = triangle()
        assert push_forward(T, [1, 0, 2], K).terms == {0: -1}

    def test_missing_image(self):
        K = EmbeddedComplex.from_top([[0, 0], [1, 0], [0, 1], [1, 1]], [(0, 1, 2)], extra=[(3,)])
        T = IntegralChain(K, 2, {0: 1})
        with pytest.raises(ComplexError, match="absent"):
            push_forward(T, [3, 1, 2], K)

    def test_commutes_with_boundary(self):
        K, T = octahedron()
        f = [1, 0, 3, 2, 5, 4]   # the antipodal map
        assert boundary(push_forward(T, f, K)) == push_forward(boundary(T), f, K)


class TestFundamentalChain:
    def test_octahedron_coherent(self):
        K, T = octahedron()
        signs = [T.terms[p] for p in range(K.count(2))]
        assert boundary(fundamental_chain(K, signs)).is_zero()

    def test_octahedron_flipped(self):
        K, T = octahedron()
        signs = [T.terms[p] for p in range(K.count(2))]
        signs[0] = -signs[0]
        with pytest.raises(ComplexError, match="facet"):
            fundamental_chain(K, signs)

    def test_square_perimeter(self):
        _, T = unit_square()
        assert mass(boundary(T)).total == pytest.approx(4.0)

    def test_mass_is_face_sum(self):
        K, T = octahedron()
        assert mass(T).total == math.fsum(K.volumes(2))

    def test_non_manifold(self):
        K = EmbeddedComplex.from_top([[0, 0, 0], [1, 0, 0], [0, 1, 0], [0, 0, 1], [0, -1, 0]],
                                     [(0, 1, 2), (0, 1, 3), (0, 1, 4)])
        with pytest.raises(ComplexError, match="non-manifold"):
            fundamental_chain(K)


class TestComplexValidation:
    def test_degenerate_simplex(self):
        with pytest.raises(ComplexError, match="zero volume"):
            EmbeddedComplex.from_top([[0, 0], [1, 0], [2, 0]], [(0, 1, 2)])

    def test_missing_face(self):
        with pytest.raises(ComplexError, match="not listed"):
            EmbeddedComplex([[0, 0], [1, 0], [0, 1]], {0: [(0,), (1,), (2,)], 1: [(0, 1)], 2: [(0, 1, 2)]})

    def test_unknown_simplex_in_chain(self):
        K, _ = triangle()
        with pytest.raises(ComplexError):
            IntegralChain(K, 2, {3: 1})
