import math
from fractions import Fraction

import numpy as np
import pytest

from gmtlab.chains import boundary, mass
from gmtlab.errors import CapExceeded, GmtError
from gmtlab.generators import (FamilyDescriptor, frostman_weights, gen_ellipsoid, gen_sphere, gen_torus,
                               gen_ultrametric, regenerate)
from gmtlab.harness import circle_sample, disc_sample, support_sample
from gmtlab.io import chain_to_json, complex_to_json
from gmtlab.metric import hausdorff_distance_points, rectifiability_witness_check
from gmtlab.report import dumps
from gmtlab.tower import (TowerParams, base_roof_distances, diameter_upper, gen_tower, tower_formulas)

TOWER_AREA = 3.25
TOWER_C = 19.79898987322333   # 14 sqrt 2


class TestTorus:
    def test_mass_mesh_64(self):
        assert mass(gen_torus(1, 64).chain).total == pytest.approx(4 * math.pi ** 2, rel=0.01)

    @pytest.mark.parametrize("n", [1, 2, 3])
    def test_cycle(self, n):
        assert boundary(gen_torus(n, 16).chain).is_zero()

    @pytest.mark.parametrize("n", [1, 2, 4])
    def test_hausdorff_to_circle(self, n):
        T = gen_torus(n, 32).chain
        d = hausdorff_distance_points(support_sample(T, 0.01), circle_sample())
        assert d == pytest.approx(1 / n, rel=0.02)

    def test_mass_converges_monotonically(self):
        ms = [mass(gen_torus(2, k).chain).total for k in (8, 16, 32, 64)]
        target = 2 * math.pi ** 2
        assert all(a <= b * 1.005 for a, b in zip(ms, ms[1:]))
        assert abs(ms[-1] - target) < abs(ms[0] - target)

    def test_mesh_precondition(self):
        with pytest.raises(GmtError):
            gen_torus(1, 4)


class TestEllipsoid:
    def test_sphere_mass(self):
        assert mass(gen_ellipsoid(1, 64).chain).total == pytest.approx(4 * math.pi, rel=0.01)

    @pytest.mark.parametrize("n", [1, 4, 16])
    def test_hausdorff_to_disc(self, n):
        T = gen_ellipsoid(n, 32).chain
        d = hausdorff_distance_points(support_sample(T, 0.02), disc_sample())
        assert d == pytest.approx(n ** -0.5, rel=0.05)

    def test_cycles_and_ambient(self):
        S = gen_ellipsoid(4, 16, ambient=True)
        assert boundary(S.chain).is_zero()
        assert boundary(S.ambient_chain).is_zero()
        assert S.ambient.dim == 3
        assert mass(S.ambient_chain).total == pytest.approx(mass(S.chain).total, rel=1e-12)


class TestSphere:
    def test_octahedron(self):
        assert mass(gen_sphere(0).chain).total == pytest.approx(4 * math.sqrt(3), rel=1e-12)

    def test_mesh_4(self):
        assert mass(gen_sphere(4).chain).total == pytest.approx(4 * math.pi, rel=0.01)

    @pytest.mark.parametrize("mesh", range(4))
    def test_cycle(self, mesh):
        assert boundary(gen_sphere(mesh).chain).is_zero()


class TestUltrametric:
    def test_first_disagreement(self):
        U = gen_ultrametric(4, 2, 3)
        i = U.labels.index((1, 1, 1))
        j = U.labels.index((1, 2, 3))
        assert U.dist[i, j] == 0.25
        assert U.exact_value(i, j) == Fraction(1, 4)

    def test_diagonal(self):
        U = gen_ultrametric(3, 2, 2)
        assert np.all(np.diag(U.dist) == 0)

    def test_ultrametric_inequality(self):
        U = gen_ultrametric(3, 2, 3)
        D = U.dist
        assert np.all(D[:, :, None] <= np.maximum(D[:, None, :], D.T[None, :, :]) + 0)
        assert rectifiability_witness_check(U).passed

    def test_irrational_base(self):
        U = gen_ultrametric(3, 2, 2)
        assert U.a_exact is None and U.a == pytest.approx(3 ** -0.5)

    def test_cap(self):
        with pytest.raises(CapExceeded):
            gen_ultrametric(8, 2, 5)


class TestFrostman:
    def test_weights_and_total(self):
        mu = frostman_weights(4, 3)
        assert all(w == Fraction(1, 64) for w in mu.exact)
        assert mu.exact_total() == 1

    def test_ball_measure(self):
        U = gen_ultrametric(4, 2, 3)
        mu = frostman_weights(4, 3, U)
        a = Fraction(1, 2)
        for k in (1, 2, 3):
            r = float(a ** k)
            for z in range(U.n):
                w = sum(mu.exact[i] for i in np.flatnonzero(U.row(z) <= r))
                assert w == Fraction(1, 4 ** (k - 1))
                assert w <= a ** -4 * a ** (2 * k)

    def test_size_mismatch(self):
        with pytest.raises(GmtError):
            frostman_weights(4, 2, gen_ultrametric(4, 2, 3))


class TestTower:
    def test_area(self):
        p = TowerParams(2, 2, 0.5, 2)
        assert gen_tower(p).facet_area == pytest.approx(TOWER_AREA, abs=1e-9)
        assert tower_formulas(p).area_closed_form == pytest.approx(TOWER_AREA, abs=1e-9)

    def test_parameters(self):
        p = TowerParams(2, 2, 0.5, 2)
        assert (p.a, p.N, p.lam, p.mu) == (0.5, 4, 0.25, 0.5)

    def test_first_stage_sandwich(self):
        X = gen_tower(TowerParams(2, 2, 0.5, 1))
        for rec in base_roof_distances(X):
            assert 0.5 * 0.9 <= rec.d_min and rec.d_max <= 1.5 * 1.1

    def test_mu_at_least_one(self):
        # alpha = 1 gives lam = a and mu = N a^m = 1
        with pytest.raises(GmtError, match="mu"):
            TowerParams(2, 2, 1.0, 1)

    def test_constant(self):
        assert tower_formulas(TowerParams()).contractibility_C == pytest.approx(TOWER_C, abs=1e-9)

    def test_rho(self):
        F = tower_formulas(TowerParams())
        assert F.rho_at(0.0) == 0
        with pytest.raises(GmtError):
            F.rho_at(0.125)

    def test_stage_zero(self):
        p = TowerParams(2, 2, 0.5, 0)
        assert gen_tower(p).facet_area == pytest.approx((p.L * p.lam) ** 2)

    def test_refinement_tightens(self):
        gaps = []
        for mesh in (1, 2, 4):
            X = gen_tower(TowerParams(2, 2, 0.5, 1, mesh))
            gaps.append(max(r.d_max for r in base_roof_distances(X)))
        assert gaps[0] >= gaps[1] >= gaps[2]

    def test_diameter_bounded(self):
        for n in (0, 1, 2):
            X = gen_tower(TowerParams(2, 2, 0.5, n))
            assert diameter_upper(X) <= math.sqrt(2) * 0.5 + 6 * 0.5 / 0.5 + 0.5


class TestDescriptors:
    def test_regeneration_is_bit_identical(self):
        d = FamilyDescriptor("torus", 2, 16, 0)
        a, b = regenerate(d), regenerate(FamilyDescriptor(**d.to_dict()))
        assert dumps(complex_to_json(a.complex)) == dumps(complex_to_json(b.complex))
        assert dumps(chain_to_json(a.chain)) == dumps(chain_to_json(b.chain))

    def test_unknown_family(self):
        with pytest.raises(GmtError):
            FamilyDescriptor("klein", 1, 8, 0)
