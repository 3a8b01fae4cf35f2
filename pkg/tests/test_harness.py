import math
from fractions import Fraction

import numpy as np
import pytest

from gmtlab.chains import IntegralChain
from gmtlab.config import COVERING_K, Calibration
from gmtlab.errors import GmtError, WindowError
from gmtlab.generators import gen_sphere, gen_ultrametric
from gmtlab.harness import (SPHERE_S_GRID, DensityBoundParams, FamilyMember, cancellation_diagnostics,
                            check_covering_bound, check_density_bound, check_fillrad_bound,
                            check_hexagon_fillrad, check_ilp_oracle, check_tower_geometry,
                            check_ultrametric_covering, check_ultrametric_lemma, circle_sample,
                            density_params_for, enumerate_filling, fillrad_bound, radius_window,
                            sphere_family, torus_family)
from gmtlab.metric import FiniteMetricSpace
from gmtlab.tower import TowerParams


class TestWindows:
    def test_radius_window_exact(self):
        assert radius_window(2, 2, 1) == Fraction(1, 2048)

    def test_fillrad_bound(self):
        # r / (8 (2 lam)^(m+1)) with lam = 2, m = 2
        assert fillrad_bound(1, 2, 2) == Fraction(1, 512)

    def test_density_params_edge(self):
        p = density_params_for(0.5)
        assert float(p.window) == pytest.approx(0.5)

    def test_bad_lambda(self):
        with pytest.raises(GmtError):
            DensityBoundParams(2, 0.5)


class TestDensity:
    S = gen_sphere(3)

    def test_sphere_point_passes(self):
        p = density_params_for(max(SPHERE_S_GRID))
        rep = check_density_bound(self.S.chain, self.S.complex.coords[0], p, SPHERE_S_GRID)
        assert rep.verdict == "pass"
        assert 1.85 <= rep.notes["exponent"] <= 2.15

    def test_zero_chain_fails(self):
        p = density_params_for(0.5)
        rep = check_density_bound(IntegralChain(self.S.complex, 2), [0, 0, 1], p, [0.1, 0.5])
        assert rep.verdict == "fail"
        assert "zero measure" in rep.notes["reason"]

    def test_outside_window(self):
        p = density_params_for(0.2)
        with pytest.raises(WindowError):
            check_density_bound(self.S.chain, [0, 0, 1], p, [0.1, 0.3])

    def test_supplied_constant_too_large_fails(self):
        p = density_params_for(max(SPHERE_S_GRID), C=1e9)
        rep = check_density_bound(self.S.chain, self.S.complex.coords[0], p, SPHERE_S_GRID)
        assert rep.verdict == "fail" and not rep.subchecks["dominates"]

    def test_thin_torus_loses_quadratic_growth(self):
        # once s exceeds the small radius 1/n the ball mass grows only linearly in s
        exps = []
        for f in torus_family((1, 32), mesh=32):
            p = density_params_for(0.2, m=2)
            exps.append(check_density_bound(f.chain, f.chain.complex.coords[0], p, [0.1, 0.15, 0.2]))
        assert exps[0].verdict == "pass"
        assert exps[1].verdict == "fail"
        assert exps[1].notes["exponent"] == pytest.approx(1.0, abs=0.15)


class TestFillrad:
    def test_sphere_slices(self):
        S = gen_sphere(2)
        r0 = float(radius_window(2, 2, 1) ** -1) * 0.6
        rep = check_fillrad_bound(S.chain, [0, 0, 1], 2.0, [0.2, 0.4, 0.6], r0)
        assert rep.verdict == "pass"
        halved = rep.series[0]
        assert all(h >= b for h, b in zip(halved.measured, halved.bound))

    def test_empty_slice_passes(self):
        S = gen_sphere(1)
        r0 = float(radius_window(2, 2, 1) ** -1)
        rep = check_fillrad_bound(S.chain, [5, 5, 5], 2.0, [0.5], r0)
        assert rep.verdict == "pass" and rep.series[0].measured == [0.0]

    def test_window(self):
        S = gen_sphere(1)
        with pytest.raises(WindowError):
            check_fillrad_bound(S.chain, [0, 0, 1], 2.0, [0.5], 1.0)

    def test_hexagon(self):
        assert check_hexagon_fillrad().verdict == "pass"


class TestCovering:
    def test_sphere_with_frozen_constant(self):
        S = gen_sphere(3)
        grid = [0.1, 0.2, 0.4]
        r0 = float(radius_window(2, 2, 1) ** -1) * 1.0
        rep = check_covering_bound(S.chain, 2.0, r0, grid, COVERING_K)
        assert rep.verdict == "pass"
        counts = rep.notes["counts"]
        assert counts == sorted(counts, reverse=True)

    def test_single_triangle_scales_like_area(self):
        S = gen_sphere(0)
        T = IntegralChain(S.complex, 2, {0: 1})
        r0 = float(radius_window(2, 2, 1) ** -1)
        rep = check_covering_bound(T, 2.0, r0, [0.05, 0.1], COVERING_K)
        assert rep.verdict == "pass"

    def test_window(self):
        S = gen_sphere(0)
        with pytest.raises(WindowError):
            check_covering_bound(S.chain, 2.0, 1.0, [0.1], COVERING_K)


class TestCancellation:
    def test_torus_collapse(self):
        rep = cancellation_diagnostics(torus_family((1, 2, 4, 8), mesh=16), circle_sample(), expected="collapse")
        assert rep.classification == "collapse" and rep.verdict == "pass"

    def test_sphere_stable(self):
        S = gen_sphere(1)
        rep = cancellation_diagnostics(sphere_family(3, 1), S.complex.coords)
        assert rep.classification == "stable"

    def test_wrong_expectation_fails(self):
        S = gen_sphere(1)
        rep = cancellation_diagnostics(sphere_family(3, 1), S.complex.coords, expected="collapse")
        assert rep.verdict == "fail"

    def test_too_few_members(self):
        S = gen_sphere(0)
        with pytest.raises(GmtError, match="trend needs"):
            cancellation_diagnostics([FamilyMember(S.chain)] * 2, S.complex.coords)


class TestUltrametric:
    def test_lemma_passes(self):
        rep = check_ultrametric_lemma(4, 2, 3)
        assert rep.verdict == "pass" and rep.notes["exact"]
        assert rep.notes["lower_coeff"] >= Fraction(1, 4) * Fraction(1, 2) ** 4

    def test_perturbed_distance_fails_witness(self):
        U = gen_ultrametric(4, 2, 2)
        D = U.dist.copy()
        D[0, 5] = D[5, 0] = 0.3
        X = FiniteMetricSpace(D, ultrametric=True, validate=False)
        rep = check_ultrametric_lemma(4, 2, 2, X)
        assert rep.verdict == "fail" and not rep.subchecks["d_witness"]

    def test_depth_one(self):
        assert check_ultrametric_lemma(4, 2, 1).verdict == "pass"

    def test_covering_counts(self):
        rep = check_ultrametric_covering(4, 2, 3, ks=(1, 2))
        assert rep.series[0].measured == [4, 16] and rep.verdict == "pass"


class TestTower:
    def test_reference(self):
        rep = check_tower_geometry(TowerParams(2, 2, 0.5, 2))
        assert rep.verdict == "pass", rep.subchecks
        assert rep.notes["C"] == pytest.approx(14 * math.sqrt(2), abs=1e-9)

    def test_stage_zero(self):
        rep = check_tower_geometry(TowerParams(2, 2, 0.5, 0))
        assert rep.verdict == "pass"

    def test_refined(self):
        assert check_tower_geometry(TowerParams(2, 2, 0.5, 1, 4)).verdict == "pass"


class TestOracle:
    def test_small_batch(self):
        rep = check_ilp_oracle(instances=8, seed=3)
        assert rep.verdict == "pass"
        assert rep.series[0].measured == rep.series[0].bound

    def test_enumeration_without_filling(self):
        S = gen_sphere(0)
        # a single edge is not a boundary of anything in the box
        T = IntegralChain(S.complex, 1, {0: 1})
        assert enumerate_filling(T, "fill_volume", box=1) is None
        assert enumerate_filling(T, "flat_norm", box=1) == Fraction(float(S.complex.volumes(1)[0]))


def test_calibration_defaults():
    cal = Calibration()
    assert cal.density_C > 0 and cal.covering_K > 0
    assert np.isfinite(cal.density_C)
