import math
from fractions import Fraction

import numpy as np
import pytest

from gmtlab.errors import CapExceeded, GmtError
from gmtlab.generators import frostman_weights, gen_ultrametric
from gmtlab.metric import (Covering, FiniteMetricSpace, PointCloud, WeightedMeasure, covering_number,
                           gh_distance, hausdorff_distance, hausdorff_measure_bounds, lower_density,
                           nagata_certificate_check, rectifiability_witness_check, separated_net,
                           unit_ball_volume)

# reference values recomputed by scripts/derive_oracles.py
SQUARE_CENTRE_HAUSDORFF = 0.7071067811865476
GH_TWO_VS_ONE = 0.5
GH_ONE_VS_THREE = 1.0
LINE_GRID_COVER = 2


def line(points):
    return FiniteMetricSpace.from_points(np.asarray(points, float)[:, None])


class TestHausdorff:
    def test_identical(self):
        X = line([0.0, 1.0])
        assert hausdorff_distance([0], [0], X) == 0

    def test_two_singletons(self):
        assert hausdorff_distance([0], [1], line([0.0, 1.0])) == 1

    def test_square_corners_vs_centre(self):
        X = FiniteMetricSpace.from_points([[0, 0], [1, 0], [0, 1], [1, 1], [0.5, 0.5]])
        assert hausdorff_distance([0, 1, 2, 3], [4], X) == pytest.approx(SQUARE_CENTRE_HAUSDORFF, abs=1e-12)

    def test_empty_set_rejected(self):
        with pytest.raises(GmtError, match="empty set"):
            hausdorff_distance([], [0], line([0.0]))

    def test_point_cloud_matches_matrix(self):
        rng = np.random.default_rng(3)
        P = rng.random((30, 2))
        A, B = range(0, 12), range(10, 30)
        assert hausdorff_distance(A, B, PointCloud(P)) == pytest.approx(
            hausdorff_distance(A, B, FiniteMetricSpace.from_points(P)))


class TestGromovHausdorff:
    def test_identity(self):
        X = line([0, 1, 3])
        assert gh_distance(X, X) == 0

    def test_two_points_vs_one(self):
        assert gh_distance(line([0, 1]), line([0])) == pytest.approx(GH_TWO_VS_ONE)

    def test_different_spacing(self):
        assert gh_distance(line([0, 1]), line([0, 3])) == pytest.approx(GH_ONE_VS_THREE)

    def test_exact_dominates_lower_bound(self):
        X, Y = line([0, 1, 2.5]), line([0, 2])
        assert gh_distance(X, Y, "exact") >= gh_distance(X, Y, "lower_bound")
        assert gh_distance(X, Y, "lower_bound") == pytest.approx(0.25)

    def test_cap(self):
        X = line(range(7))
        with pytest.raises(GmtError, match="lower_bound"):
            gh_distance(X, X)
        assert gh_distance(X, X, "lower_bound") == 0


class TestCovering:
    def test_single_point(self):
        assert covering_number(line([0.0]), 0.01) == 1

    def test_line_grid(self):
        assert covering_number(line(np.linspace(0, 1, 11)), 0.3) == LINE_GRID_COVER

    def test_ultrametric_level_one(self):
        U = gen_ultrametric(4, 2, 3)
        assert U.a == 0.5
        assert covering_number(U, 0.25, cap=64) == 4

    def test_greedy_dominates_exact(self):
        rng = np.random.default_rng(0)
        X = FiniteMetricSpace.from_points(rng.random((14, 2)))
        for eps in (0.1, 0.2, 0.4):
            assert covering_number(X, eps, "greedy") >= covering_number(X, eps, "exact")

    def test_exact_cap(self):
        with pytest.raises(CapExceeded):
            covering_number(line(range(30)), 0.5, "exact", cap=24)


class TestSeparatedNet:
    def test_single(self):
        assert separated_net(line([0.0]), 1.0) == [0]

    def test_spaced(self):
        assert separated_net(line([0, 1, 2]), 1.5) == [0, 2]

    def test_already_separated(self):
        assert separated_net(line([0, 1, 2]), 0.5) == [0, 1, 2]


class TestNagata:
    X = line(range(11))
    pairs = [frozenset({2 * i, 2 * i + 1}) for i in range(5)] + [frozenset({10})]

    def test_pass_multiplicity_two(self):
        v = nagata_certificate_check(self.X, Covering(self.pairs, 1.0, 1.0), 1)
        assert v.passed and v.complete and v.multiplicity == 2

    def test_fail_with_witness(self):
        v = nagata_certificate_check(self.X, Covering(self.pairs, 1.0, 1.0), 0)
        assert not v.passed
        assert v.witness == (1, 2)

    def test_singleton(self):
        v = nagata_certificate_check(line([0.0]), Covering([{0}], 5.0, 1.0), 0)
        assert v.passed

    def test_non_covering_rejected(self):
        with pytest.raises(GmtError, match="cover"):
            nagata_certificate_check(self.X, Covering([{0, 1}], 1.0, 1.0), 1)


class TestMeasureBounds:
    def test_ultrametric_upper_and_lower(self):
        U = gen_ultrametric(4, 2, 3)
        a = Fraction(1, 2)
        mu = frostman_weights(4, 3, U)
        mb = hausdorff_measure_bounds(U, 2, [1.0, 0.5, 0.25], measure=mu, growth_constant=a ** -4)
        assert Fraction(mb.upper_coeff) <= a ** 2
        assert mb.growth_certified
        assert Fraction(mb.lower_coeff) >= Fraction(1, 4) * a ** 4
        assert mb.omega == pytest.approx(math.pi)

    def test_one_point(self):
        mb = hausdorff_measure_bounds(line([0.0]), 1, [1.0, 0.5])
        assert mb.upper == 0

    def test_m_zero_rejected(self):
        with pytest.raises(GmtError):
            hausdorff_measure_bounds(line([0.0, 1.0]), 0, [1.0])


def disc_lattice(h=0.002):
    g = np.arange(-1, 1 + h / 2, h)
    P = np.stack(np.meshgrid(g, g), -1).reshape(-1, 2)
    P = P[(P ** 2).sum(1) <= 1 + 1e-12]
    return P, h * h


class TestLowerDensity:
    def test_disc_centre_and_boundary(self):
        P, w = disc_lattice()
        X = PointCloud(P)
        mu = WeightedMeasure(np.full(len(P), w))
        centre = int(np.argmin((P ** 2).sum(1)))
        edge = int(np.argmin(((P - [1.0, 0.0]) ** 2).sum(1)))
        assert lower_density(mu, X, centre, 2, [0.5, 0.3, 0.2]).value == pytest.approx(1.0, rel=0.05)
        assert lower_density(mu, X, edge, 2, [0.12, 0.1]).value == pytest.approx(0.5, rel=0.05)

    def test_zero_measure(self):
        X = line([0, 1, 2])
        assert lower_density(WeightedMeasure(np.zeros(3)), X, 1, 1, [1.0]).value == 0

    def test_empty_radii(self):
        with pytest.raises(GmtError):
            lower_density(WeightedMeasure(np.ones(1)), line([0.0]), 0, 1, [])

    def test_frostman_growth_on_ultrametric(self):
        U = gen_ultrametric(4, 2, 3)
        mu = frostman_weights(4, 3, U)
        radii = [0.24, 0.2, 0.125, 0.1, 0.0625]
        for z in range(U.n):
            ld = lower_density(mu, U, z, 2, radii)
            assert max(ld.ratios) <= 2 ** 4 / math.pi + 1e-12


class TestRectifiabilityWitness:
    def test_generated_ultrametric(self):
        assert rectifiability_witness_check(gen_ultrametric(3, 2, 3)).passed

    def test_collinear_points_fail(self):
        X = line([0.0, 1.0, 0.5])
        v = rectifiability_witness_check(X, assume_ultrametric=True)
        assert not v.passed
        # indices (0, 1, 2) are the coordinates (0, 1, 0.5)
        assert v.witness == (0, 1, 2)

    def test_single_point(self):
        assert rectifiability_witness_check(FiniteMetricSpace([[0.0]], ultrametric=True)).passed

    def test_flag_required(self):
        with pytest.raises(GmtError, match="ultrametric assertion"):
            rectifiability_witness_check(line([0.0, 1.0]))


class TestSpaceValidation:
    def test_triangle_violation(self):
        with pytest.raises(GmtError):
            FiniteMetricSpace([[0, 1, 5], [1, 0, 1], [5, 1, 0]])

    def test_asymmetric(self):
        with pytest.raises(GmtError):
            FiniteMetricSpace([[0, 1], [2, 0]])

    def test_unit_ball_volumes(self):
        assert unit_ball_volume(1) == pytest.approx(2)
        assert unit_ball_volume(2) == pytest.approx(math.pi)
        assert unit_ball_volume(3) == pytest.approx(4 * math.pi / 3)
