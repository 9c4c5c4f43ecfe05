import math

import numpy as np
import pytest

from topomix import (
    BandwidthGrid,
    Grid,
    GridDensity,
    MeasureKind,
    UcatProfile,
    convolve_gaussian,
    default_bandwidth_grid,
    estimate_ucat,
    general_blur_budget,
    gaussian_density,
    kde,
    select_bandwidth,
    tde,
    topological_blur_budget,
    ucat,
    ucat_profile,
)
from topomix.bandwidth import measure_weights, scaled_grid, weighted_lower_median
from topomix.bench import FkmSpec, fkm_density
from topomix.errors import ContractError, DegenerateSampleError, InvalidParameterError

COUNTING = MeasureKind.COUNTING
INVERSE = MeasureKind.INVERSE_LEBESGUE


def profile(hs, us):
    return UcatProfile(BandwidthGrid(hs), us)


class TestBandwidthGrid:
    def test_range_ten_count_four(self):
        g = default_bandwidth_grid([0.0, 10.0], 4)
        np.testing.assert_allclose(g.values, [0.01, 0.1, 1.0, 10.0])

    def test_unit_range(self):
        g = default_bandwidth_grid([0.0, 1.0], 64)
        assert len(g) == 64
        assert g.values[0] == pytest.approx(1e-3)
        assert g.values[-1] == pytest.approx(1.0)

    def test_constant_sample(self):
        with pytest.raises(DegenerateSampleError):
            default_bandwidth_grid([3.0, 3.0, 3.0])

    @pytest.mark.parametrize("values", [[], [1, 1], [2, 1], [0, 1], [1, np.inf]])
    def test_invalid(self, values):
        with pytest.raises(InvalidParameterError):
            BandwidthGrid(values)

    def test_count_too_small(self):
        with pytest.raises(InvalidParameterError):
            default_bandwidth_grid([0, 1], 1)

    def test_scaled_grid_resolution(self):
        g = scaled_grid([0.0, 10.0], 0.5)
        assert g.dx <= 0.5 / 4 + 1e-12
        assert g.x0 == pytest.approx(-1.5)
        assert g.x_end == pytest.approx(11.5)


class TestProfile:
    def test_single_point_repeated(self):
        p = ucat_profile([2.0] * 5 + [2.0 + 1e-9], BandwidthGrid(np.geomspace(0.01, 10, 12)))
        assert set(p.ucats) == {1}

    def test_two_points(self):
        p = ucat_profile([0.0, 10.0], BandwidthGrid([0.1, 1.0, 50.0]))
        assert list(p.ucats) == [2, 2, 1]

    def test_fixed_eval_grid_and_threads(self):
        x = np.random.default_rng(3).normal(size=200)
        bw = BandwidthGrid(np.geomspace(0.05, 2, 10))
        g = Grid.from_span(-8, 8, 400)
        a = ucat_profile(x, bw, g)
        b = ucat_profile(x, bw, g, threads=4)
        assert np.array_equal(a.ucats, b.ucats)

    def test_semigroup_keeps_ucat(self):
        # KDE at h blurred by s is the KDE at sqrt(h^2 + s^2)
        x = np.random.default_rng(5).normal(size=60)
        g = Grid.from_span(-10, 10, 1000)
        for h, s in [(0.1, 0.1), (0.05, 0.2), (0.3, 0.2)]:
            blurred = convolve_gaussian(kde(x, h, g), s)
            assert ucat(blurred) == ucat(kde(x, math.hypot(h, s), g))


class TestEstimate:
    def test_constant(self):
        assert estimate_ucat(profile([1, 2, 3], [1, 1, 1])) == 1

    def test_plurality(self):
        assert estimate_ucat(profile([1, 2, 3, 4], [3, 2, 2, 1]), COUNTING) == 2

    def test_inverse_lebesgue(self):
        # hand-computed 1/h cells: bounds 1, .75, .375, .1875, .09375, .0625
        w = measure_weights(BandwidthGrid([1, 2, 4, 8, 16]), INVERSE)
        np.testing.assert_allclose(w, [0.25, 0.375, 0.1875, 0.09375, 0.03125])
        assert estimate_ucat(profile([1, 2, 4, 8, 16], [2, 2, 1, 1, 1]), INVERSE) == 2

    def test_tie_goes_to_smaller(self):
        assert estimate_ucat(profile([1, 2, 3, 4], [3, 3, 2, 2]), COUNTING) == 2

    def test_lower_median(self):
        assert weighted_lower_median(np.array([4.0, 1.0, 3.0, 2.0]), np.ones(4)) == 2.0


class TestSelect:
    def test_singleton(self):
        r = select_bandwidth(profile([0.1, 0.3, 0.5], [1, 2, 1]), 2)
        assert (r.h_hat, r.h_minus, r.h_sup, r.blur_budget) == (0.3, 0.3, 0.3, 0.0)

    def test_budget(self):
        r = select_bandwidth(profile([0.1, 0.2, 0.3, 0.4, 0.5], [2] * 5), 2)
        assert r.h_hat == 0.3
        assert r.h_sup == 0.5
        assert r.blur_budget == pytest.approx(0.4)

    def test_even_counting(self):
        assert select_bandwidth(profile([1, 2, 3, 4], [1] * 4), 1, COUNTING).h_hat == 2

    def test_missing_value(self):
        with pytest.raises(ContractError):
            select_bandwidth(profile([1, 2], [1, 1]), 3)

    def test_topological_budget(self):
        assert topological_blur_budget(profile([0.3, 0.4, 0.5], [2, 1, 2]), 2) == pytest.approx(0.4)
        assert topological_blur_budget(profile([0.3, 0.4], [2, 1]), 2) == 0.0


class TestGeneralBudget:
    def test_unimodal(self):
        g = Grid.from_span(-5, 5, 200)
        bw = BandwidthGrid([0.1, 0.5, 2.0])
        assert general_blur_budget(gaussian_density(0, 1, g), bw) == 2.0

    def test_two_spikes(self):
        # equal Gaussians at distance d merge exactly when sigma reaches d / 2
        g = Grid(-10.0, 0.01, 2000)
        v = np.zeros(2000)
        v[[g.cell_of(-1.0), g.cell_of(1.0)]] = 1.0
        bw = BandwidthGrid(np.arange(0.05, 3.0, 0.1))
        assert general_blur_budget(GridDensity(g, v), bw) == pytest.approx(0.95)

    def test_fkm_positive(self):
        f = fkm_density(FkmSpec(3, 2), Grid.from_span(-0.5, 1.5, 4000))
        assert general_blur_budget(f, BandwidthGrid(np.geomspace(1e-4, 0.5, 30))) > 0


class TestTde:
    def test_old_faithful(self, faithful):
        r = tde(faithful)
        assert r.m_hat == 2
        assert r.h_minus <= r.h_hat <= r.h_sup
        assert r.blur_budget == pytest.approx(math.sqrt(r.h_sup**2 - r.h_hat**2))

    @pytest.mark.parametrize("mu", list(MeasureKind))
    def test_two_point_deterministic(self, mu):
        a, b = tde([0.0, 10.0], mu), tde([0.0, 10.0], mu)
        assert a == b
        assert a.m_hat in (1, 2)

    def test_as_dict(self):
        d = tde([0.0, 1.0, 5.0]).as_dict()
        assert set(d) == {"m_hat", "h_hat", "h_minus", "h_sup", "blur_budget", "measure"}
        assert d["measure"] == "counting"
