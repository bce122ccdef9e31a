import numpy as np
import pytest

from uavbc import (
    DiscretizationInvalid,
    RateProfile,
    discretize,
    hfh_tdma_achievable,
    make_hfh,
    per_slot_weighted_split,
    solve_p5,
    solve_profile,
    solve_v0,
    trace_region,
    triangle_contains,
)
from uavbc.hfh_solver import (
    DiscretizedTrajectory,
    SearchConfig,
    TrajectoryEvaluator,
    validate_discretization,
)
from uavbc.oracle import check_feasibility, grid_power_oracle

PEAK = 6.6582114827517955

# trimmed search for tests that only need a sane solution, not a tight one
FAST = SearchConfig(grid_xi=9, grid_xf=9, grid_ti=5, hover_grid=65, refine_rounds=1)


class TestPerSlotSplit:
    def test_all_weight_user1(self, base):
        p1, p2 = per_slot_weighted_split(base, 130.0, 1.0)
        assert p2 == 0.0 and p1 == base.Pbar

    def test_equal_gains_low_weight(self, base):
        p1, p2 = per_slot_weighted_split(base, 0.0, 0.3)
        assert p2 == base.Pbar

    def test_matches_grid_oracle(self, base):
        rng = np.random.default_rng(101)
        step = base.Pbar / 10000
        for _ in range(100):
            x = rng.uniform(-500.0, 500.0)
            mu = rng.uniform(0.0, 1.0)
            ours = per_slot_weighted_split(base, x, mu)
            scan = grid_power_oracle(base, x, mu)
            assert abs(ours[0] - scan[0]) <= step + 1e-12


class TestSolveP5:
    def test_equal_gain_hover_tie(self, base):
        disc = discretize(base, make_hfh(base, 0.0, 0.0, base.T), 64)
        res = solve_p5(base, disc, RateProfile.of(0.5))
        assert res.rate_pair.r1 == pytest.approx(1.1384201026794123, abs=1e-7)
        assert res.rate_pair.r2 == pytest.approx(res.rate_pair.r1, abs=1e-7)

    def test_corner(self, base):
        disc = discretize(base, make_hfh(base, 500.0, 500.0, base.T), 16)
        res = solve_p5(base, disc, RateProfile.of(0.0))
        assert res.rate_pair.r1 == 0.0
        assert res.rate_pair.r2 == pytest.approx(PEAK, abs=1e-9)

    def test_full_power_every_slot(self, base):
        disc = discretize(base, make_hfh(base, -400.0, 350.0, 8.0), 128)
        res = solve_p5(base, disc, RateProfile.of(0.35))
        total = res.schedule.p1 + res.schedule.p2
        assert np.allclose(total, base.Pbar, rtol=1e-12)

    def test_mu_sweep_monotone(self, base):
        ev = TrajectoryEvaluator.exact(base, make_hfh(base, -450.0, 300.0, 12.0), 128)
        r1_prev, r2_prev = -1.0, np.inf
        for mu in np.linspace(0.0, 1.0, 21):
            _, _, r1, r2 = ev.solve_weight(float(mu))
            assert r1 >= r1_prev - 1e-12
            assert r2 <= r2_prev + 1e-12
            r1_prev, r2_prev = r1, r2

    def test_profile_ratio_met(self, base):
        disc = discretize(base, make_hfh(base, -450.0, 300.0, 12.0), 256)
        prof = RateProfile.of(0.37)
        res = solve_p5(base, disc, prof)
        assert abs(res.rate_pair.r1 / prof.alpha1 - res.rate_pair.r2 / prof.alpha2) <= (
            1e-6 * res.r
        )

    def test_rejects_bad_discretization(self, base):
        jumpy = DiscretizedTrajectory(
            np.array([-500.0, 500.0, -500.0]), base.T / 3, None
        )
        with pytest.raises(DiscretizationInvalid):
            solve_p5(base, jumpy, RateProfile.of(0.5))
        outside = DiscretizedTrajectory(np.array([0.0, 700.0]), base.T / 2, None)
        with pytest.raises(DiscretizationInvalid):
            validate_discretization(base, outside)


class TestSolveProfile:
    def test_corner_hovers_at_user(self, base):
        sol = solve_profile(base, RateProfile.of(0.0))
        assert sol.trajectory.x_I == sol.trajectory.x_F == 500.0
        assert sol.rate_pair.r2 == pytest.approx(PEAK, abs=1e-9)

    def test_equal_rate_bracketed(self, base):
        sol = solve_profile(base, RateProfile.of(0.5), FAST)
        lower = hfh_tdma_achievable(base, RateProfile.of(0.5)).r1
        assert lower - 1e-9 <= sol.rate_pair.r1 <= PEAK / 2 + 1e-9
        assert sol.rate_pair.r2 == pytest.approx(sol.rate_pair.r1, rel=1e-5)

    def test_v0_matches_placement_solver(self, static):
        prof = RateProfile.of(0.5)
        sol = solve_profile(static, prof)
        hover = solve_v0(static, prof)
        assert sol.r == pytest.approx(hover.r, abs=1e-4)
        assert sol.trajectory.x_I == sol.trajectory.x_F

    def test_speed_feasible_and_checked(self, base):
        sol = solve_profile(base, RateProfile.of(0.3), FAST)
        flight = sol.trajectory.span / base.V
        assert sol.trajectory.t_I + flight + sol.trajectory.t_F == pytest.approx(
            base.T, rel=1e-9
        )
        report = check_feasibility(base, sol)
        assert report.passed, report

    def test_optimal_pair_satisfies_hull_condition(self, base):
        """Intermediate hover locations are covered by the endpoints' hull."""
        sol = solve_profile(base, RateProfile.of(0.45), FAST)
        xI, xF = sol.trajectory.x_I, sol.trajectory.x_F
        if xF - xI > 1.0:
            for x in np.linspace(xI, xF, 7):
                assert triangle_contains(base, xI, xF, float(x), n_samples=96)

    def test_mirror_profile_swaps(self, base):
        a = solve_profile(base, RateProfile.of(0.3), FAST)
        b = solve_profile(base, RateProfile.of(0.7), FAST)
        assert a.rate_pair.r1 == pytest.approx(b.rate_pair.r2, abs=1e-6)
        assert a.rate_pair.r2 == pytest.approx(b.rate_pair.r1, abs=1e-6)
        assert check_feasibility(base, b).passed


def test_trace_region_small(base):
    reg = trace_region(base, 3, FAST)
    assert [p.profile.alpha1 for p in reg.points] == [0.0, 0.5, 1.0]
    assert reg.points[0].rate_pair.r1 == 0.0
    assert reg.points[2].rate_pair.r2 == 0.0
    mid = reg.points[1].rate_pair
    assert mid.r1 == pytest.approx(mid.r2, rel=1e-5)
