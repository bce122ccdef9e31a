"""Achievable rate region under TDMA scheduling.

One user is served at a time with full power: user 1 on [0, t1], user 2 on
(t1, T].  Along a unidirectional left-to-right trajectory the optimal switch
time t1 is the unique root of a monotone rate-ratio balance, found by
bisection.  The trajectory family itself is small: the UAV either flies the
whole time, or hovers only above a user (never at interior points), giving
four one-parameter candidate families searched by grid plus golden-section
refinement.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .core import (
    HfhTrajectory,
    RatePair,
    RateProfile,
    RegionBoundary,
    SystemParams,
    leg_rate_integral,
    log2_1p,
    make_hfh,
)
from .errors import TimeOutOfRange
from .hfh_solver import positions_at
from .numerics import bisect_increasing, golden_max


@dataclass(frozen=True)
class TdmaSearchConfig:
    x_grid: int = 129           # grid along the free location parameter
    ti_grid: int = 17           # hover-time grid (only the hover-both case)
    cum_samples: int = 8193     # dense grid behind the cumulative rate curves
    t1_rel_tol: float = 1e-9    # bisection tolerance on t1, relative to T
    golden_iters: int = 50


DEFAULT_TDMA_CONFIG = TdmaSearchConfig()


@dataclass
class TdmaSolution:
    """TDMA boundary point: trajectory, switch time and achieved rates."""

    profile: RateProfile
    rate_pair: RatePair
    trajectory: HfhTrajectory
    t1: float
    diagnostics: dict = field(default_factory=dict)

    @property
    def r(self) -> float:
        scales = []
        if self.profile.alpha1 > 0.0:
            scales.append(self.rate_pair.r1 / self.profile.alpha1)
        if self.profile.alpha2 > 0.0:
            scales.append(self.rate_pair.r2 / self.profile.alpha2)
        return min(scales)


class CumulativeRates:
    """Cumulative full-power single-user rate integrals along a trajectory.

    R_k(t) = integral over [0, t] of log2(1 + Pbar h_k(x(s))) ds, evaluated
    through a dense trapezoid prefix over the flight leg (hover segments are
    linear in t and handled exactly).  Supports the fast t1 bisection; final
    reported rates go through the adaptive quadrature in tdma_rates.
    """

    def __init__(self, params: SystemParams, traj: HfhTrajectory, n: int = 8193):
        self.params = params
        self.traj = traj
        self.fly_start = traj.t_I
        self.fly_end = params.T - traj.t_F
        self.rate_I = (
            log2_1p(params.Pbar * _gain(params, traj.x_I, 1)),
            log2_1p(params.Pbar * _gain(params, traj.x_I, 2)),
        )
        self.rate_F = (
            log2_1p(params.Pbar * _gain(params, traj.x_F, 1)),
            log2_1p(params.Pbar * _gain(params, traj.x_F, 2)),
        )
        dur = self.fly_end - self.fly_start
        if dur > 1e-12 * params.T and params.V > 0.0:
            ts = np.linspace(self.fly_start, self.fly_end, n)
            xs = positions_at(params, traj, ts)
            half = 0.5 * params.D
            H2 = params.H * params.H
            f1 = np.log1p(params.Pbar * params.beta0 / ((xs + half) ** 2 + H2))
            f2 = np.log1p(params.Pbar * params.beta0 / ((xs - half) ** 2 + H2))
            dt = ts[1] - ts[0]
            scale = dt / (2.0 * math.log(2.0))
            self._fly_t = ts
            self._fly_cum1 = np.concatenate([[0.0], np.cumsum((f1[1:] + f1[:-1]))]) * scale
            self._fly_cum2 = np.concatenate([[0.0], np.cumsum((f2[1:] + f2[:-1]))]) * scale
        else:
            self._fly_t = None
            self._fly_cum1 = self._fly_cum2 = None

    def _flight_cum(self, t: float, user: int) -> float:
        if self._fly_t is None:
            return 0.0
        cum = self._fly_cum1 if user == 1 else self._fly_cum2
        t = min(max(t, self.fly_start), self.fly_end)
        return float(np.interp(t, self._fly_t, cum))

    def cum(self, t: float, user: int) -> float:
        """R_user(t) in rate-seconds."""
        hover_I = self.rate_I[user - 1] * min(t, self.fly_start)
        flight = self._flight_cum(t, user)
        hover_F = self.rate_F[user - 1] * max(t - self.fly_end, 0.0)
        return hover_I + flight + hover_F

    def pair_at(self, t1: float) -> RatePair:
        """(r1, r2) with user 1 served before t1 and user 2 after."""
        T = self.params.T
        r1 = self.cum(t1, 1) / T
        r2 = (self.cum(T, 2) - self.cum(t1, 2)) / T
        return RatePair(r1, r2)


def _gain(params, x, user):
    dx = x - params.user_position(user)
    return params.beta0 / (dx * dx + params.H * params.H)


def tdma_rates(params: SystemParams, traj: HfhTrajectory, t1: float) -> RatePair:
    """Average TDMA rates: r1 integrates over [0, t1], r2 over [t1, T].

    Hover portions use closed forms; flight portions the adaptive
    leg quadrature.
    """
    T = params.T
    if t1 < -1e-9 * T or t1 > T * (1.0 + 1e-9):
        raise TimeOutOfRange(f"t1={t1} outside [0, {T}]")
    t1 = min(max(t1, 0.0), T)
    fly_start, fly_end = traj.t_I, T - traj.t_F

    def window(user, a, b):
        """Rate-time of `user` at full power over the time window [a, b]."""
        if b <= a:
            return 0.0
        total = 0.0
        hov = max(min(b, fly_start) - a, 0.0)
        if hov > 0.0:
            total += hov * log2_1p(params.Pbar * _gain(params, traj.x_I, user))
        lo, hi = max(a, fly_start), min(b, fly_end)
        if hi > lo and params.V > 0.0:
            xa = traj.x_I + (lo - traj.t_I) * params.V
            xb = traj.x_I + (hi - traj.t_I) * params.V
            total += leg_rate_integral(params, user, xa, min(xb, traj.x_F), params.Pbar)
        hov = b - max(a, fly_end)
        if hov > 0.0:
            total += hov * log2_1p(params.Pbar * _gain(params, traj.x_F, user))
        return total

    return RatePair(window(1, 0.0, t1) / T, window(2, t1, T) / T)


def solve_t1(
    params: SystemParams,
    traj: HfhTrajectory,
    profile: RateProfile,
    cum: CumulativeRates | None = None,
    rel_tol: float = 1e-9,
) -> float:
    """Unique switch time where r1(t1)/alpha1 = r2(t1)/alpha2.

    r1 grows and r2 falls with t1, so the weighted difference is monotone
    and the root is found by bisection on [0, T].
    """
    if profile.alpha1 == 0.0:
        return 0.0
    if profile.alpha2 == 0.0:
        return params.T
    if cum is None:
        cum = CumulativeRates(params, traj, DEFAULT_TDMA_CONFIG.cum_samples)
    a1, a2 = profile.alpha1, profile.alpha2

    def gap(t1):
        pair = cum.pair_at(t1)
        return a2 * pair.r1 - a1 * pair.r2

    return bisect_increasing(gap, 0.0, params.T, iters=80, xtol=rel_tol * params.T)


def _candidate_trajectories(params: SystemParams, cfg: TdmaSearchConfig):
    """The hover-only-above-users HFH family, one (case, trajectory) per entry.

    Case 1: pure flight between interior points (t_I = t_F = 0);
    case 2: hover at -D/2 then fly;  case 3: fly then hover at +D/2;
    case 4: hover at both users (needs VT >= D).  V = 0 degenerates to the
    fixed-hover family swept across [-D/2, D/2].
    """
    half = 0.5 * params.D
    V, T, D = params.V, params.T, params.D
    out = []
    if V == 0.0:
        for x in np.linspace(-half, half, cfg.x_grid):
            out.append((1, make_hfh(params, float(x), float(x), T)))
        return out
    reach = V * T
    if reach <= D:
        for x_i in np.linspace(-half, half - reach, cfg.x_grid):
            out.append((1, make_hfh(params, float(x_i), float(x_i) + reach, 0.0)))
    for x_f in np.linspace(-half, min(half, -half + reach), cfg.x_grid):
        t_i = T - (float(x_f) + half) / V
        out.append((2, make_hfh(params, -half, float(x_f), t_i)))
    for x_i in np.linspace(max(-half, half - reach), half, cfg.x_grid):
        out.append((3, make_hfh(params, float(x_i), half, 0.0)))
    if reach >= D:
        slack = T - D / V
        for t_i in np.linspace(0.0, slack, cfg.ti_grid):
            out.append((4, make_hfh(params, -half, half, float(t_i))))
    return out


def _evaluate(params, traj, profile, cfg):
    cum = CumulativeRates(params, traj, cfg.cum_samples)
    t1 = solve_t1(params, traj, profile, cum=cum, rel_tol=cfg.t1_rel_tol)
    pair = cum.pair_at(t1)
    scales = []
    if profile.alpha1 > 0.0:
        scales.append(pair.r1 / profile.alpha1)
    if profile.alpha2 > 0.0:
        scales.append(pair.r2 / profile.alpha2)
    return min(scales), t1, pair


def _mirror_tdma(params, sol: TdmaSolution) -> TdmaSolution:
    traj = HfhTrajectory(
        -sol.trajectory.x_F, -sol.trajectory.x_I, sol.trajectory.t_F, sol.trajectory.t_I
    )
    diag = dict(sol.diagnostics)
    diag["mirrored"] = True
    return TdmaSolution(
        sol.profile.mirrored(),
        sol.rate_pair.swapped(),
        traj,
        params.T - sol.t1,
        diag,
    )


def _corner_tdma(params, profile, cfg) -> TdmaSolution:
    user = 2 if profile.alpha1 == 0.0 else 1
    x = params.user_position(user)
    traj = make_hfh(params, x, x, params.T)
    peak = params.peak_rate
    pair = RatePair(0.0, peak) if user == 2 else RatePair(peak, 0.0)
    t1 = 0.0 if user == 2 else params.T
    return TdmaSolution(profile, pair, traj, t1, {"corner": True})


def tdma_solve_profile(
    params: SystemParams,
    profile: RateProfile,
    cfg: TdmaSearchConfig = DEFAULT_TDMA_CONFIG,
) -> TdmaSolution:
    """Best TDMA rate pair for one profile over the admissible HFH family."""
    if profile.is_corner:
        return _corner_tdma(params, profile, cfg)
    if profile.alpha1 > profile.alpha2:
        return _mirror_tdma(
            params, tdma_solve_profile(params, profile.mirrored(), cfg)
        )

    best = None
    for case, traj in _candidate_trajectories(params, cfg):
        r, t1, pair = _evaluate(params, traj, profile, cfg)
        if best is None or r > best[0]:
            best = (r, case, traj, t1, pair)

    r_best, case, traj, t1, pair = best
    half = 0.5 * params.D

    # Refine the single continuous parameter of the winning case.
    if params.V == 0.0 or case == 1:
        span = traj.span

        def value(x_i):
            cand = make_hfh(params, x_i, min(x_i + span, half), 0.0 if span else params.T)
            return _evaluate(params, cand, profile, cfg)[0]

        width = params.D / (cfg.x_grid - 1)
        x0, _ = golden_max(
            value,
            max(-half, traj.x_I - width),
            min(half - span, traj.x_I + width),
            iters=cfg.golden_iters,
            xtol=1e-9 * params.D,
        )
        cand = make_hfh(params, x0, min(x0 + span, half), 0.0 if span else params.T)
    elif case == 2:

        def value(x_f):
            t_i = params.T - (x_f + half) / params.V
            return _evaluate(params, make_hfh(params, -half, x_f, t_i), profile, cfg)[0]

        width = (min(half, -half + params.V * params.T) + half) / (cfg.x_grid - 1)
        xf0, _ = golden_max(
            value,
            max(-half, traj.x_F - width),
            min(min(half, -half + params.V * params.T), traj.x_F + width),
            iters=cfg.golden_iters,
            xtol=1e-9 * params.D,
        )
        cand = make_hfh(params, -half, xf0, params.T - (xf0 + half) / params.V)
    elif case == 3:

        def value(x_i):
            return _evaluate(params, make_hfh(params, x_i, half, 0.0), profile, cfg)[0]

        width = (half - max(-half, half - params.V * params.T)) / (cfg.x_grid - 1)
        xi0, _ = golden_max(
            value,
            max(max(-half, half - params.V * params.T), traj.x_I - width),
            min(half, traj.x_I + width),
            iters=cfg.golden_iters,
            xtol=1e-9 * params.D,
        )
        cand = make_hfh(params, xi0, half, 0.0)
    else:  # case 4
        slack = params.T - params.D / params.V

        def value(t_i):
            return _evaluate(
                params, make_hfh(params, -half, half, t_i), profile, cfg
            )[0]

        width = slack / max(cfg.ti_grid - 1, 1)
        ti0, _ = golden_max(
            value,
            max(0.0, traj.t_I - width),
            min(slack, traj.t_I + width),
            iters=cfg.golden_iters,
            xtol=1e-9 * params.T,
        )
        cand = make_hfh(params, -half, half, ti0)

    r_cand, t1_cand, pair_cand = _evaluate(params, cand, profile, cfg)
    if r_cand > r_best:
        r_best, traj, t1, pair = r_cand, cand, t1_cand, pair_cand

    # Report rates through the adaptive quadrature for the final answer.
    final_pair = tdma_rates(params, traj, t1)
    return TdmaSolution(
        profile,
        final_pair,
        traj,
        t1,
        {"case": case, "search_r": r_best},
    )


def tdma_trace_region(
    params: SystemParams,
    n_profiles: int = 33,
    cfg: TdmaSearchConfig = DEFAULT_TDMA_CONFIG,
) -> RegionBoundary:
    """TDMA region boundary at uniformly spaced profiles (mirror-folded)."""
    if n_profiles < 2:
        raise ValueError("need at least 2 profiles")
    denom = n_profiles - 1
    solved: dict[int, TdmaSolution] = {}
    for i in range(n_profiles):
        if i <= denom - i:
            solved[i] = tdma_solve_profile(params, RateProfile.of(i / denom), cfg)
    points = []
    for i in range(n_profiles):
        sol = solved[i] if i in solved else _mirror_tdma(params, solved[denom - i])
        points.append(sol)
    return RegionBoundary("tdma", points, {"n_profiles": n_profiles})
