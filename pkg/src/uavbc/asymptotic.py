"""Closed-form asymptotic regions and the static-hover placement solver.

Three regimes admit (near) closed forms:
  * unbounded flight time: the region collapses to the triangle
    r1 + r2 <= log2(1 + Pbar beta0 / H^2), reached by hovering above each
    user in turn (orthogonal scheduling suffices);
  * vanishing speed: the UAV parks at one location chosen per rate profile,
    with superposition coding and a one-dimensional placement search;
  * high SNR: the region tends to r1 + r2 <= log2(Pbar beta0 / H^2) and the
    optimal trajectory degenerates to hovering above the favored user.
"""

from __future__ import annotations

from dataclasses import dataclass

from .core import (
    HfhTrajectory,
    RatePair,
    RateProfile,
    RegionBoundary,
    RegionPoint,
    SystemParams,
)
from .errors import InfeasibleFlight, ValidityError
from .fixed_region import fixed_boundary
from .numerics import golden_max
import math

# Validity gate for the high-SNR closed form, expressed on the worst-case
# SNR Pbar*beta0/(D^2+H^2): below HARD_FLOOR the formula is refused, below
# WARN_LEVEL a warning is attached to the result metadata.
HIGH_SNR_HARD_FLOOR = 10.0
HIGH_SNR_WARN_LEVEL = 100.0


@dataclass(frozen=True)
class HoverSolution:
    """Static-hover boundary point: location, power split and rates."""

    x_star: float
    p1: float
    p2: float
    rate_pair: RatePair
    profile: RateProfile

    @property
    def r(self) -> float:
        """Common rate scale min_k r_k / alpha_k."""
        scales = []
        if self.profile.alpha1 > 0.0:
            scales.append(self.rate_pair.r1 / self.profile.alpha1)
        if self.profile.alpha2 > 0.0:
            scales.append(self.rate_pair.r2 / self.profile.alpha2)
        return min(scales)


def _uniform_profiles(n_profiles: int):
    if n_profiles < 2:
        raise ValueError("need at least 2 profiles")
    return [RateProfile.of(i / (n_profiles - 1)) for i in range(n_profiles)]


def region_tinf(params: SystemParams, n_profiles: int = 33) -> RegionBoundary:
    """Capacity region for unbounded flight duration.

    Every boundary point splits the peak rate log2(1 + Pbar beta0 / H^2)
    proportionally to the profile; independent of V and D.
    """
    peak = params.peak_rate
    points = [
        RegionPoint(prof, RatePair(prof.alpha1 * peak, prof.alpha2 * peak))
        for prof in _uniform_profiles(n_profiles)
    ]
    return RegionBoundary("tinf", points, {"sum_rate": peak})


def hfh_tdma_achievable(params: SystemParams, profile: RateProfile) -> RatePair:
    """Hover-above-each-user TDMA rates with the flight-time loss factor.

    The UAV spends D/V seconds crossing between the users and splits the
    remaining hover time proportionally to the profile, so each user gets
    alpha_k (1 - D/(VT)) of the peak rate.  A lower bound on the optimal
    finite-(V, T) solution; requires VT >= D.
    """
    if params.V <= 0.0 or params.V * params.T < params.D:
        raise InfeasibleFlight(
            f"VT={params.V * params.T} < D={params.D}: cannot visit both users"
        )
    factor = 1.0 - params.D / (params.V * params.T)
    peak = params.peak_rate
    return RatePair(profile.alpha1 * factor * peak, profile.alpha2 * factor * peak)


def solve_v0(
    params: SystemParams,
    profile: RateProfile,
    grid: int = 257,
    refine_tol: float = 1e-9,
) -> HoverSolution:
    """Optimal static hover for the given rate profile (V -> 0 regime).

    For alpha2 >= alpha1 the hover point lies in [0, D/2]; the placement is
    found by a uniform grid scan followed by golden-section refinement, with
    the power split at each candidate solved by the monotone bisection of
    the profile-constrained fixed-location problem.  Opposite profiles are
    handled by mirror symmetry.
    """
    peak = params.peak_rate
    half = 0.5 * params.D
    if profile.alpha1 == 0.0:
        return HoverSolution(half, 0.0, params.Pbar, RatePair(0.0, peak), profile)
    if profile.alpha2 == 0.0:
        return HoverSolution(-half, params.Pbar, 0.0, RatePair(peak, 0.0), profile)
    if profile.alpha1 > profile.alpha2:
        m = solve_v0(params, profile.mirrored(), grid=grid, refine_tol=refine_tol)
        return HoverSolution(
            -m.x_star, m.p2, m.p1, m.rate_pair.swapped(), profile
        )

    def scale(x):
        return fixed_boundary(params, x, profile).rate_pair.r2 / profile.alpha2

    xs = [half * i / (grid - 1) for i in range(grid)]
    values = [scale(x) for x in xs]
    best = max(range(grid), key=values.__getitem__)
    lo = xs[max(best - 1, 0)]
    hi = xs[min(best + 1, grid - 1)]
    x_star, _ = golden_max(scale, lo, hi, iters=80, xtol=refine_tol * half)
    if values[best] > scale(x_star):
        x_star = xs[best]
    point = fixed_boundary(params, x_star, profile)
    return HoverSolution(x_star, point.p1, point.p2, point.rate_pair, profile)


def region_high_snr(params: SystemParams, n_profiles: int = 33) -> RegionBoundary:
    """High-SNR capacity region r1 + r2 <= log2(Pbar beta0 / H^2).

    Valid when the worst-case SNR Pbar beta0/(D^2 + H^2) is large; the
    trajectory degenerates to a static hover above the user with the larger
    rate target, making the region independent of V and T.
    """
    worst_snr = params.Pbar * params.beta0 / (params.D ** 2 + params.H ** 2)
    if worst_snr < HIGH_SNR_HARD_FLOOR:
        raise ValidityError(
            f"worst-case SNR {worst_snr:.3g} below validity floor "
            f"{HIGH_SNR_HARD_FLOOR}; high-SNR region not meaningful"
        )
    warning = None
    if worst_snr < HIGH_SNR_WARN_LEVEL:
        warning = (
            f"worst-case SNR {worst_snr:.3g} below {HIGH_SNR_WARN_LEVEL}; "
            "high-SNR approximation is marginal"
        )
    total = math.log(params.Pbar * params.peak_gain) / math.log(2.0)
    half = 0.5 * params.D
    points = []
    for prof in _uniform_profiles(n_profiles):
        hover_x = half if prof.alpha2 >= prof.alpha1 else -half
        traj = HfhTrajectory(hover_x, hover_x, params.T, 0.0)
        points.append(
            RegionPoint(
                prof,
                RatePair(prof.alpha1 * total, prof.alpha2 * total),
                trajectory=traj,
                extra={"static_hover": hover_x},
            )
        )
    metadata = {"sum_rate": total, "validity_ratio": worst_snr}
    if warning:
        metadata["validity_warning"] = warning
    return RegionBoundary("high-snr", points, metadata)
