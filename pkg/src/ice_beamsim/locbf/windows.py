from __future__ import annotations

"""
Angular windows from estimated positions.

Scope:
- Bounding radius of the combined AP/UE localization error
- AoD / AoA window on the circular grid

⚠️ IMPORTANT:
- Each estimate lies in a square of half-side 2σ around the truth, so the
  true AP→UE vector lies within r = 2√2·(σ_ap + σ_ue) of the estimated one
  and deviates from it by at most arcsin(r / d̂).
- Windows that would cover every grid point are returned as the full circle.
"""

import logging
import math

from ice_beamsim.channel.model import bearing
from ice_beamsim.core.types import (
    AngularWindow,
    LocalizationService,
    Point,
    WindowSide,
    WindowSpan,
)
from ice_beamsim.sensing.grid import AngleGrid

logger = logging.getLogger(__name__)


def error_radius(sigma_ap: float, sigma_ue: float) -> float:
    """Circumradius of the combined error box."""
    return 2.0 * math.sqrt(2.0) * (sigma_ap + sigma_ue)


def _full_circle(grid: AngleGrid, center: float) -> WindowSpan:
    return WindowSpan(
        lo=0,
        hi=grid.n_points - 1,
        n_grid=grid.n_points,
        center=center,
        half_width=math.pi,
        full=True,
    )


def angular_window(
    est_ap: Point,
    est_ue: Point,
    sigma_ap: float,
    sigma_ue: float,
    grid: AngleGrid,
    side: WindowSide | str,
) -> WindowSpan:
    """
    Grid span that contains the true AoD (or AoA) given the two estimates.
    """
    side = WindowSide(side)
    d_hat = math.dist(est_ap, est_ue)
    if d_hat == 0.0:
        logger.debug("Coincident position estimates, using full circle")
        return _full_circle(grid, 0.0)

    src, dst = (est_ap, est_ue) if side is WindowSide.AOD else (est_ue, est_ap)
    center = bearing(src, dst)

    radius = error_radius(sigma_ap, sigma_ue)
    if radius >= d_hat:
        return _full_circle(grid, center)

    half = math.asin(radius / d_hat)
    lo = math.floor(grid.snap((center - half) / grid.step))
    hi = math.ceil(grid.snap((center + half) / grid.step))
    if hi - lo + 1 >= grid.n_points:
        return _full_circle(grid, center)

    return WindowSpan(
        lo=grid.wrap(lo),
        hi=grid.wrap(hi),
        n_grid=grid.n_points,
        center=center,
        half_width=half,
    )


def location_window(
    est_ap: Point,
    est_ue: Point,
    service_ap: LocalizationService,
    service_ue: LocalizationService,
    grid: AngleGrid,
) -> AngularWindow:
    """AoD and AoA windows for one pair of estimates."""
    sigmas = (service_ap.sigma_m, service_ue.sigma_m)
    window = AngularWindow(
        aod=angular_window(est_ap, est_ue, *sigmas, grid, WindowSide.AOD),
        aoa=angular_window(est_ap, est_ue, *sigmas, grid, WindowSide.AOA),
    )
    logger.debug(
        "Angular window",
        extra={
            "q": (window.q1, window.q2),
            "g": (window.g1, window.g2),
            "service": service_ue.name,
        },
    )
    return window
