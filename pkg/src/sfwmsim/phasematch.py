"""Phase-matching cartography for degenerate pumping.

Maps the zero-mismatch contour in (pump frequency, detuning) space, labels
the outer/inner solution branches, and computes the orientation angle of
the phasematched level curve in (omega_s, omega_i) space.  A -45 degree
orientation corresponds to matched signal/idler group velocities and is
where the conversion efficiency peaks.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from .constants import omega_from_um, um_from_omega
from .errors import (DivergenceError, NoPhasematchError, RegimeError,
                     WindowError)
from .sfwm import (SourceConfig, phase_mismatch, phasematch_roots,
                   solve_phasematch_center)

_GRAD_STEP_REL = 1e-4
_GRAD_FLOOR = 1e-18     # s/m; below this the level-curve direction is undefined


class OrientationUndefinedError(DivergenceError):
    """Mismatch gradient too small to define a level-curve direction."""


@dataclass(frozen=True)
class ContourPoint:
    pump_frequency: float      # rad/s
    detuning_signal: float     # rad/s, omega_s - omega_p
    detuning_idler: float      # rad/s, omega_i - omega_p
    theta_si: float            # degrees in (-90, 90]
    branch: str                # 'outer' | 'inner'

    @property
    def pump_wavelength_um(self):
        return um_from_omega(self.pump_frequency)


def _fold_angle_deg(theta_rad):
    th = math.degrees(theta_rad)
    while th <= -90.0:
        th += 180.0
    while th > 90.0:
        th -= 180.0
    return th


def orientation_angle(omega_s, omega_i, config):
    """Angle of the zero-mismatch level curve at (omega_s, omega_i) [deg].

    Five-point central differences of the mismatch with the first pump
    frequency held at its carrier; the angle is measured from the omega_s
    axis and folded into (-90, 90].
    """
    om_p = config.pump1.omega0
    h_s = _GRAD_STEP_REL * omega_s
    h_i = _GRAD_STEP_REL * omega_i

    def dk_s(om):
        return phase_mismatch(om_p, om, omega_i, config)

    def dk_i(om):
        return phase_mismatch(om_p, omega_s, om, config)

    g_s = (dk_s(omega_s - 2 * h_s) - 8 * dk_s(omega_s - h_s)
           + 8 * dk_s(omega_s + h_s) - dk_s(omega_s + 2 * h_s)) / (12 * h_s)
    g_i = (dk_i(omega_i - 2 * h_i) - 8 * dk_i(omega_i - h_i)
           + 8 * dk_i(omega_i + h_i) - dk_i(omega_i + 2 * h_i)) / (12 * h_i)
    if math.hypot(g_s, g_i) < _GRAD_FLOOR:
        raise OrientationUndefinedError(
            f"mismatch gradient below {_GRAD_FLOOR} s/m at "
            f"({omega_s:.4e}, {omega_i:.4e})")
    return _fold_angle_deg(math.atan2(-g_s, g_i))


def _repumped(config, omega_p):
    """Config with the (degenerate) pumps re-centered at omega_p."""
    return replace(config,
                   pump1=replace(config.pump1, omega0=omega_p),
                   pump2=replace(config.pump2, omega0=omega_p))


def contour(config, pump_wavelength_range_um, n_points):
    """Zero-mismatch contour over a pump-wavelength sweep.

    For every pump frequency on the grid all signal-side solutions are
    found; each contributes two points (signal above and below the pump).
    Branch labels follow detuning magnitude per pump frequency: the largest
    detuning is the outer branch, anything else inner; frequencies with no
    solution are skipped.  Points are ordered by pump frequency, outer
    branch first within a frequency.
    """
    if not config.degenerate:
        raise RegimeError("the pump-detuning contour is defined for "
                          "degenerate pumps")
    lo_um, hi_um = pump_wavelength_range_um
    lams = np.linspace(lo_um, hi_um, n_points)
    points = []
    for lam in lams:
        om_p = omega_from_um(float(lam))
        cfg = _repumped(config, om_p)
        try:
            roots = phasematch_roots(cfg)
        except NoPhasematchError:
            continue
        for rank, om_s in enumerate(roots):
            om_i = cfg.omega_total - om_s
            branch = "outer" if rank == 0 else "inner"
            for s_sign in (+1, -1):
                oms, omi = (om_s, om_i) if s_sign > 0 else (om_i, om_s)
                try:
                    theta = orientation_angle(oms, omi, cfg)
                except OrientationUndefinedError:
                    continue
                points.append(ContourPoint(
                    pump_frequency=om_p,
                    detuning_signal=oms - om_p,
                    detuning_idler=omi - om_p,
                    theta_si=theta,
                    branch=branch))
    points.sort(key=lambda p: (p.pump_frequency, p.branch != "outer",
                               -p.detuning_signal))
    return points


@dataclass(frozen=True, eq=False)
class OrientationSweepRow:
    pump_wavelength_um: float
    theta_si: float            # degrees
    eta_numeric: float | None
    eta_closed: float | None
    error: str | None = None


def efficiency_vs_orientation(config, pump_wavelength_range_um, n_points):
    """Numeric and closed-form efficiency along the outer branch.

    One row per pump wavelength with an outer-branch solution; closed-form
    divergence near -45 degrees and numeric window failures are recorded in
    the error column instead of aborting the sweep.
    """
    from .efficiency import eta_dp_closed, eta_pulsed_numeric

    if not config.degenerate:
        raise RegimeError("the orientation sweep is defined for degenerate pumps")
    lo_um, hi_um = pump_wavelength_range_um
    rows = []
    for lam in np.linspace(lo_um, hi_um, n_points):
        cfg = _repumped(config, omega_from_um(float(lam)))
        try:
            center = solve_phasematch_center(cfg)
        except NoPhasematchError:
            continue
        theta = orientation_angle(center.omega_s, center.omega_i, cfg)
        err_parts = []
        eta_num = eta_cls = None
        try:
            eta_num = eta_pulsed_numeric(cfg).eta
        except WindowError as exc:
            err_parts.append(f"numeric: {exc}")
        try:
            eta_cls = eta_dp_closed(cfg).eta
        except DivergenceError as exc:
            err_parts.append(f"closed: {exc}")
        rows.append(OrientationSweepRow(
            pump_wavelength_um=float(lam), theta_si=theta,
            eta_numeric=eta_num, eta_closed=eta_cls,
            error="; ".join(err_parts) or None))
    return rows
