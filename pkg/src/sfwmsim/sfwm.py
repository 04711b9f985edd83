"""Four-wave-mixing physics: pumps, phase mismatch and the joint spectrum.

Conventions:
  * a pump with sigma = 0 encodes the monochromatic (CW) limit; peak power
    is undefined there and the average power enters the nonlinear phase;
  * degenerate pumping is represented as two identical pump entries, so the
    nonlinear phase term gamma1 P1 + gamma2 P2 automatically reduces to the
    standard 2 gamma P;
  * the phasematched center always satisfies omega_s + omega_i =
    omega_1 + omega_2 exactly (the idler is defined by energy conservation).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .constants import C, TWO_PI, um_from_omega, omega_from_um
from .dispersion import (FiberSpec, beta, beta1, effective_index, gamma_pump)
from .errors import ConfigError, NoPhasematchError, RegimeError
from .numerics import (DEFAULT_QUADRATURE, QuadratureSpec, _gauss_nodes,
                       bracket_root, find_root, integrate_1d, sinc)

# default band scanned for phasematched frequencies [um]
SCAN_BAND_UM = (0.35, 2.2)
_SCAN_POINTS = 1200


@dataclass(frozen=True)
class PumpSpec:
    """One pump field: carrier, Gaussian bandwidth, average power, rep rate."""

    omega0: float        # rad/s
    sigma: float         # rad/s; 0 encodes the monochromatic limit
    avg_power: float     # W
    rep_rate: float      # Hz (ignored in the CW regime)

    def __post_init__(self):
        if not self.omega0 > 0:
            raise ValueError("omega0 must be > 0")
        if self.sigma < 0:
            raise ValueError("sigma must be >= 0")
        if self.avg_power < 0:
            raise ValueError("avg_power must be >= 0")
        if self.rep_rate < 0:
            raise ValueError("rep_rate must be >= 0")
        if self.sigma > 0 and not self.rep_rate > 0:
            raise ValueError("pulsed pump needs a repetition rate")

    @classmethod
    def from_units(cls, wavelength_um, sigma_thz, avg_power_mw, rep_rate_mhz=0.0):
        """Build from user-facing units (um, THz = 1e12 rad/s, mW, MHz)."""
        return cls(omega0=omega_from_um(wavelength_um),
                   sigma=sigma_thz * 1e12,
                   avg_power=avg_power_mw * 1e-3,
                   rep_rate=rep_rate_mhz * 1e6)

    @property
    def wavelength_um(self):
        return um_from_omega(self.omega0)

    @property
    def is_cw(self):
        return self.sigma == 0.0


# Default tolerance for the physics integrals.  The four-way cancellation in
# the phase mismatch leaves ~3e-9 relative noise on the joint-amplitude
# integrand (propagation constants are ~1e7 1/m known to machine epsilon),
# so 1e-6 keeps a two-decade margin above the noise floor while sitting far
# below every physics tolerance in use.
CONFIG_QUADRATURE = QuadratureSpec(rel_tol=1e-6)


@dataclass(frozen=True)
class SourceConfig:
    """Everything one analysis needs: fiber, two pumps, quadrature policy."""

    fiber: FiberSpec
    pump1: PumpSpec
    pump2: PumpSpec
    quadrature: QuadratureSpec = CONFIG_QUADRATURE

    def __post_init__(self):
        if (self.pump1.sigma == 0.0) != (self.pump2.sigma == 0.0):
            raise ConfigError("pumps must share a regime: both pulsed or both CW")
        if not self.is_cw and self.pump1.rep_rate != self.pump2.rep_rate:
            raise ConfigError("pulsed pumps must share the repetition rate")

    @property
    def degenerate(self):
        return self.pump1 == self.pump2

    @property
    def is_cw(self):
        return self.pump1.is_cw and self.pump2.is_cw

    @property
    def omega_total(self):
        return self.pump1.omega0 + self.pump2.omega0


@dataclass(frozen=True)
class PhasematchCenter:
    omega_s: float       # rad/s
    omega_i: float       # rad/s
    residual: float      # 1/m, phase mismatch re-evaluated at the center

    @property
    def wavelengths_um(self):
        return (um_from_omega(self.omega_s), um_from_omega(self.omega_i))


@dataclass(frozen=True)
class JointSpectrumGrid:
    omega_s_axis: tuple
    omega_i_axis: tuple
    amplitude: tuple     # row-major: amplitude[row s][col i]

    def as_arrays(self):
        return (np.asarray(self.omega_s_axis), np.asarray(self.omega_i_axis),
                np.asarray(self.amplitude))


def canonical(config):
    """Config with the pumps in a fixed order.

    Every physical quantity here is symmetric under exchanging the pump
    labels; routing both orderings through one canonical form makes that
    symmetry exact in floating point as well.
    """
    from dataclasses import replace
    k1 = (config.pump1.omega0, config.pump1.sigma,
          config.pump1.avg_power, config.pump1.rep_rate)
    k2 = (config.pump2.omega0, config.pump2.sigma,
          config.pump2.avg_power, config.pump2.rep_rate)
    if k2 < k1:
        return replace(config, pump1=config.pump2, pump2=config.pump1)
    return config


def peak_power(pump):
    """Pulse peak power [W]: P = p sigma / (f_r sqrt(2 pi))."""
    if pump.is_cw:
        raise RegimeError("peak power undefined for a monochromatic pump; "
                          "use avg_power")
    return pump.avg_power * pump.sigma / (pump.rep_rate * math.sqrt(TWO_PI))


def pump_envelope(pump, omega):
    """Gaussian spectral amplitude, unit-normalized in |.|^2 over omega."""
    if pump.is_cw:
        raise RegimeError("spectral envelope undefined for a monochromatic pump")
    om = np.asarray(omega, dtype=float)
    pref = 2.0 ** 0.25 / (math.pi ** 0.25 * math.sqrt(pump.sigma))
    out = pref * np.exp(-((om - pump.omega0) / pump.sigma) ** 2)
    if out.ndim == 0:
        return float(out)
    return out


@lru_cache(maxsize=4096)
def nonlinear_phase(config):
    """gamma1 P1 + gamma2 P2 [1/m]; average powers in the CW regime."""
    config = canonical(config)
    g1 = gamma_pump(config.fiber, config.pump1.omega0)
    g2 = gamma_pump(config.fiber, config.pump2.omega0)
    if config.is_cw:
        return g1 * config.pump1.avg_power + g2 * config.pump2.avg_power
    return g1 * peak_power(config.pump1) + g2 * peak_power(config.pump2)


def phase_mismatch(omega, omega_s, omega_i, config):
    """Wavenumber mismatch including the self/cross-phase nonlinear shift.

    ``omega`` is one pump frequency; the other is omega_s + omega_i - omega.
    Symmetric under exchange of the two pump frequencies and under
    signal/idler exchange.
    """
    fiber = config.fiber
    om = np.asarray(omega, dtype=float)
    conj = np.asarray(omega_s, dtype=float) + np.asarray(omega_i, dtype=float) - om
    out = (beta(om, fiber) + beta(conj, fiber)
           - beta(omega_s, fiber) - beta(omega_i, fiber) - nonlinear_phase(config))
    if np.asarray(out).ndim == 0:
        return float(out)
    return out


def _detuned_mismatch_grid(config, n_points=_SCAN_POINTS, band_um=SCAN_BAND_UM):
    """Phase mismatch on a frequency grid with pumps at their carriers."""
    fiber = config.fiber
    total = config.omega_total
    lo = omega_from_um(band_um[1])
    hi = omega_from_um(band_um[0])
    # the mirrored frequency must stay in band too
    lo = max(lo, total - hi)
    hi = min(hi, total - lo)
    if not lo < hi:
        raise NoPhasematchError("scan band is empty after mirroring",
                                scanned_range=band_um)
    grid = np.linspace(lo, hi, n_points)
    s_pumps = beta(config.pump1.omega0, fiber) + beta(config.pump2.omega0, fiber)
    vals = (s_pumps - beta(grid, fiber) - beta(total - grid, fiber)
            - nonlinear_phase(config))
    return grid, vals


def _mismatch_on_line(config):
    """Callable: phase mismatch vs signal frequency at the pump carriers."""
    fiber = config.fiber
    total = config.omega_total
    s_pumps = beta(config.pump1.omega0, fiber) + beta(config.pump2.omega0, fiber)
    nl = nonlinear_phase(config)
    return lambda om: float(s_pumps - beta(float(om), fiber)
                            - beta(float(total - om), fiber) - nl)


def phasematch_roots(config, band_um=SCAN_BAND_UM):
    """Distinct signal-above phasematched frequencies, outer first.

    Sign-scans the band (excluding +-3 sigma around each pump carrier),
    refines every crossing by bracketed root finding, and returns the roots
    above the energy-conservation midpoint ordered by detuning magnitude,
    largest (outer branch) first.  Mirror roots follow by energy
    conservation.  Empty tuple when nothing phasematches.
    """
    config = canonical(config)
    total = config.omega_total
    grid, vals = _detuned_mismatch_grid(config, band_um=band_um)

    # Exclude each pump's spectral neighbourhood: +-3 sigma for pulsed
    # pumps, and always a small relative margin (the nonlinear phase term
    # creates a genuine but physically near-degenerate crossing within
    # ~gamma p / |pump group walk-off| of each carrier, which must not
    # masquerade as a signal band; it matters in the CW regime where
    # sigma = 0 excludes nothing).
    keep = np.ones_like(grid, dtype=bool)
    for pump in (config.pump1, config.pump2):
        margin = max(3 * pump.sigma, 1e-4 * pump.omega0)
        keep &= np.abs(grid - pump.omega0) > margin
        keep &= np.abs((total - grid) - pump.omega0) > margin

    def excluded(om):
        for pump in (config.pump1, config.pump2):
            margin = max(3 * pump.sigma, 1e-4 * pump.omega0)
            if (abs(om - pump.omega0) <= margin
                    or abs((total - om) - pump.omega0) <= margin):
                return True
        return False

    f = _mismatch_on_line(config)
    roots = []
    for i in range(len(grid) - 1):
        if not (keep[i] and keep[i + 1]):
            continue
        if vals[i] == 0.0:
            root = float(grid[i])
        elif vals[i] * vals[i + 1] < 0:
            root = find_root(f, bracket_root(f, grid[i], grid[i + 1]),
                             tol=1e2)
        else:
            continue
        if not excluded(root):
            roots.append(root)
    above = sorted((om for om in roots if om > 0.5 * total),
                   key=lambda om: abs(om - 0.5 * total), reverse=True)
    distinct = []
    for om in above:
        if all(abs(om - o) > 1e-6 * om for o in distinct):
            distinct.append(om)
    return tuple(distinct)


def solve_phasematch_center(config, branch="outer", side="signal-above",
                            band_um=SCAN_BAND_UM):
    """Signal/idler carriers with zero phase mismatch at the pump carriers.

    Picks the requested branch by detuning magnitude; energy conservation
    fixes the idler exactly.
    """
    if branch not in ("outer", "inner"):
        raise ValueError("branch must be 'outer' or 'inner'")
    if side not in ("signal-above", "signal-below"):
        raise ValueError("side must be 'signal-above' or 'signal-below'")
    total = config.omega_total
    distinct = phasematch_roots(config, band_um=band_um)
    if not distinct:
        raise NoPhasematchError(
            f"no phasematched frequency in {band_um} um band",
            scanned_range=band_um)
    index = 0 if branch == "outer" else 1
    if index >= len(distinct):
        raise NoPhasematchError(
            f"no {branch}-branch solution in {band_um} um band "
            f"({len(distinct)} branch(es) found)", scanned_range=band_um)
    om_sig = distinct[index]
    om_s, om_i = (om_sig, total - om_sig) if side == "signal-above" \
        else (total - om_sig, om_sig)
    return PhasematchCenter(omega_s=om_s, omega_i=om_i,
                            residual=_mismatch_on_line(config)(om_sig))


def h_function(omega_s, omega_i, fiber):
    """Spectral weight omega_s omega_i beta1_s beta1_i / (n_s^2 n_i^2)."""
    oms = np.asarray(omega_s, dtype=float)
    omi = np.asarray(omega_i, dtype=float)
    out = (oms * omi * beta1(oms, fiber) * beta1(omi, fiber)
           / (effective_index(oms, fiber) ** 2 * effective_index(omi, fiber) ** 2))
    if out.ndim == 0:
        return float(out)
    return out


@lru_cache(maxsize=2048)
def _pump_rule(config):
    """Fixed composite Gauss-Legendre rule for the pump integral (cached).

    The pump integral runs on a FIXED rule rather than feedback-driven
    refinement, so the joint amplitude is an exactly smooth function of
    (omega_s, omega_i) and the surrounding adaptive integrals never chase
    panelization jumps.  The window is the intersection of the two
    envelopes' +-5 sigma supports at the nominal carriers (pump-symmetric
    by construction); the panel count comes from an a-priori bound on the
    mismatch-phase variation across it (group-velocity walk-off plus a
    curvature term) at one 15-node panel per 8 radians.

    Returns (nodes, weights, beta_at_nodes, envelope1_at_nodes).
    """
    from .dispersion import beta2 as _beta2
    config = canonical(config)
    p1, p2 = config.pump1, config.pump2
    fiber = config.fiber
    m = min(p1.sigma, p2.sigma)
    lo, hi = p1.omega0 - 5.0 * m, p1.omega0 + 5.0 * m
    width = hi - lo
    gvm = abs(beta1(p1.omega0, fiber) - beta1(p2.omega0, fiber))
    curv = abs(_beta2(p1.omega0, fiber)) + abs(_beta2(p2.omega0, fiber))
    phase_var = 0.5 * fiber.length * (gvm * width + 0.5 * curv * width * width)
    # a single Gauss panel: order 32 nails the Gaussian envelope, plus one
    # node per radian of mismatch-phase variation
    order = int(min(180, max(32, math.ceil(32 + 1.2 * phase_var))))

    xg, wg = _gauss_nodes(order)
    half = 0.5 * width
    mid = 0.5 * (lo + hi)
    nodes = mid + half * xg
    weights = half * wg
    return nodes, weights, beta(nodes, fiber), pump_envelope(p1, nodes)


def _jsa_batch(config, omega_s, omega_i):
    """Joint spectral amplitude f for paired arrays of signal/idler values.

    One fixed-rule pump integral (see ``_pump_rule``) evaluates every pair
    at once; the envelope product suppresses pairs far from energy
    conservation naturally.
    """
    if config.is_cw:
        raise RegimeError("joint spectral amplitude requires pulsed pumps")
    config = canonical(config)
    fiber = config.fiber
    L = fiber.length
    p1, p2 = config.pump1, config.pump2
    oms = np.atleast_1d(np.asarray(omega_s, dtype=float))
    omi = np.atleast_1d(np.asarray(omega_i, dtype=float))
    total = oms + omi

    beta_s = beta(oms, fiber)
    beta_i = beta(omi, fiber)
    nl = nonlinear_phase(config)
    om_nodes, weights, beta_nodes, env1 = _pump_rule(config)

    conj = total[None, :] - om_nodes[:, None]
    dk = (beta_nodes[:, None]
          + beta(conj.ravel(), fiber).reshape(conj.shape)
          - beta_s[None, :] - beta_i[None, :] - nl)
    x = 0.5 * L * dk
    amp = env1[:, None] * pump_envelope(p2, conj)
    vals = amp * sinc(x) * np.exp(1j * x)
    F = np.tensordot(weights, vals, axes=(0, 0))

    pref = math.sqrt(math.pi * p1.sigma * p2.sigma / 2.0)
    return pref * np.asarray(F, dtype=complex)


def jsa(omega_s, omega_i, config):
    """Joint spectral amplitude f(omega_s, omega_i) (complex scalar)."""
    return complex(_jsa_batch(config, float(omega_s), float(omega_i))[0])


# main-region size of the mismatch-phase argument covered by the default
# window along the anti-diagonal sinc tail (captures ~99% of the sinc mass)
_SINC_EXTENT = 48.0


def jsa_window(config, center=None):
    """Default rectangular window for sampling the joint spectrum.

    Per-axis half-width around the phasematched center: the largest of the
    sinc main-region scale 6/(L |d(mismatch)/d omega|), three combined pump
    bandwidths, the envelope-limited extent of the phasematched line, and
    the anti-diagonal sinc-tail extent (mismatch argument up to
    ``_SINC_EXTENT``).  Clamped to stay clear of the degenerate point (the
    mirror peak lies beyond it) and inside the guidance band.
    """
    if center is None:
        center = solve_phasematch_center(config)
    fiber = config.fiber
    L = fiber.length
    g_s = beta1(config.pump2.omega0, fiber) - beta1(center.omega_s, fiber)
    g_i = beta1(config.pump2.omega0, fiber) - beta1(center.omega_i, fiber)
    sigma_c = math.hypot(config.pump1.sigma, config.pump2.sigma)

    theta = math.atan2(-g_s, g_i)
    along = 3 * sigma_c / max(abs(math.cos(theta) + math.sin(theta)), 0.05)
    sinc_tail = 2.0 * _SINC_EXTENT / (L * max(abs(g_s - g_i), 1e-30))
    w_s = max(6.0 / (L * abs(g_s)), 3 * sigma_c,
              along * abs(math.cos(theta)), sinc_tail)
    w_i = max(6.0 / (L * abs(g_i)), 3 * sigma_c,
              along * abs(math.sin(theta)), sinc_tail)
    return _clamp_window(
        (center.omega_s - w_s, center.omega_s + w_s,
         center.omega_i - w_i, center.omega_i + w_i), center, config)


def _clamp_window(window, center, config):
    """Keep a window clear of the degenerate point and the band edges."""
    s_lo, s_hi, i_lo, i_hi = window
    half = 0.5 * config.omega_total
    band_lo = omega_from_um(SCAN_BAND_UM[1])
    band_hi = omega_from_um(SCAN_BAND_UM[0])
    cap_s = 0.9 * abs(center.omega_s - half)
    cap_i = 0.9 * abs(center.omega_i - half)
    s_lo = max(s_lo, center.omega_s - cap_s, band_lo)
    s_hi = min(s_hi, center.omega_s + cap_s, band_hi)
    i_lo = max(i_lo, center.omega_i - cap_i, band_lo)
    i_hi = min(i_hi, center.omega_i + cap_i, band_hi)
    return (s_lo, s_hi, i_lo, i_hi)


def jsa_grid(config, window=None, n_s=64, n_i=64):
    """Sample the joint amplitude on a rectangular grid (row s, column i)."""
    if window is None:
        window = jsa_window(config)
    s_lo, s_hi, i_lo, i_hi = window
    s_axis = np.linspace(s_lo, s_hi, n_s)
    i_axis = np.linspace(i_lo, i_hi, n_i)
    rows = []
    for om_s in s_axis:                       # fixed row-major assembly order
        row = _jsa_batch(config, np.full(n_i, om_s), i_axis)
        rows.append(tuple(complex(v) for v in row))
    return JointSpectrumGrid(omega_s_axis=tuple(float(v) for v in s_axis),
                             omega_i_axis=tuple(float(v) for v in i_axis),
                             amplitude=tuple(rows))
