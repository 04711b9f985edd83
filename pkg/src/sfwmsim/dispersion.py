"""Fiber dispersion and nonlinearity.

The photonic-crystal fiber is reduced to an equivalent step-index fiber: a
fused-silica core of the given radius inside a uniform cladding whose index
is the volume-weighted mix of air and silica, n_cl = f + (1 - f) n_SiO2.
The propagation constant comes from the exact vectorial characteristic
equation of the fundamental mode (see ``_kernels_py``), which reproduces the
regression anchors of both reference fibers; the scalar weak-guidance
approximation is badly off at this index contrast and is not used.

Transverse mode profiles use the zeroth-order Bessel shape of the
fundamental mode, evaluated at the exact (u, w) of the vectorial solve, and
are treated as frequency-independent within each carrier's bandwidth.

A ``taylor_coefficients`` model replaces k(omega) by a Taylor polynomial
around a reference frequency (coefficients beta_n in s^n/m, factorial
convention); it decouples tests from the mode solver and allows engineered
dispersion.  Geometry-derived quantities (profiles, effective area, gamma)
still use the step-index machinery.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .backend import kernels
from .constants import C, SELLMEIER_RANGE_UM, N2_SILICA_DEFAULT, um_from_omega
from .errors import ModeCutoffError, OverlapError, WavelengthRangeError
from .numerics import (DEFAULT_QUADRATURE, bracket_root, derivative, find_root,
                       integrate_1d)

_BETA_STEP_REL = 1e-4          # stencil spacing for beta derivatives, h = 1e-4 omega


@dataclass(frozen=True)
class TaylorDispersion:
    """Polynomial k(omega) model: beta_n in s^n/m, factorial convention."""

    reference_frequency: float            # rad/s
    beta_coefficients: tuple              # (beta0, beta1, ...) at least two

    def __post_init__(self):
        object.__setattr__(self, "beta_coefficients",
                           tuple(float(b) for b in self.beta_coefficients))
        if len(self.beta_coefficients) < 2:
            raise ValueError("need at least beta0 and beta1")
        if not all(math.isfinite(b) for b in self.beta_coefficients):
            raise ValueError("beta coefficients must be finite")
        if not self.reference_frequency > 0:
            raise ValueError("reference frequency must be positive")

    def k(self, omega, deriv=0):
        """deriv-th frequency derivative of k at omega (Horner evaluation)."""
        d = np.asarray(omega, dtype=float) - self.reference_frequency
        n_terms = len(self.beta_coefficients) - deriv
        if n_terms <= 0:
            return float(d * 0.0) if d.ndim == 0 else d * 0.0
        coeffs = [self.beta_coefficients[m + deriv] / math.factorial(m)
                  for m in range(n_terms)]
        out = np.zeros_like(d)
        for c in reversed(coeffs):
            out = out * d + c
        if out.ndim == 0:
            return float(out)
        return out


@dataclass(frozen=True)
class FiberSpec:
    """Fiber geometry and nonlinearity; all lengths in SI meters."""

    core_radius: float                    # m
    air_fill_fraction: float
    length: float                         # m
    n2_kerr: float = N2_SILICA_DEFAULT    # m^2/W
    model: str = "step_index_pcf"         # or "taylor_coefficients"
    taylor: TaylorDispersion | None = None

    def __post_init__(self):
        if not self.core_radius > 0:
            raise ValueError("core_radius must be > 0")
        if not 0 < self.air_fill_fraction < 1:
            raise ValueError("air_fill_fraction must be in (0, 1)")
        if not self.length > 0:
            raise ValueError("length must be > 0")
        if not self.n2_kerr > 0:
            raise ValueError("n2_kerr must be > 0")
        if self.model not in ("step_index_pcf", "taylor_coefficients"):
            raise ValueError(f"unknown dispersion model: {self.model}")
        if self.model == "taylor_coefficients" and self.taylor is None:
            raise ValueError("taylor_coefficients model needs taylor data")


@dataclass(frozen=True)
class ModeProfile:
    """Normalized radial profile of the fundamental mode at one carrier.

    amplitude(rho) is J0(u rho/r)/J0(u) inside the core and
    K0(w rho/r)/K0(w) outside, scaled so that the transverse integral of
    |f|^2 equals one.
    """

    carrier_frequency: float      # rad/s
    core_radius: float            # m
    u: float
    w: float
    norm: float                   # multiplies the raw piecewise shape
    radial_grid: tuple            # sample points [m], for inspection/plots
    radial_amplitude: tuple       # normalized samples at radial_grid

    def amplitude(self, rho):
        """Exact normalized amplitude at radius rho [m] (scalar or array)."""
        from scipy.special import j0 as _j0, k0 as _k0
        arr = np.atleast_1d(np.asarray(rho, dtype=float))
        r = self.core_radius
        inside = arr < r
        out = np.empty_like(arr)
        out[inside] = _j0(self.u * arr[inside] / r) / _j0(self.u)
        out[~inside] = _k0(self.w * arr[~inside] / r) / _k0(self.w)
        out *= self.norm
        if np.asarray(rho).ndim == 0:
            return float(out[0])
        return out

    @property
    def outer_extent(self):
        """Radius beyond which the evanescent tail is negligible."""
        return self.core_radius * (1.0 + 42.0 / self.w)


@dataclass(frozen=True)
class NonlinearParameters:
    gamma_sfwm: float     # 1/(W m)
    gamma_pump_1: float   # 1/(W m)
    gamma_pump_2: float   # 1/(W m)
    a_eff: float          # m^2


def silica_index(omega):
    """Fused-silica refractive index at angular frequency omega [rad/s]."""
    lam_um = um_from_omega(np.asarray(omega, dtype=float))
    _check_sellmeier_range(lam_um)
    n = kernels.sellmeier_n(lam_um)
    if n.ndim == 0:
        return float(n)
    return n


def _check_sellmeier_range(lam_um):
    lo, hi = SELLMEIER_RANGE_UM
    bad = (lam_um < lo) | (lam_um > hi)
    if np.any(bad):
        offending = np.atleast_1d(lam_um)[np.atleast_1d(bad)][0]
        raise WavelengthRangeError(
            f"wavelength {offending:.4f} um outside Sellmeier validity "
            f"[{lo}, {hi}] um")


@lru_cache(maxsize=64)
def _seed_table(fiber):
    """Per-fiber b(omega) table used to seed the fast mode solve.

    Seeds only accelerate Newton; the solve still converges to machine
    precision (with a checked fallback), so every result is independent of
    this memoization.  The table is immutable after construction.
    """
    lo, hi = SELLMEIER_RANGE_UM
    lam = np.geomspace(lo * 1.05, hi * 0.95, 192)
    om = np.sort(2e6 * math.pi * C / lam)
    neff, _u, _w = kernels.he11_solve(om, fiber.core_radius,
                                      fiber.air_fill_fraction)
    nco = kernels.sellmeier_n(um_from_omega(om))
    ncl = fiber.air_fill_fraction + (1 - fiber.air_fill_fraction) * nco
    b = (neff ** 2 - ncl ** 2) / (nco ** 2 - ncl ** 2)
    om.setflags(write=False)
    b.setflags(write=False)
    return om, b


def _solve_step_index(omega, fiber):
    """(neff, u, w) arrays for the step-index model, with range checks."""
    om = np.atleast_1d(np.asarray(omega, dtype=float))
    _check_sellmeier_range(um_from_omega(om))
    if om.size >= 4:
        seed_om, seed_b = _seed_table(fiber)
        neff, u, w = kernels.he11_solve_seeded(
            om, fiber.core_radius, fiber.air_fill_fraction, seed_om, seed_b)
    else:
        neff, u, w = kernels.he11_solve(om, fiber.core_radius,
                                        fiber.air_fill_fraction)
    if not np.all(np.isfinite(neff)):
        bad = om[~np.isfinite(neff)][0]
        raise ModeCutoffError(
            f"fundamental-mode solve failed at omega={bad:.6e} rad/s "
            f"(lambda={um_from_omega(bad):.4f} um)")
    return neff, u, w


@lru_cache(maxsize=200_000)
def _neff_scalar_cached(omega, fiber):
    return float(_solve_step_index(omega, fiber)[0][0])


def effective_index(omega, fiber):
    """Effective index of the fundamental mode (scalar or array omega)."""
    if fiber.model == "taylor_coefficients":
        k = fiber.taylor.k(omega)
        return k * C / omega
    if np.isscalar(omega) or np.asarray(omega).ndim == 0:
        return _neff_scalar_cached(float(omega), fiber)
    return _solve_step_index(omega, fiber)[0]


def beta(omega, fiber):
    """Propagation constant k(omega) [1/m]."""
    if fiber.model == "taylor_coefficients":
        return fiber.taylor.k(omega)
    return effective_index(omega, fiber) * np.asarray(omega, dtype=float) / C


def beta1(omega, fiber):
    """First frequency derivative of k [s/m] (group slowness)."""
    if fiber.model == "taylor_coefficients":
        return fiber.taylor.k(omega, deriv=1)
    om = np.asarray(omega, dtype=float)
    h = _BETA_STEP_REL * om
    if om.ndim == 0:
        return derivative(lambda x: beta(float(x), fiber), float(om), step=float(h))
    return (beta(om - 2 * h, fiber) - 8 * beta(om - h, fiber)
            + 8 * beta(om + h, fiber) - beta(om + 2 * h, fiber)) / (12 * h)


def beta2(omega, fiber):
    """Second frequency derivative of k [s^2/m] (group-velocity dispersion)."""
    if fiber.model == "taylor_coefficients":
        return fiber.taylor.k(omega, deriv=2)
    om = np.asarray(omega, dtype=float)
    h = _BETA_STEP_REL * om
    if om.ndim == 0:
        return derivative(lambda x: beta1(float(x), fiber), float(om), step=float(h))
    return (beta1(om - 2 * h, fiber) - 8 * beta1(om - h, fiber)
            + 8 * beta1(om + h, fiber) - beta1(om + 2 * h, fiber)) / (12 * h)


def find_zero_dispersion(fiber, wavelength_range_um=(0.4, 1.6), points=240):
    """All zero crossings of beta2 in the range, ascending in wavelength [um].

    Sign-scan on an even wavelength grid followed by bracketed root
    refinement in omega.  An empty list means no zero-dispersion point.
    """
    lo_um, hi_um = wavelength_range_um
    margin = 1.0 + 5 * _BETA_STEP_REL
    lo_allowed = SELLMEIER_RANGE_UM[0] * margin
    hi_allowed = SELLMEIER_RANGE_UM[1] / margin
    if fiber.model != "taylor_coefficients":
        lo_um = max(lo_um, lo_allowed)
        hi_um = min(hi_um, hi_allowed)
    lams = np.linspace(lo_um, hi_um, points)
    oms = 2e6 * np.pi * C / lams
    b2 = beta2(oms, fiber)

    zdws = []
    f = lambda om: float(beta2(float(om), fiber))
    for i in range(points - 1):
        lo, hi = oms[i + 1], oms[i]          # omega decreasing with lambda
        if b2[i] == 0.0:
            zdws.append(lams[i])
        elif b2[i] * b2[i + 1] < 0:
            root = find_root(f, bracket_root(f, lo, hi), tol=1e-7 * lo)
            zdws.append(um_from_omega(root))
    return sorted(zdws)


@lru_cache(maxsize=4096)
def mode_profile(omega, fiber):
    """Normalized fundamental-mode profile at the carrier (cached per fiber).

    The transverse structure always comes from the step-index geometry, also
    under the Taylor dispersion model.
    """
    neff, u, w = _solve_step_index(omega, fiber)
    u, w = float(u[0]), float(w[0])
    r = fiber.core_radius

    from scipy.special import j0 as _j0, k0 as _k0
    raw_in = lambda rho: _j0(u * rho / r) / _j0(u)
    raw_out = lambda rho: _k0(w * rho / r) / _k0(w)
    rho_max = r * (1.0 + 42.0 / w)
    n_in = integrate_1d(lambda rho: raw_in(rho) ** 2 * rho, 0.0, r,
                        vectorized=True)
    n_out = integrate_1d(lambda rho: raw_out(rho) ** 2 * rho, r, rho_max,
                         vectorized=True)
    norm2 = 2 * math.pi * (n_in.value + n_out.value)
    norm = 1.0 / math.sqrt(norm2)

    grid = np.linspace(0.0, rho_max, 257)
    inside = grid < r
    samples = np.empty_like(grid)
    samples[inside] = raw_in(grid[inside])
    samples[~inside] = raw_out(grid[~inside])
    samples *= norm
    return ModeProfile(carrier_frequency=float(omega), core_radius=r, u=u, w=w,
                       norm=norm, radial_grid=tuple(grid),
                       radial_amplitude=tuple(samples))


def effective_area(profiles):
    """Effective interaction area [m^2] of four normalized mode profiles.

    1 / (2 pi Int f1 f2 f3 f4 rho drho); the order of the profiles does not
    matter because the integrand is a plain product.
    """
    if len(profiles) != 4:
        raise ValueError("effective_area takes exactly four profiles")
    r = profiles[0].core_radius
    if any(abs(p.core_radius - r) > 1e-12 * r for p in profiles):
        raise ValueError("profiles must share the fiber geometry")
    rho_max = min(p.outer_extent for p in profiles)

    def product(rho):
        out = np.ones_like(rho)
        for p in profiles:
            out = out * p.amplitude(rho)
        return out * rho

    inner = integrate_1d(product, 0.0, r, vectorized=True)
    outer = integrate_1d(product, r, rho_max, vectorized=True)
    overlap = 2 * math.pi * (inner.value + outer.value)
    if not (overlap > 0 and math.isfinite(overlap)):
        raise OverlapError(f"vanishing four-mode overlap: {overlap}")
    return 1.0 / overlap


@lru_cache(maxsize=4096)
def _a_eff_cached(fiber, carriers):
    profiles = [mode_profile(om, fiber) for om in carriers]
    return effective_area(profiles)


def gamma_pump(fiber, omega):
    """Self/cross-phase nonlinear coefficient of one pump [1/(W m)]."""
    a = _a_eff_cached(fiber, (float(omega),) * 4)
    return fiber.n2_kerr * float(omega) / (C * a)


def gamma_sfwm(fiber, omega_p1, omega_p2, omega_s, omega_i):
    """Four-wave-mixing nonlinear coefficient [1/(W m)] (pairwise carriers)."""
    a = _a_eff_cached(fiber, (float(omega_p1), float(omega_p2),
                              float(omega_s), float(omega_i)))
    return fiber.n2_kerr * math.sqrt(float(omega_p1) * float(omega_p2)) / (C * a)


def nonlinear_parameters(fiber, omega_p1, omega_p2, omega_s, omega_i):
    """Bundle of gamma coefficients and the four-field effective area."""
    a = _a_eff_cached(fiber, (float(omega_p1), float(omega_p2),
                              float(omega_s), float(omega_i)))
    return NonlinearParameters(
        gamma_sfwm=fiber.n2_kerr * math.sqrt(omega_p1 * omega_p2) / (C * a),
        gamma_pump_1=gamma_pump(fiber, omega_p1),
        gamma_pump_2=gamma_pump(fiber, omega_p2),
        a_eff=a)
