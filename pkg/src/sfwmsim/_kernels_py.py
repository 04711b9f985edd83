"""Pure-NumPy compute kernels (fallback backend).

The compiled extension ``sfwmsim._kernels`` implements the same two entry
points with identical iteration counts and update formulas, so both backends
agree to rounding error.  Keep any algorithmic change synchronized between
the two files.

``he11_solve`` finds the fundamental-mode effective index of a step-index
fiber from the exact vectorial characteristic equation (azimuthal order 1).
Writing X = J1'(u)/(u J1(u)), Y = K1'(w)/(w K1(w)) and q = (ncl/nco)^2:

    G(b) = (X + Y)(X + qY) - (1/u^2 + 1/w^2)(1/u^2 + q/w^2) = 0

with u = V sqrt(1-b), w = V sqrt(b).  The fundamental root is the unique
zero with u below the first zero of J1, where G runs from +inf (at the low-b
edge) to -inf (at b -> 1); 10 bisection steps localize it and 6 safeguarded
Newton steps (analytic dG/db, no extra Bessel evaluations) polish to machine
precision.
"""
import numpy as np
from scipy.special import j0, j1, k0, k1

C = 299792458.0
J1_FIRST_ZERO = 3.8317059702075125

_BISECT_STEPS = 10
_NEWTON_STEPS = 6


def sellmeier_n(lam_um):
    """Fused-silica refractive index (three-term Sellmeier fit)."""
    lam_um = np.asarray(lam_um, dtype=float)
    l2 = lam_um * lam_um
    s = (0.6961663 * l2 / (l2 - 0.0684043 ** 2)
         + 0.4079426 * l2 / (l2 - 0.1162414 ** 2)
         + 0.8974794 * l2 / (l2 - 9.896161 ** 2))
    return np.sqrt(1.0 + s)


def _g_and_gprime(b, V, q):
    """Characteristic function G(b) and its analytic derivative."""
    u = V * np.sqrt(1.0 - b)
    w = V * np.sqrt(b)
    ju0 = j0(u)
    ju1 = j1(u)
    kw0 = k0(w)
    kw1 = k1(w)
    X = (ju0 - ju1 / u) / (u * ju1)
    Y = -(kw0 + kw1 / w) / (w * kw1)
    t1 = 1.0 / (u * u)
    t2 = 1.0 / (w * w)
    A = X + Y
    Bf = X + q * Y
    R = (t1 + t2) * (t1 + q * t2)
    G = A * Bf - R

    # dX/du and dY/dw via the Bessel ODEs; du/db = -V^2/(2u), dw/db = V^2/(2w)
    Xp = -2.0 * X / u - u * X * X - 1.0 / u + 1.0 / (u ** 3)
    Yp = -2.0 * Y / w - w * Y * Y + 1.0 / w + 1.0 / (w ** 3)
    V2 = V * V
    dX_db = Xp * (-V2 / (2.0 * u))
    dY_db = Yp * (V2 / (2.0 * w))
    dA = dX_db + dY_db
    dB = dX_db + q * dY_db
    dt1 = V2 * t1 * t1
    dt2 = -V2 * t2 * t2
    dR = (dt1 + dt2) * (t1 + q * t2) + (t1 + t2) * (dt1 + q * dt2)
    Gp = dA * Bf + A * dB - dR
    return G, Gp


def he11_solve(omega, core_radius, fill):
    """Fundamental-mode solve for an array of angular frequencies.

    Returns (neff, u, w) arrays.  Caller guarantees the Sellmeier range.
    """
    omega = np.asarray(omega, dtype=float)
    lam_um = 2.0e6 * np.pi * C / omega
    nco = sellmeier_n(lam_um)
    ncl = fill + (1.0 - fill) * nco
    na2 = nco * nco - ncl * ncl
    V = omega / C * core_radius * np.sqrt(na2)
    q = (ncl / nco) ** 2

    u_hi = np.minimum(V, J1_FIRST_ZERO)
    b_lo = 1.0 - (u_hi / V) ** 2 + 1e-12
    b_hi = np.full_like(b_lo, 1.0 - 1e-12)

    for _ in range(_BISECT_STEPS):
        bm = 0.5 * (b_lo + b_hi)
        g, _gp = _g_and_gprime(bm, V, q)
        pos = g > 0.0
        b_lo = np.where(pos, bm, b_lo)
        b_hi = np.where(pos, b_hi, bm)

    b = 0.5 * (b_lo + b_hi)
    for _ in range(_NEWTON_STEPS):
        g, gp = _g_and_gprime(b, V, q)
        pos = g > 0.0
        b_lo = np.where(pos, b, b_lo)
        b_hi = np.where(pos, b_hi, b)
        step = b - g / gp
        inside = (step >= b_lo) & (step <= b_hi)
        b = np.where(inside, step, 0.5 * (b_lo + b_hi))

    u = V * np.sqrt(1.0 - b)
    w = V * np.sqrt(b)
    neff = np.sqrt(ncl * ncl + b * na2)
    return neff, u, w


def he11_solve_seeded(omega, core_radius, fill, seed_omega, seed_b):
    """Fundamental-mode solve seeded from a precomputed b(omega) table.

    The seed table (built once per fiber with the full ladder) provides a
    Newton starting point accurate to ~1e-4, so four clipped Newton steps
    reach machine precision; the clip window of +-0.02 around the seed is
    far narrower than the separation to the next mode branch.  Elements
    failing the residual check fall back to ``he11_solve``, so results are
    independent of the seeding and match the full ladder to rounding error.
    """
    omega = np.asarray(omega, dtype=float)
    lam_um = 2.0e6 * np.pi * C / omega
    nco = sellmeier_n(lam_um)
    ncl = fill + (1.0 - fill) * nco
    na2 = nco * nco - ncl * ncl
    V = omega / C * core_radius * np.sqrt(na2)
    q = (ncl / nco) ** 2

    seed = np.interp(omega, seed_omega, seed_b)
    clip_lo = np.maximum(seed - 0.02, 1e-12)
    clip_hi = np.minimum(seed + 0.02, 1.0 - 1e-12)
    b = np.clip(seed, clip_lo, clip_hi)
    for _ in range(4):
        g, gp = _g_and_gprime(b, V, q)
        b = np.clip(b - g / gp, clip_lo, clip_hi)

    g, gp = _g_and_gprime(b, V, q)
    bad = ~(np.abs(g) <= 1e-13 * np.maximum(np.abs(gp), 1.0))
    if np.any(bad):
        neff_b, _u, _w = he11_solve(omega[bad], core_radius, fill)
        b = np.array(b, copy=True)
        b[bad] = (neff_b ** 2 - ncl[bad] ** 2) / na2[bad]

    u = V * np.sqrt(1.0 - b)
    w = V * np.sqrt(b)
    neff = np.sqrt(ncl * ncl + b * na2)
    return neff, u, w
