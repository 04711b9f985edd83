import math
from dataclasses import replace

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import taylor_fiber
from sfwmsim.constants import C, omega_from_um, um_from_omega
from sfwmsim.errors import NoPhasematchError, RegimeError
from sfwmsim.numerics import integrate_1d
from sfwmsim.sfwm import (PumpSpec, SourceConfig, canonical, h_function, jsa,
                          jsa_grid, jsa_window, nonlinear_phase, peak_power,
                          phase_mismatch, phasematch_roots, pump_envelope,
                          solve_phasematch_center)

PEAK_POWER_REF = 4.488100654516117        # 300 uW, 3 THz, 80 MHz


class TestPeakPower:
    def test_reference_values(self):
        assert peak_power(PumpSpec.from_units(0.708, 3.0, 0.3, 80.0)) == \
            pytest.approx(PEAK_POWER_REF, rel=1e-12)
        assert peak_power(PumpSpec.from_units(0.708, 3.0, 0.3, 80.0)) == \
            pytest.approx(4.49, rel=0.01)

    def test_zero_power(self):
        assert peak_power(PumpSpec.from_units(0.708, 3.0, 0.0, 80.0)) == 0.0

    def test_narrowband_value(self):
        pump = PumpSpec(omega0=omega_from_um(0.708), sigma=1e11,
                        avg_power=300e-6, rep_rate=80e6)
        assert peak_power(pump) == pytest.approx(0.14960335515053724, rel=1e-12)

    def test_cw_rejected(self):
        with pytest.raises(RegimeError):
            peak_power(PumpSpec.from_units(0.708, 0.0, 0.3))

    @given(st.floats(0.05, 5.0), st.floats(0.2, 6.0))
    @settings(max_examples=20, deadline=None)
    def test_linear_in_power_and_bandwidth(self, p_mw, sig_thz):
        base = PumpSpec.from_units(0.708, sig_thz, p_mw, 80.0)
        double_p = replace(base, avg_power=2 * base.avg_power)
        double_s = replace(base, sigma=2 * base.sigma)
        assert peak_power(double_p) == pytest.approx(2 * peak_power(base),
                                                     rel=1e-12)
        assert peak_power(double_s) == pytest.approx(2 * peak_power(base),
                                                     rel=1e-12)


class TestPumpEnvelope:
    def test_normalization(self):
        pump = PumpSpec.from_units(0.708, 3.0, 0.3, 80.0)
        res = integrate_1d(lambda om: pump_envelope(pump, om) ** 2,
                           pump.omega0 - 8 * pump.sigma,
                           pump.omega0 + 8 * pump.sigma, vectorized=True)
        assert res.value == pytest.approx(1.0, abs=1e-9)

    def test_peak_value(self):
        pump = PumpSpec.from_units(0.708, 3.0, 0.3, 80.0)
        want = 2 ** 0.25 / (math.pi ** 0.25 * math.sqrt(pump.sigma))
        assert pump_envelope(pump, pump.omega0) == pytest.approx(want, rel=1e-14)

    def test_wavelength_fwhm_anchor(self):
        # 3 THz at 708 nm corresponds to a 0.94 nm intensity FWHM
        pump = PumpSpec.from_units(0.708, 3.0, 0.3, 80.0)
        fwhm_omega = pump.sigma * math.sqrt(2 * math.log(2))
        dlam_nm = (0.708e-6) ** 2 * fwhm_omega / (2 * math.pi * C) * 1e9
        assert dlam_nm == pytest.approx(0.94, rel=0.03)

    def test_cw_rejected(self):
        with pytest.raises(RegimeError):
            pump_envelope(PumpSpec.from_units(0.708, 0.0, 0.3), 2e15)


class TestPhaseMismatch:
    def test_pump_exchange_symmetry(self, cfg_ndp):
        om_s, om_i = omega_from_um(0.5826), omega_from_um(0.8600)
        om = cfg_ndp.pump1.omega0 + 2e12
        mirrored = om_s + om_i - om
        a = phase_mismatch(om, om_s, om_i, cfg_ndp)
        b = phase_mismatch(mirrored, om_s, om_i, cfg_ndp)
        assert a == pytest.approx(b, abs=1e-6 * max(1.0, abs(a)))

    def test_signal_idler_exchange(self, cfg_dp):
        om_s, om_i = omega_from_um(0.60), omega_from_um(0.88)
        om = cfg_dp.pump1.omega0
        assert phase_mismatch(om, om_s, om_i, cfg_dp) == pytest.approx(
            phase_mismatch(om, om_i, om_s, cfg_dp), rel=1e-9)

    def test_zero_at_solved_center(self, cfg_dp):
        center = solve_phasematch_center(cfg_dp)
        dk = phase_mismatch(cfg_dp.pump1.omega0, center.omega_s,
                            center.omega_i, cfg_dp)
        assert abs(dk) < 1e-6

    def test_nonlinear_term_additive(self, cfg_dp):
        bumped = replace(
            cfg_dp,
            pump1=replace(cfg_dp.pump1, avg_power=2 * cfg_dp.pump1.avg_power),
            pump2=replace(cfg_dp.pump2, avg_power=2 * cfg_dp.pump2.avg_power))
        om_s, om_i = omega_from_um(0.60), omega_from_um(0.88)
        om = cfg_dp.pump1.omega0
        shift = (phase_mismatch(om, om_s, om_i, cfg_dp)
                 - phase_mismatch(om, om_s, om_i, bumped))
        want = nonlinear_phase(bumped) - nonlinear_phase(cfg_dp)
        assert shift == pytest.approx(want, rel=1e-9)


class TestPhasematchCenter:
    def test_degenerate_anchor(self, cfg_dp):
        center = solve_phasematch_center(cfg_dp)
        lam_s, lam_i = center.wavelengths_um
        assert lam_s == pytest.approx(0.5759, rel=0.01)
        assert lam_i == pytest.approx(0.9185, rel=0.01)
        assert center.omega_s + center.omega_i == cfg_dp.omega_total
        assert abs(center.residual) < 1e-6

    def test_nondegenerate_anchor(self, cfg_ndp):
        center = solve_phasematch_center(cfg_ndp)
        lam_s, lam_i = center.wavelengths_um
        assert lam_s == pytest.approx(0.5826, rel=0.01)
        assert lam_i == pytest.approx(0.8600, rel=0.01)

    def test_signal_below_side(self, cfg_dp):
        above = solve_phasematch_center(cfg_dp, side="signal-above")
        below = solve_phasematch_center(cfg_dp, side="signal-below")
        assert below.omega_s == above.omega_i
        assert below.omega_i == above.omega_s

    def test_no_phasematch_signal(self):
        # normal dispersion everywhere: mismatch strictly negative
        fiber = taylor_fiber(omega_from_um(0.708), (1.2e7, 4.9e-9, 3e-26))
        pump = PumpSpec.from_units(0.708, 3.0, 0.3, 80.0)
        cfg = SourceConfig(fiber=fiber, pump1=pump, pump2=pump)
        with pytest.raises(NoPhasematchError) as err:
            solve_phasematch_center(cfg)
        assert err.value.scanned_range is not None

    def test_inner_branch_missing_raises(self, cfg_dp):
        with pytest.raises(NoPhasematchError):
            solve_phasematch_center(cfg_dp, branch="inner")

    def test_loop_fiber_has_both_branches(self, cfg_loop):
        roots = phasematch_roots(cfg_loop)
        assert len(roots) >= 2
        outer = solve_phasematch_center(cfg_loop, branch="outer")
        inner = solve_phasematch_center(cfg_loop, branch="inner")
        half = 0.5 * cfg_loop.omega_total
        assert abs(outer.omega_s - half) > abs(inner.omega_s - half)


class TestHFunction:
    def test_symmetry(self, fiber_a):
        a, b = omega_from_um(0.60), omega_from_um(0.88)
        assert h_function(a, b, fiber_a) == pytest.approx(
            h_function(b, a, fiber_a), rel=1e-12)

    def test_positive(self, fiber_a):
        oms = np.linspace(omega_from_um(1.2), omega_from_um(0.5), 8)
        assert np.all(h_function(oms, oms[::-1], fiber_a) > 0)

    def test_taylor_reduction(self):
        # constant beta1 and n: h is proportional to omega_s * omega_i
        fiber = taylor_fiber(2.5e15, (1.2e7, 4.8e-9))
        a, b = 2.4e15, 2.7e15
        ratio = h_function(a, b, fiber) / h_function(2 * a, 0.5 * b, fiber)
        # note n = beta c / omega varies; compare against the full formula
        from sfwmsim.dispersion import beta1 as b1, effective_index as neff
        want = (a * b * b1(a, fiber) * b1(b, fiber)
                / (neff(a, fiber) ** 2 * neff(b, fiber) ** 2))
        assert h_function(a, b, fiber) == pytest.approx(want, rel=1e-12)


class TestJsa:
    def test_degenerate_exchange_symmetry(self, cfg_dp):
        center = solve_phasematch_center(cfg_dp)
        om_s = center.omega_s + 1.5e12
        om_i = center.omega_i - 0.7e12
        a = jsa(om_s, om_i, cfg_dp)
        b = jsa(om_i, om_s, cfg_dp)
        assert abs(a - b) / abs(a) < 1e-6

    def test_short_fiber_gaussian_limit(self, cfg_dp):
        cfg = replace(cfg_dp, fiber=replace(cfg_dp.fiber, length=1e-6))
        p = cfg.pump1
        sigma_c2 = 2 * p.sigma ** 2
        center = solve_phasematch_center(cfg)
        for delta in (0.0, 1e12, 3e12):
            om_s = center.omega_s + delta
            want = (math.sqrt(math.pi * p.sigma ** 2 / 2)
                    * math.sqrt(2) * p.sigma / math.sqrt(sigma_c2)
                    * math.exp(-delta ** 2 / sigma_c2))
            got = abs(jsa(om_s, center.omega_i, cfg))
            assert got == pytest.approx(want, rel=1e-5)

    def test_center_dominates_antidiagonal_detuning(self, cfg_dp):
        center = solve_phasematch_center(cfg_dp)
        L = cfg_dp.fiber.length
        d = (10.0 / L) / math.sqrt(2)
        at_center = abs(jsa(center.omega_s, center.omega_i, cfg_dp))
        detuned = abs(jsa(center.omega_s + d, center.omega_i - d, cfg_dp))
        assert at_center >= detuned

    def test_cw_rejected(self, cfg_cw_dp):
        with pytest.raises(RegimeError):
            jsa(2.2e15, 2.0e15, cfg_cw_dp)

    def test_translation_invariance_pure_group_velocity(self):
        # beta2 = 0: shifting the pumps and the frequency sum together
        # leaves |f| unchanged.  Negligible power keeps the (weakly
        # frequency-dependent) nonlinear phase term from masking the
        # group-velocity form invariance under test.
        om0 = omega_from_um(0.708)
        fiber = taylor_fiber(om0, (1.2e7, 4.87e-9))
        pump = PumpSpec.from_units(0.708, 3.0, 1e-9, 80.0)
        cfg = SourceConfig(fiber=fiber, pump1=pump, pump2=pump)
        delta = 0.1 * pump.sigma
        shifted_pump = replace(pump, omega0=pump.omega0 + delta)
        cfg_shift = SourceConfig(fiber=fiber, pump1=shifted_pump,
                                 pump2=shifted_pump)
        om_s, om_i = om0 + 4e13, om0 - 3.7e13
        a = abs(jsa(om_s, om_i, cfg))
        b = abs(jsa(om_s + delta, om_i + delta, cfg_shift))
        assert a == pytest.approx(b, rel=1e-6)

    def test_mass_concentrates_as_sigma_shrinks(self, fiber_a):
        # |f|^2 mass moves onto the energy-conservation line as sigma -> 0
        fractions = []
        for sig_thz in (0.4, 0.2, 0.1):
            pump = PumpSpec.from_units(0.708, sig_thz, 0.3, 80.0)
            cfg = SourceConfig(fiber=fiber_a, pump1=pump, pump2=pump)
            center = solve_phasematch_center(cfg)
            off = 3e12
            s_ax = np.linspace(center.omega_s - off, center.omega_s + off, 41)
            i_ax = np.linspace(center.omega_i - off, center.omega_i + off, 41)
            grid = jsa_grid(cfg, window=(s_ax[0], s_ax[-1], i_ax[0], i_ax[-1]),
                            n_s=41, n_i=41)
            s_axis, i_axis, amp = grid.as_arrays()
            intens = np.abs(amp) ** 2
            total_sum = s_axis[:, None] + i_axis[None, :]
            on_line = np.abs(total_sum - cfg.omega_total) < 1.0e12
            frac_off = intens[~on_line].sum() / intens.sum()
            fractions.append(frac_off)
        assert fractions[0] > fractions[1] > fractions[2]


class TestJsaGrid:
    def test_values_finite_and_symmetric(self, cfg_dp):
        grid = jsa_grid(cfg_dp, n_s=24, n_i=24)
        s_axis, i_axis, amp = grid.as_arrays()
        assert np.all(np.isfinite(amp.real)) and np.all(np.isfinite(amp.imag))
        assert np.all(np.diff(s_axis) > 0)
        assert np.all(np.diff(i_axis) > 0)

    def test_max_near_center(self, cfg_dp):
        center = solve_phasematch_center(cfg_dp)
        half = 2.0e13
        grid = jsa_grid(cfg_dp, window=(center.omega_s - half,
                                        center.omega_s + half,
                                        center.omega_i - half,
                                        center.omega_i + half),
                        n_s=33, n_i=33)
        s_axis, i_axis, amp = grid.as_arrays()
        i_s, i_i = np.unravel_index(np.argmax(np.abs(amp)), amp.shape)
        cell_s = s_axis[1] - s_axis[0]
        cell_i = i_axis[1] - i_axis[0]
        assert abs(s_axis[i_s] - center.omega_s) <= 1.5 * cell_s
        assert abs(i_axis[i_i] - center.omega_i) <= 1.5 * cell_i

    def test_degenerate_transpose_symmetry(self, cfg_dp):
        center = solve_phasematch_center(cfg_dp)
        half = 1.0e13
        window = (center.omega_s - half, center.omega_s + half,
                  center.omega_i - half, center.omega_i + half)
        grid = jsa_grid(cfg_dp, window=window, n_s=17, n_i=17)
        mirror = jsa_grid(cfg_dp, window=(window[2], window[3],
                                          window[0], window[1]),
                          n_s=17, n_i=17)
        a = np.abs(grid.as_arrays()[2])
        b = np.abs(mirror.as_arrays()[2]).T
        assert np.max(np.abs(a - b)) / np.max(a) < 1e-6


class TestConfigValidation:
    def test_mixed_regime_rejected(self, fiber_a):
        with pytest.raises(Exception):
            SourceConfig(fiber=fiber_a,
                         pump1=PumpSpec.from_units(0.708, 3.0, 0.3, 80.0),
                         pump2=PumpSpec.from_units(0.708, 0.0, 0.3))

    def test_degenerate_flag(self, cfg_dp, cfg_ndp):
        assert cfg_dp.degenerate
        assert not cfg_ndp.degenerate

    def test_canonical_ordering(self, cfg_ndp):
        swapped = replace(cfg_ndp, pump1=cfg_ndp.pump2, pump2=cfg_ndp.pump1)
        assert canonical(swapped) == canonical(cfg_ndp)
