import math
from dataclasses import replace

import numpy as np
import pytest

from conftest import taylor_fiber
from sfwmsim.constants import omega_from_um
from sfwmsim.errors import RegimeError
from sfwmsim.phasematch import (ContourPoint, contour, orientation_angle)
from sfwmsim.sfwm import (PumpSpec, SourceConfig, nonlinear_phase,
                          phase_mismatch, solve_phasematch_center)


class TestOrientationAngle:
    def test_degenerate_config_anchor(self, cfg_dp):
        center = solve_phasematch_center(cfg_dp)
        theta = orientation_angle(center.omega_s, center.omega_i, cfg_dp)
        assert theta == pytest.approx(-40.0, abs=3.0)

    def test_nondegenerate_config_anchor(self, cfg_ndp):
        center = solve_phasematch_center(cfg_ndp)
        theta = orientation_angle(center.omega_s, center.omega_i, cfg_ndp)
        assert theta == pytest.approx(-41.0, abs=3.0)

    def test_matched_group_velocities_give_minus_45(self):
        # pure beta1 dispersion: the mismatch gradient components are equal
        om0 = omega_from_um(0.708)
        fiber = taylor_fiber(om0, (1.2e7, 4.87e-9))
        pump = PumpSpec.from_units(0.708, 3.0, 1e-9, 80.0)
        cfg = SourceConfig(fiber=fiber, pump1=pump, pump2=pump)
        theta = orientation_angle(om0 + 3e13, om0 - 3e13, cfg)
        assert theta == pytest.approx(-45.0, abs=1e-6)

    def test_invariant_under_mismatch_rescaling(self):
        om0 = omega_from_um(0.708)
        pump = PumpSpec.from_units(0.708, 3.0, 1e-9, 80.0)
        coeffs = (1.2e7, 4.87e-9, -2.2e-27, 1e-42, 2.4e-55)
        base = SourceConfig(fiber=taylor_fiber(om0, coeffs),
                            pump1=pump, pump2=pump)
        scaled = SourceConfig(
            fiber=taylor_fiber(om0, tuple(3.0 * c for c in coeffs)),
            pump1=pump, pump2=pump)
        om_s, om_i = om0 + 4e13, om0 - 4.2e13
        a = orientation_angle(om_s, om_i, base)
        b = orientation_angle(om_s, om_i, scaled)
        assert a == pytest.approx(b, abs=1e-6)


class TestContour:
    @pytest.fixture(scope="class")
    def points(self, cfg_loop):
        return contour(cfg_loop, (0.64, 0.87), 32)

    def test_band_edges(self, cfg_loop, points):
        lams = [p.pump_wavelength_um for p in points]
        # phasematching exists over roughly a 200 nm pump band
        assert min(lams) == pytest.approx(0.666, abs=0.015)
        assert max(lams) == pytest.approx(0.843, abs=0.015)

    def test_detuning_mirror_symmetry(self, points):
        for p in points:
            assert p.detuning_signal + p.detuning_idler == \
                pytest.approx(0.0, abs=1e-6 * abs(p.detuning_signal))

    def test_both_signs_present(self, points):
        ups = [p for p in points if p.detuning_signal > 0]
        downs = [p for p in points if p.detuning_signal < 0]
        assert len(ups) == len(downs)

    def test_outer_exceeds_inner(self, points):
        by_pump = {}
        for p in points:
            by_pump.setdefault(p.pump_frequency, []).append(p)
        checked = 0
        for group in by_pump.values():
            outer = [abs(p.detuning_signal) for p in group
                     if p.branch == "outer"]
            inner = [abs(p.detuning_signal) for p in group
                     if p.branch == "inner"]
            if outer and inner:
                assert min(outer) > max(inner)
                checked += 1
        assert checked > 0

    def test_points_rephasematch(self, cfg_loop, points):
        from sfwmsim.phasematch import _repumped
        for p in points[::7]:
            cfg = _repumped(cfg_loop, p.pump_frequency)
            om_s = p.pump_frequency + p.detuning_signal
            om_i = p.pump_frequency + p.detuning_idler
            dk = phase_mismatch(p.pump_frequency, om_s, om_i, cfg)
            assert abs(dk) < 1e-5

    def test_theta_span(self, points):
        thetas = [p.theta_si for p in points]
        assert min(thetas) < -85.0
        assert max(thetas) > 85.0

    def test_empty_outside_band(self, cfg_loop):
        assert contour(cfg_loop, (0.60, 0.63), 4) == []

    def test_requires_degenerate(self, cfg_ndp):
        with pytest.raises(RegimeError):
            contour(cfg_ndp, (0.6, 0.9), 4)

    def test_sorted_by_pump_frequency(self, points):
        freqs = [p.pump_frequency for p in points]
        assert freqs == sorted(freqs)
