"""Tests for Laguerre-class evidence and the quartic-well scan."""

import numpy as np
import pytest

from rotorzeros.laguerre import (
    FAIL,
    PASS,
    ClassEvidence,
    counterexample_measure,
    counterexample_scan,
    laguerre_evidence,
    violation_witnesses,
)
from rotorzeros.measures import RadialMeasure, laplace_transform, validate_measure
from rotorzeros.zeros import VIOLATED, find_roots

SPHERE = RadialMeasure.sphere(1.0)


class TestEvidence:
    def test_cubed_binomial_passes_to_depth_two(self):
        # (1 + z)^3: derivatives stay real-rooted at -1
        ev = laguerre_evidence([1, 3, 3, 1, 0, 0], window=3, depth=2)
        assert ev.overall == PASS

    def test_kernel_truncation_passes_depth_one(self):
        v = laplace_transform(SPHERE, 2, 44)
        ev = laguerre_evidence(v.coefficients, window=20, depth=1)
        assert ev.overall == PASS

    def test_kernel_depth_two_covers_two_dimension_lifts(self):
        # differentiating twice probes the D+2 and D+4 transforms
        v = laplace_transform(SPHERE, 2, 46)
        ev = laguerre_evidence(v.coefficients, window=20, depth=2)
        assert ev.overall == PASS
        assert len(ev.checks) == 6

    def test_derivative_roots_transfer_to_next_dimension(self):
        # d/dzeta of the D kernel is the D+2 kernel over 4: stable roots match
        v2 = laplace_transform(SPHERE, 2, 51)
        v4 = laplace_transform(SPHERE, 4, 50)
        dr = find_roots([c * n for n, c in enumerate(v2.coefficients)][1:], 50)
        ur = find_roots(v4.coefficients, 50)
        for a, b in zip(dr[:4], ur[:4]):
            assert abs(a - b) <= 1e-8 * (1 + abs(b))

    def test_complex_pair_fails_at_order_zero(self):
        ev = laguerre_evidence([1, 1, 2, 0, 0], window=2, depth=0)
        assert dict(ev.checks)["roots-negative-real[0]"] == FAIL
        assert ev.overall == FAIL

    def test_requires_enough_coefficients(self):
        with pytest.raises(ValueError):
            laguerre_evidence([1, 1], window=3, depth=1)

    @pytest.mark.parametrize("D", [2, 4, 6])
    def test_certified_family_evidence(self, D):
        # phi^4-type density: in the certified family for every dimension;
        # its first zero sits near -27, so the window must reach past it
        meas = RadialMeasure.density([1.0], [0.0, 1.0, 1.0], label="phi4")
        assert validate_measure(meas).certified_lee_yang
        v = laplace_transform(meas, D, 44)
        ev = laguerre_evidence(v.coefficients, window=20, depth=0)
        assert ev.overall == PASS


class TestCounterexample:
    def test_measure_is_valid_but_uncertified(self):
        report = validate_measure(counterexample_measure(2.0))
        assert report.passed and not report.certified_lee_yang

    def test_single_point_violation(self):
        scan = counterexample_scan(a_values=[2.0], ladder=(40, 60))
        assert scan[0]["overall"] == VIOLATED
        assert scan[0]["off_axis_roots"]

    def test_scan_reports_negative_and_clean_points(self):
        scan = counterexample_scan(a_values=[-3.0, 2.0], ladder=(40, 60))
        by_a = {row["a"]: row for row in scan}
        assert by_a[2.0]["overall"] == VIOLATED
        assert by_a[-3.0]["overall"] != VIOLATED
        assert violation_witnesses(scan) == [by_a[2.0]]

    def test_evidence_json_shape(self):
        ev = laguerre_evidence([1, 3, 3, 1, 0, 0], window=3, depth=1, subject="cube")
        data = ev.to_json()
        assert "cube" in data and "overall" in data
