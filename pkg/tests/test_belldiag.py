import math

import numpy as np
import pytest

from qent import states
from qent.belldiag import bell_r_infinity_curve, concurrence_closed_form, default_grid, r_infinity
from qent.entanglement import concurrence
from qent.entropy import renyi
from qent.errors import OutOfRange


def test_endpoints():
    assert bell_r_infinity_curve([1.0])[0].r_infinity == 0.0
    assert abs(r_infinity(1e-14) - math.log(2)) < 1e-6


def test_end_to_end_against_state_pipeline():
    rho = states.bell_diagonal([0.7, 0.1, 0.1, 0.1])
    c = concurrence(rho).concurrence
    point = bell_r_infinity_curve([c * c])[0]
    assert abs(point.r_infinity + math.log(0.7)) < 1e-12
    assert abs(renyi(rho, "inf") - point.r_infinity) < 1e-12
    assert abs(bell_r_infinity_curve([0.16])[0].r_infinity - 0.35667494393873245) < 1e-15


def test_curve_strictly_decreasing():
    r = np.array([p.r_infinity for p in bell_r_infinity_curve(default_grid())])
    assert np.all(np.diff(r) < 0)


def test_rejects_bad_grid():
    for bad in ([0.0], [1.2], [float("nan")]):
        with pytest.raises(OutOfRange):
            bell_r_infinity_curve(bad)


def test_closed_form_concurrence():
    np.testing.assert_allclose(concurrence_closed_form([[0.7, 0.1, 0.1, 0.1], [0.4, 0.3, 0.2, 0.1]]), [0.4, 0.0])
