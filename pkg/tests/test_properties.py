import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import h_atom, small_spec
from ecpci.library import heh_plus
from ecpci.pipeline import Point, Settings
from ecpci.properties import (
    FitError,
    PropertyResult,
    atom_polarizability,
    compute_properties,
    finite_field_energy,
    fit_field_response,
    hellmann_feynman_check,
    symmetric_schedule,
)


def test_symmetric_schedule():
    F = symmetric_schedule((8e-4, 2e-4, 4e-4, 4e-4))
    assert np.array_equal(F, [-8e-4, -4e-4, -2e-4, 0.0, 2e-4, 4e-4, 8e-4])


@settings(max_examples=60, deadline=None)
@given(st.floats(-3, 3), st.floats(-3, 3), st.floats(0, 60), st.floats(-500, 500), st.floats(-1e4, 1e4))
def test_fit_recovers_quartic(e0, mu, alpha, beta, g4):
    F = symmetric_schedule()
    E = e0 - mu * F - alpha * F**2 / 2 - beta * F**3 / 6 - g4 * F**4 / 24
    fit = fit_field_response(F, E)
    assert fit.mu == pytest.approx(mu, abs=1e-8)
    assert fit.alpha == pytest.approx(alpha, abs=1e-4)
    assert fit.residual < 1e-12


def test_fit_inner_refit_agrees_for_quadratic():
    F = symmetric_schedule((1e-3, 5e-4, 2.5e-4))
    E = -1.0 - 0.3 * F - 2.0 * F**2
    fit = fit_field_response(F, E)
    dmu, dal = fit.richardson
    assert dmu < 1e-9 and dal < 1e-5


@pytest.mark.parametrize(
    "F",
    [
        [-1e-3, 0.0, 1e-3],
        [-2e-3, -1e-3, 0.0, 1e-3, 3e-3],
        [0.0] * 5,
        [-1e-3, -1e-3, 0.0, 1e-3, 1e-3],
    ],
)
def test_fit_rejects_bad_schedules(F):
    with pytest.raises(FitError):
        fit_field_response(F, np.zeros(len(F)))


def test_fit_shape_mismatch():
    with pytest.raises(FitError):
        fit_field_response(symmetric_schedule(), np.zeros(3))


def test_combine():
    mean, gamma = PropertyResult.combine(6.0, 3.0)
    assert mean == 4.0 and gamma == 3.0


def test_hydrogen_polarizability():
    assert atom_polarizability(h_atom("H-s12pd")) == pytest.approx(4.5, rel=0.02)


def test_hellmann_feynman_heh():
    rep = hellmann_feynman_check(heh_plus(), 1.46, "1Sigma+", 0)
    assert rep.discrepancy < 1e-6


def test_hellmann_feynman_with_core_polarization(core_point):
    """The CPP field coupling and its dipole operator are consistent."""
    rep = hellmann_feynman_check(core_point, None, "1Sigma+", 0)
    assert rep.discrepancy < 1e-6
    assert core_point.ints.core_alpha > 0


def test_x_and_y_fields_identical(heh_point):
    ex = finite_field_energy(heh_point, None, [5e-4, 0, 0])
    ey = finite_field_energy(heh_point, None, [0, 5e-4, 0])
    assert ex == ey


def test_perpendicular_field_on_pi_state(heh_point):
    e0 = heh_point.energy("1Pi")
    e = finite_field_energy(heh_point, None, [2e-4, 0, 0], "1Pi")
    assert abs(e - e0) < 1e-4
    assert finite_field_energy(heh_point, None, [0, 2e-4, 0], "1Pi") == pytest.approx(e, abs=1e-10)


def test_field_sign_symmetry_h2():
    p = Point(small_spec("h2", 1.4))
    for axis in range(3):
        F = np.zeros(3)
        F[axis] = 5e-4
        assert abs(finite_field_energy(p, None, F) - finite_field_energy(p, None, -F)) < 1e-12
    res = compute_properties(p)
    assert abs(res.mu_z) < 1e-9


def test_dipole_origin_dependence_of_cation():
    """A charged system's dipole moves by -Q d when the origin moves by +d; alpha does not."""
    spec = small_spec("heh", 1.5)
    d = 0.4
    a = compute_properties(Point(spec, settings=Settings(origin=(0, 0, 0))), perpendicular=False)
    b = compute_properties(Point(spec, settings=Settings(origin=(0, 0, d))), perpendicular=False)
    assert b.mu_z - a.mu_z == pytest.approx(-1.0 * d, abs=1e-7)
    assert b.alpha_parallel == pytest.approx(a.alpha_parallel, abs=1e-5)


def test_property_result_fields(heh_point):
    res = compute_properties(heh_point)
    assert res.alpha_parallel > res.alpha_perp > 0
    assert res.alpha_mean == pytest.approx((res.alpha_parallel + 2 * res.alpha_perp) / 3)
    assert res.fit_residual < 1e-10 and not res.flagged
    assert res.field_schedule == (2e-4, 4e-4, 8e-4)
    assert set(res.fits) == {"z", "x"}
    flagged = compute_properties(heh_point, perpendicular=False, residual_threshold=0.0)
    assert flagged.flagged and np.isnan(flagged.alpha_perp)


def test_field_limit(heh_point):
    with pytest.raises(ValueError):
        finite_field_energy(heh_point, None, [0, 0, 0.02])
    with pytest.raises(ValueError):
        finite_field_energy(heh_point, None, [0, 0])
