import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from conftest import ATOL, phis
from extweak.optics import (
    InterferometerConfig,
    Interpretation,
    PolarizationPrep,
    prepare_entangled,
    run_pipeline,
    sigma_x_coupling,
    sigma_y_coupling,
    sigma_z_identity,
)
from extweak.qstate import SIGMA_X, SIGMA_Y, SIGMA_Z, H, V, PolState, kron_op, PathBasis
from extweak.weakvalues import (
    Port,
    UndefinedWeakValueError,
    conventional_weak_value,
    coupling_weak_value,
    extended_weak_value,
    final_state,
    normalization_factor,
    sigma_x_extended_weak_values,
    sigma_y_extended_weak_values,
)

X, Y = Interpretation.SIGMA_X, Interpretation.SIGMA_Y
R = math.sqrt(0.5)


def test_conventional_eigenstate():
    assert conventional_weak_value(H, H, SIGMA_Z) == pytest.approx(1.0)


def test_conventional_sigma_x_ratio():
    assert conventional_weak_value(PolState(0.8, 0.6), H, SIGMA_X) == pytest.approx(0.75, abs=ATOL)


def test_conventional_sigma_y_imaginary():
    # <V|σy|+> = i/√2, <V|+> = 1/√2
    assert conventional_weak_value(PolState(R, R), V, SIGMA_Y) == pytest.approx(1j, abs=ATOL)


def test_conventional_orthogonal():
    with pytest.raises(UndefinedWeakValueError):
        conventional_weak_value(H, V, SIGMA_X)


@pytest.mark.parametrize("phi", [10.0, 30.0, 45.0, 67.5, 85.0])
def test_extended_sigma_x_values(phi):
    prep = PolarizationPrep(phi)
    r = prep.c_v / prep.c_h
    w1 = coupling_weak_value(phi, X, Port.F1)
    w2 = coupling_weak_value(phi, X, Port.F2)
    assert abs(w1.value + r) <= ATOL and abs(w2.value - r) <= ATOL
    comp = prepare_entangled(prep)
    sz = extended_weak_value(comp, final_state(Port.F1), sigma_z_identity())
    assert abs(sz.value - 1) <= ATOL


def test_extended_weak_value_in_b_basis_agrees():
    comp = prepare_entangled(PolarizationPrep(40.0))
    from extweak.qstate import change_operator_basis, change_path_basis

    a = extended_weak_value(comp, final_state(Port.F1), sigma_x_coupling())
    b = extended_weak_value(change_path_basis(comp), final_state(Port.F1, PathBasis.B_BASIS),
                            change_operator_basis(sigma_x_coupling()))
    assert abs(a.value - b.value) <= ATOL


def test_extended_vanishing_overlap():
    comp = prepare_entangled(PolarizationPrep(90.0))
    with pytest.raises(UndefinedWeakValueError):
        extended_weak_value(comp, final_state(Port.F1), sigma_x_coupling())


def test_sigma_y_closed_forms():
    assert sigma_y_extended_weak_values(45.0) == pytest.approx((1j, -1j), abs=ATOL)
    w1, w2 = sigma_y_extended_weak_values(67.5)
    assert w1 == pytest.approx(2.41421j, abs=5e-6) and w2 == pytest.approx(-2.41421j, abs=5e-6)
    assert sigma_y_extended_weak_values(0.0) == (0j, -0j)
    with pytest.raises(UndefinedWeakValueError):
        sigma_y_extended_weak_values(90.0)


@settings(max_examples=200, deadline=None)
@given(phis)
def test_closed_forms_match_generic(phi):
    for interp, closed in ((X, sigma_x_extended_weak_values), (Y, sigma_y_extended_weak_values)):
        c1, c2 = closed(phi)
        assert abs(coupling_weak_value(phi, interp, Port.F1).value - c1) <= ATOL
        assert abs(coupling_weak_value(phi, interp, Port.F2).value - c2) <= ATOL


@settings(max_examples=200, deadline=None)
@given(phis)
def test_real_vs_imaginary_and_antisymmetry(phi):
    x1, x2 = (coupling_weak_value(phi, X, p).value for p in Port)
    y1, y2 = (coupling_weak_value(phi, Y, p).value for p in Port)
    assert abs(x1.imag) <= ATOL and abs(y1.real) <= ATOL
    assert abs(x1 + x2) <= ATOL and abs(y1 + y2) <= ATOL


@settings(max_examples=200, deadline=None)
@given(phis)
def test_overlap_magnitudes(phi):
    c_h = PolarizationPrep(phi).c_h
    for port in Port:
        assert abs(abs(coupling_weak_value(phi, X, port).overlap) - c_h * R) <= ATOL


@settings(max_examples=100, deadline=None)
@given(phis, st.complex_numbers(max_magnitude=3), st.complex_numbers(max_magnitude=3))
def test_linearity_in_operator(phi, a, b):
    comp, f = prepare_entangled(PolarizationPrep(phi)), final_state(Port.F1)
    ox, oy = sigma_x_coupling(), sigma_y_coupling()
    combo = ox.scale(a) + oy.scale(b)
    lhs = extended_weak_value(comp, f, combo).value
    rhs = a * extended_weak_value(comp, f, ox).value + b * extended_weak_value(comp, f, oy).value
    assert abs(lhs - rhs) <= ATOL * (1 + abs(rhs))


def test_normalization_factor_examples():
    assert normalization_factor(30.0, 0.0) == pytest.approx(PolarizationPrep(30).c_h ** 2, abs=ATOL)
    assert normalization_factor(45.0, 22.5) == pytest.approx(0.5, abs=ATOL)
    assert run_pipeline(InterferometerConfig.from_angles(45.0, 22.5)).p_postselect == pytest.approx(0.5, abs=ATOL)


def test_normalization_factor_grid():
    for phi in np.linspace(2, 88, 10):
        for theta in np.linspace(0, 22, 5):
            nx, ny = normalization_factor(phi, theta, X), normalization_factor(phi, theta, Y)
            assert abs(nx - ny) <= ATOL
            p = run_pipeline(InterferometerConfig.from_angles(phi, theta)).p_postselect
            assert abs(nx - p) <= ATOL
