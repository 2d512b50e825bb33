import math

import numpy as np
import pytest
from hypothesis import given, settings

from conftest import ATOL, phis, thetas
from extweak.optics import (
    HwpSetting,
    InterferometerConfig,
    Interpretation,
    PolarizationPrep,
    PostSelectionError,
    beam_splitter,
    disentangler,
    hwp_generator_sigma_x,
    hwp_unitary_sigma_x,
    hwp_unitary_sigma_y,
    postselect_probability_formula,
    prepare_entangled,
    run_pipeline,
    run_pipeline_postselect_first,
    sigma_x_coupling,
    sigma_y_coupling,
    sigma_z_identity,
    which_path_expectation,
)
from extweak.qstate import H, V, BasisMismatchError, PathBasis, PolState, apply, is_unitary, tensor

X, Y = Interpretation.SIGMA_X, Interpretation.SIGMA_Y
R = math.sqrt(0.5)


def expm_hermitian(gen, t):
    """exp(-i t G) for Hermitian G via eigendecomposition."""
    vals, vecs = np.linalg.eigh(gen)
    return vecs @ np.diag(np.exp(-1j * t * vals)) @ vecs.conj().T


def test_prepare_entangled():
    np.testing.assert_allclose(prepare_entangled(PolarizationPrep(45)).amps, [0, R, R, 0], atol=ATOL)
    np.testing.assert_array_equal(prepare_entangled(PolarizationPrep(0)).amps, [0, 1, 0, 0])
    s = prepare_entangled(PolarizationPrep(67.5))
    # sin/cos of 3pi/8 from half-angle identities
    c_v, c_h = math.sqrt(2 + math.sqrt(2)) / 2, math.sqrt(2 - math.sqrt(2)) / 2
    np.testing.assert_allclose(s.amps, [0, c_h, c_v, 0], atol=ATOL)
    assert c_v == pytest.approx(0.92388, abs=5e-6) and c_h == pytest.approx(0.38268, abs=5e-6)


def test_prep_range():
    with pytest.raises(ValueError):
        PolarizationPrep(91)
    with pytest.raises(ValueError):
        HwpSetting(10.0, X, phase=1.0)


def test_hwp_sigma_x_special_angles():
    np.testing.assert_allclose(hwp_unitary_sigma_x(0).m, -1j * sigma_z_identity().m, atol=ATOL)
    np.testing.assert_allclose(hwp_unitary_sigma_x(45).m, -1j * sigma_x_coupling().m, atol=ATOL)


def test_hwp_sigma_x_matches_matrix_exponential():
    gen = math.sin(math.pi / 4) * sigma_x_coupling().m + math.cos(math.pi / 4) * sigma_z_identity().m
    np.testing.assert_allclose(hwp_unitary_sigma_x(22.5).m, expm_hermitian(gen, math.pi / 2), atol=ATOL)


@pytest.mark.parametrize("theta", [0.0, 3.0, 11.25, 22.5, 37.0])
def test_hwp_sigma_x_squares_to_minus_identity(theta):
    g = hwp_generator_sigma_x(theta)
    np.testing.assert_allclose(g @ g, np.eye(4), atol=ATOL)
    u = hwp_unitary_sigma_x(theta).m
    np.testing.assert_allclose(u @ u, -np.eye(4), atol=ATOL)


def test_hwp_sigma_y_special_angles():
    np.testing.assert_allclose(hwp_unitary_sigma_y(0).m, np.eye(4), atol=ATOL)
    np.testing.assert_allclose(hwp_unitary_sigma_y(45).m, -1j * sigma_y_coupling().m, atol=ATOL)


@pytest.mark.parametrize("theta", [1.0, 5.0, 11.25, 30.0])
def test_hwp_sigma_y_is_exponential(theta):
    t = 2 * math.radians(theta)
    np.testing.assert_allclose(hwp_unitary_sigma_y(theta).m,
                               expm_hermitian(sigma_y_coupling().m, t), atol=ATOL)


def test_hwp_sigma_y_rotates_a2_polarization():
    theta, c_h, c_v = 5.0, 0.8, 0.6
    t = 2 * math.radians(theta)
    rot = np.array([[math.cos(t), -math.sin(t)], [math.sin(t), math.cos(t)]])
    s = tensor(PolState(c_h, c_v), [0, 1], PathBasis.A_BASIS)
    out = apply(hwp_unitary_sigma_y(theta), s).matrix[:, 1]
    np.testing.assert_allclose(out, rot @ [c_h, c_v], atol=ATOL)


def test_unitarity_of_elements():
    for op in (hwp_unitary_sigma_x(7.3), hwp_unitary_sigma_y(7.3), beam_splitter(), disentangler()):
        assert is_unitary(op.m)


def test_disentangler_action():
    b = PathBasis.B_BASIS
    d = disentangler()
    np.testing.assert_array_equal(apply(d, tensor(H, [0, 1], b)).amps, tensor(H, [0, 1], b).amps)
    np.testing.assert_array_equal(apply(d, tensor(V, [0, 1], b)).amps, -tensor(V, [0, 1], b).amps)
    with pytest.raises(BasisMismatchError):
        apply(d, tensor(H, [0, 1], PathBasis.A_BASIS))


@settings(max_examples=200, deadline=None)
@given(phis, thetas)
def test_disentangler_neutrality(phi, theta):
    for interp in (X, Y):
        a = run_pipeline(InterferometerConfig.from_angles(phi, theta, interp))
        b = run_pipeline(InterferometerConfig.from_angles(phi, theta, interp, include_disentangler=True))
        for f in ("p_postselect", "p_b1", "p_b2", "diff", "variance", "fluctuation"):
            assert abs(getattr(a, f) - getattr(b, f)) <= ATOL


def test_pipeline_no_interaction():
    for phi in (10.0, 45.0, 80.0):
        out = run_pipeline(InterferometerConfig.from_angles(phi, 0.0, Y))
        assert abs(out.diff) <= ATOL
        assert out.p_postselect == pytest.approx(PolarizationPrep(phi).c_h ** 2, abs=ATOL)


def test_pipeline_sigma_x_eigenstate_point():
    out = run_pipeline(InterferometerConfig.from_angles(45.0, 22.5, X))
    assert out.diff == pytest.approx(-1.0, abs=ATOL)
    assert out.variance <= ATOL
    assert out.p_postselect == pytest.approx(0.5, abs=ATOL)


def test_pipeline_optimal_point():
    out = run_pipeline(InterferometerConfig.from_angles(67.5, 11.25, Y))
    assert abs(abs(out.diff) - 1.0) <= ATOL
    assert out.variance <= ATOL


def test_pipeline_postselection_impossible():
    with pytest.raises(PostSelectionError):
        run_pipeline(InterferometerConfig.from_angles(90.0, 0.0, X))


def test_which_path_expectation_examples(rng):
    assert which_path_expectation([0.3j, 0], 0.09) == pytest.approx((1, 0, 1))
    assert which_path_expectation([R * 0.5, R * 0.5], 0.25) == pytest.approx((0.5, 0.5, 0))
    with pytest.raises(PostSelectionError):
        which_path_expectation([0, 0], 0.0)
    for _ in range(1000):
        v = (rng.normal(size=2) + 1j * rng.normal(size=2)) * rng.uniform(0.01, 0.7)
        p1, p2, d = which_path_expectation(v, float(np.sum(np.abs(v) ** 2)))
        assert -1 - ATOL <= d <= 1 + ATOL
        assert abs(p1 + p2 - 1) <= ATOL


@settings(max_examples=200, deadline=None)
@given(phis, thetas)
def test_order_independence(phi, theta):
    for interp in (X, Y):
        cfg = InterferometerConfig.from_angles(phi, theta, interp)
        a, b = run_pipeline(cfg), run_pipeline_postselect_first(cfg)
        assert abs(a.p_b1 - b.p_b1) <= ATOL and abs(a.p_b2 - b.p_b2) <= ATOL


@settings(max_examples=200, deadline=None)
@given(phis, thetas)
def test_interpretations_mirror_each_other(phi, theta):
    dx = run_pipeline(InterferometerConfig.from_angles(phi, theta, X)).diff
    dy = run_pipeline(InterferometerConfig.from_angles(phi, theta, Y)).diff
    assert abs(dx + dy) <= ATOL


@settings(max_examples=200, deadline=None)
@given(phis, thetas)
def test_postselect_probability_expansion(phi, theta):
    for interp in (X, Y):
        out = run_pipeline(InterferometerConfig.from_angles(phi, theta, interp))
        assert abs(out.p_postselect - postselect_probability_formula(phi, theta)) <= ATOL


@settings(max_examples=100, deadline=None)
@given(phis, thetas)
def test_outcome_invariants(phi, theta):
    out = run_pipeline(InterferometerConfig.from_angles(phi, theta, X, visibility=0.7))
    assert abs(out.p_b1 + out.p_b2 - 1) <= ATOL
    assert abs(out.variance - (1 - out.diff**2)) <= ATOL
    assert abs(out.fluctuation - math.sqrt(out.variance)) <= ATOL
    ideal = run_pipeline(InterferometerConfig.from_angles(phi, theta, X))
    assert abs(out.diff - 0.7 * ideal.diff) <= ATOL


def test_visibility_range():
    with pytest.raises(ValueError):
        InterferometerConfig.from_angles(45, 1, X, visibility=1.2)
