"""Optical elements of the polarization/which-path interferometer.

The setup is: polarization preparation -> PBS (entangles polarization with
path a1/a2) -> in-arm HWPs (the weak interaction) -> 50:50 BS (a -> b) ->
optional HWP on arm b2 -> H polarizers -> photon detection on b1 and b2.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .qstate import (
    A_TO_B,
    ATOL,
    H,
    IDENTITY2,
    SIGMA_X,
    SIGMA_Y,
    SIGMA_Z,
    WHICH_PATH_A,
    CompositeOperator,
    CompositeState,
    PathBasis,
    PolState,
    apply,
    change_path_basis,
    kron_op,
    project_polarization,
    superpose,
    tensor,
)

POSTSELECT_THRESHOLD = 1e-15


class Interpretation(enum.Enum):
    SIGMA_X = "sigma-x"
    SIGMA_Y = "sigma-y"


class PostSelectionError(ArithmeticError):
    """The post-selected branch has (numerically) zero probability."""


@dataclass(frozen=True)
class PolarizationPrep:
    phi: float  # degrees

    def __post_init__(self):
        if not (0.0 <= self.phi <= 90.0):
            raise ValueError(f"phi must lie in [0, 90] degrees, got {self.phi}")

    @property
    def c_h(self) -> float:
        return 0.0 if self.phi == 90.0 else math.cos(math.radians(self.phi))

    @property
    def c_v(self) -> float:
        return math.sin(math.radians(self.phi))

    @property
    def state(self) -> PolState:
        return PolState(self.c_h, self.c_v)


@dataclass(frozen=True)
class HwpSetting:
    theta: float  # fast-axis angle, degrees
    interpretation: Interpretation = Interpretation.SIGMA_X
    phase: float = math.pi

    def __post_init__(self):
        if not math.isfinite(self.theta):
            raise ValueError("theta must be finite")
        if self.phase != math.pi:
            raise ValueError("a half-wave plate has retardance pi")


@dataclass(frozen=True)
class InterferometerConfig:
    prep: PolarizationPrep
    hwp: HwpSetting
    include_disentangler: bool = False
    visibility: float = 1.0

    def __post_init__(self):
        if not (0.0 <= self.visibility <= 1.0):
            raise ValueError(f"visibility must lie in [0, 1], got {self.visibility}")

    @classmethod
    def from_angles(cls, phi, theta, interpretation=Interpretation.SIGMA_X, *,
                    include_disentangler=False, visibility=1.0) -> "InterferometerConfig":
        return cls(PolarizationPrep(phi), HwpSetting(theta, Interpretation(interpretation)),
                   include_disentangler, visibility)


@dataclass(frozen=True)
class SimulationOutcome:
    p_postselect: float
    p_b1: float
    p_b2: float
    diff: float
    variance: float
    fluctuation: float
    path_state: np.ndarray  # un-normalized post-selected path amplitudes, b-basis


def prepare_entangled(prep: PolarizationPrep) -> CompositeState:
    """``C_V|V>⊗|a1> + C_H|H>⊗|a2>`` as produced by the PBS."""
    a = PathBasis.A_BASIS
    return superpose(
        tensor(PolState(0.0, prep.c_v), [1.0, 0.0], a),
        tensor(PolState(prep.c_h, 0.0), [0.0, 1.0], a),
    ).normalize()


def sigma_x_coupling() -> CompositeOperator:
    return kron_op(SIGMA_X, WHICH_PATH_A, PathBasis.A_BASIS)


def sigma_y_coupling() -> CompositeOperator:
    return kron_op(SIGMA_Y, WHICH_PATH_A, PathBasis.A_BASIS)


def sigma_z_identity() -> CompositeOperator:
    return kron_op(SIGMA_Z, IDENTITY2, PathBasis.A_BASIS)


def hwp_generator_sigma_x(theta: float) -> np.ndarray:
    """``sin2θ σx⊗A + cos2θ σz⊗1``; squares to the identity."""
    t = 2.0 * math.radians(theta)
    return math.sin(t) * sigma_x_coupling().m + math.cos(t) * sigma_z_identity().m


def hwp_unitary_sigma_x(theta: float) -> CompositeOperator:
    # exp(-i pi/2 G) with G^2 = 1 collapses to -i G.
    return CompositeOperator(-1j * hwp_generator_sigma_x(theta), PathBasis.A_BASIS, unitary=True)


def hwp_unitary_sigma_y(theta: float) -> CompositeOperator:
    t = 2.0 * math.radians(theta)
    m = math.cos(t) * np.eye(4) - 1j * math.sin(t) * sigma_y_coupling().m
    return CompositeOperator(m, PathBasis.A_BASIS, unitary=True)


def hwp_unitary(hwp: HwpSetting) -> CompositeOperator:
    if hwp.interpretation is Interpretation.SIGMA_X:
        return hwp_unitary_sigma_x(hwp.theta)
    return hwp_unitary_sigma_y(hwp.theta)


def beam_splitter() -> CompositeOperator:
    """The 50:50 BS as an operator on a-basis amplitudes.

    The pipeline realizes the BS as a basis relabelling
    (:func:`~extweak.qstate.change_path_basis`); this matrix form exists
    so that its unitarity can be checked directly.
    """
    return kron_op(IDENTITY2, A_TO_B, PathBasis.A_BASIS, unitary=True)


def disentangler() -> CompositeOperator:
    """HWP on output arm b2: ``1⊗|b1><b1| + σz⊗|b2><b2|``."""
    b = PathBasis.B_BASIS
    m = np.kron(IDENTITY2, np.diag([1.0, 0.0])) + np.kron(SIGMA_Z, np.diag([0.0, 1.0]))
    return CompositeOperator(m, b, unitary=True)


def which_path_expectation(path_state, weight: float) -> tuple[float, float, float]:
    """Conditional port probabilities from a b-basis path state."""
    if not weight > 0.0:
        raise PostSelectionError(f"branch weight must be positive, got {weight!r}")
    path_state = np.asarray(path_state)
    p_b1 = float(abs(path_state[0]) ** 2 / weight)
    p_b2 = float(abs(path_state[1]) ** 2 / weight)
    return p_b1, p_b2, p_b1 - p_b2


def _outcome(path_state: np.ndarray, weight: float, visibility: float) -> SimulationOutcome:
    if weight < POSTSELECT_THRESHOLD:
        raise PostSelectionError(
            f"post-selection probability {weight:.3e} below {POSTSELECT_THRESHOLD:g}"
        )
    p_b1, p_b2, diff = which_path_expectation(path_state, weight)
    if visibility != 1.0:
        # p_b1 - p_b2 is exactly the interference cross-term over the weight,
        # so degrading the cross-term scales the difference and nothing else.
        diff *= visibility
        p_b1, p_b2 = 0.5 * (1.0 + diff), 0.5 * (1.0 - diff)
    variance = max(1.0 - diff * diff, 0.0)
    return SimulationOutcome(weight, p_b1, p_b2, diff, variance, math.sqrt(variance), path_state)


def evolve(cfg: InterferometerConfig) -> CompositeState:
    """State just before the polarizers, in the b-basis."""
    psi = prepare_entangled(cfg.prep)
    psi = apply(hwp_unitary(cfg.hwp), psi)
    psi = change_path_basis(psi)
    if cfg.include_disentangler:
        psi = apply(disentangler(), psi)
    return psi


def run_pipeline(cfg: InterferometerConfig) -> SimulationOutcome:
    path, weight = project_polarization(evolve(cfg), H)
    return _outcome(path, weight, cfg.visibility)


def run_pipeline_postselect_first(cfg: InterferometerConfig) -> SimulationOutcome:
    """Same observables with the H projection taken before the BS."""
    psi = apply(hwp_unitary(cfg.hwp), prepare_entangled(cfg.prep))
    if cfg.include_disentangler:
        raise ValueError("the disentangler sits after the BS; use run_pipeline")
    path_a, weight = project_polarization(psi, H)
    return _outcome(A_TO_B @ path_a, weight, cfg.visibility)


def postselect_probability_formula(phi: float, theta: float) -> float:
    """``C_H² cos²2θ + C_V² sin²2θ``."""
    prep = PolarizationPrep(phi)
    t = 2.0 * math.radians(theta)
    return prep.c_h**2 * math.cos(t) ** 2 + prep.c_v**2 * math.sin(t) ** 2

