"""Closed-form predictions for the interferometric weak measurement.

Everything here is a direct formula; the dense simulation in
:mod:`extweak.optics` is the independent check.  Angles are in degrees.

Sign convention.  Under the fixed Pauli/BS conventions of
:mod:`extweak.qstate` the sigma-x closed form agrees with the simulated
``P(b1) - P(b2)`` including its sign, while the sigma-y closed form (with
its ``-Im w`` numerator) comes out with the opposite sign to the simulated
sigma-y pipeline.  :func:`prob_difference` keeps the closed forms as
written; :func:`pipeline_signed_diff` applies :func:`pipeline_sign` so the
result can be compared with the simulation directly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

from .optics import Interpretation, PolarizationPrep, postselect_probability_formula
from .weakvalues import UndefinedWeakValueError

SINGULAR = 1e-15


class SingularPointError(ArithmeticError):
    """A closed form hits a zero denominator or a tangent pole."""


class NoOptimumError(ValueError):
    pass


def _rad2(theta: float) -> float:
    return 2.0 * math.radians(theta)


def _denominator(x: float, w: complex) -> float:
    """``1 + (1 - |w|²)(x - 1)/2``; ``x`` is cos4θ or e^{-s}."""
    d = 1.0 + 0.5 * (1.0 - abs(w) ** 2) * (x - 1.0)
    if abs(d) <= SINGULAR:
        raise SingularPointError(f"denominator vanishes ({d!r})")
    return d


def zeta(theta: float, w_real: float) -> float:
    t = _rad2(theta)
    if abs(math.cos(t)) <= SINGULAR:
        raise SingularPointError(f"tan(2 theta) diverges at theta={theta}")
    return math.tan(t) * w_real


def weak_value_f1(phi: float, interpretation: Interpretation) -> complex:
    """Closed form of the F1 extended weak value of the coupling operator."""
    prep = PolarizationPrep(phi)
    if prep.c_h == 0.0:
        raise UndefinedWeakValueError("C_H = 0")
    r = prep.c_v / prep.c_h
    return complex(-r) if Interpretation(interpretation) is Interpretation.SIGMA_X else 1j * r


def effective_real_weak_value(w: complex, interpretation: Interpretation) -> float:
    """The real number that plays the role of ``Re<σx⊗A>_w(1)`` in ζ.

    For sigma-y the closed form carries ``-Im w`` where sigma-x carries
    ``Re w``.
    """
    if Interpretation(interpretation) is Interpretation.SIGMA_X:
        return complex(w).real
    return -complex(w).imag


def zeta_at(phi: float, theta: float, interpretation=Interpretation.SIGMA_X) -> float:
    return zeta(theta, effective_real_weak_value(weak_value_f1(phi, interpretation), interpretation))


def prob_difference(theta: float, w: complex,
                    interpretation: Interpretation = Interpretation.SIGMA_X) -> float:
    """``P(b1) - P(b2)`` from the extended weak value ``w``.

    sigma-x: ``Re w sin4θ / D``; sigma-y: ``-Im w sin4θ / D``, with
    ``D = 1 + (1 - |w|²)(cos4θ - 1)/2``.
    """
    t4 = 2.0 * _rad2(theta)
    num = effective_real_weak_value(w, interpretation) * math.sin(t4)
    return num / _denominator(math.cos(t4), w)


def pipeline_sign(interpretation: Interpretation) -> int:
    return 1 if Interpretation(interpretation) is Interpretation.SIGMA_X else -1


def pipeline_signed_diff(theta: float, w: complex,
                         interpretation: Interpretation = Interpretation.SIGMA_X) -> float:
    return pipeline_sign(interpretation) * prob_difference(theta, w, interpretation)


def diff_from_zeta(z: float) -> float:
    return 2.0 * z / (1.0 + z * z)


def fluctuation_from_zeta(z: float) -> float:
    return abs(1.0 - z * z) / (1.0 + z * z)


def variance_from_zeta(z: float) -> float:
    return ((1.0 - z * z) / (1.0 + z * z)) ** 2


def fluctuation(theta: float, w_real: float) -> float:
    return fluctuation_from_zeta(zeta(theta, w_real))


def diff_zeta_derivative(z: float, h: float = 1e-6) -> float:
    """Central difference of ``2ζ/(1+ζ²)`` with respect to ζ."""
    return (diff_from_zeta(z + h) - diff_from_zeta(z - h)) / (2.0 * h)


def optimal_theta(w_real: float) -> float:
    """HWP angle in (0°, 45°) where ``|tan2θ · w_real| = 1``."""
    if w_real == 0.0 or not math.isfinite(w_real):
        raise NoOptimumError(f"no optimal strength for weak value {w_real!r}")
    return 0.5 * math.degrees(math.atan(1.0 / abs(w_real)))


def final_state_coefficients(phi: float, theta: float) -> tuple[complex, complex]:
    """b1/b2 amplitudes of the post-selected (sigma-x) path state.

    ``-i cos2θ (C_H/√2) (1 + ζ, 1 - ζ)``.
    """
    t = _rad2(theta)
    if abs(math.cos(t)) <= SINGULAR:
        raise SingularPointError("cos(2 theta) = 0")
    prep = PolarizationPrep(phi)
    z = zeta_at(phi, theta, Interpretation.SIGMA_X)
    pref = -1j * math.cos(t) * prep.c_h / math.sqrt(2.0)
    return pref * (1.0 + z), pref * (1.0 - z)


@dataclass(frozen=True)
class GaussianPointerParams:
    s: float
    w: complex

    def __post_init__(self):
        if not self.s >= 0.0:
            raise ValueError(f"measurement strength must be >= 0, got {self.s}")


def gaussian_pointer_q(params: GaussianPointerParams) -> float:
    """``<q>'/g`` after post-selection, all orders in the coupling."""
    return complex(params.w).real / _denominator(math.exp(-params.s), params.w)


def gaussian_pointer_p(params: GaussianPointerParams) -> float:
    """``g<p>'`` after post-selection, all orders in the coupling."""
    s = params.s
    return s * math.exp(-s) * complex(params.w).imag / _denominator(math.exp(-s), params.w)


def strength_correspondence(theta: float) -> float:
    """Pointer strength ``s = -ln cos4θ`` whose ``e^{-s}`` equals ``cos4θ``."""
    if not (0.0 <= theta < 22.5):
        raise ValueError(f"theta must lie in [0, 22.5) degrees, got {theta}")
    return -math.log(math.cos(2.0 * _rad2(theta)))


def back_action_eta(theta: float) -> float:
    return 0.5 * (1.0 - math.cos(2.0 * _rad2(theta)))


def experimental_weak_value(w: complex, eta: float) -> complex:
    """``w / (1 + η(|w|² - 1))``."""
    d = 1.0 + eta * (abs(w) ** 2 - 1.0)
    if abs(d) <= SINGULAR:
        raise SingularPointError("back-action denominator vanishes")
    return w / d


def istkh_form(theta: float, w: complex) -> float:
    """``sin4θ Re w / (1 + (1 - |w|²)(cos4θ - 1)/2)`` with a conventional weak value."""
    t4 = 2.0 * _rad2(theta)
    return math.sin(t4) * complex(w).real / _denominator(math.cos(t4), w)


def visibility_adjusted_diff(theta: float, w: complex, v: float,
                             interpretation: Interpretation = Interpretation.SIGMA_X) -> float:
    if not (0.0 <= v <= 1.0):
        raise ValueError(f"visibility must lie in [0, 1], got {v}")
    return v * prob_difference(theta, w, interpretation)


def fit_visibility(ideal, measured) -> float:
    """Least-squares ``v`` minimizing ``sum (measured - v * ideal)²``."""
    ideal = [float(x) for x in ideal]
    measured = [float(y) for y in measured]
    if not ideal or len(ideal) != len(measured):
        raise ValueError("need at least one (ideal, measured) pair")
    den = sum(x * x for x in ideal)
    if den == 0.0:
        raise SingularPointError("ideal predictions are all zero; visibility is unconstrained")
    return sum(x * y for x, y in zip(ideal, measured)) / den


@dataclass(frozen=True)
class TheoryPoint:
    phi: float
    theta: float
    interpretation: Interpretation
    zeta: float
    diff: float
    variance: float
    fluctuation: float
    p_postselect: float


def theory_point(phi: float, theta: float,
                 interpretation: Interpretation = Interpretation.SIGMA_X) -> TheoryPoint:
    interpretation = Interpretation(interpretation)
    z = zeta_at(phi, theta, interpretation)
    return TheoryPoint(
        phi=phi,
        theta=theta,
        interpretation=interpretation,
        zeta=z,
        diff=diff_from_zeta(z),
        variance=variance_from_zeta(z),
        fluctuation=fluctuation_from_zeta(z),
        p_postselect=postselect_probability_formula(phi, theta),
    )
