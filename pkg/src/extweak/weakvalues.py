"""Conventional and extended weak values.

The extended weak value conditions on a composite pre-selected state and a
product final state of polarization and path::

    <O⊗P>_w(i) = <psi_f(i)| O⊗P |psi_comp> / <psi_f(i)|psi_comp>

Here the final states are ``|H>⊗|b1>`` (port F1) and ``|H>⊗|b2>`` (port F2),
and the composite pre-selection is the PBS output.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass

import numpy as np

from .optics import (
    Interpretation,
    PolarizationPrep,
    prepare_entangled,
    sigma_x_coupling,
    sigma_y_coupling,
)
from .qstate import (
    H,
    CompositeOperator,
    CompositeState,
    PathBasis,
    BasisMismatchError,
    PolState,
    change_path_basis,
    inner,
    tensor,
)

OVERLAP_THRESHOLD = 1e-15


class UndefinedWeakValueError(ZeroDivisionError):
    """Pre- and post-selected states are (numerically) orthogonal."""


class Port(enum.Enum):
    F1 = 1
    F2 = 2


@dataclass(frozen=True)
class WeakValueRecord:
    value: complex
    port: Port
    operator_label: str
    overlap: complex


def conventional_weak_value(pre: PolState, post: PolState, op) -> complex:
    op = np.asarray(op, dtype=complex)
    overlap = np.vdot(post.vector, pre.vector)
    if abs(overlap) <= OVERLAP_THRESHOLD:
        raise UndefinedWeakValueError("orthogonal pre- and post-selection")
    return complex(np.vdot(post.vector, op @ pre.vector) / overlap)


def final_state(port: Port, basis: PathBasis = PathBasis.A_BASIS) -> CompositeState:
    """``|H>⊗|b1>`` or ``|H>⊗|b2>``, expressed in the requested path basis."""
    path = [1.0, 0.0] if port is Port.F1 else [0.0, 1.0]
    f = tensor(H, path, PathBasis.B_BASIS)
    return f if basis is PathBasis.B_BASIS else change_path_basis(f)


def extended_weak_value(comp: CompositeState, final: CompositeState, op: CompositeOperator,
                        port: Port = Port.F1, label: str = "") -> WeakValueRecord:
    overlap = inner(final, comp)
    if abs(overlap) <= OVERLAP_THRESHOLD:
        raise UndefinedWeakValueError(f"<final|comp> = {overlap!r} vanishes")
    if op.basis is not comp.basis:
        raise BasisMismatchError(f"operator in {op.basis.name}, state in {comp.basis.name}")
    # op need not be unitary, so op|comp> is not necessarily a valid state
    value = np.vdot(final.amps, op.m @ comp.amps) / overlap
    return WeakValueRecord(complex(value), port, label, overlap)


def coupling_weak_value(phi: float, interpretation: Interpretation,
                        port: Port = Port.F1) -> WeakValueRecord:
    """``<σx⊗A>_w(i)`` or ``<σy⊗A>_w(i)`` for the PBS output at angle ``phi``."""
    if interpretation is Interpretation.SIGMA_X:
        op, label = sigma_x_coupling(), "sigma_x(x)A"
    else:
        op, label = sigma_y_coupling(), "sigma_y(x)A"
    comp = prepare_entangled(PolarizationPrep(phi))
    return extended_weak_value(comp, final_state(port), op, port, label)


def sigma_y_extended_weak_values(phi: float) -> tuple[complex, complex]:
    """Closed forms ``(+i C_V/C_H, -i C_V/C_H)``."""
    prep = PolarizationPrep(phi)
    if prep.c_h == 0.0:
        raise UndefinedWeakValueError("C_H = 0: the H post-selection is orthogonal")
    r = prep.c_v / prep.c_h
    return 1j * r, -1j * r


def sigma_x_extended_weak_values(phi: float) -> tuple[complex, complex]:
    """Closed forms ``(-C_V/C_H, +C_V/C_H)``."""
    prep = PolarizationPrep(phi)
    if prep.c_h == 0.0:
        raise UndefinedWeakValueError("C_H = 0: the H post-selection is orthogonal")
    r = prep.c_v / prep.c_h
    return complex(-r), complex(r)


def normalization_factor(phi: float, theta: float,
                         interpretation: Interpretation = Interpretation.SIGMA_X) -> float:
    """``<psi_f|psi_f>`` rebuilt from the F1 overlap and extended weak value.

    Falls back to the expanded form ``C_H² cos²2θ + C_V² sin²2θ`` when
    ``C_H = 0``, where the weak value itself is undefined.
    """
    prep = PolarizationPrep(phi)
    t = 2.0 * math.radians(theta)
    if prep.c_h == 0.0:
        return prep.c_v**2 * math.sin(t) ** 2
    rec = coupling_weak_value(phi, Interpretation(interpretation), Port.F1)
    return 2.0 * abs(rec.overlap) ** 2 * (math.cos(t) ** 2 + math.sin(t) ** 2 * abs(rec.value) ** 2)
