"""Dense complex algebra on the polarization (x) path space.

Amplitudes are stored in the fixed order ``(H⊗p1, H⊗p2, V⊗p1, V⊗p2)``,
where ``p1, p2`` are either the interferometer-arm states ``a1, a2`` or
the output-port states ``b1, b2`` depending on the basis tag.  States may
be sub-normalized: a post-selected branch keeps its squared norm as the
branch probability, and nothing is renormalized behind the caller's back.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

ATOL = 1e-12
SQRT1_2 = np.sqrt(0.5)


class BasisMismatchError(ValueError):
    """Two objects tagged with different path bases were combined."""


class PathBasis(enum.Enum):
    A_BASIS = "a"
    B_BASIS = "b"

    @property
    def other(self) -> "PathBasis":
        return PathBasis.B_BASIS if self is PathBasis.A_BASIS else PathBasis.A_BASIS


def _frozen(a, shape) -> np.ndarray:
    arr = np.array(a, dtype=complex).reshape(shape)
    if not np.all(np.isfinite(arr)):
        raise ValueError("non-finite amplitude")
    arr.setflags(write=False)
    return arr


# Single-photon polarization operators in the (H, V) basis.
IDENTITY2 = _frozen(np.eye(2), (2, 2))
SIGMA_X = _frozen([[0, 1], [1, 0]], (2, 2))
# sigma_y = -i|H><V| + i|V><H|
SIGMA_Y = _frozen([[0, -1j], [1j, 0]], (2, 2))
SIGMA_Z = _frozen([[1, 0], [0, -1]], (2, 2))

# Path operators in the a-basis.
WHICH_PATH_A = _frozen([[-1, 0], [0, 1]], (2, 2))  # -|a1><a1| + |a2><a2|
# Rows: <b1|, <b2|; columns: |a1>, |a2>.
A_TO_B = _frozen(SQRT1_2 * np.array([[1, 1], [-1, 1]]), (2, 2))
B_TO_A = _frozen(A_TO_B.conj().T, (2, 2))


@dataclass(frozen=True)
class PolState:
    """Polarization state ``c_h|H> + c_v|V>``."""

    c_h: complex
    c_v: complex

    def __post_init__(self):
        for c in (self.c_h, self.c_v):
            if not np.isfinite(complex(c)):
                raise ValueError("non-finite polarization amplitude")

    @property
    def vector(self) -> np.ndarray:
        return np.array([self.c_h, self.c_v], dtype=complex)

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.vector))

    @property
    def is_normalized(self) -> bool:
        return abs(self.norm**2 - 1.0) <= ATOL


H = PolState(1.0, 0.0)
V = PolState(0.0, 1.0)


@dataclass(frozen=True, eq=False)
class CompositeState:
    amps: np.ndarray
    basis: PathBasis
    normalized: bool = False

    def __post_init__(self):
        object.__setattr__(self, "amps", _frozen(self.amps, (4,)))
        n = self.norm
        if n > 1.0 + ATOL:
            raise ValueError(f"state norm {n!r} exceeds 1")
        if self.normalized and abs(n - 1.0) > ATOL:
            raise ValueError(f"state flagged normalized but has norm {n!r}")

    @property
    def norm(self) -> float:
        return float(np.linalg.norm(self.amps))

    @property
    def matrix(self) -> np.ndarray:
        """Amplitudes reshaped to ``[pol, path]``."""
        return self.amps.reshape(2, 2)

    def normalize(self) -> "CompositeState":
        n = self.norm
        if n == 0.0:
            raise ZeroDivisionError("cannot normalize the zero state")
        return CompositeState(self.amps / n, self.basis, normalized=True)

    def allclose(self, other: "CompositeState", atol: float = ATOL) -> bool:
        return self.basis is other.basis and np.allclose(self.amps, other.amps, rtol=0, atol=atol)


@dataclass(frozen=True, eq=False)
class CompositeOperator:
    m: np.ndarray
    basis: PathBasis
    unitary: bool = False

    def __post_init__(self):
        object.__setattr__(self, "m", _frozen(self.m, (4, 4)))
        if self.unitary and not is_unitary(self.m):
            raise ValueError("operator flagged unitary fails M^dagger M = 1")

    def __matmul__(self, other: "CompositeOperator") -> "CompositeOperator":
        _check_basis(self.basis, other.basis)
        return CompositeOperator(self.m @ other.m, self.basis, self.unitary and other.unitary)

    def __add__(self, other: "CompositeOperator") -> "CompositeOperator":
        _check_basis(self.basis, other.basis)
        return CompositeOperator(self.m + other.m, self.basis)

    def scale(self, c: complex) -> "CompositeOperator":
        return CompositeOperator(c * self.m, self.basis)

    @property
    def dagger(self) -> "CompositeOperator":
        return CompositeOperator(self.m.conj().T, self.basis, self.unitary)


def is_unitary(m: np.ndarray, atol: float = ATOL) -> bool:
    m = np.asarray(m)
    return bool(np.allclose(m.conj().T @ m, np.eye(m.shape[0]), rtol=0, atol=atol))


def _check_basis(x: PathBasis, y: PathBasis) -> None:
    if x is not y:
        raise BasisMismatchError(f"path basis mismatch: {x.name} vs {y.name}")


def kron_op(pol_op, path_op, basis: PathBasis, unitary: bool = False) -> CompositeOperator:
    """``pol_op ⊗ path_op`` with both factors given as 2x2 arrays."""
    return CompositeOperator(np.kron(pol_op, path_op), basis, unitary)


def tensor(pol: PolState, path, basis: PathBasis) -> CompositeState:
    path = np.asarray(path, dtype=complex).reshape(2)
    amps = np.outer(pol.vector, path).reshape(4)
    normalized = abs(np.linalg.norm(amps) - 1.0) <= ATOL
    return CompositeState(amps, basis, normalized)


def superpose(*terms: CompositeState) -> CompositeState:
    basis = terms[0].basis
    for t in terms[1:]:
        _check_basis(basis, t.basis)
    amps = sum(t.amps for t in terms)
    return CompositeState(amps, basis, abs(np.linalg.norm(amps) - 1.0) <= ATOL)


def apply(op: CompositeOperator, s: CompositeState) -> CompositeState:
    _check_basis(op.basis, s.basis)
    out = op.m @ s.amps
    # A unitary preserves the norm, so the flag carries through.
    return CompositeState(out, s.basis, s.normalized and op.unitary)


def inner(x: CompositeState, y: CompositeState) -> complex:
    """``<x|y>``, conjugate-linear in ``x``."""
    _check_basis(x.basis, y.basis)
    return complex(np.vdot(x.amps, y.amps))


def project_polarization(s: CompositeState, pol: PolState) -> tuple[np.ndarray, float]:
    """Apply ``<pol| ⊗ 1`` and return the path state and its branch weight."""
    if not pol.is_normalized:
        raise ValueError("projection polarization state must be normalized")
    path = pol.vector.conj() @ s.matrix
    weight = float(np.sum(np.abs(path) ** 2))
    return path, weight


def change_path_basis(s: CompositeState) -> CompositeState:
    """Re-express the path factor in the other basis (a <-> b)."""
    u = A_TO_B if s.basis is PathBasis.A_BASIS else B_TO_A
    amps = (s.matrix @ u.T).reshape(4)
    return CompositeState(amps, s.basis.other, s.normalized)


def change_operator_basis(op: CompositeOperator) -> CompositeOperator:
    u = A_TO_B if op.basis is PathBasis.A_BASIS else B_TO_A
    big = np.kron(IDENTITY2, u)
    return CompositeOperator(big @ op.m @ big.conj().T, op.basis.other, op.unitary)


def path_projector(index: int, basis: PathBasis) -> CompositeOperator:
    """``1 ⊗ |p_index><p_index|`` for index 0 or 1."""
    p = np.zeros((2, 2))
    p[index, index] = 1.0
    return kron_op(IDENTITY2, p, basis)
