#!/usr/bin/env python3
"""Spin-1 observable algebra, eigenstructure, Born probabilities and context checks.

Kets are complex 3-vectors in the standard basis ``|1>, |0>, |-1>`` and operators are
3x3 complex matrices, both plain ``numpy`` arrays of dtype ``complex128``. Units are
hbar = 1, so eigenvalues are bare spin projections.

Phase convention for every eigenvector this module returns: the first component with
modulus above 1e-12 is real and positive.
"""

import logging
import math
from collections.abc import Iterator, Mapping, Sequence
from dataclasses import dataclass
from enum import Enum
from typing import NamedTuple, Optional

import numpy as np
import numpy.typing as npt

from .base import (
    HERMITIAN_TOL,
    NORMALIZATION_TOL,
    ORTHOGONALITY_TOL,
    STATE_NORM_TOL,
    NonHermitianInput,
    QrngError,
    UnnormalizedState,
    ZeroVector,
)

logger = logging.getLogger(__name__)

StateVector = npt.NDArray[np.complex128]
Operator = npt.NDArray[np.complex128]

# Partial {0, 1} assignment keyed by ProjectionObservable.name; absent or None = undefined
ValueAssignment = Mapping[str, Optional[int]]

SQRT2 = math.sqrt(2.0)
ZERO_TOL = 1e-12


class InvalidContext(QrngError, ValueError):
    """Observables do not form a context."""


def ket(*components: complex) -> StateVector:
    """Build a state vector from its standard-basis components."""
    vector = np.asarray(components, dtype=np.complex128)
    if vector.shape != (3,):
        raise ValueError(f"Expected 3 components, got {vector.shape}")
    if not np.all(np.isfinite(vector)):
        raise ValueError("State components must be finite")
    return vector


KET_PLUS_ONE = ket(1, 0, 0)
KET_ZERO = ket(0, 1, 0)
KET_MINUS_ONE = ket(0, 0, 1)


class SpinOperators(NamedTuple):
    sigma_x: Operator
    sigma_y: Operator
    sigma_z: Operator
    s_plus: Operator
    s_minus: Operator


def make_spin_operators() -> SpinOperators:
    """Return the generalised Pauli matrices and ladder operators for spin 1."""
    s_plus = np.array([[0, SQRT2, 0], [0, 0, SQRT2], [0, 0, 0]], dtype=np.complex128)
    s_minus = s_plus.conj().T.copy()
    r = 1.0 / SQRT2
    sigma_x = np.array([[0, r, 0], [r, 0, r], [0, r, 0]], dtype=np.complex128)
    sigma_y = np.array([[0, -1j * r, 0], [1j * r, 0, -1j * r], [0, 1j * r, 0]], dtype=np.complex128)
    sigma_z = np.diag([1.0, 0.0, -1.0]).astype(np.complex128)
    return SpinOperators(sigma_x, sigma_y, sigma_z, s_plus, s_minus)


def is_hermitian(op: Operator, tol: float = HERMITIAN_TOL) -> bool:
    return bool(np.max(np.abs(op - op.conj().T)) <= tol)


def is_unitary(op: Operator, tol: float = NORMALIZATION_TOL) -> bool:
    identity = np.eye(op.shape[0], dtype=np.complex128)
    return bool(np.max(np.abs(op.conj().T @ op - identity)) <= tol)


def spin_observable(theta: float, phi: float) -> Operator:
    """
    Spin observable S(theta, phi) = u . S along u = (sin t cos p, sin t sin p, cos t).

    Args:
        theta: Polar angle in radians
        phi: Azimuthal angle in radians

    Returns:
        Hermitian operator with eigenvalues {-1, 0, 1}
    """
    if not (math.isfinite(theta) and math.isfinite(phi)):
        raise ValueError("Angles must be finite")
    ops = make_spin_operators()
    ux = math.sin(theta) * math.cos(phi)
    uy = math.sin(theta) * math.sin(phi)
    uz = math.cos(theta)
    return ux * ops.sigma_x + uy * ops.sigma_y + uz * ops.sigma_z


@dataclass(frozen=True, eq=False)
class EigenSystem:
    """Eigenvalues with matching eigenvectors (``vectors[i]`` belongs to ``values[i]``)."""

    values: npt.NDArray[np.float64]
    vectors: npt.NDArray[np.complex128]

    def __iter__(self) -> Iterator[tuple[float, StateVector]]:
        for value, vector in zip(self.values, self.vectors):
            yield float(value), vector

    def residual(self, op: Operator) -> float:
        """Largest ||O v - lambda v|| over the pairs."""
        return max(float(np.linalg.norm(op @ v - lam * v)) for lam, v in self)

    def is_orthonormal(self, tol: float = ORTHOGONALITY_TOL) -> bool:
        gram = self.vectors.conj() @ self.vectors.T
        return bool(np.max(np.abs(gram - np.eye(len(self.values)))) <= tol)


def fix_phase(vector: StateVector) -> StateVector:
    """Rotate a vector so its first non-negligible component is real and positive."""
    for component in vector:
        modulus = abs(component)
        if modulus > ZERO_TOL:
            return np.asarray(vector * (component.conjugate() / modulus), dtype=np.complex128)
    raise ZeroVector("Cannot fix the phase of a zero vector")


def eigensystem_sx_analytic() -> EigenSystem:
    """Closed-form eigenpairs of S_x, ordered +1, 0, -1."""
    vectors = np.array(
        [
            [0.5, 1.0 / SQRT2, 0.5],
            [1.0 / SQRT2, 0.0, -1.0 / SQRT2],
            [0.5, -1.0 / SQRT2, 0.5],
        ],
        dtype=np.complex128,
    )
    return EigenSystem(values=np.array([1.0, 0.0, -1.0]), vectors=vectors)


def eigensystem_numeric(op: Operator, descending: bool = False) -> EigenSystem:
    """
    Numerically diagonalise a Hermitian operator.

    Args:
        op: Hermitian operator
        descending: Order eigenvalues high to low instead of the default ascending order

    Returns:
        EigenSystem with phase-fixed orthonormal eigenvectors

    Raises:
        NonHermitianInput: If op is not Hermitian within 1e-10
    """
    if not is_hermitian(op):
        raise NonHermitianInput("Operator is not Hermitian within 1e-10")
    values, columns = np.linalg.eigh(op)
    order = np.argsort(values)
    if descending:
        order = order[::-1]
    vectors = np.array([fix_phase(columns[:, i]) for i in order], dtype=np.complex128)
    return EigenSystem(values=np.asarray(values[order], dtype=np.float64), vectors=vectors)


def measurement_basis(theta: float, phi: float) -> EigenSystem:
    """Eigenbasis of S(theta, phi), ordered +1, 0, -1."""
    return eigensystem_numeric(spin_observable(theta, phi), descending=True)


def state_norm(state: StateVector) -> float:
    return float(np.linalg.norm(state))


def born_probabilities(state: StateVector, basis: EigenSystem) -> npt.NDArray[np.float64]:
    """
    Outcome probabilities p_i = |<v_i|psi>|^2, in the order of the basis.

    Raises:
        UnnormalizedState: If ||state|| deviates from 1 by more than 1e-9
    """
    norm = state_norm(state)
    if abs(norm - 1.0) > STATE_NORM_TOL:
        raise UnnormalizedState(f"State norm {norm!r} deviates from 1")
    amplitudes = basis.vectors.conj() @ state
    probabilities = np.abs(amplitudes) ** 2
    return np.asarray(probabilities / (norm * norm), dtype=np.float64)


@dataclass(frozen=True, eq=False)
class ProjectionObservable:
    """Rank-1 projector P = |psi><psi| / <psi|psi>, identified by ``name``."""

    name: str
    direction: StateVector
    matrix: Operator

    def unit_direction(self) -> StateVector:
        return np.asarray(self.direction / state_norm(self.direction), dtype=np.complex128)


def _default_name(state: StateVector) -> str:
    parts = []
    for c in fix_phase(state / state_norm(state)):
        parts.append(f"{c.real:+.6f}{c.imag:+.6f}j")
    return "P(" + ",".join(parts) + ")"


def projector(state: StateVector, name: Optional[str] = None) -> ProjectionObservable:
    """
    Projection observable onto span(state).

    Raises:
        ZeroVector: If ||state|| < 1e-12
    """
    norm = state_norm(state)
    if norm < ZERO_TOL:
        raise ZeroVector("Cannot project onto a zero vector")
    matrix = np.outer(state, state.conj()) / (norm * norm)
    return ProjectionObservable(
        name=name if name is not None else _default_name(state),
        direction=np.asarray(state, dtype=np.complex128),
        matrix=np.asarray(matrix, dtype=np.complex128),
    )


def overlap(a: ProjectionObservable, b: ProjectionObservable) -> float:
    """|<psi|phi>| between the normalised directions of two projectors."""
    return float(abs(np.vdot(a.unit_direction(), b.unit_direction())))


def is_context(obs: Sequence[ProjectionObservable], n: int) -> bool:
    """True iff obs holds exactly n mutually orthogonal projectors."""
    if not obs:
        raise ValueError("Observable list must be non-empty")
    if len(obs) != n:
        return False
    for i in range(len(obs)):
        for j in range(i + 1, len(obs)):
            if overlap(obs[i], obs[j]) >= ORTHOGONALITY_TOL:
                return False
    return True


@dataclass(frozen=True)
class ContextSet:
    members: tuple[ProjectionObservable, ...]
    dimension: int = 3

    def __post_init__(self) -> None:
        if not is_context(self.members, self.dimension):
            raise InvalidContext(
                f"{len(self.members)} observables do not form a context of dimension {self.dimension}"
            )


def check_admissible(v: ValueAssignment, contexts: Sequence[ContextSet]) -> bool:
    """
    Check that every fully value-definite context has exactly one observable set to 1.

    Contexts with an undefined member are skipped.
    """
    for context in contexts:
        values = [v.get(member.name) for member in context.members]
        if any(value is None for value in values):
            continue
        for value in values:
            if value not in (0, 1):
                raise ValueError(f"Assigned values must be 0 or 1, got {value!r}")
        if sum(value for value in values if value is not None) != 1:
            logger.debug(f"Context {[m.name for m in context.members]} sums to {values}")
            return False
    return True


def preparation_residuals(state: StateVector) -> npt.NDArray[np.float64]:
    """Residuals of the three modulus constraints yielding outcome probabilities (1/4, 1/2, 1/4)."""
    x, y, z = state
    r = 1.0 / SQRT2
    return np.array(
        [
            abs(abs(0.5 * x + r * y + 0.5 * z) - 0.5),
            abs(abs(r * x - r * z) - r),
            abs(abs(0.5 * x - r * y + 0.5 * z) - 0.5),
        ]
    )


def solve_preparation_states() -> list[StateVector]:
    """
    Preparation states yielding S_x outcome probabilities (1/4, 1/2, 1/4).

    Candidates come from setting y = 0, z = 1 - x: |+1>, |-1> and (|+> - |->)/sqrt(2)
    with |+-> = (|0> +- |1>)/sqrt(2). Each one is checked against the constraints.
    """
    plus = (KET_ZERO + KET_PLUS_ONE) / SQRT2
    minus = (KET_ZERO - KET_PLUS_ONE) / SQRT2
    candidates = [KET_PLUS_ONE.copy(), KET_MINUS_ONE.copy(), (plus - minus) / SQRT2]
    solutions = []
    for state in candidates:
        residual = float(np.max(preparation_residuals(state)))
        if residual <= NORMALIZATION_TOL:
            solutions.append(np.asarray(state, dtype=np.complex128))
        else:
            logger.warning(f"Candidate {state} violates the constraints by {residual:.3e}")
    return solutions


class ValueStatus(Enum):
    DEFINITE_ONE = "definite-1"
    DEFINITE_ZERO = "definite-0"
    INDEFINITE = "indefinite"


def classify_projection(state: StateVector, direction: StateVector) -> ValueStatus:
    """
    Value status of P_direction for a system prepared in ``state``.

    Under admissibility, non-contextuality and the eigenstate principle, a rank-1
    projector is value definite only when its direction is parallel (value 1) or
    orthogonal (value 0) to the prepared state.
    """
    if state_norm(state) < ZERO_TOL or state_norm(direction) < ZERO_TOL:
        raise ZeroVector("Cannot classify against a zero vector")
    a = state / state_norm(state)
    b = direction / state_norm(direction)
    amplitude = abs(np.vdot(b, a))
    if amplitude < ORTHOGONALITY_TOL:
        return ValueStatus.DEFINITE_ZERO
    if abs(amplitude - 1.0) < ORTHOGONALITY_TOL:
        return ValueStatus.DEFINITE_ONE
    return ValueStatus.INDEFINITE


def observable_value_definite(state: StateVector, op: Operator) -> bool:
    """A non-degenerate observable is value definite iff state is one of its eigenstates."""
    basis = eigensystem_numeric(op)
    return all(classify_projection(state, v) is not ValueStatus.INDEFINITE for _, v in basis)


def value_assignment_for(
    state: StateVector, contexts: Sequence[ContextSet]
) -> dict[str, Optional[int]]:
    """Partial assignment forced by the prepared state: definite members only."""
    assignment: dict[str, Optional[int]] = {}
    for context in contexts:
        for member in context.members:
            status = classify_projection(state, member.direction)
            if status is ValueStatus.DEFINITE_ONE:
                assignment[member.name] = 1
            elif status is ValueStatus.DEFINITE_ZERO:
                assignment[member.name] = 0
            else:
                assignment[member.name] = None
    return assignment


def standard_context() -> ContextSet:
    return ContextSet(
        members=(
            projector(KET_PLUS_ONE, "P|1>"),
            projector(KET_ZERO, "P|0>"),
            projector(KET_MINUS_ONE, "P|-1>"),
        )
    )


def context_from_basis(basis: EigenSystem, label: str) -> ContextSet:
    """Context of the projectors onto an orthonormal basis, named ``P|<label>:<eigenvalue>>``."""
    members = []
    for value, vector in basis:
        tag = "0" if abs(value) < 0.5 else f"{value:+.0f}"
        members.append(projector(vector, f"P|{label}:{tag}>"))
    return ContextSet(members=tuple(members))


def sx_context() -> ContextSet:
    return context_from_basis(eigensystem_sx_analytic(), "Sx")
