#!/usr/bin/env python3
"""U_x and the decomposition of unitaries into two-mode beam-splitter layers.

Layer convention: a layer on modes (i, j) with mixing angle theta and phase phi embeds

    [[exp(i phi) cos(theta), -sin(theta)],
     [exp(i phi) sin(theta),  cos(theta)]]

into rows/columns {i, j} of the identity. A plan with layers L1, ..., Lk and output phases
(a0, a1, a2) stands for

    U = diag(exp(i a0), exp(i a1), exp(i a2)) . Lk ... L2 . L1

so layers act on an input state in the order listed and the phases act last.

The decomposition nulls the lower triangle row by row from the bottom, multiplying U on
the right by inverse layers; this yields at most n(n-1)/2 layers.
"""

import logging
import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from .base import UNITARY_TOL, NotUnitary
from .spin import SQRT2, Operator, is_unitary

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class BeamSplitterLayer:
    mode_pair: tuple[int, int]
    theta: float
    phi: float

    def __post_init__(self) -> None:
        i, j = self.mode_pair
        if not 0 <= i < j:
            raise ValueError(f"Invalid mode pair {self.mode_pair}")

    def block(self) -> Operator:
        c, s = math.cos(self.theta), math.sin(self.theta)
        e = complex(math.cos(self.phi), math.sin(self.phi))
        return np.array([[e * c, -s], [e * s, c]], dtype=np.complex128)

    def matrix(self, dimension: int = 3) -> Operator:
        """The layer embedded in a dimension x dimension identity."""
        i, j = self.mode_pair
        if j >= dimension:
            raise ValueError(f"Mode pair {self.mode_pair} outside dimension {dimension}")
        full = np.eye(dimension, dtype=np.complex128)
        block = self.block()
        full[i, i], full[i, j] = block[0, 0], block[0, 1]
        full[j, i], full[j, j] = block[1, 0], block[1, 1]
        return full

    def to_dict(self) -> dict[str, Any]:
        return {"pair": list(self.mode_pair), "theta": self.theta, "phi": self.phi}


@dataclass(frozen=True)
class DecompositionPlan:
    layers: tuple[BeamSplitterLayer, ...]
    output_phases: tuple[float, ...]

    @property
    def dimension(self) -> int:
        return len(self.output_phases)

    def to_dict(self) -> dict[str, Any]:
        return {
            "layers": [layer.to_dict() for layer in self.layers],
            "phases": list(self.output_phases),
        }

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "DecompositionPlan":
        try:
            layers = tuple(
                BeamSplitterLayer(
                    mode_pair=(int(item["pair"][0]), int(item["pair"][1])),
                    theta=float(item["theta"]),
                    phi=float(item["phi"]),
                )
                for item in data["layers"]
            )
            phases = tuple(float(p) for p in data["phases"])
        except (KeyError, IndexError, TypeError) as e:
            raise ValueError(f"Malformed decomposition plan: {e}") from e
        return cls(layers=layers, output_phases=phases)


def build_ux() -> Operator:
    """U_x: rows are the S_x eigenvectors for +1, 0, -1."""
    return 0.5 * np.array(
        [[1, SQRT2, 1], [SQRT2, 0, -SQRT2], [1, -SQRT2, 1]],
        dtype=np.complex128,
    )


def _nulling_layer(u_i: complex, u_j: complex, pair: tuple[int, int]) -> BeamSplitterLayer:
    # Right-multiplying by layer^dagger zeroes column i of this row
    theta = math.atan2(abs(u_i), abs(u_j))
    phi = float(np.angle(u_i) - np.angle(u_j))
    return BeamSplitterLayer(mode_pair=pair, theta=theta, phi=phi)


def decompose(u: Operator) -> DecompositionPlan:
    """
    Decompose a unitary into beam-splitter layers and output phases.

    Args:
        u: Square unitary matrix

    Returns:
        DecompositionPlan whose reconstruction matches u within 1e-10

    Raises:
        NotUnitary: If u is not unitary within 1e-10
    """
    u = np.asarray(u, dtype=np.complex128)
    if u.ndim != 2 or u.shape[0] != u.shape[1]:
        raise NotUnitary(f"Expected a square matrix, got shape {u.shape}")
    if not is_unitary(u, UNITARY_TOL):
        raise NotUnitary("Matrix is not unitary within 1e-10")

    n = u.shape[0]
    work = u.copy()
    layers: list[BeamSplitterLayer] = []
    for row in range(n - 1, 0, -1):
        for col in range(row):
            layer = _nulling_layer(work[row, col], work[row, col + 1], (col, col + 1))
            work = work @ layer.matrix(n).conj().T
            layers.append(layer)

    phases = tuple(float(a) for a in np.angle(np.diag(work)))
    residual = float(np.max(np.abs(work - np.diag(np.diag(work)))))
    logger.debug(f"Decomposed {n}x{n} unitary into {len(layers)} layers (off-diagonal {residual:.2e})")
    return DecompositionPlan(layers=tuple(layers), output_phases=phases)


def reconstruct(plan: DecompositionPlan) -> Operator:
    """Multiply the layers in listed order, then apply the output phases."""
    n = plan.dimension
    result = np.eye(n, dtype=np.complex128)
    for layer in plan.layers:
        result = layer.matrix(n) @ result
    return np.diag(np.exp(1j * np.asarray(plan.output_phases))) @ result


def apply_plan(plan: DecompositionPlan, state: Any) -> Any:
    """Propagate an input amplitude vector through the plan."""
    vector = np.asarray(state, dtype=np.complex128)
    for layer in plan.layers:
        vector = layer.matrix(plan.dimension) @ vector
    return np.exp(1j * np.asarray(plan.output_phases)) * vector


def max_abs_error(a: Operator, b: Operator) -> float:
    return float(np.max(np.abs(np.asarray(a) - np.asarray(b))))


def operator_to_dict(op: Operator) -> dict[str, Any]:
    """JSON form of a matrix: separate real and imaginary parts."""
    return {"real": np.real(op).tolist(), "imag": np.imag(op).tolist()}


def operator_from_dict(data: dict[str, Any]) -> Operator:
    try:
        real = np.asarray(data["real"], dtype=np.float64)
        imag = np.asarray(data.get("imag", np.zeros_like(real)), dtype=np.float64)
    except (KeyError, TypeError, ValueError) as e:
        raise ValueError(f"Malformed matrix document: {e}") from e
    if real.shape != imag.shape:
        raise ValueError("Real and imaginary parts differ in shape")
    return np.asarray(real + 1j * imag, dtype=np.complex128)


def random_unitary(n: int, rng: np.random.Generator) -> Operator:
    """Haar-distributed unitary via QR of a complex Gaussian matrix."""
    z = (rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))) / SQRT2
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return np.asarray(q * (d / np.abs(d)), dtype=np.complex128)
