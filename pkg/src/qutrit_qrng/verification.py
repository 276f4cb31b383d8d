#!/usr/bin/env python3
"""Invariant suites for the spin algebra and the beam-splitter decomposition."""

import argparse
import logging
import math
import sys
from collections.abc import Callable, Sequence
from dataclasses import dataclass
from typing import Any, Optional

import numpy as np

from .base import render_json
from .measurement import PreparationSpec, outcome_distribution
from .spin import (
    KET_PLUS_ONE,
    ContextSet,
    ProjectionObservable,
    born_probabilities,
    check_admissible,
    context_from_basis,
    eigensystem_numeric,
    eigensystem_sx_analytic,
    is_context,
    is_hermitian,
    is_unitary,
    make_spin_operators,
    measurement_basis,
    projector,
    solve_preparation_states,
    spin_observable,
    standard_context,
    sx_context,
)
from .unitary import apply_plan, build_ux, decompose, max_abs_error, random_unitary, reconstruct

logger = logging.getLogger(__name__)

QUARTER_HALF_QUARTER = np.array([0.25, 0.5, 0.25])


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str = ""

    def to_dict(self) -> dict[str, Any]:
        return {"name": self.name, "pass": bool(self.passed), "detail": self.detail}


def _check_operators(rng: np.random.Generator) -> CheckResult:
    ops = make_spin_operators()
    hermitian = all(is_hermitian(op, 1e-12) for op in (ops.sigma_x, ops.sigma_y, ops.sigma_z))
    ladder = max_abs_error(ops.s_plus.conj().T, ops.s_minus) < 1e-12
    sum_rule = max_abs_error(ops.sigma_x, 0.5 * (ops.s_plus + ops.s_minus)) < 1e-12
    return CheckResult(
        "spin operators",
        hermitian and ladder and sum_rule,
        f"hermitian={hermitian} ladder={ladder} sx=(S+ + S-)/2:{sum_rule}",
    )


def _check_observable_grid(rng: np.random.Generator) -> CheckResult:
    worst = 0.0
    for theta, phi in rng.uniform(0, 2 * math.pi, size=(100, 2)):
        op = spin_observable(float(theta), float(phi))
        if not is_hermitian(op, 1e-12) or abs(np.trace(op)) > 1e-12:
            return CheckResult("S(theta, phi) spectrum", False, f"not Hermitian/traceless at {theta}, {phi}")
        values = np.linalg.eigvalsh(op)
        worst = max(worst, float(np.max(np.abs(values - np.array([-1.0, 0.0, 1.0])))))
    return CheckResult("S(theta, phi) spectrum", worst < 1e-10, f"max eigenvalue error {worst:.2e}")


def _check_sx_eigensystem(rng: np.random.Generator) -> CheckResult:
    sx = make_spin_operators().sigma_x
    analytic = eigensystem_sx_analytic()
    numeric = eigensystem_numeric(sx, descending=True)
    agreement = min(abs(np.vdot(a, b)) for (_, a), (_, b) in zip(analytic, numeric))
    residual = analytic.residual(sx)
    passed = abs(agreement - 1.0) < 1e-8 and residual < 1e-12 and analytic.is_orthonormal()
    return CheckResult("S_x eigensystem", passed, f"overlap {agreement:.12f}, residual {residual:.2e}")


def _check_born(rng: np.random.Generator) -> CheckResult:
    basis = eigensystem_sx_analytic()
    worst = 0.0
    states = solve_preparation_states()
    for state in states:
        worst = max(worst, float(np.max(np.abs(born_probabilities(state, basis) - QUARTER_HALF_QUARTER))))
    legacy = outcome_distribution(PreparationSpec.LEGACY_SZ_ZERO).p
    legacy_ok = legacy[1] == 0.0 and abs(legacy[0] - 0.5) < 1e-12 and abs(legacy[2] - 0.5) < 1e-12
    return CheckResult(
        "Born probabilities",
        len(states) == 3 and worst < 1e-12 and legacy_ok,
        f"{len(states)} preparations, max error {worst:.2e}, legacy {legacy}",
    )


def _check_projectors(rng: np.random.Generator) -> CheckResult:
    worst = 0.0
    for _ in range(100):
        state = rng.standard_normal(3) + 1j * rng.standard_normal(3)
        p = projector(state).matrix
        worst = max(worst, max_abs_error(p @ p, p), abs(float(np.trace(p).real) - 1.0))
    return CheckResult("projector idempotence", worst < 1e-12, f"max error {worst:.2e}")


ASSIGNABLE: tuple[Optional[int], ...] = (0, 1, None)


def _random_context(rng: np.random.Generator, label: str) -> ContextSet:
    theta, phi = rng.uniform(0, 2 * math.pi, size=2)
    return context_from_basis(measurement_basis(float(theta), float(phi)), label)


def _random_assignment(
    contexts: Sequence[ContextSet], rng: np.random.Generator
) -> dict[str, Optional[int]]:
    return {
        m.name: ASSIGNABLE[int(rng.integers(0, len(ASSIGNABLE)))]
        for c in contexts
        for m in c.members
    }


def _sum_rule(v: dict[str, Optional[int]], contexts: Sequence[ContextSet]) -> bool:
    # Contexts with an undefined member impose nothing
    for c in contexts:
        values = [v[m.name] for m in c.members]
        if None not in values and sum(x for x in values if x is not None) != 1:
            return False
    return True


def _check_contexts(rng: np.random.Generator) -> CheckResult:
    contexts = [standard_context(), sx_context()]
    mixed: list[ProjectionObservable] = [
        contexts[0].members[0],
        contexts[1].members[0],
        contexts[0].members[2],
    ]
    structural = all(is_context(c.members, 3) for c in contexts) and not is_context(mixed, 3)
    consistent = True
    for trial in range(200):
        sampled = contexts + [_random_context(rng, f"R{trial}.{k}") for k in range(2)]
        v = _random_assignment(sampled, rng)
        consistent &= check_admissible(v, sampled) == _sum_rule(v, sampled)
    return CheckResult("contexts and admissibility", structural and consistent, f"structural={structural}")


def _check_ux(rng: np.random.Generator) -> CheckResult:
    ux = build_ux()
    unitary = max_abs_error(ux.conj().T @ ux, np.eye(3)) < 1e-14
    plan = decompose(ux)
    error = max_abs_error(reconstruct(plan), ux)
    amplitudes = apply_plan(plan, KET_PLUS_ONE)
    born = float(np.max(np.abs(np.abs(amplitudes) ** 2 - QUARTER_HALF_QUARTER)))
    return CheckResult(
        "U_x decomposition",
        unitary and error < 1e-10 and len(plan.layers) <= 3 and born < 1e-10,
        f"{len(plan.layers)} layers, reconstruction error {error:.2e}",
    )


def _check_random_unitaries(rng: np.random.Generator) -> CheckResult:
    worst = 0.0
    for _ in range(100):
        u = random_unitary(3, rng)
        plan = decompose(u)
        worst = max(worst, max_abs_error(reconstruct(plan), u))
        if not all(is_unitary(layer.matrix(3), 1e-14) for layer in plan.layers):
            return CheckResult("random unitary round-trip", False, "non-unitary layer")
    return CheckResult("random unitary round-trip", worst < 1e-9, f"max error {worst:.2e}")


CHECKS: Sequence[Callable[[np.random.Generator], CheckResult]] = (
    _check_operators,
    _check_observable_grid,
    _check_sx_eigensystem,
    _check_born,
    _check_projectors,
    _check_contexts,
    _check_ux,
    _check_random_unitaries,
)


def run_physics_checks(seed: int = 0) -> list[CheckResult]:
    """Run every invariant suite; an exception inside a check counts as a failure."""
    rng = np.random.default_rng(seed)
    results = []
    for check in CHECKS:
        try:
            result = check(rng)
        except Exception as e:
            logger.error(f"Check {check.__name__} raised: {e}", exc_info=True)
            result = CheckResult(check.__name__.lstrip("_"), False, f"raised {e}")
        logger.info(f"{result.name}: {'ok' if result.passed else 'FAILED'} ({result.detail})")
        results.append(result)
    return results


def summarize(results: Sequence[CheckResult]) -> dict[str, Any]:
    return {"checks": [r.to_dict() for r in results], "pass": all(r.passed for r in results)}


def main() -> None:
    """Main entry point for qutrit-qrng-verify."""
    parser = argparse.ArgumentParser(
        prog="qutrit-qrng-verify", description="Run the spin-algebra and decomposition invariant suites."
    )
    parser.add_argument("--seed", type=int, default=0, help="Seed for the randomised checks")
    args = parser.parse_args()

    results = run_physics_checks(args.seed)
    for r in results:
        mark = "✅" if r.passed else "❌"
        print(f"{mark} {r.name}: {r.detail}", file=sys.stderr)
    print(render_json(summarize(results)))
    if not all(r.passed for r in results):
        sys.exit(1)


if __name__ == "__main__":
    main()
