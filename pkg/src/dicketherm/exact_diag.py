"""Dense exact-diagonalization oracle for small atom numbers.

Desk-scale reference results: full spectra, partition functions, thermal
expectations, and the finite-N photon-density crossover that the
functional-integral order parameter predicts in the N -> infinity limit.
"""

from __future__ import annotations

import math
import threading
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from dicketherm.operators import (
    DEFAULT_DIMENSION_LIMIT,
    HamiltonianKind,
    HermitianOperator,
    ModelParams,
    build_hamiltonian,
    photon_number_operator,
)

__all__ = [
    "CurvePoint",
    "EDResult",
    "TruncationConvergenceError",
    "photon_density_curve",
    "thermal_solve",
    "truncation_convergence",
]


class TruncationConvergenceError(RuntimeError):
    """Doubling ladder hit the dimension ceiling before converging."""


@dataclass(frozen=True, eq=False)
class EDResult:
    """Thermal solution of one Hamiltonian at one temperature.

    ``Z`` is literally sum(exp(-beta * eigenvalues)); weights are
    evaluated with a ground-state shift internally so observables stay
    finite at large beta even when Z itself overflows.
    ``n_max_used`` and ``truncation_error_estimate`` are NaN-like
    placeholders (None / NaN) unless filled by the ladder drivers.
    """

    eigenvalues: np.ndarray
    Z: float
    observables: dict[str, float]
    beta: float
    n_max_used: int | None = None
    truncation_error_estimate: float = math.nan


@dataclass(frozen=True)
class CurvePoint:
    n_atoms: int
    n_max_used: int
    photons_per_atom: float
    truncation_error_estimate: float


def thermal_solve(
    H: HermitianOperator,
    beta: float,
    observables: Mapping[str, HermitianOperator] | None = None,
    *,
    dimension_limit: int = DEFAULT_DIMENSION_LIMIT,
) -> EDResult:
    """Full eigendecomposition plus Boltzmann-weighted expectations."""
    if not isinstance(H, HermitianOperator):
        H = HermitianOperator(np.asarray(H))
    if beta <= 0.0:
        raise ValueError(f"beta must be positive, got {beta}")
    if H.dimension > dimension_limit:
        raise ValueError(
            f"dimension {H.dimension} exceeds limit {dimension_limit}"
        )
    matrix = H.matrix
    if np.isrealobj(matrix) or np.allclose(matrix.imag, 0.0, atol=0.0):
        matrix = matrix.real
    eigenvalues, eigenvectors = np.linalg.eigh(matrix)
    weights = np.exp(-beta * (eigenvalues - eigenvalues[0]))
    z_shifted = float(np.sum(weights))
    Z = float(np.exp(-beta * eigenvalues[0]) * z_shifted)

    expectations: dict[str, float] = {}
    if observables:
        for name, op in observables.items():
            if not isinstance(op, HermitianOperator):
                op = HermitianOperator(np.asarray(op))
            op_matrix = op.matrix
            if np.allclose(op_matrix.imag, 0.0, atol=0.0):
                op_matrix = op_matrix.real
            diagonal = np.diagonal(op_matrix)
            if np.count_nonzero(op_matrix - np.diag(diagonal)) == 0:
                per_state = diagonal.real @ np.abs(eigenvectors) ** 2
            else:
                applied = op_matrix @ eigenvectors
                per_state = np.einsum(
                    "ik,ik->k", eigenvectors.conj(), applied
                ).real
            expectations[name] = float(np.dot(weights, per_state) / z_shifted)

    out = np.array(eigenvalues, copy=True)
    out.setflags(write=False)
    return EDResult(eigenvalues=out, Z=Z, observables=expectations, beta=beta)


# ladder solves keyed by (params, N, n_max, beta, kind); photon density only
_density_cache: dict[tuple, float] = {}
_density_lock = threading.Lock()


def _photon_density(
    params: ModelParams,
    n_atoms: int,
    n_max: int,
    beta: float,
    kind: HamiltonianKind,
    dimension_limit: int,
) -> float:
    key = (params, n_atoms, n_max, beta, kind)
    with _density_lock:
        if key in _density_cache:
            return _density_cache[key]
    H = build_hamiltonian(
        kind, params, n_atoms, n_max, dimension_limit=dimension_limit
    )
    number = photon_number_operator(n_atoms, n_max)
    result = thermal_solve(
        H, beta, {"photons": number}, dimension_limit=dimension_limit
    )
    value = result.observables["photons"]
    with _density_lock:
        _density_cache[key] = value
    return value


def truncation_convergence(
    params: ModelParams,
    n_atoms: int,
    beta: float,
    target_tol: float,
    *,
    kind: HamiltonianKind = HamiltonianKind.GENERALIZED_DICKE,
    base: int = 8,
    dimension_limit: int = DEFAULT_DIMENSION_LIMIT,
) -> int:
    """Smallest ladder rung whose doubling moves <b'b> by < target_tol.

    The ladder is base, 2*base, 4*base, ... and stops at the dimension
    ceiling; exhaustion raises TruncationConvergenceError, the expected
    outcome deep in the superradiant phase where occupation scales with
    the atom number.
    """
    if target_tol <= 0.0:
        raise ValueError("target_tol must be positive")
    if math.isinf(target_tol):
        return base
    n_max = base
    prev = _photon_density(params, n_atoms, n_max, beta, kind, dimension_limit)
    while True:
        doubled = 2 * n_max
        if 2**n_atoms * (doubled + 1) > dimension_limit:
            raise TruncationConvergenceError(
                f"ladder exhausted at n_max={n_max} (N={n_atoms}, "
                f"dimension ceiling {dimension_limit}); last rung moved "
                f"the photon number by more than {target_tol:.3e}"
            )
        cur = _photon_density(
            params, n_atoms, doubled, beta, kind, dimension_limit
        )
        if abs(cur - prev) < target_tol:
            return n_max
        n_max, prev = doubled, cur


def photon_density_curve(
    params: ModelParams,
    beta: float,
    N_list: Sequence[int] = (2, 4, 6, 8),
    *,
    target_tol: float = 1e-6,
    kind: HamiltonianKind = HamiltonianKind.GENERALIZED_DICKE,
    dimension_limit: int = DEFAULT_DIMENSION_LIMIT,
) -> list[CurvePoint]:
    """Photons per atom versus N at fixed beta, truncation-converged.

    Each point reports the doubled (confirming) rung: its density is the
    more accurate of the converged pair and the difference between the
    pair is the recorded truncation error estimate.
    """
    points = []
    for n_atoms in N_list:
        rung = truncation_convergence(
            params,
            n_atoms,
            beta,
            target_tol,
            kind=kind,
            dimension_limit=dimension_limit,
        )
        lower = _photon_density(
            params, n_atoms, rung, beta, kind, dimension_limit
        )
        upper = _photon_density(
            params, n_atoms, 2 * rung, beta, kind, dimension_limit
        )
        points.append(
            CurvePoint(
                n_atoms=n_atoms,
                n_max_used=2 * rung,
                photons_per_atom=upper / n_atoms,
                truncation_error_estimate=abs(upper - lower),
            )
        )
    return points
