"""Finite-dimensional operator algebra for qubit-boson models.

This module provides the truncated Fock space of a single bosonic mode, a
register of N two-level atoms, and dense builders for the single-mode
Hamiltonians handled by the package: the generalized Dicke model with
separate rotating and counter-rotating couplings, its rotating-wave
restriction, the Jaynes-Cummings model and its two-photon and
intensity-dependent variants.

Basis convention, fixed across the whole package: composite states are
ordered as (qubit register) x (Fock), qubit register little-endian (site 0
is the least significant bit), Fock occupation ascending.  A composite
index decomposes as ``index = q * (n_max + 1) + n`` with ``q`` the register
bit pattern and ``n`` the boson occupation.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

__all__ = [
    "DEFAULT_DIMENSION_LIMIT",
    "BosonSpace",
    "DimensionLimitError",
    "HamiltonianKind",
    "HermitianOperator",
    "ModelParams",
    "NotHermitianError",
    "QubitRegister",
    "build_hamiltonian",
    "make_boson_ops",
    "make_spin_ops",
    "parity_operator",
    "photon_number_operator",
    "total_excitation_operator",
]

HERMITICITY_TOL = 1e-12

# Dense eigensolves above this size stop being desk-scale; the crossover
# study at eight atoms needs 2^8 * 17 = 4352.
DEFAULT_DIMENSION_LIMIT = 6000


class DimensionLimitError(ValueError):
    """Requested Hilbert space exceeds the configured dense-solver limit."""


class NotHermitianError(ValueError):
    """Matrix failed the elementwise hermiticity check."""


@dataclass(frozen=True)
class ModelParams:
    """Physical parameters of the qubit-boson family, natural units.

    Attributes
    ----------
    omega0 : float
        Mode frequency, must be positive.
    Omega : float
        Qubit energy gap, must be positive.
    g1 : float
        Rotating (excitation-conserving) coupling, non-negative.
    g2 : float
        Counter-rotating coupling, non-negative.
    """

    omega0: float
    Omega: float
    g1: float = 0.0
    g2: float = 0.0

    def __post_init__(self) -> None:
        if not (self.omega0 > 0.0):
            raise ValueError(f"omega0 must be positive, got {self.omega0}")
        if not (self.Omega > 0.0):
            raise ValueError(f"Omega must be positive, got {self.Omega}")
        if self.g1 < 0.0:
            raise ValueError(f"g1 must be non-negative, got {self.g1}")
        if self.g2 < 0.0:
            raise ValueError(f"g2 must be non-negative, got {self.g2}")


@dataclass(frozen=True)
class BosonSpace:
    """Truncated Fock space |0> .. |n_max> of a single mode."""

    n_max: int

    def __post_init__(self) -> None:
        if self.n_max < 1:
            raise ValueError("n_max must be at least 1, a single level has no dynamics")

    @property
    def dimension(self) -> int:
        return self.n_max + 1


@dataclass(frozen=True)
class QubitRegister:
    """Register of N two-level atoms, dimension 2^N, little-endian."""

    n_atoms: int

    def __post_init__(self) -> None:
        if self.n_atoms < 1:
            raise ValueError("register needs at least one atom")

    @property
    def dimension(self) -> int:
        return 2**self.n_atoms


class HermitianOperator:
    """Dense operator on the composite (qubit x Fock) space.

    Entries are stored as a read-only complex matrix in the fixed basis
    described in the module docstring.  Construction verifies hermiticity
    to ``HERMITICITY_TOL`` elementwise unless ``check`` is disabled.
    """

    def __init__(self, matrix: np.ndarray, *, check: bool = True) -> None:
        mat = np.array(matrix, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError(f"operator matrix must be square, got shape {mat.shape}")
        deviation = float(np.max(np.abs(mat - mat.conj().T))) if mat.size else 0.0
        if check and deviation > HERMITICITY_TOL:
            raise NotHermitianError(
                f"matrix deviates from self-adjointness by {deviation:.3e}"
            )
        mat.flags.writeable = False
        self.matrix = mat
        self.hermitian = deviation <= HERMITICITY_TOL

    @property
    def dimension(self) -> int:
        return self.matrix.shape[0]

    def eigenvalues(self) -> np.ndarray:
        return np.linalg.eigvalsh(self.matrix)


class HamiltonianKind(Enum):
    """Which member of the single-mode Hamiltonian family to build."""

    GENERALIZED_DICKE = "generalized-dicke"
    DICKE_RWA = "dicke-rwa"
    JAYNES_CUMMINGS = "jaynes-cummings"
    TWO_PHOTON_JC = "two-photon-jc"
    INTENSITY_JC = "intensity-jc"
    INTENSITY_DICKE = "intensity-dicke"


_SINGLE_ATOM_KINDS = frozenset(
    {
        HamiltonianKind.JAYNES_CUMMINGS,
        HamiltonianKind.TWO_PHOTON_JC,
        HamiltonianKind.INTENSITY_JC,
    }
)

# Register bit 1 is the excited state, so sz = diag(-1, +1) in bit order.
_PAULI_Z = np.array([[-1.0, 0.0], [0.0, 1.0]], dtype=complex)
_PAULI_PLUS = np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex)


def make_boson_ops(space: BosonSpace) -> tuple[np.ndarray, np.ndarray]:
    """Annihilation and creation matrices on the truncated Fock space.

    Parameters
    ----------
    space : BosonSpace
        Target space; its ``n_max`` must be at least 1.

    Returns
    -------
    (annihilator, creator) : tuple of ndarray
        ``annihilator[n-1, n] = sqrt(n)``; the creator is the exact
        conjugate transpose.  On the span of |0> .. |n_max - 1> the
        commutator equals the identity; the |n_max> corner carries the
        usual truncation artifact.
    """
    dim = space.dimension
    annihilator = np.zeros((dim, dim), dtype=complex)
    ns = np.arange(1, dim)
    annihilator[ns - 1, ns] = np.sqrt(ns)
    return annihilator, annihilator.conj().T


def _embed_qubit(op: np.ndarray, site: int, n_atoms: int) -> np.ndarray:
    """Embed a single-qubit matrix at ``site`` of a little-endian register."""
    left = np.eye(2 ** (n_atoms - 1 - site), dtype=complex)
    right = np.eye(2**site, dtype=complex)
    return np.kron(left, np.kron(op, right))


def make_spin_ops(
    reg: QubitRegister, site: int
) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Pseudo-spin matrices (sz, s+, s-) for one site of the register.

    The returned operators act on the full 2^N register space and satisfy
    [s+, s-] = sz, [sz, s+] = 2 s+, [sz, s-] = -2 s- exactly, with
    operators on distinct sites commuting.

    Parameters
    ----------
    reg : QubitRegister
        Register the operators act on.
    site : int
        Site index, 0 <= site < N.
    """
    if not 0 <= site < reg.n_atoms:
        raise IndexError(f"site {site} out of range for {reg.n_atoms} atoms")
    sz = _embed_qubit(_PAULI_Z, site, reg.n_atoms)
    splus = _embed_qubit(_PAULI_PLUS, site, reg.n_atoms)
    return sz, splus, splus.conj().T


def _check_dimension(n_atoms: int, n_max: int, limit: int) -> int:
    dim = 2**n_atoms * (n_max + 1)
    if dim > limit:
        raise DimensionLimitError(
            f"composite dimension {dim} exceeds limit {limit} "
            f"(N={n_atoms}, n_max={n_max})"
        )
    return dim


def _collective_coupling(
    n_atoms: int,
    n_max: int,
    mode_op: np.ndarray,
    coupling: float,
) -> np.ndarray:
    """(coupling / sqrt(N)) * sum_j (mode_op x s+_j + h.c.)."""
    reg = QubitRegister(n_atoms)
    dim_b = n_max + 1
    acc = np.zeros((reg.dimension * dim_b, reg.dimension * dim_b), dtype=complex)
    if coupling == 0.0:
        return acc
    for site in range(n_atoms):
        _, splus, _ = make_spin_ops(reg, site)
        term = np.kron(splus, mode_op)
        acc += term + term.conj().T
    return (coupling / np.sqrt(n_atoms)) * acc


def build_hamiltonian(
    kind: HamiltonianKind,
    params: ModelParams,
    n_atoms: int,
    n_max: int,
    *,
    dimension_limit: int = DEFAULT_DIMENSION_LIMIT,
) -> HermitianOperator:
    """Assemble one of the family Hamiltonians on the composite space.

    All kinds share the free part ``omega0 * b'b + (Omega/2) * sum_j sz_j``
    (zero of energy shifted per qubit).  The interaction depends on the
    kind:

    - GENERALIZED_DICKE: (g1/sqrt(N)) sum (b s+ + b' s-)
      + (g2/sqrt(N)) sum (b' s+ + b s-)
    - DICKE_RWA: (g1/sqrt(N)) sum (b s+ + b' s-)
    - JAYNES_CUMMINGS: g1 (b s+ + b' s-), single atom
    - TWO_PHOTON_JC: g1 (b^2 s+ + b'^2 s-), single atom
    - INTENSITY_JC: g1 (b (b'b)^(1/2) s+ + h.c.), single atom
    - INTENSITY_DICKE: (g1/sqrt(N)) sum (b (b'b)^(1/2) s+ + h.c.)

    Single-coupling kinds read ``params.g1`` and ignore ``g2``.  The
    intensity-dependent lowering factor is the adjoint pair
    ``b (b'b)^(1/2)`` / its conjugate transpose, which keeps the result
    self-adjoint on the truncated space.

    Raises
    ------
    DimensionLimitError
        If 2^N * (n_max + 1) exceeds ``dimension_limit``.
    ValueError
        For N < 1, n_max < 2, or a single-atom kind with N > 1.
    """
    if n_atoms < 1:
        raise ValueError("n_atoms must be at least 1")
    if n_max < 2:
        raise ValueError("n_max must be at least 2")
    if kind in _SINGLE_ATOM_KINDS and n_atoms != 1:
        raise ValueError(f"{kind.value} is a single-atom model, got N={n_atoms}")
    _check_dimension(n_atoms, n_max, dimension_limit)

    space = BosonSpace(n_max)
    reg = QubitRegister(n_atoms)
    annihilator, creator = make_boson_ops(space)
    number = creator @ annihilator

    free = params.omega0 * np.kron(np.eye(reg.dimension, dtype=complex), number)
    for site in range(n_atoms):
        sz, _, _ = make_spin_ops(reg, site)
        free += 0.5 * params.Omega * np.kron(sz, np.eye(space.dimension, dtype=complex))

    if kind is HamiltonianKind.GENERALIZED_DICKE:
        interaction = _collective_coupling(n_atoms, n_max, annihilator, params.g1)
        interaction += _collective_coupling(n_atoms, n_max, creator, params.g2)
    elif kind is HamiltonianKind.DICKE_RWA:
        interaction = _collective_coupling(n_atoms, n_max, annihilator, params.g1)
    elif kind is HamiltonianKind.JAYNES_CUMMINGS:
        interaction = _collective_coupling(1, n_max, annihilator, params.g1)
    elif kind is HamiltonianKind.TWO_PHOTON_JC:
        interaction = _collective_coupling(1, n_max, annihilator @ annihilator, params.g1)
    elif kind is HamiltonianKind.INTENSITY_JC:
        root_number = np.diag(np.sqrt(np.arange(space.dimension, dtype=float)))
        interaction = _collective_coupling(1, n_max, annihilator @ root_number, params.g1)
    elif kind is HamiltonianKind.INTENSITY_DICKE:
        root_number = np.diag(np.sqrt(np.arange(space.dimension, dtype=float)))
        interaction = _collective_coupling(
            n_atoms, n_max, annihilator @ root_number, params.g1
        )
    else:  # pragma: no cover
        raise ValueError(f"unknown kind {kind!r}")

    return HermitianOperator(free + interaction)


def parity_operator(n_atoms: int, n_max: int) -> HermitianOperator:
    """Diagonal parity exp[i pi (b'b + sum_j (sz_j + 1)/2)].

    Unitary and involutive; commutes with every kind whose interaction
    changes the total excitation number by an even amount, in particular
    the generalized Dicke builder at any couplings.
    """
    signs = _excitation_diagonal(n_atoms, n_max)
    return HermitianOperator(np.diag((-1.0 + 0.0j) ** signs))


def _excitation_diagonal(n_atoms: int, n_max: int) -> np.ndarray:
    """Diagonal of b'b + sum_j (sz_j + 1)/2 in the composite basis."""
    dim_b = n_max + 1
    qubit_counts = np.array(
        [bin(q).count("1") for q in range(2**n_atoms)], dtype=float
    )
    fock = np.arange(dim_b, dtype=float)
    return (qubit_counts[:, None] + fock[None, :]).ravel()


def total_excitation_operator(n_atoms: int, n_max: int) -> HermitianOperator:
    """b'b + sum_j (sz_j + 1)/2 as a diagonal composite operator."""
    return HermitianOperator(np.diag(_excitation_diagonal(n_atoms, n_max) + 0.0j))


def photon_number_operator(n_atoms: int, n_max: int) -> HermitianOperator:
    """b'b on the composite space (identity on the register factor)."""
    number = np.diag(np.arange(n_max + 1, dtype=complex))
    return HermitianOperator(np.kron(np.eye(2**n_atoms, dtype=complex), number))
