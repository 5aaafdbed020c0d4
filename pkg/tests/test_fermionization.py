import numpy as np
import pytest

from dicketherm.exact_diag import thermal_solve
from dicketherm.fermionization import (
    build_fermion_dicke,
    fermion_mode_ops,
    fermion_number_diagonal,
    pf_green_function,
    physical_projector,
    verify_trace_identity,
)
from dicketherm.operators import (
    DimensionLimitError,
    HamiltonianKind,
    ModelParams,
    build_hamiltonian,
)


def test_mode_ops_anticommutation():
    pairs = fermion_mode_ops(2)
    assert len(pairs) == 2  # one (alpha, beta) pair per atom
    modes = [op for pair in pairs for op in pair]
    dim = modes[0].shape[0]
    assert dim == 4**2
    for i, ai in enumerate(modes):
        for j, aj in enumerate(modes):
            anti = ai @ aj.conj().T + aj.conj().T @ ai
            expected = np.eye(dim) if i == j else np.zeros((dim, dim))
            assert np.allclose(anti, expected, atol=1e-14)
            assert np.allclose(ai @ aj + aj @ ai, 0.0, atol=1e-14)


def test_projector_idempotent_with_expected_rank():
    proj = physical_projector(2, 6)
    m = proj.matrix
    assert np.allclose(m @ m, m)
    assert int(round(np.trace(m).real)) == 2**2 * 7


def test_projector_commutes_with_hamiltonian():
    p = ModelParams(1.0, 0.9, g1=0.5, g2=0.3)
    hf = build_fermion_dicke(p, 2, 5)
    proj = physical_projector(2, 5)
    comm = hf.matrix @ proj.matrix - proj.matrix @ hf.matrix
    assert np.max(np.abs(comm)) < 1e-12


def test_decoupled_unphysical_states_have_zero_qubit_energy():
    # with couplings off, the doubly occupied and empty per-atom sectors
    # carry no qubit energy, so their spectrum is the bare Fock ladder
    p = ModelParams(1.0, 1.0)
    hf = build_fermion_dicke(p, 1, 3)
    proj = physical_projector(1, 3)
    unphys = np.where(np.diag(proj.matrix).real < 0.5)[0]
    sub = hf.matrix[np.ix_(unphys, unphys)]
    ev = np.sort(np.linalg.eigvalsh(sub))
    ladder = np.sort([1.0 * n for n in range(4)] * 2)
    assert np.allclose(ev, ladder, atol=1e-12)


def test_decoupled_physical_spectrum():
    p = ModelParams(1.0, 1.0)
    hf = build_fermion_dicke(p, 1, 3)
    proj = physical_projector(1, 3)
    phys = np.where(np.diag(proj.matrix).real > 0.5)[0]
    ev = np.sort(np.linalg.eigvalsh(hf.matrix[np.ix_(phys, phys)]))
    expected = np.sort([s + 1.0 * n for s in (-0.5, 0.5) for n in range(4)])
    assert np.allclose(ev, expected, atol=1e-12)


def test_physical_subspace_matches_spin_model():
    p = ModelParams(1.0, 1.0, g1=0.3, g2=0.2)
    hf = build_fermion_dicke(p, 2, 6)
    proj = physical_projector(2, 6)
    phys = np.where(np.diag(proj.matrix).real > 0.5)[0]
    ev_f = np.sort(np.linalg.eigvalsh(hf.matrix[np.ix_(phys, phys)]))
    hs = build_hamiltonian(HamiltonianKind.GENERALIZED_DICKE, p, 2, 6)
    ev_s = np.sort(np.linalg.eigvalsh(hs.matrix))
    assert np.max(np.abs(ev_f - ev_s)) < 1e-10


def test_trace_identity_decoupled_closed_form():
    # for one decoupled atom both sides reduce to 2cosh(beta*Omega/2) times
    # the boson factor, so the residual is pure round-off
    res = verify_trace_identity(ModelParams(1.0, 1.0), 1, 4, 1.0)
    assert res < 1e-12


@pytest.mark.parametrize("beta", [0.5, 2.0])
def test_trace_identity_coupled(beta):
    res = verify_trace_identity(ModelParams(1.0, 1.0, g1=0.4, g2=0.3), 2, 8, beta)
    assert res < 1e-8


def test_trace_identity_rejects_bad_beta():
    with pytest.raises(ValueError):
        verify_trace_identity(ModelParams(1.0, 1.0), 1, 4, 0.0)


def test_unphysical_sector_phased_trace_cancels():
    p = ModelParams(1.0, 0.8, g1=0.4, g2=0.2)
    n_atoms, n_max, beta = 2, 5, 1.3
    hf = build_fermion_dicke(p, n_atoms, n_max)
    proj = physical_projector(n_atoms, n_max)
    nfull = np.repeat(fermion_number_diagonal(n_atoms), n_max + 1)
    ev, vec = np.linalg.eigh(hf.matrix)
    boltz = (vec * np.exp(-beta * ev)) @ vec.conj().T
    phase = np.exp(-1j * np.pi * nfull / 2.0)
    unphys = np.diag(proj.matrix).real < 0.5
    contribution = np.sum(phase[unphys] * np.diag(boltz)[unphys])
    assert abs(contribution) < 1e-10


def test_oracle_consistency_physical_trace_vs_thermal_solve():
    p = ModelParams(1.0, 1.0, g1=0.3, g2=0.2)
    n_atoms, n_max, beta = 2, 6, 1.3
    hf = build_fermion_dicke(p, n_atoms, n_max)
    proj = physical_projector(n_atoms, n_max)
    phys = np.where(np.diag(proj.matrix).real > 0.5)[0]
    ev = np.linalg.eigvalsh(hf.matrix[np.ix_(phys, phys)])
    z_phys = np.sum(np.exp(-beta * ev))
    hs = build_hamiltonian(HamiltonianKind.GENERALIZED_DICKE, p, n_atoms, n_max)
    z_ed = thermal_solve(hs, beta).Z
    assert abs(z_phys - z_ed) / z_ed < 1e-10


def test_pf_green_function_anchor():
    assert pf_green_function(0, 0.0, 2.0 * np.pi) == pytest.approx(-4.0j)


def test_pf_green_function_conjugation_and_decay():
    n, eps, beta = 3, 0.7, 1.9
    p_n = (2 * n + 1) * np.pi / beta
    # conjugation at real energy flips the frequency together with the
    # imaginary chemical-potential shift
    manual = 1.0 / (-1j * p_n - eps + 1j * np.pi / (2.0 * beta))
    assert pf_green_function(n, eps, beta).conjugate() == pytest.approx(manual)
    big = 10**6
    assert abs(pf_green_function(big, eps, beta)) * big == pytest.approx(
        beta / (2.0 * np.pi), rel=1e-3
    )


def test_fermion_dicke_dimension_guard():
    with pytest.raises(DimensionLimitError):
        build_fermion_dicke(ModelParams(1.0, 1.0), 4, 6)
