import numpy as np
import pytest

from dicketherm.operators import (
    BosonSpace,
    DimensionLimitError,
    HamiltonianKind,
    HermitianOperator,
    ModelParams,
    QubitRegister,
    build_hamiltonian,
    make_boson_ops,
    make_spin_ops,
    parity_operator,
    photon_number_operator,
    total_excitation_operator,
)

ALL_KINDS = list(HamiltonianKind)
SINGLE_ATOM_KINDS = (
    HamiltonianKind.JAYNES_CUMMINGS,
    HamiltonianKind.TWO_PHOTON_JC,
    HamiltonianKind.INTENSITY_JC,
)


def test_model_params_validation():
    with pytest.raises(ValueError):
        ModelParams(0.0, 1.0)
    with pytest.raises(ValueError):
        ModelParams(1.0, -1.0)
    with pytest.raises(ValueError):
        ModelParams(1.0, 1.0, g1=-0.1)
    with pytest.raises(ValueError):
        ModelParams(1.0, 1.0, g2=-0.1)
    p = ModelParams(1.0, 2.0, g1=0.3, g2=0.4)
    with pytest.raises(Exception):
        p.g1 = 1.0  # frozen


def test_boson_ops_defining_action():
    b, bdag = make_boson_ops(BosonSpace(1))
    state1 = np.array([0.0, 1.0])
    assert np.allclose(b @ state1, [1.0, 0.0])
    assert np.allclose(b @ np.array([1.0, 0.0]), 0.0)
    assert np.allclose(bdag, b.conj().T)


def test_boson_commutator_truncation():
    b, bdag = make_boson_ops(BosonSpace(3))
    comm = b @ bdag - bdag @ b
    # identity on the subspace below the truncation edge
    assert np.allclose(comm[:3, :3], np.eye(3))
    # the edge element is fixed by the truncated pair
    assert comm[3, 3] == pytest.approx(-3.0)


def test_boson_ops_reject_trivial_space():
    with pytest.raises(ValueError):
        make_boson_ops(BosonSpace(0))


def test_spin_ops_single_site():
    reg = QubitRegister(1)
    sz, sp, sm = make_spin_ops(reg, 0)
    assert sorted(np.linalg.eigvalsh(sz)) == pytest.approx([-1.0, 1.0])
    assert np.allclose(sp @ sm + sm @ sp, np.eye(2))
    assert np.allclose(sp @ sm - sm @ sp, sz)
    assert np.allclose(sz @ sp - sp @ sz, 2.0 * sp)
    assert np.allclose(sz @ sm - sm @ sz, -2.0 * sm)


def test_spin_ops_distinct_sites_commute():
    reg = QubitRegister(2)
    _, sp0, _ = make_spin_ops(reg, 0)
    _, _, sm1 = make_spin_ops(reg, 1)
    assert np.allclose(sp0 @ sm1 - sm1 @ sp0, 0.0)


def test_spin_ops_site_range():
    with pytest.raises(IndexError):
        make_spin_ops(QubitRegister(2), 2)


@pytest.mark.parametrize("n_atoms", [1, 2, 3, 4])
def test_commutation_relations_exact(n_atoms):
    reg = QubitRegister(n_atoms)
    for site in range(n_atoms):
        sz, sp, sm = make_spin_ops(reg, site)
        assert np.array_equal(sp @ sm - sm @ sp, sz)
        assert np.array_equal(sz @ sp - sp @ sz, 2.0 * sp)


@pytest.mark.parametrize("kind", ALL_KINDS)
def test_builders_hermitian_real_spectrum(kind):
    n_atoms = 1 if kind in SINGLE_ATOM_KINDS else 2
    p = ModelParams(1.0, 0.9, g1=0.4, g2=0.3)
    h = build_hamiltonian(kind, p, n_atoms, 5)
    m = h.matrix
    assert np.max(np.abs(m - m.conj().T)) < 1e-12
    ev = h.eigenvalues()
    assert np.all(np.diff(ev) >= 0.0)


def test_jaynes_cummings_dressed_doublets():
    g = 0.25
    p = ModelParams(1.0, 1.0, g1=g)
    h = build_hamiltonian(HamiltonianKind.JAYNES_CUMMINGS, p, 1, 6)
    ev = np.sort(np.linalg.eigvalsh(h.matrix))
    # ground state plus resonant doublets omega0*(n + 1/2) -/+ g*sqrt(n+1)
    expected = [-0.5]
    for n in range(3):
        center = 1.0 * (n + 0.5)
        expected += [center - g * np.sqrt(n + 1), center + g * np.sqrt(n + 1)]
    assert ev[: len(expected)] == pytest.approx(sorted(expected), abs=1e-12)


def test_decoupled_spectrum_is_direct_sum():
    p = ModelParams(1.0, 0.7, g1=0.0, g2=0.0)
    h = build_hamiltonian(HamiltonianKind.GENERALIZED_DICKE, p, 2, 4)
    ev = np.sort(np.linalg.eigvalsh(h.matrix))
    expected = np.sort(
        [
            1.0 * n + 0.35 * m
            for n in range(5)
            for m in (-2, 0, 0, 2)  # multiplicity 2 for the m=0 sector
        ]
    )
    assert np.allclose(ev, expected, atol=1e-12)


def test_generalized_dicke_parity_commutes():
    p = ModelParams(1.0, 1.2, g1=0.8, g2=0.5)
    h = build_hamiltonian(HamiltonianKind.GENERALIZED_DICKE, p, 2, 8)
    pi = parity_operator(2, 8)
    comm = h.matrix @ pi.matrix - pi.matrix @ h.matrix
    assert np.max(np.abs(comm)) < 1e-12


def test_rwa_conserves_total_excitation():
    p = ModelParams(1.0, 0.9, g1=0.6)
    h = build_hamiltonian(HamiltonianKind.DICKE_RWA, p, 3, 5)
    nex = total_excitation_operator(3, 5)
    comm = h.matrix @ nex.matrix - nex.matrix @ h.matrix
    assert np.max(np.abs(comm)) < 1e-12


def test_generalized_dicke_reduces_to_rwa():
    p = ModelParams(1.0, 0.8, g1=0.5, g2=0.0)
    a = build_hamiltonian(HamiltonianKind.GENERALIZED_DICKE, p, 2, 6)
    b = build_hamiltonian(HamiltonianKind.DICKE_RWA, p, 2, 6)
    assert np.array_equal(a.matrix, b.matrix)


def test_single_atom_kinds_reject_multiple_atoms():
    p = ModelParams(1.0, 1.0, g1=0.2)
    for kind in SINGLE_ATOM_KINDS:
        with pytest.raises(ValueError):
            build_hamiltonian(kind, p, 2, 4)


def test_dimension_guard():
    with pytest.raises(DimensionLimitError):
        build_hamiltonian(
            HamiltonianKind.GENERALIZED_DICKE, ModelParams(1.0, 1.0), 10, 30
        )


def test_parity_operator_signs_and_involution():
    pi = parity_operator(1, 1)
    m = pi.matrix
    assert np.allclose(m, np.diag(np.diag(m)))
    assert np.allclose(m @ m, np.eye(4))
    assert np.trace(m) == pytest.approx(0.0)
    signs = sorted(np.diag(m).real)
    assert signs == pytest.approx([-1.0, -1.0, 1.0, 1.0])


def test_photon_number_operator_diagonal():
    n_op = photon_number_operator(1, 3)
    diag = np.diag(n_op.matrix).real
    assert sorted(set(np.round(diag, 12))) == [0.0, 1.0, 2.0, 3.0]


def test_hermitian_operator_rejects_non_hermitian():
    from dicketherm.operators import NotHermitianError

    with pytest.raises(NotHermitianError):
        HermitianOperator(np.array([[0.0, 1.0], [0.0, 0.0]]))
