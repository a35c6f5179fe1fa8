import numpy as np
import pytest

from cvqe.jw import (
    PauliHamiltonian,
    dense_hamiltonian,
    ground_state_dense,
    hopping_single_spin,
    jordan_wigner_hamiltonian,
    sector_restrict,
)
from cvqe.lattice import HubbardSpec, grid_edges, preset

# (1 up, 1 down)-sector ground energies at t=1, frozen from an explicit
# fermionic ladder-operator construction of the lattice Hamiltonian
SECTOR_GROUND = {
    ("2x1", 0.0): -2.0,
    ("2x1", 2.0): -1.2360679775,
    ("2x1", 4.0): -0.8284271247,
    ("line:3", 0.0): -2.8284271247,
    ("line:3", 2.0): -2.2794523158,
    ("line:3", 4.0): -2.0,
    ("line:4", 0.0): -3.2360679775,
    ("line:4", 2.0): -2.8197407520,
    ("line:4", 4.0): -2.6249422715,
    ("grid:2x2", 0.0): -4.0,
    ("grid:2x2", 2.0): -3.6272130053,
    ("grid:2x2", 4.0): -3.4185507189,
}


def test_pauli_dense_single_terms():
    h = PauliHamiltonian(1, [(2.0, "Z")])
    np.testing.assert_allclose(h.dense(), np.diag([2.0, -2.0]), atol=1e-14)
    h = PauliHamiltonian(2, [(1.0, "XY")])
    x = np.array([[0, 1], [1, 0]])
    y = np.array([[0, -1j], [1j, 0]])
    np.testing.assert_allclose(h.dense(), np.kron(x, y), atol=1e-14)


def test_dense_is_hermitian_and_real_for_hubbard():
    spec = preset("line:3", t=1.0, U=2.0)
    m = dense_hamiltonian(jordan_wigner_hamiltonian(spec))
    np.testing.assert_allclose(m, m.conj().T, atol=1e-12)
    assert np.max(np.abs(m.imag)) < 1e-12


def test_hopping_single_spin_term_structure():
    # one edge on two modes: bare hop operator (XX + YY)/2, no Z string
    h = hopping_single_spin(2, [(1, 2)])
    terms = {s: c for c, s in h.terms}
    assert terms == {"XX": 0.5, "YY": 0.5}
    # non-adjacent modes pick up a Z string
    h = hopping_single_spin(3, [(1, 3)])
    strings = {s for _, s in h.terms}
    assert strings == {"XZX", "YZY"}


def test_two_site_full_spectrum():
    # all number sectors of the 2-site model at U=2: eigenvalues known in
    # closed form (empty: 0; single particle: +-1; half filling as below)
    spec = preset("2x1", t=1.0, U=2.0)
    m = dense_hamiltonian(jordan_wigner_hamiltonian(spec))
    w = np.linalg.eigvalsh(m)
    root = np.sqrt(5.0)
    expected = sorted(
        [1.0 - root, -1.0, -1.0, 0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0,
         2.0, 3.0, 3.0, 1.0 + root, 4.0]
    )
    np.testing.assert_allclose(w, expected, atol=1e-10)


@pytest.mark.parametrize("name", ["2x1", "line:3", "line:4", "grid:2x2"])
@pytest.mark.parametrize("u", [0.0, 2.0, 4.0])
def test_sector_ground_energies(name, u):
    spec = preset(name, t=1.0, U=u)
    m = dense_hamiltonian(jordan_wigner_hamiltonian(spec))
    sec = sector_restrict(m, 1, 1, spec.n)
    assert sec.dimension == spec.n * spec.n
    energy, _ = ground_state_dense(sec.matrix)
    assert energy == pytest.approx(SECTOR_GROUND[(name, u)], abs=1e-9)


def test_sector_labels_partition_full_space():
    spec = preset("line:3", t=1.0, U=2.0)
    m = dense_hamiltonian(jordan_wigner_hamiltonian(spec))
    total = 0
    for nu in range(spec.n + 1):
        for nd in range(spec.n + 1):
            total += sector_restrict(m, nu, nd, spec.n).dimension
    assert total == 1 << (2 * spec.n)


def test_site_weights_shift_diagonal():
    base = HubbardSpec(2, ((1, 2),), t=1.0, U=0.0)
    shifted = HubbardSpec(2, ((1, 2),), t=1.0, U=0.0, weights=(0.5, -0.5))
    m0 = dense_hamiltonian(jordan_wigner_hamiltonian(base))
    m1 = dense_hamiltonian(jordan_wigner_hamiltonian(shifted))
    d = m1 - m0
    assert np.max(np.abs(d - np.diag(np.diag(d)))) < 1e-12


def test_ground_state_dense_eigenpair():
    rng = np.random.default_rng(9)
    a = rng.normal(size=(12, 12))
    m = (a + a.T) / 2
    energy, vec = ground_state_dense(m.astype(complex))
    np.testing.assert_allclose(m @ vec, energy * vec, atol=1e-10)
    assert energy == pytest.approx(np.linalg.eigvalsh(m)[0], abs=1e-12)


def test_grid_edges_shape():
    edges = grid_edges(2, 2)
    assert sorted(edges) == [(1, 2), (1, 3), (2, 4), (3, 4)]
    assert len(grid_edges(3, 3)) == 12


def test_lattice_validation():
    with pytest.raises(ValueError):
        HubbardSpec(2, ((1, 1),), t=1.0, U=0.0)
    with pytest.raises(ValueError):
        HubbardSpec(2, ((1, 2), (1, 2)), t=1.0, U=0.0)
    with pytest.raises(ValueError):
        HubbardSpec(2, ((1, 3),), t=1.0, U=0.0)
