import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qcaindex.errors import DomainError, SpectrumObstruction
from qcaindex.model import (
    ChainSpec,
    Interval,
    OnsiteRep,
    block,
    brickwork_qca,
    commutes_with_symmetry,
    doubled,
    factor_permutation_qca,
    identity_qca,
    is_unitary_qca,
    layer_groups,
    light_cone,
    random_brickwork,
    shift_qca,
    spi_example_circuit,
    swap_rep,
    symmetric_brickwork,
    verify_locality,
)
from qcaindex.tensor import DenseOperator, reduce_support

Z = np.diag([1.0, -1.0])


def test_chain_spec_validation():
    assert ChainSpec(4, 6).factors == (6,)
    assert ChainSpec(4, 6, (2, 3)).n_factors == 2
    with pytest.raises(DomainError):
        ChainSpec(4, 6, (2, 2))
    with pytest.raises(DomainError):
        ChainSpec(0, 2)


def test_interval_cells_wrap():
    c = ChainSpec(6, 2)
    assert Interval(4, 4).cells(c) == (4, 5, 0, 1)
    left, right = Interval(1, 4).halves()
    assert (left.start, left.length, right.start, right.length) == (1, 2, 3, 2)


def test_onsite_rep_validation():
    with pytest.raises(DomainError):
        OnsiteRep(2, np.diag([1, 1j]))
    rep = OnsiteRep.from_exponents(4, [0, 1, 1, 3])
    assert abs(rep.chi - (1 + 2j - 1j)) < 1e-12


@given(n=st.integers(3, 7), d=st.sampled_from([2, 3]), data=st.data())
def test_shift_then_inverse_is_identity(n, d, data):
    s = data.draw(st.integers(1, n - 1))
    c = ChainSpec(n, d)
    if c.dense_dim > 4096:
        return
    prod = (shift_qca(c, s) @ shift_qca(c, -s)).dense()
    assert np.allclose(prod, np.eye(c.dense_dim), atol=1e-10)


@pytest.mark.parametrize("steps", [1, -1, 2])
def test_shift_convention(steps):
    c = ChainSpec(6, 2)
    U = shift_qca(c, steps)
    for i in range(6):
        img = reduce_support(U.conjugate(DenseOperator((i,), (2,), Z)))
        assert img.support == ((i + steps) % 6,)


def test_brickwork_dense_is_product_of_layers():
    c = ChainSpec(4, 2)
    rng = np.random.default_rng(0)
    from scipy.stats import unitary_group
    g = [unitary_group.rvs(4, random_state=rng) for _ in range(4)]
    U = brickwork_qca(c, g[:2], g[2:])
    layer1 = np.kron(g[0], g[1])
    # second layer acts on (3, 0) and (1, 2); S O_i S^dagger = O_{i-1} moves it there
    sh = shift_qca(c, 1).dense()
    layer2 = sh @ np.kron(g[2], g[3]) @ sh.conj().T
    assert np.allclose(U.dense(), layer2 @ layer1, atol=1e-10)


@given(st.integers(0, 10_000))
def test_apply_agrees_with_dense(seed):
    c = ChainSpec(4, 2)
    U = shift_qca(c, 1) @ random_brickwork(c, seed)
    psi = np.random.default_rng(seed).normal(size=(2,) * 4) + 0j
    assert np.allclose(U.apply(psi).reshape(-1), U.dense() @ psi.reshape(-1))


@given(st.integers(0, 10_000))
def test_constructors_pass_locality_with_declared_xi(seed):
    c = ChainSpec(8, 2)
    rep = OnsiteRep.from_exponents(2, [0, 1])
    for U in (shift_qca(c, 1), shift_qca(c, -2), random_brickwork(c, seed), symmetric_brickwork(c, rep, seed),
              identity_qca(c)):
        assert verify_locality(U, U.xi)
    V = shift_qca(c, 1) @ random_brickwork(c, seed)
    assert V.xi == 3 and verify_locality(V, V.xi)


def test_brickwork_xi_is_tight():
    U = random_brickwork(ChainSpec(8, 2), 3)
    assert not verify_locality(U, 1)
    assert light_cone(U) == (2, 2)


def test_light_cones():
    c = ChainSpec(6, 2)
    assert light_cone(shift_qca(c, 1)) == (0, 1)
    assert light_cone(shift_qca(c, -1)) == (1, 0)
    assert light_cone(identity_qca(c)) == (0, 0)


def test_unitarity_and_dagger():
    U = shift_qca(ChainSpec(4, 2), 1) @ random_brickwork(ChainSpec(4, 2), 1)
    assert is_unitary_qca(U)
    assert np.allclose(U.dag().dense(), U.dense().conj().T)


def test_symmetry_commutation():
    c = ChainSpec(6, 2)
    rep = OnsiteRep.from_exponents(2, [0, 1])
    assert commutes_with_symmetry(symmetric_brickwork(c, rep, 2), rep)
    assert commutes_with_symmetry(shift_qca(c, 1), rep)
    assert not commutes_with_symmetry(random_brickwork(c, 2), rep)


def test_factor_permutation_moves_factors():
    c = ChainSpec(5, 6, (2, 3))
    U = factor_permutation_qca(c, [1, 0])
    img = reduce_support(U.conjugate(DenseOperator((0,), (2,), Z)))
    assert img.support == (2,)          # factor 0 of cell 1
    assert light_cone(U) == (0, 1)


def test_block_shift():
    c = ChainSpec(6, 2)
    B = block(shift_qca(c, 2), 2)
    assert B.chain.n_sites == 3 and B.chain.d == 4
    assert light_cone(B) == (0, 1)


def test_layer_groups_recompose():
    c = ChainSpec(4, 2)
    U = shift_qca(c, 1) @ random_brickwork(c, 0)
    parts = layer_groups(U)
    prod = parts[-1]
    for p in reversed(parts[:-1]):
        prod = prod @ p
    assert np.allclose(prod.dense(), U.dense())


def test_doubled_chain_and_swap_rep():
    U = random_brickwork(ChainSpec(4, 2), 0)
    D = doubled(U)
    assert D.chain.d == 4 and D.chain.n_sites == 4
    assert np.allclose(D.dense(), np.kron(U.dense(), U.dense()).reshape([2] * 16).transpose(
        [0, 4, 1, 5, 2, 6, 3, 7, 8, 12, 9, 13, 10, 14, 11, 15]).reshape(256, 256))
    s = swap_rep(2)
    assert np.allclose(s.mu1, np.eye(4)[[0, 2, 1, 3]])


def test_spi_example_rejects_mismatched_spectra():
    rep = OnsiteRep.from_exponents(3, [0, 1, 1])
    with pytest.raises(SpectrumObstruction):
        spi_example_circuit(rep, ((3, 0, 0), (3, 0, 0)))


def test_spi_example_is_symmetric_qca():
    rep = OnsiteRep.from_exponents(3, [0, 1, 1])
    U = spi_example_circuit(rep, ((1, 0, 2), (1, 0, 2)), n_sites=6)
    assert commutes_with_symmetry(U, rep)
    assert verify_locality(U, U.xi)
