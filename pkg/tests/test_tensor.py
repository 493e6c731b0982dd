import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.stats import unitary_group

from qcaindex.errors import DomainError, NotFactorizable
from qcaindex.tensor import (
    DenseOperator,
    conjugate,
    normalized_trace,
    operator_basis,
    overlap,
    partial_trace,
    permutation_operator,
    rank1_factorize,
    reduce_support,
    site_basis,
    split_product,
)


def rand_op(support, dims, seed):
    rng = np.random.default_rng(seed)
    dim = int(np.prod(dims))
    m = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return DenseOperator(tuple(support), tuple(dims), m)


def rand_unitary(support, dims, seed):
    dim = int(np.prod(dims))
    return DenseOperator(tuple(support), tuple(dims), unitary_group.rvs(dim, random_state=seed))


@pytest.mark.parametrize("d", [2, 3, 4])
def test_site_basis_is_orthonormal(d):
    b = site_basis(d)
    gram = np.array([[normalized_trace(x.conj().T @ y) for y in b] for x in b])
    assert len(b) == d * d
    assert np.allclose(gram, np.eye(d * d), atol=1e-12)
    assert np.allclose(b[0], np.eye(d))


def test_operator_basis_mixed_dims():
    basis = operator_basis((3, 7), (2, 3))
    assert len(basis) == 36
    assert abs(overlap(basis[5], basis[5]) - 1) < 1e-12
    assert abs(overlap(basis[5], basis[6])) < 1e-12


def test_shape_validation():
    with pytest.raises(DomainError):
        DenseOperator((0, 1), (2, 2), np.eye(3))
    with pytest.raises(DomainError):
        DenseOperator((0, 0), (2, 2), np.eye(4))


@given(st.integers(0, 10_000), st.sampled_from([(2, 2), (2, 3), (3, 2)]))
def test_extend_then_reorder_matches_kron(seed, dims):
    a = rand_op((5,), (dims[0],), seed)
    ext = a.extend((2, 5), {2: dims[1]})
    assert ext.support == (2, 5)
    assert np.allclose(ext.matrix, np.kron(np.eye(dims[1]), a.matrix))
    assert np.allclose(ext.reorder((5, 2)).matrix, np.kron(a.matrix, np.eye(dims[1])))


@given(st.integers(0, 10_000))
def test_partial_trace_of_product(seed):
    a = rand_op((0,), (2,), seed)
    b = rand_op((1, 2), (3, 2), seed + 1)
    ab = a.kron(b)
    red = partial_trace(ab, [1, 2])
    assert np.allclose(red.matrix, np.trace(a.matrix) * b.matrix)


@given(st.integers(0, 10_000))
def test_conjugate_matches_dense_reference(seed):
    op = rand_op((0, 2), (2, 2), seed)
    gate = rand_unitary((2, 1), (2, 2), seed + 7)
    got = conjugate(op, gate).sorted()
    full_op = op.extend((0, 1, 2), {1: 2}).matrix
    full_gate = gate.extend((0, 1, 2), {0: 2}).matrix
    assert np.allclose(got.matrix, full_gate.conj().T @ full_op @ full_gate, atol=1e-12)


def test_conjugate_disjoint_is_noop():
    op = rand_op((0,), (2,), 1)
    assert conjugate(op, rand_unitary((3, 4), (2, 2), 2)) is op


@given(st.integers(0, 10_000), st.sampled_from([(2, 2), (2, 3), (4, 2)]))
def test_rank1_factorize_recovers_product(seed, dims):
    L = rand_op((0,), (dims[0],), seed)
    R = rand_op((1,), (dims[1],), seed + 1)
    fl, fr, res = rank1_factorize(L.kron(R), 1)
    assert res < 1e-10
    assert np.allclose(fl.kron(fr).matrix, L.kron(R).matrix)
    assert abs(np.trace(fr.matrix).imag) < 1e-10 and np.trace(fr.matrix).real >= 0


def test_rank1_factorize_rejects_entangling_operator():
    cnot = np.eye(4)[[0, 1, 3, 2]]
    with pytest.raises(NotFactorizable):
        rank1_factorize(DenseOperator((0, 1), (2, 2), cnot), 1)


def test_reduce_support_drops_identity_sites():
    z = DenseOperator((4,), (2,), np.diag([1.0, -1.0]))
    ext = z.extend((1, 4, 6), {1: 3, 6: 2})
    assert reduce_support(ext).support == (4,)


def test_split_product_three_factors():
    parts = [rand_unitary((k,), (2,), k) for k in range(3)]
    op = parts[0].kron(parts[1]).kron(parts[2])
    got = split_product(op)
    assert [p.support for p in got] == [(0,), (1,), (2,)]
    prod = got[0].kron(got[1]).kron(got[2])
    assert np.allclose(prod.matrix, op.matrix)


@given(st.permutations(list(range(4))))
def test_permutation_operator_relabels_sites(perm):
    P = permutation_operator(perm, 2)
    z = np.diag([1.0, -1.0])
    for j in range(4):
        oj = DenseOperator((j,), (2,), z).extend(tuple(range(4)), {k: 2 for k in range(4)})
        target = DenseOperator((perm[j],), (2,), z).extend(tuple(range(4)), {k: 2 for k in range(4)})
        assert np.allclose(P.matrix @ oj.matrix @ P.matrix.conj().T, target.matrix)


def test_permutation_operator_rejects_dimension_mismatch():
    with pytest.raises(DomainError):
        permutation_operator([1, 0], (2, 3))
