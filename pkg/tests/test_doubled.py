from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qcaindex.doubled import doubled_z2, extract_boundary_ops, index_via_doubled
from qcaindex.gnvw import gnvw_index
from qcaindex.model import ChainSpec, OnsiteRep, identity_qca, random_brickwork, shift_qca, symmetric_brickwork


@pytest.mark.parametrize("make,expected", [
    (lambda c: identity_qca(c), 1),
    (lambda c: shift_qca(c, 1), 2),
    (lambda c: shift_qca(c, -1), Fraction(1, 2)),
    (lambda c: shift_qca(c, 1) @ random_brickwork(c, 0), 2),
    (lambda c: random_brickwork(c, 1) @ shift_qca(c, -1), Fraction(1, 2)),
])
def test_doubled_index_frozen(make, expected):
    U = make(ChainSpec(6, 2))
    res = index_via_doubled(U)
    assert res.ind.fraction == expected
    assert abs(res.inverse_from_R * float(expected) - 1) < 1e-9
    assert abs(res.right_ratio - float(expected)) < 1e-9


def test_doubled_index_d3():
    assert index_via_doubled(shift_qca(ChainSpec(6, 3), 1)).ind.fraction == 3


def test_boundary_operators_join_up():
    ops = extract_boundary_ops(shift_qca(ChainSpec(6, 2), 1) @ random_brickwork(ChainSpec(6, 2), 3))
    assert ops.junction_residual < 1e-10
    assert abs(ops.theta) < 1e-10


@given(st.integers(0, 10_000), st.sampled_from([1, -1]))
def test_doubled_matches_gnvw_and_z2(seed, steps):
    c = ChainSpec(6, 2)
    U = shift_qca(c, steps) @ random_brickwork(c, seed)
    ind = gnvw_index(U).fraction
    assert index_via_doubled(U).ind.fraction == ind
    p0, p1 = doubled_z2(U)
    assert p0.fraction == ind ** 2
    assert p1.fraction == ind


def test_symmetric_circuit_doubled():
    rep = OnsiteRep.from_exponents(2, [0, 1])
    c = ChainSpec(6, 2)
    U = shift_qca(c, 1) @ symmetric_brickwork(c, rep, 2)
    assert index_via_doubled(U).ind.fraction == 2
