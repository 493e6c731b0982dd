import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from qcaindex.errors import DomainError, NotSymmetric, NumericalFailure
from qcaindex.model import ChainSpec, Interval, OnsiteRep, random_brickwork, shift_qca, spi_example_circuit, \
    symmetric_brickwork
from qcaindex.spi import (
    _padded_trace,
    indices_from_decomposition,
    lr_decompose,
    refined_spi_g,
    rep_normalized,
    snap_complex,
    spi_g,
    z2_indices,
    z2_trace_formula,
)
from qcaindex.tensor import DenseOperator

REP3 = OnsiteRep.from_exponents(3, [0, 1, 1])
REP4 = OnsiteRep.from_exponents(2, [0, 0, 0, 1])


@pytest.fixture(scope="module")
def z3_example():
    U = spi_example_circuit(REP3, ((1, 0, 2), (1, 0, 2)))
    return U, lr_decompose(U, REP3)


# ---- frozen values of the Z_3 example

def test_z3_example_indices(z3_example):
    U, dec = z3_example
    vals = indices_from_decomposition(dec, 1.0)
    for g in range(3):
        assert abs(vals.ind_g[g] - 1) < 1e-8
    assert abs(vals.rind_g[0] - 1) < 1e-8
    for g in (1, 2):
        assert abs(vals.rind_g[g] + 1) < 1e-8
        assert snap_complex(vals.rind_g[g]) == (Fraction(-1), Fraction(0))


def test_z3_example_other_window():
    U = spi_example_circuit(REP3, ((1, 0, 2), (1, 0, 2)))
    assert abs(refined_spi_g(U, REP3, Interval(0, 8), 1, ind=1.0) + 1) < 1e-8
    assert abs(spi_g(U, REP3, Interval(0, 8), 2, ind=1.0) - 1) < 1e-8


def test_factorization_is_exact(z3_example):
    _, dec = z3_example
    assert max(dec.residual.values()) < 1e-10


def test_trace_product_invariant(z3_example):
    _, dec = z3_example
    for g in range(3):
        ul, ur = dec.reference(g)
        dim = max(x.dim for x in (dec.L[g], dec.R[g], ul, ur))
        lhs = _padded_trace(dec.L[g], dim) * _padded_trace(dec.R[g], dim)
        rhs = _padded_trace(ul, dim) * _padded_trace(ur, dim)
        assert abs(lhs - rhs) <= 1e-9 * max(1.0, abs(rhs))


@given(st.lists(st.floats(0, 2 * math.pi), min_size=3, max_size=3))
def test_spis_ignore_boundary_rephasing(z3_example, phases):
    _, dec = z3_example
    base = indices_from_decomposition(dec, 1.0)
    moved = indices_from_decomposition(dec.rephased(dict(enumerate(phases))), 1.0)
    for g in base.ind_g:
        assert abs(moved.ind_g[g] - base.ind_g[g]) < 1e-9
    for g in base.rind_g:
        assert abs(moved.rind_g[g] - base.rind_g[g]) < 1e-9


# ---- Z_2 indices

@pytest.mark.parametrize("steps,expected", [(1, (4, 2)), (-1, (Fraction(1, 4), Fraction(1, 2)))])
def test_z2_indices_of_shift(steps, expected):
    U = shift_qca(ChainSpec(6, 4), steps)
    pi0, pi1 = z2_indices(U, REP4)
    assert (pi0.fraction, pi1.fraction) == expected
    ratio = z2_trace_formula(U, REP4, Interval(0, 1), Interval(1, 1))
    assert abs(ratio - float(pi0.fraction / pi1.fraction)) < 1e-10


def test_z2_symmetric_circuit_is_trivial():
    rep = OnsiteRep.from_exponents(2, [0, 0, 1])
    pi0, pi1 = z2_indices(symmetric_brickwork(ChainSpec(12, 3), rep, 5), rep)
    assert pi0.fraction == 1 and pi1.fraction == 1


def test_traceless_generator_leaves_pi1_undefined():
    rep = OnsiteRep.from_exponents(2, [0, 1])
    pi0, pi1 = z2_indices(symmetric_brickwork(ChainSpec(12, 2), rep, 1), rep)
    assert pi0.fraction == 1 and pi1 is None


def test_non_symmetric_qca_is_rejected():
    rep = OnsiteRep.from_exponents(2, [0, 1])
    with pytest.raises(NotSymmetric):
        lr_decompose(random_brickwork(ChainSpec(12, 2), 0), rep)


def test_window_budget():
    rep = OnsiteRep.from_exponents(2, [0, 1])
    with pytest.raises(DomainError):
        lr_decompose(random_brickwork(ChainSpec(6, 2), 0), rep)
    with pytest.raises(DomainError):
        z2_indices(shift_qca(ChainSpec(6, 3), 1), REP3)


# ---- helpers

def test_rep_normalized():
    w = np.exp(2j * np.pi / 3)
    R = DenseOperator((0,), (3,), 1.7j * np.diag([1, w, w]))
    Rn = rep_normalized(R, 3)
    assert np.allclose(np.linalg.matrix_power(Rn.matrix, 3), np.eye(3))
    with pytest.raises(NumericalFailure):
        rep_normalized(DenseOperator((0,), (2,), np.diag([1, 1j])), 2)


@pytest.mark.parametrize("z,expected", [(-1 + 1e-12j, (Fraction(-1), Fraction(0))),
                                        (0.5 - 0.25j, (Fraction(1, 2), Fraction(-1, 4))),
                                        (math.sqrt(2), None)])
def test_snap_complex(z, expected):
    assert snap_complex(z) == expected
