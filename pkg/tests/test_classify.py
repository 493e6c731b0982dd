from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.stats import unitary_group

from qcaindex.classify import (
    ClassificationWitness,
    dense_z2_indices,
    find_intertwiner,
    smooth,
    symmetric_fdqc_check,
    witness_to_qca,
    z2_enumerate,
    z2_solve,
)
from qcaindex.errors import DomainError, NoIntertwiner, NoSolution
from qcaindex.model import ChainSpec, OnsiteRep, identity_qca, shift_qca, symmetric_brickwork
from qcaindex.reps import RepSpectrum, spectrum_matrix


# ---- frozen oracles

def test_z2_solve_oracle():
    w = z2_solve(4, 2, 1, 2)
    assert w.as_tuple() == (1, 2, 4, 0, 9, 7)
    assert w.satisfies(4, 2, 1, 2) and w.consistent(4, 2)
    assert w.indices(4, 2) == (1, 2)


def test_z2_solve_traceless_generator():
    with pytest.raises(NoSolution):
        z2_solve(2, 0, 1, 2)
    assert z2_solve(2, 0, 2, 1).as_tuple() == (1, 2, 2, 2, 1, 1)


def test_z2_solve_d3():
    w = z2_solve(3, 1, 3, 1)
    assert w.as_tuple() == (0, 1, 2, 1, 1, 0)
    with pytest.raises(NoSolution):
        z2_solve(3, 1, 1, 3)


def test_z2_enumerate_oracle():
    got = z2_enumerate(4, 2, 8)
    powers = {Fraction(2) ** k for k in range(-3, 4)}
    assert len(got) == 49
    assert {p1 for _, p1 in got} == powers
    assert {p0 for p0, _ in got} == powers


def test_traceless_generator_forces_trivial_pi1():
    assert {p1 for _, p1 in z2_enumerate(2, 0, 6)} == {1}


def test_invalid_z2_data():
    with pytest.raises(DomainError):
        z2_solve(4, 1, 1, 1)
    with pytest.raises(DomainError):
        z2_solve(2, 4, 1, 1)


@pytest.mark.parametrize("x,base,expected", [(Fraction(3, 8), 6, True), (Fraction(5, 2), 6, False),
                                             (Fraction(1), 2, True), (Fraction(1, 9), 3, True)])
def test_smooth(x, base, expected):
    assert smooth(x, base) is expected


# ---- properties

_CLASSES = sorted((d, chi, p0, p1) for d, chi in ((2, 2), (3, 1), (4, 2), (4, 0), (6, 2))
                  for p0, p1 in z2_enumerate(d, chi, 6))


@given(st.sampled_from(_CLASSES))
def test_solutions_satisfy_conditions(cls):
    d, chi, pi0, pi1 = cls
    w = z2_solve(d, chi, pi0, pi1, max_exponent=16)
    assert w.satisfies(d, chi, pi0, pi1)
    assert w.consistent(d, chi)


@given(st.sampled_from([(4, 2, 6), (3, 1, 6), (6, 2, 4)]))
def test_enumerated_classes_are_smooth(data):
    d, chi, bound = data
    for p0, p1 in z2_enumerate(d, chi, bound):
        assert smooth(p0, d) and smooth(p1, abs(chi))


# ---- construction round trip

@pytest.mark.parametrize("exps,witness,expected", [
    ([0, 0], (0, 1, 2, 0, 1, 0), (2, 2)),
    ([0, 0], (1, 0, 2, 0, 1, 0), (1, 1)),
    ([0, 0, 1], (0, 1, 2, 1, 1, 0), (3, 1)),
])
def test_witness_round_trip(exps, witness, expected):
    rep = OnsiteRep.from_exponents(2, exps)
    W = witness_to_qca(ClassificationWitness(*witness), rep)
    assert W.symbolic == expected
    for computed in (W.numeric, W.dense):
        assert computed is not None
        got = tuple(None if x is None else x.fraction for x in computed)
        assert got[0] == expected[0]
        if expected[1] is not None:
            assert got[1] == expected[1]


def test_traceless_witness_round_trip():
    W = witness_to_qca(z2_solve(2, 0, 2, 1), OnsiteRep.from_exponents(2, [0, 1]))
    assert W.symbolic == (2, None)
    assert W.numeric[0].fraction == 2 and W.numeric[1] is None


def test_large_witness_is_symbolic_only():
    W = witness_to_qca(z2_solve(4, 2, 1, 2), OnsiteRep.from_exponents(2, [0, 0, 0, 1]))
    assert W.symbolic == (1, 2)
    assert W.qca.chain.factors == (4, 4, 16)
    assert W.dense is None


def test_witness_must_be_consistent():
    with pytest.raises(DomainError):
        witness_to_qca(ClassificationWitness(0, 1, 2, 0, 1, 0), OnsiteRep.from_exponents(2, [0, 1]))


def test_dense_indices_of_shift():
    rep = OnsiteRep.from_exponents(2, [0, 0, 1])
    p0, p1 = dense_z2_indices(shift_qca(ChainSpec(6, 3), 1), rep)
    assert (p0.fraction, p1.fraction) == (3, 1)


# ---- intertwiners and the FDQC spectrum check

@given(st.lists(st.integers(0, 3), min_size=3, max_size=3).filter(lambda a: sum(a) > 0), st.integers(0, 10_000))
def test_intertwiner_found_for_conjugates(a, seed):
    s = RepSpectrum(3, tuple(a))
    m = spectrum_matrix(s)
    dim = m.shape[0]
    W = unitary_group.rvs(dim, random_state=seed) if dim > 1 else np.eye(1)
    res = find_intertwiner([np.linalg.matrix_power(m, g) for g in range(3)],
                           [W @ np.linalg.matrix_power(m, g) @ W.conj().T for g in range(3)])
    assert res.residual < 1e-8
    assert res.shift == 0


@given(st.lists(st.integers(0, 3), min_size=3, max_size=3).filter(lambda a: sum(a) > 0), st.integers(0, 2))
def test_intertwiner_up_to_one_dim_rep(a, k):
    s = RepSpectrum(3, tuple(a))
    res = find_intertwiner(spectrum_matrix(s), spectrum_matrix(s.shifted(k)), 3)
    assert res.residual < 1e-8
    assert spectrum_matrix(s.shifted(res.shift)).shape == spectrum_matrix(s).shape
    assert s.shifted(res.shift).a == s.shifted(k).a


@given(st.lists(st.integers(0, 3), min_size=3, max_size=3).filter(lambda a: sum(a) > 0),
       st.lists(st.integers(0, 3), min_size=3, max_size=3).filter(lambda a: sum(a) > 0))
def test_intertwiner_iff_spectra_match(a, b):
    sa, sb = RepSpectrum(3, tuple(a)), RepSpectrum(3, tuple(b))
    related = any(sa.shifted(k).a == sb.a for k in range(3))
    try:
        find_intertwiner(spectrum_matrix(sa), spectrum_matrix(sb), 3)
        found = True
    except (NoIntertwiner, DomainError):
        found = False
    assert found == related


def test_fdqc_check():
    rep = OnsiteRep.from_exponents(2, [0, 1])
    assert symmetric_fdqc_check(symmetric_brickwork(ChainSpec(12, 2), rep, 0), rep).ok
    rep4 = OnsiteRep.from_exponents(2, [0, 0, 0, 1])
    assert symmetric_fdqc_check(identity_qca(ChainSpec(6, 4)), rep4).ok
    assert not symmetric_fdqc_check(shift_qca(ChainSpec(6, 4), 1), rep4).ok
