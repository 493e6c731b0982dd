import math
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qcaindex.errors import DomainError, SnapFailure
from qcaindex.gnvw import (
    auto_placement,
    check_pair,
    eta_overlap,
    gnvw_index,
    gnvw_ratio,
    rational_snap,
    resolve_placement,
)
from qcaindex.model import (
    ChainSpec,
    Interval,
    block,
    factor_permutation_qca,
    identity_qca,
    random_brickwork,
    shift_qca,
)


# ---- frozen reference values

@pytest.mark.parametrize("d", [2, 3])
def test_shift_index_is_d(d):
    c = ChainSpec(6, d)
    assert gnvw_index(shift_qca(c, 1)).fraction == d
    assert gnvw_index(shift_qca(c, -1)).fraction == Fraction(1, d)


def test_identity_and_double_shift():
    assert gnvw_index(identity_qca(ChainSpec(6, 2))).fraction == 1
    assert gnvw_index(shift_qca(ChainSpec(6, 3), 2)).fraction == 9


def test_swap_method_frozen_values():
    c = ChainSpec(6, 2)
    assert gnvw_index(shift_qca(c, 1), method="swap").fraction == 2
    assert gnvw_index(shift_qca(c, 1) @ random_brickwork(c, 4), method="swap").fraction == 2


def test_factor_permutation_index():
    c = ChainSpec(6, 6, (2, 3))
    assert gnvw_index(factor_permutation_qca(c, [1, 0])).fraction == 2
    assert gnvw_index(factor_permutation_qca(c, [1, -1])).fraction == Fraction(2, 3)


def test_strict_rule_on_shift():
    assert gnvw_index(shift_qca(ChainSpec(6, 2), 1), strict=True).fraction == 2


def test_brickwork_is_trivial_at_twelve_sites():
    assert gnvw_index(random_brickwork(ChainSpec(12, 2), 0)).fraction == 1


# ---- properties

@given(st.integers(0, 10_000), st.sampled_from([1, -1]))
def test_direct_and_swap_overlaps_agree(seed, steps):
    c = ChainSpec(6, 2)
    U = shift_qca(c, steps) @ random_brickwork(c, seed)
    pl = resolve_placement(U)
    for X, Y in ((pl.A, pl.B), (pl.B, pl.A)):
        a = eta_overlap(pl.qca, X, Y, "direct")
        b = eta_overlap(pl.qca, X, Y, "swap")
        assert abs(a - b) <= 1e-8 * b


@given(st.integers(0, 10_000))
def test_index_ignores_brickwork(seed):
    c = ChainSpec(6, 2)
    assert gnvw_index(shift_qca(c, 1) @ random_brickwork(c, seed)).fraction == 2
    assert gnvw_index(random_brickwork(c, seed) @ shift_qca(c, -1)).fraction == Fraction(1, 2)


@given(st.integers(0, 10_000))
def test_interval_independence_over_block_positions(seed):
    c = ChainSpec(6, 2)
    B = block(shift_qca(c, 1) @ random_brickwork(c, seed), 2)
    vals = {gnvw_index(B, Interval(s, 1), Interval(s + 1, 1)).fraction for s in range(3)}
    assert vals == {2}


def test_interval_independence_explicit():
    c = ChainSpec(8, 2)
    U = shift_qca(c, 2)
    for A in (Interval(0, 2), Interval(3, 2), Interval(5, 3)):
        assert gnvw_index(U, A, Interval(A.start + A.length, A.length)).fraction == 4


def test_multiplicativity_on_twelve_sites():
    c = ChainSpec(12, 2)
    U = shift_qca(c, 1) @ random_brickwork(c, 2)
    for V in (shift_qca(c, 1), shift_qca(c, -1)):
        assert gnvw_index(U @ V).fraction == gnvw_index(U).fraction * gnvw_index(V).fraction


# ---- snapping

@pytest.mark.parametrize("x,d,expected", [(2.0, 2, (2, 1)), (0.5, 2, (1, 2)), (1.5, 6, (3, 2)),
                                          (1 / 9, 3, (1, 9)), (4 / 9, 6, (4, 9)),
                                          (1.0 + 1e-9, 2, (1, 1))])
def test_rational_snap(x, d, expected):
    r = rational_snap(x, d)
    assert (r.numerator, r.denominator) == expected


@pytest.mark.parametrize("x", [0.7, -2.0, 0.0, float("nan")])
def test_rational_snap_failures(x):
    with pytest.raises(SnapFailure):
        rational_snap(x, 2)


@given(st.integers(-6, 6), st.integers(-6, 6))
def test_snap_recovers_smooth_rationals(a, b):
    x = Fraction(2) ** a * Fraction(3) ** b
    assert rational_snap(float(x), 6).fraction == x


# ---- geometry

def test_check_pair_rejections():
    U = shift_qca(ChainSpec(6, 2), 1) @ random_brickwork(ChainSpec(6, 2), 0)
    with pytest.raises(DomainError):
        check_pair(U, Interval(0, 2), Interval(3, 2))        # not adjacent
    with pytest.raises(DomainError):
        check_pair(U, Interval(0, 2), Interval(2, 2))        # shorter than the cone
    with pytest.raises(DomainError):
        gnvw_ratio(U, Interval(0, 2))                         # only one interval


def test_auto_placement_blocks_when_needed():
    U = shift_qca(ChainSpec(6, 2), 1) @ random_brickwork(ChainSpec(6, 2), 0)
    pl = auto_placement(U)
    assert pl.block == 2
    assert "blocks of 2" in pl.describe()


def test_ratio_is_positive_float():
    r = gnvw_ratio(shift_qca(ChainSpec(6, 2), 1))
    assert math.isclose(r, 2.0, rel_tol=1e-12)
