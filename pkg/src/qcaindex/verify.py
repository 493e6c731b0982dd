"""Cross-module invariant suite run by ``qcaindex verify``.

Each check builds small seeded instances, evaluates one named invariant and
returns a ``CheckResult``.  The whole suite runs in well under a minute.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable

import numpy as np
from scipy.stats import unitary_group

from .classify import find_intertwiner, symmetric_fdqc_check, witness_to_qca, z2_solve, ClassificationWitness
from .doubled import doubled_z2, index_via_doubled
from .errors import NoIntertwiner, NoSolution
from .gnvw import eta_overlap, gnvw_index, resolve_placement
from .model import (
    ChainSpec,
    Interval,
    OnsiteRep,
    identity_qca,
    random_brickwork,
    shift_qca,
    spi_example_circuit,
    symmetric_brickwork,
    verify_locality,
)
from .reps import collision_search, shift_equivalent, signatures_equal
from .spi import indices_from_decomposition, lr_decompose
from .transport import transport_nu


@dataclass(frozen=True)
class CheckResult:
    name: str
    passed: bool
    detail: str


def _shift_inverse(seed: int) -> tuple[bool, str]:
    c = ChainSpec(5, 2)
    err = max(np.max(np.abs((shift_qca(c, s) @ shift_qca(c, -s)).dense() - np.eye(c.dense_dim)))
              for s in (1, 2))
    return err < 1e-10, f"max deviation from identity {err:.2e}"


def _locality(seed: int) -> tuple[bool, str]:
    c = ChainSpec(6, 2)
    U, V = random_brickwork(c, seed), shift_qca(c, 1)
    ok = verify_locality(U, U.xi) and verify_locality(V @ U, V.xi + U.xi)
    return ok, f"brickwork xi={U.xi}, shift*brickwork xi={U.xi + V.xi}"


def _gnvw_values(seed: int) -> tuple[bool, str]:
    vals = {}
    for d in (2, 3):
        c = ChainSpec(6, d)
        vals[f"shift d={d}"] = gnvw_index(shift_qca(c, 1)).fraction
        vals[f"shift^dag d={d}"] = gnvw_index(shift_qca(c, -1)).fraction
    vals["identity"] = gnvw_index(identity_qca(ChainSpec(6, 2))).fraction
    ok = (vals["identity"] == 1 and all(vals[f"shift d={d}"] == d and vals[f"shift^dag d={d}"] == Fraction(1, d)
                                         for d in (2, 3)))
    return ok, ", ".join(f"{k}: {v}" for k, v in vals.items())


def _method_agreement(seed: int) -> tuple[bool, str]:
    c = ChainSpec(6, 2)
    U = shift_qca(c, 1) @ random_brickwork(c, seed)
    pl = resolve_placement(U)
    worst = 0.0
    for X, Y in ((pl.A, pl.B), (pl.B, pl.A)):
        a, b = eta_overlap(pl.qca, X, Y, "direct"), eta_overlap(pl.qca, X, Y, "swap")
        worst = max(worst, abs(a - b) / abs(b))
    return worst < 1e-8, f"max relative difference {worst:.2e}"


def _multiplicativity(seed: int) -> tuple[bool, str]:
    c = ChainSpec(12, 2)
    U = shift_qca(c, 1) @ random_brickwork(c, seed)
    lines, ok = [], True
    for name, V in (("shift", shift_qca(c, 1)), ("shift^dag", shift_qca(c, -1))):
        iu, iv, iuv = (gnvw_index(W).fraction for W in (U, V, U @ V))
        ok &= iuv == iu * iv
        lines.append(f"ind(U)={iu}, ind({name})={iv}, product {iuv}")
    return ok, "; ".join(lines)


def _interval_independence(seed: int) -> tuple[bool, str]:
    c = ChainSpec(8, 2)
    U = shift_qca(c, 1) @ shift_qca(c, 1)
    vals = {str(A): gnvw_index(U, A, Interval(A.start + A.length, A.length)).fraction
            for A in (Interval(0, 2), Interval(3, 2), Interval(5, 3))}
    return len(set(vals.values())) == 1, ", ".join(f"A={k}: {v}" for k, v in vals.items())


def _doubled(seed: int) -> tuple[bool, str]:
    c = ChainSpec(6, 2)
    U = shift_qca(c, 1) @ random_brickwork(c, seed)
    ind = gnvw_index(U).fraction
    dbl = index_via_doubled(U).ind.fraction
    p0, p1 = doubled_z2(U)
    ok = dbl == ind and p0.fraction == ind ** 2 and p1 is not None and p1.fraction == ind
    return ok, f"ind={ind}, doubled ind={dbl}, pi0(UxU)={p0}, pi1(UxU)={p1}"


def _z3_spi(seed: int) -> tuple[bool, str]:
    rep = OnsiteRep.from_exponents(3, [0, 1, 1])
    U = spi_example_circuit(rep, ((1, 0, 2), (1, 0, 2)))
    vals = indices_from_decomposition(lr_decompose(U, rep), 1.0)
    ok = (all(abs(vals.ind_g[g] - 1) < 1e-8 for g in range(3))
          and all(abs(vals.rind_g[g] + 1) < 1e-8 for g in (1, 2)))
    return ok, f"ind_g={[round(vals.ind_g[g], 10) for g in range(3)]}, " \
               f"rind_g={[complex(np.round(vals.rind_g[g], 10)) for g in range(3)]}"


def _rephasing(seed: int) -> tuple[bool, str]:
    rep = OnsiteRep.from_exponents(3, [0, 1, 1])
    U = spi_example_circuit(rep, ((1, 0, 2), (1, 0, 2)))
    dec = lr_decompose(U, rep)
    base = indices_from_decomposition(dec, 1.0)
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(5):
        phases = {g: float(rng.uniform(0, 2 * math.pi)) for g in range(3)}
        v = indices_from_decomposition(dec.rephased(phases), 1.0)
        worst = max(worst, max(abs(v.ind_g[g] - base.ind_g[g]) for g in base.ind_g),
                    max(abs(v.rind_g[g] - base.rind_g[g]) for g in base.rind_g))
    return worst < 1e-9, f"max change under random boundary phases {worst:.2e}"


def _collisions(seed: int) -> tuple[bool, str]:
    empty = {N: collision_search(N, 6) for N in (2, 3, 5)}
    pairs = collision_search(4, 4)
    ok = (not any(empty.values()) and bool(pairs)
          and all(signatures_equal(a, b) and not shift_equivalent(a, b) for a, b in pairs))
    return ok, f"N=2,3,5 empty: {not any(empty.values())}; N=4: {[(str(a), str(b)) for a, b in pairs]}"


def _z2_witness(seed: int) -> tuple[bool, str]:
    w = z2_solve(4, 2, 1, 2)
    try:
        z2_solve(2, 0, 1, 2)
        chi0 = False
    except NoSolution:
        chi0 = True
    return w.satisfies(4, 2, 1, 2) and chi0, f"witness {w.as_tuple()}, chi=0 forbids pi1 != 1: {chi0}"


def _round_trip(seed: int) -> tuple[bool, str]:
    rep = OnsiteRep.from_exponents(2, [0, 0])
    w = ClassificationWitness(0, 1, 2, 0, 1, 0)
    W = witness_to_qca(w, rep)
    got = [W.symbolic] + [tuple(x.fraction if x else None for x in v) for v in (W.numeric, W.dense) if v]
    ok = all(g == W.symbolic for g in got) and W.symbolic == w.indices(2, 2)
    return ok, f"witness {w.as_tuple()}: symbolic {W.symbolic}, numeric {W.numeric}, dense {W.dense}"


def _transport(seed: int) -> tuple[bool, str]:
    c = ChainSpec(8, 2)
    nus = {name: (transport_nu(U, 2, "entropy"), transport_nu(U, 2, "mutual"))
           for name, U in (("shift", shift_qca(c, 1)), ("shift^dag", shift_qca(c, -1)),
                           ("brickwork", random_brickwork(c, seed)))}
    target = {"shift": math.log(2), "shift^dag": -math.log(2), "brickwork": 0.0}
    ok = all(abs(a - target[k]) < 1e-8 and abs(a - b) < 1e-10 for k, (a, b) in nus.items())
    return ok, ", ".join(f"{k}: {a:.12g}" for k, (a, _) in nus.items())


def _fdqc(seed: int) -> tuple[bool, str]:
    rep = OnsiteRep.from_exponents(2, [0, 1])
    sym = symmetric_fdqc_check(symmetric_brickwork(ChainSpec(12, 2), rep, seed), rep).ok
    rep4 = OnsiteRep.from_exponents(2, [0, 0, 0, 1])
    sh = symmetric_fdqc_check(shift_qca(ChainSpec(6, 4), 1), rep4).ok
    return sym and not sh, f"symmetric brickwork: {sym}, shift with chi=2: {sh}"


def _intertwiner(seed: int) -> tuple[bool, str]:
    rho = [np.eye(3, dtype=complex), np.diag([1, 1, -1]).astype(complex)]
    W = unitary_group.rvs(3, random_state=seed)
    conj = [W @ r @ W.conj().T for r in rho]
    res = find_intertwiner(rho, conj)
    twisted = find_intertwiner(rho, [rho[0], -rho[1]])
    try:
        find_intertwiner(rho, [rho[0], np.eye(3, dtype=complex)])
        refused = False
    except NoIntertwiner:
        refused = True
    ok = res.residual < 1e-9 and twisted.shift == 1 and refused
    return ok, f"residual {res.residual:.1e}, sign twist shift {twisted.shift}, mismatch refused: {refused}"


INVARIANTS: tuple[tuple[str, Callable[[int], tuple[bool, str]]], ...] = (
    ("shift_inverse_is_identity", _shift_inverse),
    ("locality_of_constructors", _locality),
    ("gnvw_reference_values", _gnvw_values),
    ("eta_direct_equals_swap", _method_agreement),
    ("gnvw_multiplicative", _multiplicativity),
    ("gnvw_interval_independent", _interval_independence),
    ("doubled_index_identities", _doubled),
    ("z3_example_spis", _z3_spi),
    ("spi_rephasing_invariant", _rephasing),
    ("collision_search", _collisions),
    ("z2_feasibility", _z2_witness),
    ("witness_round_trip", _round_trip),
    ("transport_equals_log_index", _transport),
    ("symmetric_fdqc_spectrum", _fdqc),
    ("intertwiner_search", _intertwiner),
)


def run_invariants(seed: int = 0) -> list[CheckResult]:
    out = []
    for name, fn in INVARIANTS:
        try:
            ok, detail = fn(seed)
        except Exception as exc:       # a crash is a failed invariant, reported by name
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        out.append(CheckResult(name, bool(ok), detail))
    return out
