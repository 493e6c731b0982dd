"""Z_2 classification, witness construction and FDQC / intertwiner checks.

The feasibility conditions tie (pi0, pi1) to eigenvalue counts of L_1 and R_1:

    d^N1 pi0 = a0 + a1      d^N2 / pi0 = b0 + b1
    chi^N1 pi1 = a0 - a1    chi^N2 / pi1 = b0 - b1

The a-equations involve only N1 and the b-equations only N2, so the two
exponents can be minimized independently.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .errors import DomainError, NoIntertwiner, NoSolution
from .gnvw import RationalIndex
from .model import (
    ChainSpec,
    Interval,
    OnsiteRep,
    QCAOperator,
    factor_permutation_qca,
    isotypic_bases,
)
from .reps import RepSpectrum, spectrum_of

FractionLike = int | str | Fraction | RationalIndex


def as_fraction(x: FractionLike) -> Fraction:
    if isinstance(x, RationalIndex):
        return x.fraction
    return Fraction(x)


def _check_z2_data(d: int, chi: int) -> None:
    if d < 2:
        raise DomainError("local dimension must be at least 2")
    if abs(chi) > d or (d - chi) % 2:
        raise DomainError(f"chi={chi} is not the Z_2 character of a {d}-dimensional representation")


@dataclass(frozen=True)
class ClassificationWitness:
    N1: int
    N2: int
    alpha0: int
    alpha1: int
    beta0: int
    beta1: int

    def as_tuple(self) -> tuple[int, ...]:
        return (self.N1, self.N2, self.alpha0, self.alpha1, self.beta0, self.beta1)

    def satisfies(self, d: int, chi: int, pi0: FractionLike, pi1: FractionLike) -> bool:
        """The four feasibility equations, in exact arithmetic."""
        p0, p1 = as_fraction(pi0), as_fraction(pi1)
        return (d ** self.N1 * p0 == self.alpha0 + self.alpha1
                and Fraction(d ** self.N2) / p0 == self.beta0 + self.beta1
                and chi ** self.N1 * p1 == self.alpha0 - self.alpha1
                and Fraction(chi ** self.N2) / p1 == self.beta0 - self.beta1)

    def consistent(self, d: int, chi: int) -> bool:
        """Spectral consistency: L x R has the dimension and character of mu^(N1+N2)."""
        if min(self.as_tuple()) < 0:
            return False
        n = self.N1 + self.N2
        return ((self.alpha0 + self.alpha1) * (self.beta0 + self.beta1) == d ** n
                and (self.alpha0 - self.alpha1) * (self.beta0 - self.beta1) == chi ** n)

    def indices(self, d: int, chi: int) -> tuple[Fraction, Fraction | None]:
        """(pi0, pi1) encoded by the witness; pi1 is None when chi^N1 = 0."""
        pi0 = Fraction(self.alpha0 + self.alpha1, d ** self.N1)
        den = chi ** self.N1
        return pi0, (Fraction(self.alpha0 - self.alpha1, den) if den else None)


def _split(total: Fraction, diff: Fraction) -> tuple[int, int] | None:
    """Nonnegative integers (x0, x1) with x0 + x1 = total and x0 - x1 = diff."""
    if total.denominator != 1 or diff.denominator != 1:
        return None
    s, t = total.numerator, diff.numerator
    if abs(t) > s or (s + t) % 2:
        return None
    return (s + t) // 2, (s - t) // 2


def _alpha(d, chi, pi0, pi1, n):
    return _split(d ** n * pi0, chi ** n * pi1)


def _beta(d, chi, pi0, pi1, n):
    return _split(Fraction(d ** n) / pi0, Fraction(chi ** n) / pi1)


def z2_solve(d: int, chi: int, pi0: FractionLike, pi1: FractionLike,
             max_exponent: int = 8) -> ClassificationWitness:
    """Smallest witness (by N1 + N2, then N1) for the class (pi0, pi1).

    Raises NoSolution when nothing exists with N1, N2 <= max_exponent, and
    always when chi = 0 and pi1 != 1 (pi1 is then undefined).
    """
    _check_z2_data(d, chi)
    p0, p1 = as_fraction(pi0), as_fraction(pi1)
    if p0 <= 0 or p1 <= 0:
        raise DomainError("indices must be positive")
    if chi == 0 and p1 != 1:
        raise NoSolution("with a traceless generator only pi1 = 1 is meaningful")
    n1 = next(((n, a) for n in range(max_exponent + 1) if (a := _alpha(d, chi, p0, p1, n))), None)
    n2 = next(((n, b) for n in range(max_exponent + 1) if (b := _beta(d, chi, p0, p1, n))), None)
    if n1 is None or n2 is None:
        raise NoSolution(f"no witness for (pi0, pi1) = ({p0}, {p1}) with exponents <= {max_exponent}")
    (N1, (a0, a1)), (N2, (b0, b1)) = n1, n2
    return ClassificationWitness(N1, N2, a0, a1, b0, b1)


def small_fractions(bound: int) -> list[Fraction]:
    return sorted({Fraction(p, q) for p in range(1, bound + 1) for q in range(1, bound + 1)})


def z2_enumerate(d: int, chi: int, bound: int, max_exponent: int = 16) -> set[tuple[Fraction, Fraction]]:
    """All solvable (pi0, pi1) whose numerators and denominators are at most ``bound``."""
    _check_z2_data(d, chi)
    cands = small_fractions(bound)
    out = set()
    for p0 in cands:
        for p1 in cands:
            try:
                z2_solve(d, chi, p0, p1, max_exponent)
            except NoSolution:
                continue
            out.add((p0, p1))
    return out


def smooth(x: Fraction, base: int) -> bool:
    """True iff every prime factor of numerator and denominator divides ``base``."""
    base = abs(base)
    for v in (x.numerator, x.denominator):
        while (g := math.gcd(v, base)) > 1:
            while v % g == 0:
                v //= g
        if v != 1:
            return False
    return True


# ---------------------------------------------------------------- witnesses

@dataclass(frozen=True)
class WitnessQCA:
    qca: QCAOperator
    rep: OnsiteRep
    moves: tuple[int, ...]
    symbolic: tuple[Fraction, Fraction | None]
    numeric: tuple[RationalIndex, RationalIndex | None] | None = None
    dense: tuple[RationalIndex, RationalIndex | None] | None = None


def _sign_rep(plus: int, minus: int) -> np.ndarray:
    return np.diag(np.array([1.0] * plus + [-1.0] * minus, dtype=complex))


def permutation_indices(dims: Sequence[int], traces: Sequence[complex],
                        moves: Sequence[int]) -> tuple[Fraction, Fraction | None]:
    """Indices of a factor translation: products of dims^move and |trace|^move."""
    pi0 = Fraction(1)
    pi1: Fraction | None = Fraction(1)
    for dim, tr, m in zip(dims, traces, moves):
        pi0 *= Fraction(dim) ** m
        t = round(abs(tr))
        if abs(abs(tr) - t) > 1e-9:
            raise DomainError("factor traces must be integers for a Z_2 representation")
        if m and pi1 is not None:
            pi1 = pi1 * Fraction(t) ** m if t else None
    return pi0, pi1


def witness_to_qca(w: ClassificationWitness, rep: OnsiteRep, n_cells: int = 6,
                   verify: bool = True) -> WitnessQCA:
    """Supersite QCA realizing the witness.

    Each cell is H^N1 (x) H_alpha (x) H_beta with symmetry mu^N1, diag(+1^a0, -1^a1)
    and diag(+1^b0, -1^b1).  H_alpha moves one cell right, H^N1 one cell left.
    The indices are read off symbolically; with ``verify`` they are also
    computed from the structured QCA and, when the chain is small enough,
    from its dense matrix.
    """
    if rep.N != 2:
        raise DomainError("witnesses describe Z_2 representations")
    d = rep.d
    chi = int(round(rep.chi.real))
    _check_z2_data(d, chi)
    if not w.consistent(d, chi):
        raise DomainError(f"witness {w.as_tuple()} violates the feasibility conditions for d={d}, chi={chi}")
    if n_cells < 3:
        raise DomainError("need at least 3 supersites")
    mu_n = np.ones((1, 1), dtype=complex)
    for _ in range(w.N1):
        mu_n = np.kron(mu_n, rep.mu1)
    mats = [mu_n, _sign_rep(w.alpha0, w.alpha1), _sign_rep(w.beta0, w.beta1)]
    dims = tuple(m.shape[0] for m in mats)
    chain = ChainSpec(n_cells, math.prod(dims), dims)
    moves = (-1, 1, 0)
    U = factor_permutation_qca(chain, moves, label=f"witness{w.as_tuple()}")
    cell_rep = OnsiteRep.product(2, mats)
    symbolic = permutation_indices(dims, [np.trace(m) for m in mats], moves)
    numeric = dense = None
    if verify:
        from .spi import z2_indices

        try:
            numeric = z2_indices(U, cell_rep)
        except DomainError:
            numeric = None      # cells too large for any window within the budget
        if chain.dense_dim <= 4096:
            dense = dense_z2_indices(U, cell_rep)
    return WitnessQCA(U, cell_rep, moves, symbolic, numeric, dense)


def _diag_on(chain: ChainSpec, cells: Sequence[int], diag: np.ndarray) -> np.ndarray:
    """Diagonal of mu_1 on ``cells`` and the identity elsewhere, in dense basis order."""
    cells = set(cells)
    out = np.ones(1, dtype=complex)
    for c in range(chain.n_sites):
        out = np.kron(out, diag if c in cells else np.ones(len(diag)))
    return out


def dense_z2_indices(U: QCAOperator, rep: OnsiteRep) -> tuple[RationalIndex, RationalIndex | None]:
    """(pi0, pi1) from the dense matrix: swap-trace overlap and the trace formula.

    With a diagonal mu_1 both traces in the formula reduce to a^T |U|^2 b,
    where a and b are the diagonals of U_{1,A} and U_{1,B}.
    """
    from .gnvw import auto_placement, gnvw_ratio, rational_snap
    from .model import block_rep
    from .spi import _snap_base

    pl = auto_placement(U)
    V = pl.qca
    brep = rep if pl.block == 1 else block_rep(rep, pl.block)
    mu = brep.mu1
    if np.max(np.abs(mu - np.diag(np.diag(mu)))) > 1e-12:
        raise DomainError("the dense trace formula needs a diagonal mu_1")
    p0 = gnvw_ratio(V, pl.A, pl.B, method="swap")
    chain = V.chain
    P = np.abs(V.dense()) ** 2
    a = _diag_on(chain, pl.A.cells(chain), np.diag(mu))
    b = _diag_on(chain, pl.B.cells(chain), np.diag(mu))
    num, den = a @ P @ b, b @ P @ a
    n = U.chain.n_sites
    pi0 = rational_snap(p0, U.chain.d, max_power=2 * n)
    if abs(num) < 1e-9 or abs(den) < 1e-9:
        return pi0, None
    p1 = p0 / math.sqrt(abs(num / den))
    return pi0, rational_snap(p1, _snap_base(U.chain.d, rep.chi), max_power=2 * n)


# ---------------------------------------------------------------- appendix checks

@dataclass(frozen=True)
class Intertwiner:
    V: np.ndarray
    shift: int          # u_g = w^(shift * g)
    residual: float


def _as_generator(rho: Sequence | np.ndarray, N: int | None) -> tuple[np.ndarray, int]:
    if isinstance(rho, np.ndarray) and rho.ndim == 2:
        if N is None:
            raise DomainError("a bare generator needs the group order N")
        rho = [np.linalg.matrix_power(rho, g) for g in range(N)]
    mats = [np.asarray(getattr(r, "matrix", r), dtype=complex) for r in rho]
    if not mats:
        raise DomainError("empty representation")
    N = len(mats) if N is None else N
    dim = mats[0].shape[0]
    gen = mats[1] if len(mats) > 1 else mats[0]
    for g, m in enumerate(mats):
        if np.max(np.abs(m - np.linalg.matrix_power(gen, g))) > 1e-8:
            raise DomainError(f"rho_{g} is not rho_1^{g}")
    if np.max(np.abs(np.linalg.matrix_power(gen, N) - np.eye(dim))) > 1e-8:
        raise DomainError(f"rho_1^{N} != 1")
    return gen, N


def find_intertwiner(rho: Sequence, rho_prime: Sequence, N: int | None = None) -> Intertwiner:
    """Unitary V with V rho'_g V^dagger = u_g rho_g for a 1D representation u_g.

    ``rho`` and ``rho_prime`` list the matrices for g = 0..N-1 (or are bare
    generator matrices, in which case N is required).  Every shift
    u_g = w^(k g) is tried; NoIntertwiner is raised if the multiplicities of
    the isotypic components never line up.
    """
    a, N = _as_generator(rho, N)
    b, _ = _as_generator(rho_prime, N)
    if a.shape != b.shape:
        raise NoIntertwiner("representations of different dimension")
    qa, qb = isotypic_bases(a, N), isotypic_bases(b, N)
    empty = np.zeros((a.shape[0], 0), dtype=complex)
    for k in range(N):
        # rho' eigenvalue w^s must land on rho eigenvalue w^(s-k)
        if all(qb.get(s, empty).shape[1] == qa.get((s - k) % N, empty).shape[1] for s in range(N)):
            V = sum(qa.get((s - k) % N, empty) @ qb.get(s, empty).conj().T for s in range(N))
            u = np.exp(2j * np.pi * k / N)
            res = float(np.max(np.abs(V @ b @ V.conj().T - u * a)))
            return Intertwiner(V, k, res)
    raise NoIntertwiner("eigenvalue multiplicities differ for every 1D twist")


@dataclass(frozen=True)
class FDQCCheck:
    ok: bool
    spectrum_R: RepSpectrum
    spectrum_ref: RepSpectrum
    shift: int | None


def symmetric_fdqc_check(U: QCAOperator, rep: OnsiteRep, I: Interval | None = None) -> FDQCCheck:
    """Whether R_1 has the spectrum of u_1 U_{1,R} for some 1D representation u.

    R_1 is rescaled to satisfy R_1^N = 1, which leaves exactly the 1D
    freedom; the generator decides all g because R_g is proportional to R_1^g.
    """
    from .spi import lr_decompose, rep_normalized

    dec = lr_decompose(U, rep, I)
    N = dec.window.rep.N
    R = rep_normalized(dec.R[1 % N], N)
    ref = dec.reference(1 % N)[1]
    sr = spectrum_of(R.matrix, N)
    sref = spectrum_of(ref.matrix, N)
    shift = next((k for k in range(N) if sref.shifted(k).a == sr.a), None)
    return FDQCCheck(shift is not None, sr, sref, shift)
