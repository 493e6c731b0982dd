"""Symmetry-protected indices from the restricted symmetry U_{g,I}.

Conjugating mu_g on an even interval I by a symmetric QCA leaves it equal to
mu_g deep inside I; near the two ends it is modified by local unitaries, so
the result splits as L_g (x) R_g across the midpoint of I.  The traces of R_g
relative to the undeformed U_{g,R} give the SPI, the refined SPI and the
Z_2 pair (pi0, pi1).
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .errors import DomainError, NotFactorizable, NotSymmetric, NumericalFailure, UndefinedSPI
from .gnvw import RationalIndex, check_pair, gnvw_ratio, rational_snap
from .model import (
    Interval,
    OnsiteRep,
    QCAOperator,
    block,
    block_rep,
    commutes_with_symmetry,
    light_cone,
)
from .reps import group_order
from .tensor import DenseOperator, fix_phase, normalized_trace, product_of, rank1_factorize

TRACE_TOL = 1e-10


def restrict_symmetry(rep: OnsiteRep, U: QCAOperator, I: Interval, g: int = 1) -> DenseOperator:
    """U_{g,I} = mu_g on every cell of I (even length)."""
    if I.length % 2:
        raise DomainError("the interval must contain an even number of sites")
    return rep.restricted(U.chain, I.cells(U.chain), g)


@dataclass(frozen=True)
class Window:
    """An even interval I on (possibly blocked) U, with the light cone padding around it."""
    qca: QCAOperator
    rep: OnsiteRep
    I: Interval
    cone: tuple[int, int]
    block: int = 1
    offset: int = 0

    @property
    def left_cells(self) -> tuple[int, ...]:
        h = self.I.length // 2
        return Interval(self.I.start - self.cone[0], self.cone[0] + h).cells(self.qca.chain)

    @property
    def right_cells(self) -> tuple[int, ...]:
        h = self.I.length // 2
        return Interval(self.I.start + h, h + self.cone[1]).cells(self.qca.chain)

    def describe(self) -> str:
        unit = "sites" if self.block == 1 else f"blocks of {self.block} (first at site {self.offset})"
        return f"I={self.I} in {unit}, light cone {self.cone}"


def check_window(U: QCAOperator, I: Interval, strict: bool = False) -> tuple[int, int]:
    """Each half of I must span the light cone and the padded window must not wrap.

    With the measured cone (l, r): halves >= l + r and n >= |I| + l + r.  In
    strict mode the declared xi is used on both sides.
    """
    if I.length % 2:
        raise DomainError("the interval must contain an even number of sites")
    cone = (U.xi, U.xi) if strict else light_cone(U)
    width = cone[0] + cone[1]
    half = I.length // 2
    if half < max(1, width):
        raise DomainError(f"interval halves must be at least {max(1, width)} cells (light cone {cone})")
    if I.length + width > U.chain.n_sites:
        raise DomainError(f"chain of {U.chain.n_sites} cells too short for |I|={I.length} and cone {cone}")
    return cone


def auto_window(U: QCAOperator, rep: OnsiteRep, max_dim: int = 4096) -> Window:
    """Valid window with the smallest one-sided dimension over all blockings of the chain."""
    n = U.chain.n_sites
    best, best_dim = None, None
    for k in range(1, n // 2 + 1):
        if n % k:
            continue
        for off in range(k):
            Ub = U if k == 1 else block(U, k, off)
            l, r = light_cone(Ub)
            half = max(1, l + r)
            if 2 * half + l + r > Ub.chain.n_sites:
                continue
            dim = Ub.chain.d ** (half + max(l, r))
            if dim > max_dim or (best_dim is not None and dim >= best_dim):
                continue
            rb = rep if k == 1 else block_rep(rep, k)
            best = Window(Ub, rb, Interval(l, 2 * half), (l, r), k, off)
            best_dim = dim
    if best is None:
        raise DomainError("no interval fits the chain within the dimension budget")
    return best


def make_window(U: QCAOperator, rep: OnsiteRep, I: Interval | None = None, strict: bool = False) -> Window:
    if rep.d != U.chain.d:
        raise DomainError(f"representation has dimension {rep.d}, cells have {U.chain.d}")
    if I is None:
        return auto_window(U, rep)
    return Window(U, rep, I, check_window(U, I, strict))


@dataclass
class LRDecomposition:
    window: Window
    L: dict[int, DenseOperator] = field(default_factory=dict)
    R: dict[int, DenseOperator] = field(default_factory=dict)
    residual: dict[int, float] = field(default_factory=dict)

    @property
    def interval(self) -> Interval:
        return self.window.I

    def reference(self, g: int) -> tuple[DenseOperator, DenseOperator]:
        """U_{g,L} and U_{g,R} padded with identity onto the supports of L_g and R_g."""
        w = self.window
        chain = w.qca.chain
        A, B = w.I.halves()
        dims = chain.factor_dims
        ul = w.rep.restricted(chain, A.cells(chain), g).extend(self.L[g].support, dims)
        ur = w.rep.restricted(chain, B.cells(chain), g).extend(self.R[g].support, dims)
        return ul, ur

    def rephased(self, phases: dict[int, float]) -> "LRDecomposition":
        """L_g -> e^{i phi} L_g and R_g -> e^{-i phi} R_g (used to test convention independence)."""
        out = LRDecomposition(self.window, dict(self.L), dict(self.R), dict(self.residual))
        for g, phi in phases.items():
            out.L[g] = self.L[g].scaled(cmath.exp(1j * phi))
            out.R[g] = self.R[g].scaled(cmath.exp(-1j * phi))
        return out


def _padded_trace(op: DenseOperator, dim: int) -> complex:
    """Trace of op (x) identity on a space of total dimension ``dim``."""
    return complex(np.trace(op.matrix)) * (dim / op.dim)


def lr_decompose(U: QCAOperator, rep: OnsiteRep, I: Interval | None = None, strict: bool = False,
                 check_symmetry: bool = True) -> LRDecomposition:
    """Factor U^dagger U_{g,I} U = L_g (x) R_g across the midpoint of I for every g."""
    w = make_window(U, rep, I, strict)
    V, chain = w.qca, w.qca.chain
    if check_symmetry and commutes_with_symmetry(V, w.rep) is False:
        raise NotSymmetric("U does not commute with the global symmetry")
    dims = chain.factor_dims
    left_f = chain.factors_of(w.left_cells)
    right_f = chain.factors_of(w.right_cells)
    left_set, right_set = set(left_f), set(right_f)
    out = LRDecomposition(w)
    for g in range(w.rep.N):
        parts = V.conjugate_factored(w.rep.restricted_factors(chain, w.I.cells(chain), g))
        lefts, rights, residual = [], [], 0.0
        for f in parts:
            sup = set(f.support)
            if sup - left_set - right_set:
                raise NotFactorizable(float("inf"), f"conjugated symmetry leaves the window on factors "
                                                    f"{sorted(sup - left_set - right_set)}")
            if sup <= left_set:
                lefts.append(f)
            elif sup <= right_set:
                rights.append(f)
            else:
                fl, fr, res = rank1_factorize(f, sup & left_set)
                lefts.append(fl)
                rights.append(fr)
                residual = max(residual, res)
        L = product_of(lefts).extend(left_f, dims)
        R = product_of(rights).extend(right_f, dims)
        out.L[g], out.R[g] = fix_phase(L, R)
        out.residual[g] = residual
    return out


def _trace_ratio(num: DenseOperator, den: DenseOperator, what: str) -> complex:
    dim = max(num.dim, den.dim)
    t_den = _padded_trace(den, dim)
    if abs(t_den) < TRACE_TOL * dim:
        raise UndefinedSPI(f"vanishing trace of {what}")
    return _padded_trace(num, dim) / t_den


@dataclass(frozen=True)
class SPIValues:
    ind: float
    ind_g: dict[int, float]
    rind_g: dict[int, complex]


def rep_normalized(R: DenseOperator, order: int, tol: float = 1e-8) -> DenseOperator:
    """Rescale R by a phase so that R^order = 1.

    The extracted factor is only fixed up to a phase, while the refined index
    needs R_g to be an honest representation element.  The remaining freedom
    is an order-th root of unity, which the refined index is blind to.
    """
    p = np.linalg.matrix_power(R.matrix, order)
    lam = complex(np.trace(p)) / R.dim
    if abs(lam) < 0.5 or np.max(np.abs(p - lam * np.eye(R.dim))) > tol * max(1.0, abs(lam)):
        raise NumericalFailure(f"R_g^{order} is not proportional to the identity")
    return R.scaled(cmath.exp(-1j * cmath.phase(lam) / order) / abs(lam) ** (1 / order))


def indices_from_decomposition(dec: LRDecomposition, ind: float) -> SPIValues:
    """ind_g and rind_g for every g at which they are defined."""
    N = dec.window.rep.N
    ind_g, rind_g = {}, {}
    for g in range(N):
        try:
            ratio = _trace_ratio(dec.R[g], dec.L[g], "L_g")
            ind_g[g] = ind * math.sqrt(abs(ratio))
        except UndefinedSPI:
            pass
        try:
            ur = dec.reference(g)[1]
            order = group_order(g, N)
            rg = rep_normalized(dec.R[g], order)
            rind_g[g] = ind * _trace_ratio(rg, ur, "U_{g,R}") ** order
        except UndefinedSPI:
            pass
    return SPIValues(ind, ind_g, rind_g)


def _index_float(U: QCAOperator, ind: float | None) -> float:
    return float(gnvw_ratio(U)) if ind is None else float(ind)


def spi_g(U: QCAOperator, rep: OnsiteRep, I: Interval | None, g: int, ind: float | None = None,
          strict: bool = False) -> float:
    """ind_g = ind * sqrt|Tr R_g / Tr L_g|, traces over a common dimension."""
    dec = lr_decompose(U, rep, I, strict)
    val = indices_from_decomposition(dec, _index_float(U, ind))
    if g % rep.N not in val.ind_g:
        raise UndefinedSPI(f"Tr(L_{g}) vanishes")
    return val.ind_g[g % rep.N]


def refined_spi_g(U: QCAOperator, rep: OnsiteRep, I: Interval | None, g: int, ind: float | None = None,
                  strict: bool = False) -> complex:
    """rind_g = ind * (Tr R_g / Tr U_{g,R})^{d_g}."""
    dec = lr_decompose(U, rep, I, strict)
    val = indices_from_decomposition(dec, _index_float(U, ind))
    if g % rep.N not in val.rind_g:
        raise UndefinedSPI(f"Tr(U_{g},R) vanishes")
    return val.rind_g[g % rep.N]


def _snap_base(d: int, chi: complex) -> int:
    c = int(round(abs(chi.real)))
    return d * c if c > 1 else d


def z2_from_decomposition(dec: LRDecomposition, ind: float) -> tuple[float, float | None]:
    """(pi0, pi1) as floats; pi1 is None when Tr(R_1) and Tr(U_{1,R}) both vanish."""
    R1 = dec.R[1]
    ur = dec.reference(1)[1]
    dim = max(R1.dim, ur.dim)
    t_ref = _padded_trace(ur, dim)
    t_r = _padded_trace(R1, dim)
    if abs(t_ref) < TRACE_TOL * dim:
        if abs(t_r) < 1e-8 * dim:
            return ind, None
        raise UndefinedSPI("Tr(U_{1,R}) vanishes but Tr(R_1) does not")
    return ind, ind * abs(t_r / t_ref)


def z2_indices(U: QCAOperator, rep: OnsiteRep, I: Interval | None = None, ind: float | None = None,
               strict: bool = False) -> tuple[RationalIndex, RationalIndex | None]:
    """pi0 = ind(U) and pi1 = pi0 |Tr R_1 / Tr U_{1,R}| for a Z_2 symmetry."""
    if rep.N != 2:
        raise DomainError("z2_indices needs a Z_2 representation")
    dec = lr_decompose(U, rep, I, strict)
    p0, p1 = z2_from_decomposition(dec, _index_float(U, ind))
    d = U.chain.d
    pi0 = rational_snap(p0, d, max_power=2 * U.chain.n_sites)
    if p1 is None:
        return pi0, None
    pi1 = rational_snap(p1, _snap_base(d, rep.chi), max_power=2 * U.chain.n_sites)
    return pi0, pi1


def z2_trace_formula(U: QCAOperator, rep: OnsiteRep, A: Interval, B: Interval, strict: bool = False) -> float:
    """pi0/pi1 = sqrt|Tr(U^dag U_{1,A} U U_{1,B}) / Tr(U_{1,A} U^dag U_{1,B} U)|.

    Both traces are evaluated on the joint support of the two factors; the
    identity elsewhere contributes the same factor to numerator and denominator.
    """
    if rep.N != 2:
        raise DomainError("z2_trace_formula needs a Z_2 representation")
    check_pair(U, A, B, strict)
    chain = U.chain
    ua = rep.restricted(chain, A.cells(chain), 1)
    ub = rep.restricted(chain, B.cells(chain), 1)
    num = normalized_trace(U.conjugate(ua) @ ub)
    den = normalized_trace(ua @ U.conjugate(ub))
    if abs(num) < 1e-12 or abs(den) < 1e-12:
        raise UndefinedSPI("one of the traces vanishes")
    return math.sqrt(abs(num / den))


def snap_complex(z: complex, max_den: int = 64, tol: float = 1e-8) -> tuple[Fraction, Fraction] | None:
    """Nearest Gaussian rational with denominators at most ``max_den``, or None."""
    parts = []
    for x in (z.real, z.imag):
        f = Fraction(x).limit_denominator(max_den)
        if abs(float(f) - x) > tol * max(1.0, abs(x)):
            return None
        parts.append(f)
    return parts[0], parts[1]
