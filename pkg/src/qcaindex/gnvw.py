"""GNVW index from operator-algebra overlaps.

Two independent evaluations of the overlap are provided: an explicit sum
over orthonormal operator bases, and the two-copy SWAP trace in which the
SWAPs are index permutations of a single copy of U.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import numpy as np

from .errors import DomainError, SnapFailure
from .model import Interval, Permutation, QCAOperator, block, layer_groups, light_cone


@dataclass(frozen=True)
class RationalIndex:
    numerator: int
    denominator: int
    float_value: float

    @property
    def fraction(self) -> Fraction:
        return Fraction(self.numerator, self.denominator)

    def __float__(self):
        return float(self.float_value)

    def __str__(self):
        return f"{self.numerator}/{self.denominator}"


def _prime_factors(n: int) -> list[int]:
    out, p = [], 2
    n = abs(n)
    while p * p <= n:
        if n % p == 0:
            out.append(p)
            while n % p == 0:
                n //= p
        p += 1
    if n > 1:
        out.append(n)
    return out


@lru_cache(maxsize=64)
def _divisors_of_power(base: int, k: int) -> tuple[int, ...]:
    """Sorted divisors of base**k."""
    divs = [1]
    for p in _prime_factors(base):
        e = 0
        b = base
        while b % p == 0:
            b //= p
            e += 1
        divs = [x * p ** j for x in divs for j in range(e * k + 1)]
    return tuple(sorted(divs))


def rational_snap(x: float, d: int, max_power: int = 24, rtol: float = 1e-6) -> RationalIndex:
    """Closest p/q with p and q dividing d**max_power (smallest q wins ties)."""
    if not x > 0 or not math.isfinite(x):
        raise SnapFailure(x, f"cannot snap non-positive value {x!r}")
    if d < 2:
        if abs(x - 1) < rtol:
            return RationalIndex(1, 1, float(x))
        raise SnapFailure(x)
    divs = _divisors_of_power(d, max_power)
    div_set = set(divs)
    for q in divs:
        p = round(x * q)
        if p >= 1 and p in div_set and abs(x - p / q) < rtol * p / q:
            g = math.gcd(p, q)
            return RationalIndex(p // g, q // g, float(x))
    raise SnapFailure(x)


@dataclass(frozen=True)
class Placement:
    """Intervals on which the overlap ratio is evaluated, possibly after blocking."""
    qca: QCAOperator
    A: Interval
    B: Interval
    block: int = 1
    offset: int = 0
    cone: tuple[int, int] = (0, 0)

    def describe(self) -> str:
        unit = "sites" if self.block == 1 else f"blocks of {self.block} (first at site {self.offset})"
        return f"A={self.A}, B={self.B} in {unit}, light cone {self.cone}"


def check_pair(U: QCAOperator, A: Interval, B: Interval, strict: bool = False) -> tuple[int, int]:
    """Validate an adjacent pair.  Returns the light cone used for the check.

    The default rule uses the measured cone (l, r): both intervals need at
    least l + r cells and the chain must hold A, B and one cone width, so the
    evolved algebra of A cannot reach B around the ring.  ``strict`` applies
    the same rule with the declared xi on both sides.
    """
    n = U.chain.n_sites
    if (A.start + A.length - B.start) % n:
        raise DomainError(f"intervals {A} and {B} are not adjacent")
    cone = (U.xi, U.xi) if strict else light_cone(U)
    width = cone[0] + cone[1]
    if min(A.length, B.length) < max(1, width):
        raise DomainError(f"intervals must be at least {width} cells long (light cone {cone})")
    if A.length + B.length + width > n:
        raise DomainError(f"chain of {n} cells too short for |A|={A.length}, |B|={B.length} and cone {cone}")
    return cone


def auto_placement(U: QCAOperator, max_factor_dim: int = 256) -> Placement:
    """Smallest valid pair, blocking cells into supersites when that helps.

    Every block size dividing n and every block offset is tried; the choice
    minimizing the dimension of A wins.
    """
    n = U.chain.n_sites
    best: Placement | None = None
    best_dim = None
    for k in range(1, n // 3 + 1):
        if n % k:
            continue
        for off in range(k):
            Ub = U if k == 1 else block(U, k, off)
            l, r = light_cone(Ub)
            length = max(1, l + r)
            if 3 * length > Ub.chain.n_sites:
                continue
            dim = Ub.chain.d ** length
            if dim > max_factor_dim or (best_dim is not None and dim >= best_dim):
                continue
            best = Placement(Ub, Interval(0, length), Interval(length, length), k, off, (l, r))
            best_dim = dim
    if best is None:
        raise DomainError(f"no valid interval pair on {n} cells (light cone too wide for the ring)")
    return best


def resolve_placement(U: QCAOperator, A: Interval | None = None, B: Interval | None = None,
                      strict: bool = False) -> Placement:
    if A is None and B is None:
        if strict:
            length = max(1, 2 * U.xi)
            A, B = Interval(0, length), Interval(length, length)
        else:
            return auto_placement(U)
    if A is None or B is None:
        raise DomainError("give both intervals or neither")
    cone = check_pair(U, A, B, strict)
    return Placement(U, A, B, cone=cone)


def cone_unitary(U: QCAOperator, factors: tuple[int, ...]):
    """The part of U that acts on the backward light cone of ``factors``.

    Returns (W, in_labels, out_labels) with U^dagger (X x 1) U = W^dagger (X x 1) W
    for every X supported on ``factors``.  Rows of W carry the original labels,
    columns the labels after evolution (they differ when U permutes factors).
    """
    sd = U.chain.factor_dims
    ins, outs = list(factors), list(factors)
    back = {f: f for f in U.chain.all_factors}   # current label -> original label
    dim = math.prod(sd[f] for f in factors)
    w = np.eye(dim, dtype=complex)
    for layer in reversed(U.layers):
        if isinstance(layer, Permutation):
            outs = [layer.perm[s] for s in outs]
            back = {layer.perm[s]: back[s] for s in back}
            continue
        gate = layer.op
        if not set(gate.support) & set(outs):
            continue
        extra = [s for s in gate.support if s not in outs]
        if extra:
            w = np.kron(w, np.eye(math.prod(sd[s] for s in extra), dtype=complex))
            ins += [back[s] for s in extra]
            outs += extra
        n, k = len(outs), len(gate.support)
        cols = [n + outs.index(s) for s in gate.support]
        t = w.reshape([sd[s] for s in outs] * 2)
        t = np.tensordot(t, gate.tensor(), axes=(cols, list(range(k))))
        t = np.moveaxis(t, list(range(2 * n - k, 2 * n)), cols)
        w = t.reshape(w.shape)
    return w, tuple(ins), tuple(outs)


def _eta_direct(U: QCAOperator, A: Interval, B: Interval) -> float:
    """Overlap from the superoperator X -> P_B(U^dagger X U) restricted to the cone of A."""
    chain = U.chain
    sd = chain.factor_dims
    fa, fb = A.factors(chain), set(B.factors(chain))
    w, ins, outs = cone_unitary(U, fa)
    rows = list(fa) + [s for s in ins if s not in set(fa)]
    kept = [s for s in outs if s in fb]
    cols = kept + [s for s in outs if s not in fb]
    n = len(ins)
    t = w.reshape([sd[s] for s in ins] + [sd[s] for s in outs])
    t = t.transpose([ins.index(s) for s in rows] + [n + outs.index(s) for s in cols])
    da = math.prod(sd[s] for s in fa)
    dk = math.prod(sd[s] for s in kept)
    de, df = w.shape[0] // da, w.shape[1] // dk
    t = t.reshape(da, de, dk, df)
    # T[a,b,a',b'] = sum_{e,f} conj(W[a,e,b,f]) W[a',e,b',f]
    m = np.einsum("aebf,cedf->abcd", t.conj(), t, optimize=True)
    total = da * float(np.sum(np.abs(m) ** 2)) / (df ** 2 * dk)
    return math.sqrt(total)


def swap_trace(U: QCAOperator, A: Interval, B: Interval) -> float:
    """Tr[(U x U)^dagger SWAP_A (U x U) SWAP_B] using one copy of U.

    The SWAPs only permute indices, so the doubled operator is never formed:
    the trace collapses to Tr(F F) with F = X X^dagger, X being U regrouped
    so that its rows are (A rows, B columns) and its columns the complements.
    """
    chain = U.chain
    fa, fb = A.factors(chain), B.factors(chain)
    all_f = chain.all_factors
    ra = list(fa) + [f for f in all_f if f not in set(fa)]
    cb = list(fb) + [f for f in all_f if f not in set(fb)]
    dims = [chain.factor_dims[f] for f in all_f]
    n = len(all_f)
    u = U.dense().reshape(dims + dims)
    u = u.transpose(ra + [n + f for f in cb])
    da = int(np.prod(chain.dims_of(fa)))
    db = int(np.prod(chain.dims_of(fb)))
    dim = u.size ** 0.5
    u = u.reshape(da, int(dim) // da, db, int(dim) // db)
    x = u.transpose(0, 2, 1, 3).reshape(da * db, -1)
    f = x @ x.conj().T
    return float(np.sum(f * f.T).real)


def _eta_swap(U: QCAOperator, A: Interval, B: Interval) -> float:
    chain = U.chain
    da = math.prod(chain.dims_of(A.factors(chain)))
    db = math.prod(chain.dims_of(B.factors(chain)))
    t = swap_trace(U, A, B)
    return math.sqrt(da * db) / chain.dense_dim * math.sqrt(max(t, 0.0))


def eta_overlap(U: QCAOperator, A: Interval, B: Interval, method: str = "direct") -> float:
    """eta(U^dagger A U, B), the overlap of the evolved algebra of A with that of B."""
    if method == "direct":
        return _eta_direct(U, A, B)
    if method == "swap":
        return _eta_swap(U, A, B)
    raise DomainError(f"unknown method {method!r}")


DIRECT_BUDGET = 2e9


def direct_cost(pl: Placement) -> float:
    """Rough flop count of the basis-sum method on a placement."""
    d = pl.qca.chain.d
    reach = pl.A.length + pl.cone[0] + pl.cone[1]
    return float(d) ** (2 * pl.A.length) * float(d) ** (2 * reach) * 2


def gnvw_ratio(U: QCAOperator, A: Interval | None = None, B: Interval | None = None,
               method: str = "direct", strict: bool = False) -> float:
    """The unsnapped overlap ratio.

    Without explicit intervals, a QCA whose best placement is too expensive
    for the basis sum is split into depth-1 pieces and the (multiplicative)
    index is assembled from theirs.
    """
    pl = resolve_placement(U, A, B, strict)
    if A is None and method == "direct" and direct_cost(pl) > DIRECT_BUDGET:
        pieces = layer_groups(U)
        if len(pieces) > 1:
            return math.prod(gnvw_ratio(p, method=method) for p in pieces)
    V = pl.qca
    return eta_overlap(V, pl.A, pl.B, method) / eta_overlap(V, pl.B, pl.A, method)


def gnvw_index(U: QCAOperator, A: Interval | None = None, B: Interval | None = None,
               method: str = "direct", strict: bool = False) -> RationalIndex:
    """ind(U) = eta(U^dagger A U, B) / eta(A, U^dagger B U), snapped to a d-smooth rational.

    Without intervals a valid pair is chosen automatically (see ``auto_placement``).
    """
    x = gnvw_ratio(U, A, B, method, strict)
    return rational_snap(x, U.chain.d, max_power=2 * U.chain.n_sites)
