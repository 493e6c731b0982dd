"""The GNVW index as a Z_2 index of the doubled system U (x) U.

SWAP_{A1,A2} exchanges the two copies on an interval A.  Conjugation by
U (x) U only changes it near the ends of A,

    (U x U)^dagger SWAP_A (U x U) = Y_AL SWAP_A Y_AR,

and |Tr(Y_AL SWAP_AL) / Tr(SWAP_AL)| is the index of U.  The doubled QCA is
kept in layered form (gates act on one copy), and SWAPs are diagonal in the
copy-exchange symmetry, so nothing of dimension d^(2n) is ever built.
"""
from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .errors import LocalityViolation, NotFactorizable
from .gnvw import RationalIndex, rational_snap
from .model import Interval, QCAOperator, doubled, swap_rep
from .spi import LRDecomposition, Window, _padded_trace, check_window, lr_decompose, make_window
from .tensor import DenseOperator, normalized_trace


@dataclass(frozen=True)
class BoundaryOps:
    Y_AL: DenseOperator
    Y_AR: DenseOperator
    Y_BL: DenseOperator
    Y_BR: DenseOperator
    theta: float
    junction_phase: float       # Y_AR = exp(i phase) Y_BL^dagger
    junction_residual: float
    window: Window
    A: Interval
    B: Interval
    dec_A: LRDecomposition
    dec_B: LRDecomposition


def _swap_on(window: Window, cells) -> DenseOperator:
    return window.rep.restricted(window.qca.chain, cells, 1)


def _with_positive_left_trace(dec: LRDecomposition) -> tuple[DenseOperator, DenseOperator]:
    """L_1, R_1 rephased so that Tr(L_1) = Tr(Y_L SWAP_L) is real positive."""
    L, R = dec.L[1], dec.R[1]
    tr = complex(np.trace(L.matrix))
    if abs(tr) < 1e-12:
        return L, R
    ph = tr / abs(tr)
    return L.scaled(np.conj(ph)), R.scaled(ph)


def _on_common(a: DenseOperator, b: DenseOperator, dims) -> tuple[DenseOperator, DenseOperator]:
    sup = tuple(sorted(set(a.support) | set(b.support)))
    return a.extend(sup, dims), b.extend(sup, dims)


def extract_boundary_ops(U: QCAOperator, A: Interval | None = None, strict: bool = False) -> BoundaryOps:
    """Y_AL, Y_AR (from the interval A) and Y_BL, Y_BR (from the interval B right after A).

    Without ``A`` a window is chosen automatically on the doubled chain
    (possibly in blocked units, see ``Window.describe``).
    """
    D = doubled(U)
    srep = swap_rep(U.chain.d, U.chain.factors)
    try:
        win = make_window(D, srep, A, strict)
        Vq, rep = win.qca, win.rep
        A = win.I
        B = Interval(A.start + A.length, A.length)
        check_window(Vq, B, strict)
        dec_a = lr_decompose(Vq, rep, A, strict, check_symmetry=False)
        dec_b = lr_decompose(Vq, rep, B, strict, check_symmetry=False)
    except NotFactorizable as exc:
        raise LocalityViolation(f"SWAP boundary does not factor: {exc}") from exc
    chain = Vq.chain
    dims = chain.factor_dims
    wa, wb = dec_a.window, dec_b.window
    ah, bh = A.halves(), B.halves()
    s_al, s_ar = (_swap_on(wa, h.cells(chain)) for h in ah)
    s_bl, s_br = (_swap_on(wb, h.cells(chain)) for h in bh)

    la, ra = _with_positive_left_trace(dec_a)
    lb, rb = _with_positive_left_trace(dec_b)
    # L_1 = Y_L SWAP_L and R_1 = SWAP_R Y_R; SWAPs are involutions
    y_al = la @ s_al
    y_ar = s_ar @ ra
    y_bl = lb @ s_bl
    y_br = s_br @ rb

    mid = s_ar @ y_ar @ s_bl
    theta = cmath.phase(complex(np.trace(mid.matrix))) if abs(np.trace(mid.matrix)) > 1e-12 else 0.0
    p, q = _on_common(y_ar, y_bl.dag(), dims)
    ph = normalized_trace(DenseOperator(p.support, p.dims, q.matrix.conj().T @ p.matrix))
    phase = cmath.phase(ph) if abs(ph) > 1e-12 else 0.0
    resid = float(np.max(np.abs(p.matrix - cmath.exp(1j * phase) * q.matrix)))
    return BoundaryOps(y_al, y_ar, y_bl, y_br, theta, phase, resid, win, A, B, dec_a, dec_b)


@dataclass(frozen=True)
class DoubledIndex:
    ind: RationalIndex               # |Tr(Y_AL SWAP_AL) / Tr(SWAP_AL)|
    inverse_from_R: float            # |Tr(R_1) / Tr(U_{1,R})| of the doubled system
    right_ratio: float               # Tr(SWAP_BR) / |Tr(SWAP_BR Y_BR)|
    ops: BoundaryOps


def index_via_doubled(U: QCAOperator, A: Interval | None = None, strict: bool = False) -> DoubledIndex:
    ops = extract_boundary_ops(U, A, strict)
    chain = ops.window.qca.chain
    s_al = _swap_on(ops.window, ops.A.halves()[0].cells(chain))
    l1 = ops.dec_A.L[1]
    dim = max(l1.dim, s_al.dim)
    left = abs(_padded_trace(l1, dim) / _padded_trace(s_al, dim))
    ur = ops.dec_A.reference(1)[1]
    r1 = ops.dec_A.R[1]
    dim = max(r1.dim, ur.dim)
    inv = abs(_padded_trace(r1, dim) / _padded_trace(ur, dim))
    rb, urb = ops.dec_B.R[1], ops.dec_B.reference(1)[1]
    dim = max(rb.dim, urb.dim)
    right = abs(_padded_trace(urb, dim) / _padded_trace(rb, dim))
    ind = rational_snap(left, U.chain.d, max_power=2 * U.chain.n_sites)
    return DoubledIndex(ind, inv, right, ops)


def doubled_z2(U: QCAOperator, strict: bool = False):
    """(pi0, pi1) of U (x) U for the copy-exchange symmetry, via the spi module."""
    from .spi import z2_indices

    D = doubled(U)
    return z2_indices(D, swap_rep(U.chain.d, U.chain.factors), strict=strict)
