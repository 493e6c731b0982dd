"""Dense operators with explicit site support.

Every operator carries the ordered list of site labels it acts on and the
local dimension of each of them.  Matrices use the row-major convention in
which the first listed site is the most significant index.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping, Sequence

import numpy as np

from .errors import DomainError, NotFactorizable

UNITARY_TOL = 1e-10
SUPPORT_TOL = 1e-8
FACTOR_TOL = 1e-6

# above this flop estimate the rank-1 split uses power iteration instead of a full SVD
_SVD_COST_LIMIT = 2e7


@dataclass(frozen=True, eq=False)
class DenseOperator:
    support: tuple[int, ...]
    dims: tuple[int, ...]
    matrix: np.ndarray

    def __post_init__(self):
        support = tuple(int(s) for s in self.support)
        dims = tuple(int(d) for d in self.dims)
        if len(support) != len(dims):
            raise DomainError("support and dims differ in length")
        if len(set(support)) != len(support):
            raise DomainError(f"repeated site in support {support}")
        mat = np.asarray(self.matrix, dtype=complex)
        dim = int(np.prod(dims, dtype=np.int64)) if dims else 1
        if mat.shape != (dim, dim):
            raise DomainError(f"matrix shape {mat.shape} does not match dims {dims}")
        object.__setattr__(self, "support", support)
        object.__setattr__(self, "dims", dims)
        object.__setattr__(self, "matrix", mat)

    @classmethod
    def identity(cls, support: Sequence[int] = (), dims: Sequence[int] = ()) -> "DenseOperator":
        dim = int(np.prod(dims, dtype=np.int64)) if len(dims) else 1
        return cls(tuple(support), tuple(dims), np.eye(dim, dtype=complex))

    @classmethod
    def scalar(cls, value: complex) -> "DenseOperator":
        return cls((), (), np.array([[value]], dtype=complex))

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    @property
    def site_dims(self) -> dict[int, int]:
        return dict(zip(self.support, self.dims))

    def tensor(self) -> np.ndarray:
        return self.matrix.reshape(self.dims + self.dims)

    def dag(self) -> "DenseOperator":
        return DenseOperator(self.support, self.dims, self.matrix.conj().T)

    def scaled(self, c: complex) -> "DenseOperator":
        return DenseOperator(self.support, self.dims, c * self.matrix)

    def reorder(self, order: Sequence[int]) -> "DenseOperator":
        """Same operator with the tensor factors listed in ``order``."""
        order = tuple(order)
        if order == self.support:
            return self
        if sorted(order) != sorted(self.support):
            raise DomainError(f"{order} is not a reordering of {self.support}")
        pos = {s: k for k, s in enumerate(self.support)}
        n = len(order)
        axes = [pos[s] for s in order]
        t = self.tensor().transpose(axes + [n + a for a in axes])
        dims = tuple(self.dims[a] for a in axes)
        return DenseOperator(order, dims, t.reshape(self.dim, self.dim))

    def sorted(self) -> "DenseOperator":
        return self.reorder(sorted(self.support))

    def extend(self, support: Sequence[int], site_dims: Mapping[int, int]) -> "DenseOperator":
        """Embed into a larger support, tensoring identities on the new sites."""
        support = tuple(support)
        missing = [s for s in self.support if s not in support]
        if missing:
            raise DomainError(f"sites {missing} are not in the target support")
        extra = [s for s in support if s not in self.site_dims]
        if not extra:
            return self.reorder(support)
        extra_dims = [int(site_dims[s]) for s in extra]
        mat = np.kron(self.matrix, np.eye(int(np.prod(extra_dims)), dtype=complex))
        op = DenseOperator(self.support + tuple(extra), self.dims + tuple(extra_dims), mat)
        return op.reorder(support)

    def kron(self, other: "DenseOperator") -> "DenseOperator":
        if set(self.support) & set(other.support):
            raise DomainError("kron of operators with overlapping support")
        return DenseOperator(self.support + other.support, self.dims + other.dims,
                             np.kron(self.matrix, other.matrix))

    def __matmul__(self, other: "DenseOperator") -> "DenseOperator":
        a, b = align(self, other)
        return DenseOperator(a.support, a.dims, a.matrix @ b.matrix)

    def is_unitary(self, tol: float = UNITARY_TOL) -> bool:
        return unitarity_error(self.matrix) < tol


def unitarity_error(mat: np.ndarray) -> float:
    return float(np.max(np.abs(mat.conj().T @ mat - np.eye(mat.shape[0]))))


def align(*ops: DenseOperator) -> list[DenseOperator]:
    """Extend every operator to the sorted union of their supports."""
    dims: dict[int, int] = {}
    for op in ops:
        for s, d in op.site_dims.items():
            if dims.setdefault(s, d) != d:
                raise DomainError(f"site {s} has inconsistent dimensions")
    support = tuple(sorted(dims))
    return [op.extend(support, dims) for op in ops]


def normalized_trace(op: DenseOperator | np.ndarray) -> complex:
    mat = op.matrix if isinstance(op, DenseOperator) else np.asarray(op)
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise DomainError("normalized trace of a non-square matrix")
    return complex(np.trace(mat) / mat.shape[0])


def overlap(a: DenseOperator, b: DenseOperator) -> complex:
    """Normalized Hilbert-Schmidt product tr(a^dagger b), identities implied off support."""
    a, b = align(a, b)
    return complex(np.vdot(a.matrix, b.matrix) / a.dim)


def partial_trace(op: DenseOperator, keep: Iterable[int]) -> DenseOperator:
    """Unnormalized partial trace onto ``keep`` (kept in the operator's own order)."""
    keep_set = set(keep)
    if not keep_set <= set(op.support):
        raise DomainError(f"{sorted(keep_set - set(op.support))} not in support {op.support}")
    kept = [s for s in op.support if s in keep_set]
    traced = [s for s in op.support if s not in keep_set]
    if not traced:
        return op
    sd = op.site_dims
    dk = int(np.prod([sd[s] for s in kept], dtype=np.int64)) if kept else 1
    dt = int(np.prod([sd[s] for s in traced], dtype=np.int64))
    t = op.reorder(kept + traced).matrix.reshape(dk, dt, dk, dt)
    return DenseOperator(tuple(kept), tuple(sd[s] for s in kept), np.einsum("aibi->ab", t))


def reduce_support(op: DenseOperator, tol: float = SUPPORT_TOL) -> DenseOperator:
    """Drop every site on which ``op`` acts as the identity (max-norm tolerance)."""
    scale = max(1.0, float(np.max(np.abs(op.matrix)))) if op.dim else 1.0
    current = op
    for s in op.support:
        if s not in current.support:
            continue
        rest = [x for x in current.support if x != s]
        ds = current.site_dims[s]
        dr = current.dim // ds
        t = current.reorder(rest + [s]).matrix.reshape(dr, ds, dr, ds)
        red = np.einsum("aibi->ab", t) / ds
        if np.max(np.abs(t - red[:, None, :, None] * np.eye(ds)[None, :, None, :])) < tol * scale:
            current = DenseOperator(tuple(rest), tuple(current.site_dims[x] for x in rest), red)
    return current


def conjugate(op: DenseOperator, gate: DenseOperator) -> DenseOperator:
    """gate^dagger op gate on the union of supports."""
    if not set(op.support) & set(gate.support):
        return op
    extra = tuple(s for s in gate.support if s not in op.site_dims)
    o = op.extend(op.support + extra, gate.site_dims) if extra else op
    n, k = len(o.support), len(gate.support)
    pos = [o.support.index(s) for s in gate.support]
    gt = gate.tensor()
    t = np.tensordot(gt.conj(), o.tensor(), axes=(list(range(k)), pos))
    t = np.moveaxis(t, list(range(k)), pos)
    t = np.tensordot(t, gt, axes=([n + p for p in pos], list(range(k))))
    t = np.moveaxis(t, list(range(2 * n - k, 2 * n)), [n + p for p in pos])
    return DenseOperator(o.support, o.dims, t.reshape(o.dim, o.dim))


@lru_cache(maxsize=None)
def _clock_shift(d: int) -> tuple[np.ndarray, np.ndarray]:
    shift = np.roll(np.eye(d, dtype=complex), 1, axis=0)
    clock = np.diag(np.exp(2j * np.pi * np.arange(d) / d))
    return shift, clock


def site_basis(d: int) -> list[np.ndarray]:
    """The d*d clock-and-shift operators X^a Z^b, ordered by (a, b); element 0 is 1."""
    if d < 1:
        raise DomainError("local dimension must be positive")
    x, z = _clock_shift(d)
    out = []
    for a in range(d):
        xa = np.linalg.matrix_power(x, a)
        for b in range(d):
            out.append(xa @ np.linalg.matrix_power(z, b))
    return out


def basis_stack(dims: Sequence[int]) -> np.ndarray:
    """All products of site bases as an array of shape (prod d^2, D, D)."""
    stack = np.ones((1, 1, 1), dtype=complex)
    for d in dims:
        local = np.array(site_basis(d))
        stack = np.einsum("kab,lcd->klacbd", stack, local).reshape(
            stack.shape[0] * local.shape[0], stack.shape[1] * d, stack.shape[2] * d)
    return stack


def operator_basis(support: Sequence[int], dims: int | Sequence[int]) -> list[DenseOperator]:
    """Orthonormal (normalized trace) operator basis of the algebra on ``support``."""
    support = tuple(support)
    if not support:
        raise DomainError("operator basis needs at least one site")
    if isinstance(dims, (int, np.integer)):
        dims = (int(dims),) * len(support)
    dims = tuple(dims)
    return [DenseOperator(support, dims, m) for m in basis_stack(dims)]


def _top_singular_triplet(m: np.ndarray) -> tuple[np.ndarray, float, np.ndarray]:
    """Leading singular triplet by power iteration (used for matrices too big for a full SVD)."""
    col = int(np.argmax(np.einsum("ij,ij->j", m.conj(), m).real))
    u = m[:, col].copy()
    sigma = 0.0
    vh = np.zeros(m.shape[1], dtype=complex)
    for _ in range(4):
        u /= np.linalg.norm(u)
        vh = u.conj() @ m
        sigma = float(np.linalg.norm(vh))
        if sigma == 0.0:
            break
        vh /= sigma
        u = m @ vh.conj()
    u /= np.linalg.norm(u)
    return u, sigma, vh


def rank1_factorize(op: DenseOperator, cut: int | Iterable[int], tol: float = FACTOR_TOL
                    ) -> tuple[DenseOperator, DenseOperator, float]:
    """Split ``op`` as L (x) R across a cut via its operator Schmidt decomposition.

    ``cut`` is either the number of leading support sites that go left, or the
    explicit set of left sites.  R is scaled to unit normalized Hilbert-Schmidt
    norm; its phase makes Tr(R) real positive (or, if Tr(R) vanishes, its
    largest entry real positive).  The residual is the Schmidt weight outside
    the leading term relative to the leading singular value.
    """
    if isinstance(cut, (int, np.integer)):
        left = list(op.support[:cut])
    else:
        left_set = set(cut)
        left = [s for s in op.support if s in left_set]
    right = [s for s in op.support if s not in set(left)]
    if not left or not right:
        raise DomainError("cut must leave both sides nonempty")
    sd = op.site_dims
    dl = int(np.prod([sd[s] for s in left], dtype=np.int64))
    dr = int(np.prod([sd[s] for s in right], dtype=np.int64))
    t = op.reorder(left + right).matrix.reshape(dl, dr, dl, dr)
    m = t.transpose(0, 2, 1, 3).reshape(dl * dl, dr * dr)

    if min(m.shape) ** 2 * max(m.shape) <= _SVD_COST_LIMIT:
        u, s, vh = np.linalg.svd(m, full_matrices=False)
        sigma = float(s[0])
        tail = float(np.sqrt(np.sum(s[1:] ** 2)))
        u0, v0 = u[:, 0], vh[0]
    else:
        u0, sigma, v0 = _top_singular_triplet(m)
        tail = float(np.linalg.norm(m - sigma * np.outer(u0, v0)))
    if sigma == 0.0:
        raise NotFactorizable(float("inf"), "cannot factor the zero operator")
    residual = tail / sigma
    if residual > tol:
        raise NotFactorizable(residual)

    r = (v0 * np.sqrt(dr)).reshape(dr, dr)
    l = (u0 * (sigma / np.sqrt(dr))).reshape(dl, dl)
    L = DenseOperator(tuple(left), tuple(sd[s] for s in left), l)
    R = DenseOperator(tuple(right), tuple(sd[s] for s in right), r)
    L, R = fix_phase(L, R)
    return L, R, residual


def fix_phase(L: DenseOperator, R: DenseOperator) -> tuple[DenseOperator, DenseOperator]:
    """Move a phase from R to L so that Tr(R) is real positive (or, when Tr(R)
    vanishes, the largest entry of R is)."""
    tr = np.trace(R.matrix)
    if abs(tr) > 1e-8:
        phase = tr / abs(tr)
    else:
        flat = R.matrix.reshape(-1)
        big = flat[np.argmax(np.abs(flat))]
        phase = big / abs(big)
    return L.scaled(phase), R.scaled(np.conj(phase))


def split_product(op: DenseOperator, tol: float = 1e-11) -> list[DenseOperator]:
    """Break ``op`` into tensor factors wherever it is an exact product.

    Identity sites are dropped; an overall scalar ends up in the first factor.
    """
    op = reduce_support(op, tol)
    if len(op.support) <= 1:
        return [op]
    for k in range(1, len(op.support)):
        try:
            L, R, _ = rank1_factorize(op, k, tol)
        except NotFactorizable:
            continue
        return split_product(L, tol) + split_product(R, tol)
    return [op]


def product_of(factors: Sequence[DenseOperator]) -> DenseOperator:
    out = DenseOperator.scalar(1.0)
    for f in factors:
        out = out.kron(f)
    return out


def permutation_operator(perm: Sequence[int], dims: int | Sequence[int],
                         support: Sequence[int] | None = None) -> DenseOperator:
    """Unitary P relabelling tensor factors: P O_j P^dagger = O_{perm[j]}.

    ``perm`` is given in positions 0..n-1 of ``support`` (default: 0..n-1).
    """
    perm = [int(p) for p in perm]
    n = len(perm)
    if sorted(perm) != list(range(n)):
        raise DomainError(f"{perm} is not a permutation of 0..{n - 1}")
    if isinstance(dims, (int, np.integer)):
        dims = (int(dims),) * n
    dims = tuple(int(d) for d in dims)
    if len(dims) != n:
        raise DomainError("dims and permutation differ in length")
    for j in range(n):
        if dims[j] != dims[perm[j]]:
            raise DomainError(f"cannot move a {dims[j]}-dim site onto a {dims[perm[j]]}-dim site")
    support = tuple(range(n)) if support is None else tuple(support)
    dim = int(np.prod(dims, dtype=np.int64)) if dims else 1
    inv = np.argsort(perm)
    eye = np.eye(dim, dtype=complex).reshape(dims + (dim,))
    mat = eye.transpose(list(inv) + [n]).reshape(dim, dim)
    return DenseOperator(support, dims, mat)
