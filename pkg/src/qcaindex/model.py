"""Periodic chains, on-site symmetries and layered QCA.

A chain has ``n_sites`` cells.  Each cell is a tensor product of one or more
*factors* (a plain spin chain has a single factor of dimension ``d`` per
cell; blocked chains, doubled chains and classification witnesses use
several).  Operators are supported on factor labels ``cell * n_factors + k``.

A QCA is stored as a list of layers in the order they act on states.  Its
Heisenberg action ``U^dagger O U`` is evaluated layer by layer on the local
support of ``O``, so a QCA is never materialized unless explicitly asked.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np
from scipy.stats import unitary_group

from .errors import DomainError, SpectrumObstruction
from .tensor import (
    SUPPORT_TOL,
    UNITARY_TOL,
    DenseOperator,
    conjugate,
    reduce_support,
    product_of,
    site_basis,
    split_product,
    unitarity_error,
)

DENSE_CAP = 4096
STATE_CAP = 1 << 20


@dataclass(frozen=True)
class ChainSpec:
    n_sites: int
    d: int
    factors: tuple[int, ...] = ()

    def __post_init__(self):
        if self.n_sites < 1:
            raise DomainError("n_sites must be positive")
        factors = tuple(int(f) for f in self.factors) or (int(self.d),)
        if int(np.prod(factors)) != self.d:
            raise DomainError(f"factor dims {factors} do not multiply to d={self.d}")
        if self.d < 1 or any(f < 1 for f in factors):
            raise DomainError("dimensions must be positive")
        object.__setattr__(self, "factors", factors)

    @property
    def n_factors(self) -> int:
        return len(self.factors)

    @property
    def dense_dim(self) -> int:
        return self.d ** self.n_sites

    @property
    def factor_dims(self) -> dict[int, int]:
        f = self.n_factors
        return {c * f + k: self.factors[k] for c in range(self.n_sites) for k in range(f)}

    @property
    def all_factors(self) -> tuple[int, ...]:
        return tuple(range(self.n_sites * self.n_factors))

    def cell_factors(self, cell: int) -> tuple[int, ...]:
        c = cell % self.n_sites
        return tuple(c * self.n_factors + k for k in range(self.n_factors))

    def cell_of(self, factor: int) -> int:
        return factor // self.n_factors

    def factors_of(self, cells: Iterable[int]) -> tuple[int, ...]:
        out: list[int] = []
        for c in cells:
            out.extend(self.cell_factors(c))
        return tuple(out)

    def dims_of(self, factors: Iterable[int]) -> tuple[int, ...]:
        return tuple(self.factors[f % self.n_factors] for f in factors)


@dataclass(frozen=True)
class Interval:
    start: int
    length: int

    def __post_init__(self):
        if self.length < 1:
            raise DomainError("interval length must be positive")

    def cells(self, chain: ChainSpec) -> tuple[int, ...]:
        if self.length > chain.n_sites:
            raise DomainError(f"interval of length {self.length} on a {chain.n_sites}-site chain")
        return tuple((self.start + k) % chain.n_sites for k in range(self.length))

    def factors(self, chain: ChainSpec) -> tuple[int, ...]:
        return chain.factors_of(self.cells(chain))

    def halves(self) -> tuple["Interval", "Interval"]:
        if self.length % 2:
            raise DomainError("interval must have an even number of sites")
        h = self.length // 2
        return Interval(self.start, h), Interval(self.start + h, h)

    def shifted(self, k: int) -> "Interval":
        return Interval(self.start + k, self.length)

    def __str__(self):
        return f"[{self.start}, {self.start + self.length - 1}]"


@dataclass(frozen=True, eq=False)
class OnsiteRep:
    """Z_N acting on one cell through ``mu1`` (and its powers).

    ``factor_mats`` optionally records a product structure mu1 = (x) over the
    cell factors; it lets factor permutations be checked for symmetry exactly.
    """
    N: int
    mu1: np.ndarray
    factor_mats: tuple[np.ndarray, ...] | None = None

    def __post_init__(self):
        mu1 = np.asarray(self.mu1, dtype=complex)
        if mu1.ndim != 2 or mu1.shape[0] != mu1.shape[1]:
            raise DomainError("mu1 must be square")
        if self.N < 1:
            raise DomainError("group order must be positive")
        if unitarity_error(mu1) > UNITARY_TOL:
            raise DomainError("mu1 is not unitary")
        if np.max(np.abs(np.linalg.matrix_power(mu1, self.N) - np.eye(len(mu1)))) > UNITARY_TOL:
            raise DomainError(f"mu1^{self.N} != 1")
        object.__setattr__(self, "mu1", mu1)
        if self.factor_mats is not None:
            mats = tuple(np.asarray(m, dtype=complex) for m in self.factor_mats)
            prod = np.ones((1, 1), dtype=complex)
            for m in mats:
                prod = np.kron(prod, m)
            if prod.shape != mu1.shape or np.max(np.abs(prod - mu1)) > UNITARY_TOL:
                raise DomainError("factor_mats do not multiply to mu1")
            object.__setattr__(self, "factor_mats", mats)

    @classmethod
    def from_exponents(cls, N: int, exponents: Sequence[int]) -> "OnsiteRep":
        """Diagonal representation diag(w^r) with w = exp(2 pi i / N)."""
        return cls(N, np.diag(np.exp(2j * np.pi * np.asarray(exponents) / N)))

    @classmethod
    def product(cls, N: int, mats: Sequence[np.ndarray]) -> "OnsiteRep":
        prod = np.ones((1, 1), dtype=complex)
        for m in mats:
            prod = np.kron(prod, np.asarray(m, dtype=complex))
        return cls(N, prod, tuple(mats))

    @property
    def d(self) -> int:
        return self.mu1.shape[0]

    def mu(self, g: int) -> np.ndarray:
        return np.linalg.matrix_power(self.mu1, g % self.N)

    def character(self, g: int) -> complex:
        return complex(np.trace(self.mu(g)))

    @property
    def chi(self) -> complex:
        return self.character(1)

    def restricted_factors(self, chain: ChainSpec, cells: Sequence[int], g: int) -> list[DenseOperator]:
        """mu_g on each listed cell, one operator per cell."""
        m = self.mu(g)
        out = []
        for c in cells:
            f = chain.cell_factors(c)
            out.append(DenseOperator(f, chain.dims_of(f), m))
        return out

    def restricted(self, chain: ChainSpec, cells: Sequence[int], g: int) -> DenseOperator:
        """mu_g on every listed cell."""
        m = self.mu(g)
        factors = chain.factors_of(cells)
        mat = np.ones((1, 1), dtype=complex)
        for _ in cells:
            mat = np.kron(mat, m)
        return DenseOperator(factors, chain.dims_of(factors), mat)


# ---------------------------------------------------------------- layers

@dataclass(frozen=True, eq=False)
class Permutation:
    """Factor relabelling with layer^dagger O_j layer = O_{perm[j]}."""
    perm: tuple[int, ...]

    def inverse(self) -> "Permutation":
        inv = [0] * len(self.perm)
        for j, p in enumerate(self.perm):
            inv[p] = j
        return Permutation(tuple(inv))

    def conj(self, op: DenseOperator) -> DenseOperator:
        return DenseOperator(tuple(self.perm[s] for s in op.support), op.dims, op.matrix)

    def apply(self, psi: np.ndarray) -> np.ndarray:
        n = len(self.perm)
        return psi.transpose(list(self.perm) + list(range(n, psi.ndim)))


@dataclass(frozen=True, eq=False)
class Gate:
    op: DenseOperator

    def inverse(self) -> "Gate":
        return Gate(self.op.dag())

    def conj(self, op: DenseOperator) -> DenseOperator:
        return conjugate(op, self.op)

    def apply(self, psi: np.ndarray) -> np.ndarray:
        return apply_operator(psi, self.op)


@dataclass(frozen=True, eq=False)
class Dense:
    """A unitary on the whole chain (all factors, in label order)."""
    op: DenseOperator

    def inverse(self) -> "Dense":
        return Dense(self.op.dag())

    def conj(self, op: DenseOperator) -> DenseOperator:
        return conjugate(op, self.op)

    def apply(self, psi: np.ndarray) -> np.ndarray:
        return apply_operator(psi, self.op)


Layer = Permutation | Gate | Dense


def apply_operator(psi: np.ndarray, op: DenseOperator) -> np.ndarray:
    """Apply ``op`` to a tensor whose leading axes are the chain factors."""
    k = len(op.support)
    t = op.tensor()
    out_axes = list(range(k))
    in_axes = [k + a for a in range(k)]
    res = np.tensordot(t, psi, axes=(in_axes, list(op.support)))
    # tensordot puts the operator's output axes first; move them back in place
    rest = [a for a in range(psi.ndim) if a not in op.support]
    order = [0] * psi.ndim
    for pos, s in enumerate(op.support):
        order[s] = out_axes[pos]
    for pos, a in enumerate(rest):
        order[a] = k + pos
    return res.transpose(order)


@dataclass(frozen=True, eq=False)
class QCAOperator:
    chain: ChainSpec
    layers: tuple[Layer, ...] = field(default_factory=tuple)
    xi: int = 0
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "layers", tuple(self.layers))
        if self.xi < 0:
            raise DomainError("spreading length must be nonnegative")

    def conjugate(self, op: DenseOperator, prune: bool = True) -> DenseOperator:
        """U^dagger op U, evaluated on the light cone of ``op`` only."""
        for layer in reversed(self.layers):
            op = layer.conj(op)
        if prune:
            op = reduce_support(op, SUPPORT_TOL * 1e-2)
        return op.sorted()

    def conjugate_factored(self, op: DenseOperator | Sequence[DenseOperator]) -> list[DenseOperator]:
        """U^dagger op U kept as a list of tensor factors on disjoint supports.

        A gate only merges the factors it touches, and the merged result is
        split again wherever it is an exact product, so operators that stay
        close to products never grow to the size of their light cone.
        """
        ops = [op] if isinstance(op, DenseOperator) else list(op)
        factors = [f for o in ops for f in split_product(o)]
        for layer in reversed(self.layers):
            if isinstance(layer, Permutation):
                factors = [layer.conj(f) for f in factors]
                continue
            sites = set(layer.op.support)
            hit = [i for i, f in enumerate(factors) if sites & set(f.support)]
            if not hit:
                continue
            merged = product_of([factors[i] for i in hit])
            factors = [f for i, f in enumerate(factors) if i not in hit] + split_product(layer.conj(merged))
        return factors

    def apply(self, psi: np.ndarray) -> np.ndarray:
        """U psi for a tensor with one axis per factor (plus trailing batch axes)."""
        for layer in self.layers:
            psi = layer.apply(psi)
        return psi

    def dense(self) -> np.ndarray:
        dim = self.chain.dense_dim
        if dim > DENSE_CAP:
            raise DomainError(f"dense dimension {dim} exceeds the cap {DENSE_CAP}")
        dims = [self.chain.factor_dims[f] for f in self.chain.all_factors]
        psi = np.eye(dim, dtype=complex).reshape(dims + [dim])
        return self.apply(psi).reshape(dim, dim)

    def densified(self) -> "QCAOperator":
        f = self.chain.all_factors
        op = DenseOperator(f, self.chain.dims_of(f), self.dense())
        return QCAOperator(self.chain, (Dense(op),), self.xi, self.label)

    def dag(self) -> "QCAOperator":
        return QCAOperator(self.chain, tuple(l.inverse() for l in reversed(self.layers)), self.xi,
                           f"({self.label})^dag" if self.label else "")

    def __matmul__(self, other: "QCAOperator") -> "QCAOperator":
        """Operator product self * other (``other`` acts on states first)."""
        if other.chain != self.chain:
            raise DomainError("cannot compose QCA on different chains")
        label = " * ".join(x for x in (self.label, other.label) if x)
        return QCAOperator(self.chain, other.layers + self.layers, self.xi + other.xi, label)

    def with_xi(self, xi: int) -> "QCAOperator":
        return QCAOperator(self.chain, self.layers, xi, self.label)


# ---------------------------------------------------------------- constructors

def identity_qca(chain: ChainSpec) -> QCAOperator:
    return QCAOperator(chain, (), 0, "identity")


def factor_permutation_qca(chain: ChainSpec, moves: Sequence[int], xi: int | None = None,
                           label: str = "") -> QCAOperator:
    """Translate factor k of every cell by ``moves[k]`` cells (operators move right for >0)."""
    if len(moves) != chain.n_factors:
        raise DomainError("need one displacement per cell factor")
    f = chain.n_factors
    perm = tuple(((c + moves[k]) % chain.n_sites) * f + k
                 for c in range(chain.n_sites) for k in range(f))
    xi = max(abs(m) for m in moves) if xi is None else xi
    return QCAOperator(chain, (Permutation(perm),), xi, label)


def shift_qca(chain: ChainSpec, steps: int) -> QCAOperator:
    """Translation with U^dagger O_i U = O_{i+steps}."""
    if abs(steps) >= chain.n_sites:
        raise DomainError(f"|steps| must be below n_sites={chain.n_sites}")
    if steps == 0:
        return QCAOperator(chain, (), 0, "shift:0")
    return factor_permutation_qca(chain, [steps] * chain.n_factors, abs(steps), f"shift:{steps}")


def circuit_layer(chain: ChainSpec, gates: Sequence[tuple[Sequence[int], np.ndarray]]) -> list[Gate]:
    """Gates on disjoint groups of cells; a gate's matrix acts on all factors of its cells."""
    used: set[int] = set()
    out = []
    for cells, mat in gates:
        cells = [c % chain.n_sites for c in cells]
        if used & set(cells) or len(set(cells)) != len(cells):
            raise DomainError(f"gate on cells {cells} overlaps another gate in the layer")
        used |= set(cells)
        factors = chain.factors_of(cells)
        op = DenseOperator(factors, chain.dims_of(factors), mat)
        if not op.is_unitary():
            raise DomainError(f"gate on cells {cells} is not unitary")
        out.append(Gate(op))
    return out


def brickwork_qca(chain: ChainSpec, layer1: Sequence[np.ndarray | None],
                  layer2: Sequence[np.ndarray | None], label: str = "brickwork") -> QCAOperator:
    """Depth-2 circuit W2 W1, W1 on cells (2i, 2i+1) and W2 on (2i-1, 2i).

    ``None`` entries are identity gates.  Operators spread at most two cells
    (one block of two cells), so the declared spreading length is 2.
    """
    n = chain.n_sites
    if n % 2 or n < 4:
        raise DomainError("brickwork needs an even number of sites, at least 4")
    half = n // 2
    if len(layer1) != half or len(layer2) != half:
        raise DomainError(f"each layer needs {half} gates")
    l1 = circuit_layer(chain, [((2 * i, 2 * i + 1), g) for i, g in enumerate(layer1) if g is not None])
    l2 = circuit_layer(chain, [((2 * i - 1, 2 * i), g) for i, g in enumerate(layer2) if g is not None])
    return QCAOperator(chain, tuple(l1 + l2), 2, label)


def _haar(dim: int, rng: np.random.Generator) -> np.ndarray:
    if dim == 1:
        return np.array([[np.exp(2j * np.pi * rng.random())]])
    return unitary_group.rvs(dim, random_state=rng)


def random_brickwork(chain: ChainSpec, seed: int) -> QCAOperator:
    rng = np.random.default_rng(seed)
    dim = chain.d ** 2
    half = chain.n_sites // 2
    l1 = [_haar(dim, rng) for _ in range(half)]
    l2 = [_haar(dim, rng) for _ in range(half)]
    return brickwork_qca(chain, l1, l2, f"brickwork:{seed}")


def isotypic_bases(mat: np.ndarray, N: int) -> dict[int, np.ndarray]:
    """Orthonormal eigenbases of a Z_N generator, keyed by the exponent r of w^r."""
    dim = mat.shape[0]
    powers = [np.eye(dim, dtype=complex)]
    for _ in range(1, N):
        powers.append(powers[-1] @ mat)
    out = {}
    for r in range(N):
        proj = sum(np.exp(-2j * np.pi * r * g / N) * powers[g] for g in range(N)) / N
        proj = (proj + proj.conj().T) / 2
        w, v = np.linalg.eigh(proj)
        cols = v[:, w > 0.5]
        if cols.shape[1]:
            out[r] = cols
    if sum(c.shape[1] for c in out.values()) != dim:
        raise DomainError("matrix is not a Z_N representation")
    return out


def random_symmetric_gate(rep: OnsiteRep, n_sites_in_gate: int, seed: int) -> DenseOperator:
    """Block-Haar unitary commuting with mu_g on each of ``n_sites_in_gate`` cells."""
    rng = np.random.default_rng(seed)
    big = np.ones((1, 1), dtype=complex)
    for _ in range(n_sites_in_gate):
        big = np.kron(big, rep.mu1)
    dim = big.shape[0]
    gate = np.zeros((dim, dim), dtype=complex)
    for r, q in sorted(isotypic_bases(big, rep.N).items()):
        gate += q @ _haar(q.shape[1], rng) @ q.conj().T
    return DenseOperator(tuple(range(n_sites_in_gate)), (rep.d,) * n_sites_in_gate, gate)


def symmetric_brickwork(chain: ChainSpec, rep: OnsiteRep, seed: int) -> QCAOperator:
    if rep.d != chain.d:
        raise DomainError("representation dimension differs from the local dimension")
    seeds = np.random.default_rng(seed).integers(0, 2**31, size=chain.n_sites)
    half = chain.n_sites // 2
    l1 = [random_symmetric_gate(rep, 2, int(s)).matrix for s in seeds[:half]]
    l2 = [random_symmetric_gate(rep, 2, int(s)).matrix for s in seeds[half:]]
    return brickwork_qca(chain, l1, l2, f"symbrick:{seed}")


def _matching_unitary(src: np.ndarray, dst: np.ndarray, N: int) -> np.ndarray:
    """V with V^dagger src V = dst for two diagonalizable Z_N generators of equal spectrum."""
    a, b = isotypic_bases(src, N), isotypic_bases(dst, N)
    v = np.zeros(src.shape, dtype=complex)
    for r in range(N):
        qa = a.get(r, np.zeros((src.shape[0], 0)))
        qb = b.get(r, np.zeros((src.shape[0], 0)))
        if qa.shape[1] != qb.shape[1]:
            raise SpectrumObstruction(f"eigenvalue w^{r} occurs {qa.shape[1]} times in one operator "
                                      f"and {qb.shape[1]} times in the other")
        v += qa @ qb.conj().T
    return v


def spi_example_circuit(rep: OnsiteRep, target_LR, n_sites: int = 12) -> QCAOperator:
    """Symmetric depth-2 circuit whose restricted symmetry ends in L (x) R.

    ``target_LR`` holds the multiplicity vectors of L_1 and R_1.  The layer
    acting last on states uses gates V on cells (2i, 2i+1) with
    V^dagger (mu x mu) V = L x R; the layer acting first uses gates W on
    (2i-1, 2i) with W^dagger (R x L) W = mu x mu, which restores the global
    symmetry.  Both exist iff L x R and mu x mu have the same spectrum.
    """
    from .reps import RepSpectrum, spectrum_matrix

    tl, tr = (t if isinstance(t, RepSpectrum) else RepSpectrum(rep.N, tuple(t)) for t in target_LR)
    if tl.N != rep.N or tr.N != rep.N:
        raise DomainError("target spectra use a different group order")
    if n_sites % 2 or n_sites < 4:
        raise DomainError("need an even number of at least 4 sites")
    lmat, rmat = spectrum_matrix(tl), spectrum_matrix(tr)
    if lmat.shape[0] != rep.d or rmat.shape[0] != rep.d:
        raise SpectrumObstruction("L and R must act on one site each")
    mm = np.kron(rep.mu1, rep.mu1)
    v = _matching_unitary(mm, np.kron(lmat, rmat), rep.N)
    w = _matching_unitary(np.kron(rmat, lmat), mm, rep.N)
    chain = ChainSpec(n_sites, rep.d)
    first = circuit_layer(chain, [((2 * i - 1, 2 * i), w) for i in range(n_sites // 2)])
    last = circuit_layer(chain, [((2 * i, 2 * i + 1), v) for i in range(n_sites // 2)])
    return QCAOperator(chain, tuple(first) + tuple(last), 2, f"spi-example:L={tl},R={tr}")


def doubled(U: QCAOperator) -> QCAOperator:
    """U (x) U on the two-copy chain; each cell holds copy-1 factors then copy-2 factors."""
    c = U.chain
    f = c.n_factors
    chain2 = ChainSpec(c.n_sites, c.d ** 2, c.factors + c.factors)

    def relabel(x: int, copy: int) -> int:
        return (x // f) * 2 * f + copy * f + x % f

    layers: list[Layer] = []
    for layer in U.layers:
        if isinstance(layer, Permutation):
            perm = [0] * (2 * len(layer.perm))
            for j, p in enumerate(layer.perm):
                for copy in (0, 1):
                    perm[relabel(j, copy)] = relabel(p, copy)
            layers.append(Permutation(tuple(perm)))
        else:
            op = layer.op
            for copy in (0, 1):
                layers.append(Gate(DenseOperator(tuple(relabel(s, copy) for s in op.support),
                                                 op.dims, op.matrix)))
    return QCAOperator(chain2, tuple(layers), U.xi, f"doubled({U.label})")


def swap_rep(d: int, factors: Sequence[int] | None = None) -> OnsiteRep:
    """Z_2 exchanging the two copies inside a doubled cell."""
    factors = tuple(factors) if factors else (d,)
    from .tensor import permutation_operator

    k = len(factors)
    perm = [(j + k) % (2 * k) for j in range(2 * k)]
    return OnsiteRep(2, permutation_operator(perm, factors + factors).matrix)


def block(U: QCAOperator, k: int, offset: int = 0) -> QCAOperator:
    """View U on a chain of supersites made of ``k`` consecutive cells, the first
    supersite starting at cell ``offset``.  Factor labels are renumbered so that
    supersite j holds old cells offset + j*k, ..., offset + j*k + k - 1."""
    c = U.chain
    if k < 1 or c.n_sites % k:
        raise DomainError(f"cannot block {c.n_sites} sites into groups of {k}")
    f = c.n_factors
    n = c.n_sites

    def relabel(x: int) -> int:
        return ((x // f - offset) % n) * f + x % f

    layers: list[Layer] = []
    for layer in U.layers:
        if isinstance(layer, Permutation):
            perm = [0] * len(layer.perm)
            for j, p in enumerate(layer.perm):
                perm[relabel(j)] = relabel(p)
            layers.append(Permutation(tuple(perm)))
        else:
            op = DenseOperator(tuple(relabel(s) for s in layer.op.support), layer.op.dims, layer.op.matrix)
            layers.append(type(layer)(op))
    chain = ChainSpec(n // k, c.d ** k, c.factors * k)
    xi = -(-U.xi // k)
    label = f"{U.label} [blocks of {k} from {offset}]" if U.label else ""
    return QCAOperator(chain, tuple(layers), xi, label)


def block_rep(rep: OnsiteRep, k: int) -> OnsiteRep:
    mats = rep.factor_mats * k if rep.factor_mats is not None else (rep.mu1,) * k
    return OnsiteRep.product(rep.N, mats)


def layer_groups(U: QCAOperator) -> list[QCAOperator]:
    """Split U into consecutive depth-1 pieces: runs of gates on disjoint cells,
    single permutations and single dense layers.  Their product (in order) is U."""
    groups: list[list[Layer]] = []
    used: set[int] = set()
    for layer in U.layers:
        if isinstance(layer, Gate):
            cells = {U.chain.cell_of(s) for s in layer.op.support}
            if groups and isinstance(groups[-1][0], Gate) and not cells & used:
                groups[-1].append(layer)
                used |= cells
                continue
            groups.append([layer])
            used = cells
        else:
            groups.append([layer])
            used = set()
    return [QCAOperator(U.chain, tuple(g), U.xi, f"{U.label} [piece {i}]") for i, g in enumerate(groups)]


# ---------------------------------------------------------------- checks

def cyclic_offset(chain: ChainSpec, x: int, y: int) -> int:
    """Signed distance from cell x to cell y in [-n/2, n/2)."""
    n = chain.n_sites
    h = n // 2
    return (y - x + h) % n - h


def light_cone(U: QCAOperator) -> tuple[int, int]:
    """Measured spreading (left, right): U^dagger O_x U lies in cells [x - left, x + right].

    Only the clock and shift generators of each factor are propagated; the
    images of products lie in the union of the images of the factors.
    """
    chain = U.chain
    left = right = 0
    for cell in range(chain.n_sites):
        for fac in chain.cell_factors(cell):
            d = chain.factor_dims[fac]
            if d < 2:
                continue
            basis = site_basis(d)
            for p in (basis[1], basis[d]):
                image = reduce_support(U.conjugate(DenseOperator((fac,), (d,), p)), SUPPORT_TOL)
                for s in image.support:
                    delta = cyclic_offset(chain, cell, chain.cell_of(s))
                    left = max(left, -delta)
                    right = max(right, delta)
    return left, right


def cyclic_window(chain: ChainSpec, center: int, radius: int) -> set[int]:
    if 2 * radius + 1 >= chain.n_sites:
        return set(range(chain.n_sites))
    return {(center + k) % chain.n_sites for k in range(-radius, radius + 1)}


def verify_locality(U: QCAOperator, xi: int) -> bool:
    """Every single-factor basis operator on cell i maps into cells [i - xi, i + xi]."""
    chain = U.chain
    for cell in range(chain.n_sites):
        window = cyclic_window(chain, cell, xi)
        for fac in chain.cell_factors(cell):
            d = chain.factor_dims[fac]
            for p in site_basis(d)[1:]:
                image = U.conjugate(DenseOperator((fac,), (d,), p))
                image = reduce_support(image, SUPPORT_TOL)
                if not {chain.cell_of(s) for s in image.support} <= window:
                    return False
    return True


def is_unitary_qca(U: QCAOperator, tol: float = UNITARY_TOL) -> bool:
    for layer in U.layers:
        if isinstance(layer, (Gate, Dense)) and unitarity_error(layer.op.matrix) > tol:
            return False
    return True


def commutes_with_symmetry(U: QCAOperator, rep: OnsiteRep, tol: float = 1e-8) -> bool | None:
    """Whether [U, U_g] = 0 for the generator g = 1.

    Decided layer by layer when every layer is itself symmetric, otherwise by
    acting on a random state when the chain is small enough; None if undecidable.
    """
    chain = U.chain
    layerwise = True
    for layer in U.layers:
        if isinstance(layer, Permutation):
            if not _permutation_symmetric(chain, layer, rep, tol):
                layerwise = False
                break
        else:
            op = layer.op
            cells = sorted({chain.cell_of(s) for s in op.support})
            full = rep.restricted(chain, cells, 1)
            g, s = (x.matrix for x in _align_pair(op, full))
            if np.max(np.abs(g @ s - s @ g)) > tol:
                layerwise = False
                break
    if layerwise:
        return True
    if chain.dense_dim > STATE_CAP:
        return None
    # [U, U_g] psi for a fixed pseudo-random psi vanishes for all psi iff it vanishes generically
    rng = np.random.default_rng(0)
    shape = tuple(chain.factor_dims[f] for f in chain.all_factors)
    psi = rng.normal(size=shape) + 1j * rng.normal(size=shape)
    psi /= np.linalg.norm(psi)

    def sym(x: np.ndarray) -> np.ndarray:
        x = x.reshape((chain.d,) * chain.n_sites)
        for c in range(chain.n_sites):
            x = np.moveaxis(np.tensordot(rep.mu1, x, axes=([1], [c])), 0, c)
        return x.reshape(shape)

    return bool(np.linalg.norm(U.apply(sym(psi)) - sym(U.apply(psi))) < tol)


def _align_pair(a: DenseOperator, b: DenseOperator):
    from .tensor import align

    return align(a, b)


def _permutation_symmetric(chain: ChainSpec, layer: Permutation, rep: OnsiteRep, tol: float) -> bool:
    f = chain.n_factors
    if rep.factor_mats is not None and len(rep.factor_mats) == f:
        mats = rep.factor_mats
        for j, p in enumerate(layer.perm):
            a, b = mats[j % f], mats[p % f]
            if a.shape != b.shape or np.max(np.abs(a - b)) > tol:
                return False
        return True
    # without a product structure only whole-cell moves preserving factor order are safe
    for j, p in enumerate(layer.perm):
        if j % f != p % f:
            return False
    cell_map = {}
    for j, p in enumerate(layer.perm):
        cell_map.setdefault(j // f, set()).add(p // f)
    return all(len(v) == 1 for v in cell_map.values())
