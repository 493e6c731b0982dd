"""Information transport measured by Renyi-2 entropies.

A periodic chain with sites labelled -2N+1 .. 2N is split into A = [-2N+1, 0]
and B = [1, 2N].  Every spin in [-N+1, N] starts maximally entangled with an
ancilla, the others sit in |0>.  After the state evolves as U^dagger psi
(states move against operators), the entropy imbalance between B and A
measures log ind(U).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from .errors import DomainError
from .model import QCAOperator, light_cone

STATE_CAP = 4096


@dataclass(frozen=True)
class AncillaState:
    """Pure state with one axis per system spin (4N) followed by one per ancilla (2N)."""
    d: int
    N: int
    psi: np.ndarray

    @property
    def n_system(self) -> int:
        return 4 * self.N

    def system_axis(self, label: int) -> int:
        if not -2 * self.N + 1 <= label <= 2 * self.N:
            raise DomainError(f"site {label} outside [{-2 * self.N + 1}, {2 * self.N}]")
        return label + 2 * self.N - 1

    def ancilla_axis(self, label: int) -> int:
        """Axis of the ancilla paired with spin ``label`` (in [-N+1, N])."""
        if not -self.N + 1 <= label <= self.N:
            raise DomainError(f"no ancilla is paired with site {label}")
        return self.n_system + label + self.N - 1

    def region(self, spins: Iterable[int] = (), ancillas: Iterable[int] = ()) -> list[int]:
        return sorted([self.system_axis(s) for s in spins] + [self.ancilla_axis(a) for a in ancillas])

    @property
    def A(self) -> range:
        return range(-2 * self.N + 1, 1)

    @property
    def B(self) -> range:
        return range(1, 2 * self.N + 1)

    def evolved(self, U: QCAOperator) -> "AncillaState":
        """U^dagger acting on the spins, identity on the ancillas."""
        if U.chain.n_sites != self.n_system or U.chain.d != self.d:
            raise DomainError(f"QCA must act on {self.n_system} spins of dimension {self.d}")
        return AncillaState(self.d, self.N, U.dag().apply(self.psi))


def ancilla_setup(d: int, N: int) -> AncillaState:
    if d < 2 or N < 1:
        raise DomainError("need d >= 2 and N >= 1")
    if d ** (6 * N) > STATE_CAP:
        raise DomainError(f"state dimension d^(6N) = {d ** (6 * N)} exceeds {STATE_CAP}")
    zero = np.zeros(d, dtype=complex)
    zero[0] = 1.0
    bell = np.eye(d, dtype=complex) / math.sqrt(d)      # axes (spin, ancilla)
    # build as [A-outer spins, paired spins, B-outer spins, ancillas]
    psi = np.ones((), dtype=complex)
    for _ in range(N):
        psi = np.multiply.outer(psi, zero)
    for _ in range(2 * N):
        psi = np.multiply.outer(psi, bell)
    for _ in range(N):
        psi = np.multiply.outer(psi, zero)
    # current axis order: N zeros, (spin, ancilla) x 2N, N zeros
    paired_spin = [N + 2 * j for j in range(2 * N)]
    paired_anc = [N + 2 * j + 1 for j in range(2 * N)]
    order = list(range(N)) + paired_spin + [3 * N + 2 * N + k for k in range(N)] + paired_anc
    return AncillaState(d, N, psi.transpose(order))


def _cut_matrix(psi: np.ndarray, axes: list[int]) -> np.ndarray:
    rest = [a for a in range(psi.ndim) if a not in set(axes)]
    dim = int(np.prod([psi.shape[a] for a in axes], dtype=np.int64)) if axes else 1
    return psi.transpose(list(axes) + rest).reshape(dim, -1)


def purity(state: AncillaState | np.ndarray, axes: Iterable[int], method: str = "trace") -> float:
    """Tr(rho_X^2) for the subsystem on ``axes``.

    ``trace`` forms rho_X and sums |rho_X|^2; ``spectrum`` sums the fourth
    powers of the Schmidt coefficients.
    """
    psi = state.psi if isinstance(state, AncillaState) else state
    m = _cut_matrix(psi, sorted(axes))
    if method == "trace":
        rho = m @ m.conj().T
        return float(np.sum(np.abs(rho) ** 2))
    if method == "spectrum":
        s = np.linalg.svd(m, compute_uv=False)
        return float(np.sum(s ** 4))
    raise DomainError(f"unknown method {method!r}")


def renyi2_entropy(state: AncillaState | np.ndarray, axes: Iterable[int], method: str = "trace") -> float:
    """-log Tr(rho_X^2), natural log."""
    return -math.log(purity(state, axes, method))


def mutual_information2(state: AncillaState, x: list[int], y: list[int], method: str = "trace") -> float:
    """Half the Renyi-2 mutual information, the normalization used for transport."""
    s = lambda ax: renyi2_entropy(state, ax, method)   # noqa: E731
    return 0.5 * (s(x) + s(y) - s(sorted(set(x) | set(y))))


def transport_nu(U: QCAOperator, N: int | None = None, path: str = "entropy", method: str = "trace") -> float:
    """nu = (S2(rho_B) - S2(rho_A)) / 2, or the mutual-information form with ``path="mutual"``.

    ``N`` defaults to a quarter of the chain length.  The measured light cone
    must not reach further than ``N`` cells in either direction; wider QCAs
    leak paired spins across the far cut and give meaningless values.
    """
    n = U.chain.n_sites
    if N is None:
        if n % 4:
            raise DomainError("chain length must be a multiple of 4")
        N = n // 4
    if n == 4 * N and max(light_cone(U)) > N:
        raise DomainError(f"light cone {light_cone(U)} is wider than the ancilla block N={N}")
    st = ancilla_setup(U.chain.d, N).evolved(U)
    A, B = st.region(spins=st.A), st.region(spins=st.B)
    if path == "entropy":
        return 0.5 * (renyi2_entropy(st, B, method) - renyi2_entropy(st, A, method))
    if path == "mutual":
        a_A = st.region(ancillas=range(-N + 1, 1))
        a_B = st.region(ancillas=range(1, N + 1))
        return mutual_information2(st, a_A, B, method) - mutual_information2(st, a_B, A, method)
    raise DomainError(f"unknown path {path!r}")
