"""Z_N representation arithmetic on multiplicity vectors.

A representation of Z_N is determined up to equivalence by how often each
irrep w^r (w = exp(2 pi i / N)) occurs.  Characters raised to the order of the
group element are blind to multiplication by a 1D representation, which is
what makes them the natural invariant for refined indices.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from typing import Iterator, Sequence

import numpy as np

from .errors import DomainError

# group orders whose characters are Gaussian integers
_GAUSSIAN = {1: 1, 2: 2, 4: 4}


@dataclass(frozen=True)
class RepSpectrum:
    N: int
    a: tuple[int, ...]

    def __post_init__(self):
        a = tuple(int(x) for x in self.a)
        if self.N < 1 or len(a) != self.N:
            raise DomainError(f"need {self.N} multiplicities, got {len(a)}")
        if any(x < 0 for x in a) or sum(a) < 1:
            raise DomainError("multiplicities must be nonnegative with positive total")
        object.__setattr__(self, "a", a)

    @property
    def dim(self) -> int:
        return sum(self.a)

    def shifted(self, k: int) -> "RepSpectrum":
        """Tensor with the 1D irrep w^k: a_r -> a_{r-k}."""
        return RepSpectrum(self.N, tuple(self.a[(r - k) % self.N] for r in range(self.N)))

    def canonical(self) -> "RepSpectrum":
        """Lexicographically smallest cyclic shift."""
        return min((self.shifted(k) for k in range(self.N)), key=lambda s: s.a)

    def __str__(self):
        return "(" + ",".join(map(str, self.a)) + ")"


def spectrum_matrix(spec: RepSpectrum) -> np.ndarray:
    """Diagonal generator with w^r repeated a_r times."""
    w = np.exp(2j * np.pi / spec.N)
    return np.diag(np.concatenate([np.full(m, w ** r) for r, m in enumerate(spec.a)]).astype(complex))


def spectrum_of(mat: np.ndarray, N: int, tol: float = 1e-6, up_to_phase: bool = False) -> RepSpectrum:
    """Multiplicities of the N-th roots of unity among the eigenvalues of ``mat``.

    With ``up_to_phase`` the matrix is first rotated so that one eigenvalue is 1;
    the result is then only meaningful modulo ``RepSpectrum.shifted``.
    """
    ev = np.linalg.eigvals(np.asarray(mat, dtype=complex))
    if up_to_phase and ev.size:
        ev = ev * np.conj(ev[0]) / abs(ev[0])
    k = np.angle(ev) * N / (2 * np.pi)
    r = np.rint(k).astype(int)
    if np.max(np.abs(k - r), initial=0) > tol or np.max(np.abs(np.abs(ev) - 1), initial=0) > tol:
        raise DomainError("eigenvalues are not N-th roots of unity")
    return RepSpectrum(N, tuple(np.bincount(r % N, minlength=N)))


def group_order(g: int, N: int) -> int:
    return N // math.gcd(g, N)


def character(spec: RepSpectrum, g: int) -> complex:
    if not 0 <= g < spec.N:
        raise DomainError(f"g={g} outside 0..{spec.N - 1}")
    if spec.N in _GAUSSIAN:
        re, im = _gaussian_character(spec, g)
        return complex(re, im)
    w = np.exp(2j * np.pi * g / spec.N)
    return complex(sum(m * w ** r for r, m in enumerate(spec.a)))


_I_POWERS = ((1, 0), (0, 1), (-1, 0), (0, -1))


def _gaussian_character(spec: RepSpectrum, g: int) -> tuple[int, int]:
    step = 4 // spec.N
    re = im = 0
    for r, m in enumerate(spec.a):
        ur, ui = _I_POWERS[(r * g * step) % 4]
        re += m * ur
        im += m * ui
    return re, im


def _gaussian_pow(z: tuple[int, int], k: int) -> tuple[int, int]:
    out = (1, 0)
    for _ in range(k):
        out = (out[0] * z[0] - out[1] * z[1], out[0] * z[1] + out[1] * z[0])
    return out


def exact_signature(spec: RepSpectrum) -> tuple[tuple[int, int], ...]:
    """Powered signature as Gaussian integers (N in {1, 2, 4} only)."""
    if spec.N not in _GAUSSIAN:
        raise DomainError("exact signatures need N in {1, 2, 4}")
    return tuple(_gaussian_pow(_gaussian_character(spec, g), group_order(g, spec.N)) for g in range(spec.N))


def powered_signature(spec: RepSpectrum) -> tuple[complex, ...]:
    """(chi(g)^{d_g})_g with d_g the order of g."""
    if spec.N in _GAUSSIAN:
        return tuple(complex(re, im) for re, im in exact_signature(spec))
    return tuple(character(spec, g) ** group_order(g, spec.N) for g in range(spec.N))


def signatures_equal(a: RepSpectrum, b: RepSpectrum, tol: float = 1e-9) -> bool:
    if a.N != b.N:
        return False
    if a.N in _GAUSSIAN:
        return exact_signature(a) == exact_signature(b)
    sa, sb = powered_signature(a), powered_signature(b)
    scale = max(1.0, max(abs(x) for x in sa + sb))
    return all(abs(x - y) <= tol * scale for x, y in zip(sa, sb))


def shift_equivalent(a: RepSpectrum, b: RepSpectrum) -> bool:
    """True iff b is a tensored with some 1D irrep."""
    if a.N != b.N:
        raise DomainError("different group orders")
    return any(b.shifted(k).a == a.a for k in range(a.N))


def multiplicity_vectors(N: int, dim: int) -> Iterator[RepSpectrum]:
    """All vectors of N nonnegative integers summing to ``dim``, lexicographic order."""
    for bars in itertools.combinations(range(dim + N - 1), N - 1):
        parts, prev = [], -1
        for b in bars:
            parts.append(b - prev - 1)
            prev = b
        parts.append(dim + N - 2 - prev)
        yield RepSpectrum(N, tuple(parts))


def _aligned(a: RepSpectrum, b: RepSpectrum) -> RepSpectrum:
    """The shift of b whose generator character equals that of a (largest such shift)."""
    ca = character(a, 1 % a.N)
    best = None
    for k in range(b.N):
        s = b.shifted(k)
        if abs(character(s, 1 % b.N) - ca) < 1e-9 and (best is None or s.a > best.a):
            best = s
    return best if best is not None else max((b.shifted(k) for k in range(b.N)), key=lambda s: s.a)


def collision_search(N: int, max_dim: int) -> list[tuple[RepSpectrum, RepSpectrum]]:
    """Pairs of inequivalent spectra (modulo 1D irreps) with equal powered signatures.

    Each pair is reported once.  The first member is the lexicographically
    largest representative of its class; the second is shifted so that the two
    generator characters coincide.
    """
    if N < 2:
        raise DomainError("N must be at least 2")
    if max_dim > 8:
        raise DomainError("max_dim above 8 exceeds the enumeration budget")
    out: list[tuple[RepSpectrum, RepSpectrum]] = []
    for dim in range(1, max_dim + 1):
        classes = sorted({s.canonical() for s in multiplicity_vectors(N, dim)}, key=lambda s: s.a)
        buckets: dict[tuple, list[RepSpectrum]] = {}
        for c in classes:
            sig = powered_signature(c)
            key = tuple((round(z.real, 6), round(z.imag, 6)) for z in sig)
            buckets.setdefault(key, []).append(c)
        for group in buckets.values():
            for x, y in itertools.combinations(group, 2):
                if not signatures_equal(x, y) or shift_equivalent(x, y):
                    continue
                rx = max((x.shifted(k) for k in range(N)), key=lambda s: s.a)
                ry = max((y.shifted(k) for k in range(N)), key=lambda s: s.a)
                first, second = (rx, ry) if rx.a >= ry.a else (ry, rx)
                out.append((first, _aligned(first, second)))
    return out


def diagonal_spectrum(diag: Sequence[complex], N: int) -> RepSpectrum:
    return spectrum_of(np.diag(np.asarray(diag, dtype=complex)), N)
