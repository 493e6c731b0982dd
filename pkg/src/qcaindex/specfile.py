"""Text descriptions of QCAs, representations and intervals.

Composition strings are products of terms separated by ``*``, read as an
operator product (the rightmost term acts on states first)::

    identity            shift:<steps>          brickwork:<seed>
    symbrick:<seed>     perm:<m0>,<m1>,...     spi-example:<a0>,<a1>,.../<b0>,<b1>,...

A trailing ``^dag`` inverts a term.  ``symbrick`` and ``spi-example`` need a
representation.

QCA spec files are JSON::

    {"chain": {"d": 2, "n_sites": 6, "factors": [2]},
     "rep": {"N": 2, "exponents": [0, 1]},
     "composition": ["shift:1", {"brickwork": {"layer1": [M, ...], "layer2": [M, ...]}}]}

Composition entries are either term strings or objects with one key among
``identity``, ``shift`` (steps), ``brickwork`` (``seed`` or explicit layers of
gate matrices, ``null`` for an identity gate), ``symmetric_brickwork``
(``seed``), ``permutation`` (``moves``) and ``dag`` (a nested entry).  Matrices
are lists of rows, each entry a ``[re, im]`` pair.  Representations take
either ``exponents`` (diagonal) or ``mu1`` (a matrix in the same format).
"""
from __future__ import annotations

import json
import os
from dataclasses import dataclass
from typing import Any

import numpy as np

from .errors import DomainError
from .model import (
    ChainSpec,
    Interval,
    OnsiteRep,
    QCAOperator,
    brickwork_qca,
    factor_permutation_qca,
    identity_qca,
    random_brickwork,
    shift_qca,
    spi_example_circuit,
    symmetric_brickwork,
)


def parse_matrix(data: Any) -> np.ndarray:
    """Rows of [re, im] pairs (plain numbers are accepted as real entries)."""
    try:
        rows = [[complex(x[0], x[1]) if isinstance(x, (list, tuple)) else complex(x) for x in row]
                for row in data]
        mat = np.array(rows, dtype=complex)
    except (TypeError, ValueError, IndexError) as exc:
        raise DomainError(f"malformed matrix: {exc}") from exc
    if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
        raise DomainError("matrix must be square")
    return mat


def matrix_to_json(mat: np.ndarray) -> list:
    return [[[float(z.real), float(z.imag)] for z in row] for row in np.asarray(mat)]


def _int_list(text: str) -> list[int]:
    try:
        return [int(x) for x in text.split(",") if x.strip()]
    except ValueError as exc:
        raise DomainError(f"expected comma-separated integers, got {text!r}") from exc


def rep_from_json(data: dict) -> OnsiteRep:
    if "N" not in data:
        raise DomainError("representation needs the group order N")
    N = int(data["N"])
    if "exponents" in data:
        return OnsiteRep.from_exponents(N, [int(e) for e in data["exponents"]])
    if "mu1" in data:
        return OnsiteRep(N, parse_matrix(data["mu1"]))
    raise DomainError("representation needs 'exponents' or 'mu1'")


def parse_rep(text: str | None) -> OnsiteRep | None:
    """``Z<N>:<e0>,<e1>,...`` for diag(w^e), or a JSON file path."""
    if text is None:
        return None
    if os.path.exists(text):
        with open(text) as fh:
            return rep_from_json(json.load(fh))
    head, _, tail = text.partition(":")
    if len(head) > 1 and head[0] in "Zz" and head[1:].isdigit() and tail:
        return OnsiteRep.from_exponents(int(head[1:]), _int_list(tail))
    raise DomainError(f"cannot read representation {text!r} (use Z<N>:e0,e1,... or a JSON file)")


def parse_interval(text: str) -> tuple[str, Interval]:
    """``<name>:<start>:<length>``."""
    parts = text.split(":")
    if len(parts) != 3:
        raise DomainError(f"interval {text!r} is not of the form NAME:start:length")
    try:
        return parts[0], Interval(int(parts[1]), int(parts[2]))
    except ValueError as exc:
        raise DomainError(f"bad interval {text!r}: {exc}") from exc


def _need_rep(rep: OnsiteRep | None, what: str) -> OnsiteRep:
    if rep is None:
        raise DomainError(f"{what} needs a representation (--rep)")
    return rep


def _term(text: str, chain: ChainSpec, rep: OnsiteRep | None) -> QCAOperator:
    text = text.strip()
    if text.endswith("^dag"):
        return _term(text[:-4], chain, rep).dag()
    name, _, arg = text.partition(":")
    try:
        if name == "identity":
            return identity_qca(chain)
        if name == "shift":
            return shift_qca(chain, int(arg or 1))
        if name == "brickwork":
            return random_brickwork(chain, int(arg or 0))
        if name == "symbrick":
            return symmetric_brickwork(chain, _need_rep(rep, "symbrick"), int(arg or 0))
        if name == "perm":
            return factor_permutation_qca(chain, _int_list(arg), label=text)
        if name == "spi-example":
            rep = _need_rep(rep, "spi-example")
            left, _, right = arg.partition("/")
            U = spi_example_circuit(rep, (_int_list(left), _int_list(right)), chain.n_sites)
            if U.chain != chain:
                raise DomainError("spi-example uses a single-factor chain with the representation's dimension")
            return U
    except ValueError as exc:
        if isinstance(exc, DomainError):
            raise
        raise DomainError(f"bad argument in term {text!r}: {exc}") from exc
    raise DomainError(f"unknown QCA term {text!r}")


def _json_term(entry: Any, chain: ChainSpec, rep: OnsiteRep | None) -> QCAOperator:
    if isinstance(entry, str):
        return _term(entry, chain, rep)
    if not isinstance(entry, dict) or len(entry) != 1:
        raise DomainError(f"composition entries are strings or single-key objects, got {entry!r}")
    (key, val), = entry.items()
    if key == "identity":
        return identity_qca(chain)
    if key == "shift":
        return shift_qca(chain, int(val))
    if key == "permutation":
        return factor_permutation_qca(chain, [int(m) for m in val["moves"]], label="permutation")
    if key == "symmetric_brickwork":
        return symmetric_brickwork(chain, _need_rep(rep, key), int(val["seed"]))
    if key == "brickwork":
        if "seed" in val:
            return random_brickwork(chain, int(val["seed"]))
        layers = [[None if g is None else parse_matrix(g) for g in val[k]] for k in ("layer1", "layer2")]
        return brickwork_qca(chain, *layers)
    if key == "dag":
        return _json_term(val, chain, rep).dag()
    raise DomainError(f"unknown composition entry {key!r}")


def _product(terms: list[QCAOperator], chain: ChainSpec) -> QCAOperator:
    if not terms:
        return identity_qca(chain)
    out = terms[0]
    for t in terms[1:]:
        out = out @ t
    return out


@dataclass(frozen=True)
class LoadedQCA:
    qca: QCAOperator
    rep: OnsiteRep | None
    description: str


def load_qca(text: str, d: int = 2, n_sites: int = 6, rep: OnsiteRep | None = None) -> LoadedQCA:
    """A composition string on ChainSpec(n_sites, d), or a JSON spec file.

    A file's own chain (and representation, unless ``rep`` is given) takes
    precedence over the arguments.
    """
    if os.path.exists(text):
        with open(text) as fh:
            try:
                data = json.load(fh)
            except json.JSONDecodeError as exc:
                raise DomainError(f"{text}: not valid JSON ({exc})") from exc
        ch = data.get("chain", {})
        chain = ChainSpec(int(ch.get("n_sites", n_sites)), int(ch.get("d", d)), tuple(ch.get("factors", ())))
        if rep is None and "rep" in data:
            rep = rep_from_json(data["rep"])
        terms = [_json_term(e, chain, rep) for e in data.get("composition", [])]
        return LoadedQCA(_product(terms, chain), rep, f"file {text}")
    chain = ChainSpec(n_sites, d)
    terms = [_term(t, chain, rep) for t in text.split("*") if t.strip()]
    if rep is not None and rep.d != chain.d:
        raise DomainError(f"representation acts on dimension {rep.d}, sites have {chain.d}")
    return LoadedQCA(_product(terms, chain), rep, text)
