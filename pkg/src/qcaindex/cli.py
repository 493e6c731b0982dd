"""Command-line front end.

Every command prints a human-readable report followed by a JSON block with
the same content.  Exit status: 0 when every check passes, 1 for invalid
input, 2 for a numerical failure or a failed check.
"""
from __future__ import annotations

import argparse
import json
import math
import sys
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Any, Sequence

import numpy as np

from .errors import DomainError, NumericalFailure, QCAError

EXIT_OK, EXIT_VALIDATION, EXIT_NUMERICAL = 0, 1, 2
COMMANDS = ("index", "spi", "classify-z2", "search-collisions", "doubled-check", "transport", "verify")


# ---------------------------------------------------------------- rendering

def render(value: Any) -> Any:
    """JSON-ready form: rationals as "p/q", complex as "re+im i" (12 significant digits)."""
    from .gnvw import RationalIndex
    from .reps import RepSpectrum

    if isinstance(value, RationalIndex):
        return {"rational": str(value), "float": render(value.float_value)}
    if isinstance(value, Fraction):
        return f"{value.numerator}/{value.denominator}"
    if isinstance(value, RepSpectrum):
        return list(value.a)
    if isinstance(value, (bool, np.bool_)):
        return bool(value)
    if isinstance(value, (int, np.integer)):
        return int(value)
    if isinstance(value, (complex, np.complexfloating)):
        z = complex(value)
        return f"{_real(z.real)}{'+' if not z.imag < 0 else '-'}{_real(abs(z.imag))}i"
    if isinstance(value, (float, np.floating)):
        x = float(value)
        return float(f"{x:.12g}") if math.isfinite(x) else str(x)
    if isinstance(value, dict):
        return {str(k): render(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [render(v) for v in value]
    return value if value is None or isinstance(value, str) else str(value)


def _real(x: float) -> str:
    s = f"{x:.12g}"
    return "0" if s == "-0" else s


@dataclass
class Check:
    name: str
    passed: bool
    detail: str = ""


@dataclass
class Report:
    command: str
    inputs: dict[str, Any]
    results: dict[str, Any] = field(default_factory=dict)
    checks: list[Check] = field(default_factory=list)

    def check(self, name: str, passed: bool, detail: str = "") -> None:
        self.checks.append(Check(name, bool(passed), detail))

    @property
    def ok(self) -> bool:
        return all(c.passed for c in self.checks)

    def as_dict(self) -> dict:
        return {
            "command": self.command,
            "inputs": render(self.inputs),
            "results": render(self.results),
            "checks": [{"name": c.name, "passed": c.passed, "detail": c.detail} for c in self.checks],
            "status": "ok" if self.ok else "failed",
        }

    def to_text(self) -> str:
        data = self.as_dict()
        lines = [f"qcaindex {self.command}", "", "inputs:"]
        lines += [f"  {k}: {_inline(v)}" for k, v in data["inputs"].items()]
        lines += ["", "results:"]
        lines += [f"  {k}: {_inline(v)}" for k, v in data["results"].items()]
        if self.checks:
            lines += ["", "checks:"]
            lines += [f"  {'PASS' if c.passed else 'FAIL'} {c.name}" + (f": {c.detail}" if c.detail else "")
                      for c in self.checks]
        lines += ["", f"status: {data['status']}", "", "--- json ---", json.dumps(data, indent=2, sort_keys=True)]
        return "\n".join(lines) + "\n"


def _inline(v: Any) -> str:
    if isinstance(v, dict) and set(v) == {"rational", "float"}:
        return f"{v['rational']} ({v['float']})"
    return v if isinstance(v, str) else json.dumps(v, sort_keys=True)


# ---------------------------------------------------------------- spec

@dataclass(frozen=True)
class ExperimentSpec:
    command: str
    d: int = 2
    sites: int = 6
    qca: str | None = None
    rep: str | None = None
    intervals: tuple[str, ...] = ()
    N: int | None = None
    max_dim: int | None = None
    chi: int | None = None
    pi0: str | None = None
    pi1: str | None = None
    seed: int = 0
    tol: float = 1e-8

    def inputs(self) -> dict[str, Any]:
        keys = {
            "index": ("d", "sites", "qca", "intervals"),
            "spi": ("d", "sites", "qca", "rep", "intervals"),
            "classify-z2": ("d", "chi", "pi0", "pi1"),
            "search-collisions": ("N", "max_dim"),
            "doubled-check": ("d", "sites", "qca", "rep", "intervals"),
            "transport": ("d", "sites", "qca", "rep", "N"),
            "verify": ("seed",),
        }[self.command]
        out = {k: getattr(self, k) for k in keys if getattr(self, k) not in (None, ())}
        out["tol"] = self.tol
        return out


def _require(value, flag: str, command: str):
    if value is None:
        raise DomainError(f"{command} needs {flag}")
    return value


def _load(spec: ExperimentSpec):
    from .specfile import load_qca, parse_rep

    rep = parse_rep(spec.rep)
    return load_qca(_require(spec.qca, "--qca", spec.command), spec.d, spec.sites, rep)


def _intervals(spec: ExperimentSpec, names: Sequence[str]) -> dict:
    from .specfile import parse_interval

    got = dict(parse_interval(t) for t in spec.intervals)
    unknown = set(got) - set(names)
    if unknown:
        raise DomainError(f"unexpected interval name(s) {sorted(unknown)}; expected {list(names)}")
    return got


def _rel(a: float, b: float) -> float:
    return abs(a - b) / max(abs(b), 1e-300)


# ---------------------------------------------------------------- commands

def _cmd_index(spec: ExperimentSpec, rep: Report) -> None:
    from .gnvw import DIRECT_BUDGET, direct_cost, eta_overlap, gnvw_index, gnvw_ratio, resolve_placement
    from .model import DENSE_CAP

    U = _load(spec).qca
    iv = _intervals(spec, ("A", "B"))
    A, B = iv.get("A"), iv.get("B")
    pl = resolve_placement(U, A, B)
    rep.results["placement"] = pl.describe()
    ind = gnvw_index(U, A, B, "direct")
    rep.results["ind"] = ind
    if direct_cost(pl) <= DIRECT_BUDGET:
        rep.results["eta_AB"] = eta_overlap(pl.qca, pl.A, pl.B)
        rep.results["eta_BA"] = eta_overlap(pl.qca, pl.B, pl.A)
    rep.check("snapped_within_tol", _rel(ind.float_value, float(ind.fraction)) <= spec.tol,
              f"ratio {ind.float_value:.12g}")
    if U.chain.dense_dim <= DENSE_CAP:
        ratio = gnvw_ratio(U, A, B, "swap")
        rep.results["ratio_swap"] = ratio
        rep.check("direct_equals_swap", _rel(ind.float_value, ratio) <= spec.tol,
                  f"relative difference {_rel(ind.float_value, ratio):.2e}")


def _cmd_spi(spec: ExperimentSpec, rep: Report) -> None:
    from .gnvw import gnvw_ratio, rational_snap
    from .reps import spectrum_of
    from .spi import _padded_trace, indices_from_decomposition, lr_decompose, snap_complex, z2_from_decomposition

    loaded = _load(spec)
    U, r = loaded.qca, _require(loaded.rep, "--rep", "spi")
    I = _intervals(spec, ("I",)).get("I")
    dec = lr_decompose(U, r, I)
    ind = gnvw_ratio(U)
    vals = indices_from_decomposition(dec, ind)
    rep.results["window"] = dec.window.describe()
    rep.results["ind"] = rational_snap(ind, U.chain.d, max_power=2 * U.chain.n_sites)
    rep.results["ind_g"] = vals.ind_g
    rep.results["rind_g"] = vals.rind_g
    exact = {}
    for g, z in vals.rind_g.items():
        s = snap_complex(z)
        exact[g] = None if s is None else f"{s[0]}+{s[1]}i" if s[1] >= 0 else f"{s[0]}-{-s[1]}i"
    rep.results["rind_g_exact"] = exact
    try:
        rep.results["spectrum_L1"] = spectrum_of(dec.L[1 % r.N].matrix, r.N, up_to_phase=True).canonical()
        rep.results["spectrum_R1"] = spectrum_of(dec.R[1 % r.N].matrix, r.N, up_to_phase=True).canonical()
    except QCAError:
        pass
    rep.results["residual"] = dec.residual
    rep.check("factorization_residual", max(dec.residual.values()) <= spec.tol,
              f"max residual {max(dec.residual.values()):.2e}")
    worst = 0.0
    for g in range(r.N):
        ul, ur = dec.reference(g)
        dim = max(x.dim for x in (dec.L[g], dec.R[g], ul, ur))
        lhs = _padded_trace(dec.L[g], dim) * _padded_trace(dec.R[g], dim)
        rhs = _padded_trace(ul, dim) * _padded_trace(ur, dim)
        worst = max(worst, abs(lhs - rhs) / max(1.0, abs(rhs)))
    rep.check("trace_product_invariant", worst <= spec.tol, f"max relative deviation {worst:.2e}")
    rng = np.random.default_rng(spec.seed)
    drift = 0.0
    for _ in range(3):
        v = indices_from_decomposition(dec.rephased({g: float(rng.uniform(0, 2 * math.pi)) for g in range(r.N)}),
                                       ind)
        drift = max([drift] + [abs(v.ind_g[g] - vals.ind_g[g]) for g in vals.ind_g]
                    + [abs(v.rind_g[g] - vals.rind_g[g]) for g in vals.rind_g])
    rep.check("rephasing_invariant", drift <= 1e-9, f"max drift {drift:.2e} over 3 random boundary phasings")
    if r.N == 2:
        from .spi import _snap_base

        p0, p1 = z2_from_decomposition(dec, ind)
        rep.results["pi0"] = rational_snap(p0, U.chain.d, max_power=2 * U.chain.n_sites)
        rep.results["pi1"] = None if p1 is None else rational_snap(
            p1, _snap_base(U.chain.d, r.chi), max_power=2 * U.chain.n_sites)


def _z2_rep(d: int, chi: int):
    from .model import OnsiteRep

    return OnsiteRep.from_exponents(2, [0] * ((d + chi) // 2) + [1] * ((d - chi) // 2))


def _cmd_classify(spec: ExperimentSpec, rep: Report) -> None:
    from .classify import as_fraction, witness_to_qca, z2_solve

    d = _require(spec.d, "--d", spec.command)
    chi = _require(spec.chi, "--chi", spec.command)
    try:
        pi0 = as_fraction(_require(spec.pi0, "--pi0", spec.command))
        pi1 = as_fraction(_require(spec.pi1, "--pi1", spec.command))
    except (ValueError, ZeroDivisionError) as exc:
        raise DomainError(f"pi0/pi1 must be rationals such as 3/2: {exc}") from exc
    w = z2_solve(d, chi, pi0, pi1)
    rep.results["witness"] = w.as_tuple()
    rep.results["fields"] = dict(zip(("N1", "N2", "alpha0", "alpha1", "beta0", "beta1"), w.as_tuple()))
    rep.check("feasibility_conditions", w.satisfies(d, chi, pi0, pi1), "exact integer arithmetic")
    W = witness_to_qca(w, _z2_rep(d, chi))
    rep.results["cell_factor_dims"] = W.qca.chain.factors
    rep.results["moves"] = W.moves
    rep.results["symbolic_indices"] = W.symbolic
    rep.check("symbolic_round_trip", W.symbolic == (pi0, pi1), f"{W.symbolic[0]}, {W.symbolic[1]}")
    for name, val in (("numeric", W.numeric), ("dense", W.dense)):
        rep.results[f"{name}_indices"] = val
        if val is not None:
            got = tuple(None if x is None else x.fraction for x in val)
            rep.check(f"{name}_round_trip", got == W.symbolic, f"{got[0]}, {got[1]}")


def _cmd_collisions(spec: ExperimentSpec, rep: Report) -> None:
    from .reps import RepSpectrum, collision_search, exact_signature, powered_signature, shift_equivalent, \
        signatures_equal

    N = _require(spec.N, "--N", spec.command)
    max_dim = _require(spec.max_dim, "--max-dim", spec.command)

    def sig(s: RepSpectrum):
        if N in (1, 2, 4):
            return [f"{re}{'+' if im >= 0 else '-'}{abs(im)}i" for re, im in exact_signature(s)]
        return list(powered_signature(s))

    pairs = collision_search(N, max_dim)
    rep.results["n_pairs"] = len(pairs)
    rep.results["pairs"] = [{"a": a, "b": b, "signature": sig(a)} for a, b in pairs]
    for a, b in pairs:
        rep.check(f"pair {a} {b}", signatures_equal(a, b) and not shift_equivalent(a, b),
                  "equal powered signatures, not related by a 1D representation")
    if N == 4:
        # diag(1,1,i,-1,-i) vs diag(1,i,i,-i,-i): often quoted as a collision, but the signatures differ
        a, b = RepSpectrum(4, (2, 1, 1, 1)), RepSpectrum(4, (1, 2, 0, 2))
        rep.results["n4_diagonal_example"] = {
            "a": a, "b": b, "signature_a": sig(a), "signature_b": sig(b),
            "collides": signatures_equal(a, b) and not shift_equivalent(a, b)}


def _cmd_doubled(spec: ExperimentSpec, rep: Report) -> None:
    from .doubled import doubled_z2, index_via_doubled
    from .gnvw import gnvw_index

    U = _load(spec).qca
    A = _intervals(spec, ("A",)).get("A")
    di = index_via_doubled(U, A)
    ind = gnvw_index(U)
    rep.results["ind_gnvw"] = ind
    rep.results["ind_doubled"] = di.ind
    rep.results["inverse_from_R"] = di.inverse_from_R
    rep.results["right_ratio"] = di.right_ratio
    rep.results["theta"] = di.ops.theta
    rep.results["junction_residual"] = di.ops.junction_residual
    rep.results["window"] = di.ops.window.describe()
    rep.check("doubled_equals_gnvw", di.ind.fraction == ind.fraction, f"{di.ind} vs {ind}")
    rep.check("left_right_reciprocal", abs(di.inverse_from_R * ind.float_value - 1) <= spec.tol,
              f"|Tr R_1 / Tr U_1R| = {di.inverse_from_R:.12g}")
    rep.check("junction_matches", di.ops.junction_residual <= spec.tol,
              f"Y_AR vs Y_BL^dagger residual {di.ops.junction_residual:.2e}")
    p0, p1 = doubled_z2(U)
    rep.results["pi0_doubled"] = p0
    rep.results["pi1_doubled"] = p1
    rep.check("pi0_equals_ind_squared", p0.fraction == ind.fraction ** 2, f"pi0 = {p0}")
    rep.check("pi1_equals_ind", p1 is not None and p1.fraction == ind.fraction, f"pi1 = {p1}")


def _cmd_transport(spec: ExperimentSpec, rep: Report) -> None:
    from .gnvw import gnvw_index
    from .transport import transport_nu

    U = _load(spec).qca
    n = U.chain.n_sites
    N = spec.N if spec.N is not None else n // 4
    if 4 * N != n:
        raise DomainError(f"transport needs 4N sites; got {n} sites for N={N}")
    vals = {(p, m): transport_nu(U, N, p, m) for p in ("entropy", "mutual") for m in ("trace", "spectrum")}
    nu = vals["entropy", "trace"]
    rep.results["nu"] = nu
    rep.results["nu_mutual"] = vals["mutual", "trace"]
    rep.results["exp_nu"] = math.exp(nu)
    spread = max(abs(v - nu) for v in vals.values())
    rep.check("paths_agree", spread <= 1e-10, f"max spread over paths and purity methods {spread:.2e}")
    try:
        ind = gnvw_index(U)
    except QCAError as exc:
        rep.results["ind"] = f"unavailable ({exc})"
        return
    rep.results["ind"] = ind
    rep.check("nu_equals_log_ind", abs(nu - math.log(ind.float_value)) <= spec.tol,
              f"log ind = {math.log(ind.float_value):.12g}")


def _cmd_verify(spec: ExperimentSpec, rep: Report) -> None:
    from .verify import run_invariants

    for res in run_invariants(spec.seed):
        rep.check(res.name, res.passed, res.detail)
    rep.results["n_checks"] = len(rep.checks)
    rep.results["n_passed"] = sum(c.passed for c in rep.checks)


_DISPATCH = {
    "index": _cmd_index,
    "spi": _cmd_spi,
    "classify-z2": _cmd_classify,
    "search-collisions": _cmd_collisions,
    "doubled-check": _cmd_doubled,
    "transport": _cmd_transport,
    "verify": _cmd_verify,
}


def run(spec: ExperimentSpec) -> Report:
    """Execute one command.  Input errors raise DomainError, numerical ones NumericalFailure."""
    if spec.command not in _DISPATCH:
        raise DomainError(f"unknown command {spec.command!r}")
    if spec.tol <= 0:
        raise DomainError("--tol must be positive")
    report = Report(spec.command, spec.inputs())
    _DISPATCH[spec.command](spec, report)
    return report


# ---------------------------------------------------------------- argv

def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="qcaindex", description="Indices of one-dimensional quantum cellular automata.")
    p.add_argument("command", choices=COMMANDS)
    p.add_argument("--d", type=int, default=2, help="local dimension")
    p.add_argument("--sites", type=int, default=6, help="number of sites on the ring")
    p.add_argument("--qca", help="composition such as 'shift:1*brickwork:3', or a JSON spec file")
    p.add_argument("--rep", help="on-site representation: Z<N>:e0,e1,... or a JSON file")
    p.add_argument("--interval", nargs="+", default=[], metavar="NAME:START:LEN",
                   help="intervals, e.g. A:0:2 B:2:2 (index) or I:0:4 (spi)")
    p.add_argument("--N", type=int, help="group order (search-collisions) or ancilla block size (transport)")
    p.add_argument("--max-dim", type=int, help="largest representation dimension to enumerate")
    p.add_argument("--chi", type=int, help="character of the generator")
    p.add_argument("--pi0", help="target pi0 (rational, e.g. 3/2)")
    p.add_argument("--pi1", help="target pi1 (rational)")
    p.add_argument("--seed", type=int, default=0, help="seed for randomized checks")
    p.add_argument("--tol", type=float, default=1e-8, help="tolerance of the reported checks")
    p.add_argument("--out", help="also write the report to this path")
    return p


def main(argv: Sequence[str] | None = None) -> int:
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:      # argparse uses 2 for usage errors; those are validation failures here
        return EXIT_OK if not exc.code else EXIT_VALIDATION
    spec = ExperimentSpec(args.command, args.d, args.sites, args.qca, args.rep, tuple(args.interval), args.N,
                          args.max_dim, args.chi, args.pi0, args.pi1, args.seed, args.tol)
    try:
        report = run(spec)
    except NumericalFailure as exc:
        print(f"numerical failure ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    except (QCAError, ValueError) as exc:
        print(f"invalid input ({type(exc).__name__}): {exc}", file=sys.stderr)
        return EXIT_VALIDATION
    text = report.to_text()
    sys.stdout.write(text)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    return EXIT_OK if report.ok else EXIT_NUMERICAL


if __name__ == "__main__":
    sys.exit(main())
