"""Single command-line entry point: cone-forge <group> <command> [options].

Exit codes: 0 when the run and all internal verifications succeed, 1 when a
verification fails (a residual above tolerance, an inequality violated), 2
on usage or input errors.  Results go to stdout, diagnostics to stderr.
Configuration (tolerances, grid sizes, seed, output format) is read from
the JSON file named by CONE_FORGE_CONFIG or --config; identical inputs and
config produce byte-identical output.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
from dataclasses import dataclass

import numpy as np

from . import bessel as _bessel
from . import edge as _edge
from . import g2 as _g2
from . import lattice as _lattice
from . import spectra as _spectra
from . import stenzel as _stenzel
from .spectra import load_spectrum  # re-exported: the ingestion surface

__all__ = ["RunConfig", "dispatch", "main", "load_spectrum"]

USAGE_ERROR = 2
VERIFY_ERROR = 1


@dataclass
class RunConfig:
    g2_tol: float = 1e-6
    g2_step: float = 1e-4
    stenzel_cone_tol: float = 1e-4
    stenzel_smoothing_tol: float = 1e-3
    stenzel_steps: int = 2000
    stenzel_wmax: float = 20.0
    edge_points: int = 2048
    edge_rmin: float = 1e-8
    kernel_tol: float = 1e-8
    seed: int = 0
    format: str = "csv"

    @classmethod
    def load(cls, path: str | None) -> "RunConfig":
        cfg = cls()
        source = path or os.environ.get("CONE_FORGE_CONFIG")
        if source:
            with open(source) as fh:
                doc = json.load(fh)
            for key, val in doc.items():
                if not hasattr(cfg, key):
                    raise ValueError(f"unknown config key {key!r}")
                setattr(cfg, key, type(getattr(cfg, key))(val))
        if any(getattr(cfg, k) <= 0 for k in
               ("g2_tol", "g2_step", "stenzel_cone_tol",
                "stenzel_smoothing_tol", "kernel_tol")):
            raise ValueError("tolerances must be positive")
        return cfg


def _emit_rows(header, rows, fmt):
    if fmt == "json":
        print(json.dumps([dict(zip(header, r)) for r in rows], indent=2))
        return
    out = io.StringIO()
    w = csv.writer(out, lineterminator="\n")
    w.writerow(header)
    w.writerows(rows)
    sys.stdout.write(out.getvalue())


def _fail(msg: str) -> int:
    print(f"verification failed: {msg}", file=sys.stderr)
    return VERIFY_ERROR


# ---------------------------------------------------------------------------
# g2


def _cmd_g2_lincheck(args, cfg: RunConfig) -> int:
    rng = np.random.default_rng(args.seed if args.seed is not None else cfg.seed)
    h = args.step or cfg.g2_step
    rows = []
    worst = 0.0
    for k in range(args.samples):
        gamma = _g2.random_unit_3form(rng)
        dec = _g2.project_3form(_g2.PHI0, gamma)
        for name, comp in (("pi1", dec.pi1), ("pi7", dec.pi7),
                           ("pi27", dec.pi27)):
            res = _g2.linearization_residual(comp, h)
            worst = max(worst, res)
            rows.append((k, name, f"{res:.6e}"))
    _emit_rows(("sample", "component", "residual"), rows, cfg.format)
    if args.verify and worst > cfg.g2_tol:
        return _fail(f"linearization residual {worst:.3e} > {cfg.g2_tol:.1e}")
    return 0


# ---------------------------------------------------------------------------
# bessel


def _cmd_bessel_eval(args, cfg: RunConfig) -> int:
    ev = _bessel.bessel_eval(args.mu, args.x)
    res = _bessel.wronskian_residual(args.mu, args.x)
    print(json.dumps({"mu": args.mu, "x": args.x, "i": ev.value_i,
                      "k": ev.value_k, "regime": ev.regime,
                      "wronskian_residual": res}, indent=2))
    if args.verify and res > 1e-9:
        return _fail(f"Wronskian residual {res:.3e} > 1e-9")
    return 0


# ---------------------------------------------------------------------------
# stenzel


def _cmd_stenzel_profile(args, cfg: RunConfig) -> int:
    prof = _stenzel.solve_profile(args.n, args.wmax or cfg.stenzel_wmax,
                                  args.steps or cfg.stenzel_steps)
    if args.verify:
        if prof.f[0] != 0.0 or prof.fprime[0] != 0.0 or \
                not np.all(np.diff(prof.fprime) > 0):
            return _fail("profile boundary/monotonicity invariant")
    rows = [(f"{w:.12g}", f"{f:.12g}", f"{fp:.12g}")
            for w, f, fp in zip(prof.w, prof.f, prof.fprime)]
    if args.out:
        with open(args.out, "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(("w", "f", "fprime"))
            w.writerows(rows)
        print(f"wrote {len(rows)} rows to {args.out}", file=sys.stderr)
    else:
        _emit_rows(("w", "f", "fprime"), rows, cfg.format)
    return 0


def _cmd_stenzel_ma_check(args, cfg: RunConfig) -> int:
    eps = complex(*args.eps) if args.eps else 0.0
    rng = np.random.default_rng(args.seed if args.seed is not None else cfg.seed)
    if eps == 0:
        potential = _stenzel.cone_potential_fn(3)
        tol = cfg.stenzel_cone_tol
    else:
        prof = _stenzel.solve_profile(3, cfg.stenzel_wmax, cfg.stenzel_steps)
        potential = _stenzel.stenzel_potential_fn(prof, eps)
        tol = cfg.stenzel_smoothing_tol
    rows = []
    worst = 0.0
    for k in range(args.points):
        pt = _stenzel.random_chart_point(eps, rng, scale=1.0)
        res = _stenzel.monge_ampere_residual(potential, pt, h=1e-3)
        worst = max(worst, res)
        rows.append((k, f"{res:.6e}"))
    _emit_rows(("point", "residual"), rows, cfg.format)
    print(f"max residual {worst:.3e} over {args.points} points "
          f"(tolerance {tol:.1e})", file=sys.stderr)
    if worst > tol:
        return _fail(f"Monge-Ampere residual {worst:.3e} > {tol:.1e}")
    return 0


# ---------------------------------------------------------------------------
# spectra


def _parse_window(text: str) -> tuple[float, float]:
    a, _, b = text.partition(":")
    return float(a), float(b)


def _cmd_spectra_rates(args, cfg: RunConfig) -> int:
    spec = load_spectrum(args.input)
    window = _parse_window(args.window)
    if args.kind == "harmonic":
        cat = _spectra.harmonic_rate_catalog(spec, args.p, window)
        degrees = range(max(args.p - 2, 0), min(args.p, 5) + 1)
    elif args.kind == "one-form":
        cat = _spectra.one_form_catalog(spec, window)
        degrees = (0, 1)
    elif args.kind == "paired":
        cat = _spectra.paired_catalog(spec, window)
        degrees = (0,)
    else:
        cat = _spectra.function_rates(args.n, spec.coclosed(0), window)
        degrees = (0,)
        report = _spectra.function_gap_report(args.n, spec.coclosed(0))
        print(json.dumps(report), file=sys.stderr)
    for p in degrees:
        print(f"catalog complete below mu = {spec.completeness(p)} "
              f"in link degree {p}", file=sys.stderr)
    rows = [(f"{r.lam:.12g}", r.degree, r.multiplicity, r.gen_type,
             int(r.log_mode)) for r in cat]
    _emit_rows(("lambda", "degree", "mult", "type", "log_mode"), rows,
               cfg.format)
    if args.verify and args.kind == "harmonic":
        # hat-pair symmetry: rates -2 +- sqrt(mu_hat) carry equal dimension
        wide = _spectra.harmonic_rate_catalog(spec, args.p, (-8.01, 4.01))
        tally = {}
        for r in wide:
            mu_hat = round((r.lam + 2.0) ** 2, 9)
            if mu_hat > 0:
                key = (mu_hat, r.lam > -2.0)
                tally[key] = tally.get(key, 0) + r.multiplicity
        for (mu_hat, upper), mult in tally.items():
            if tally.get((mu_hat, not upper)) != mult:
                return _fail(f"hat-pair symmetry broken at mu_hat={mu_hat}")
    return 0


def _parse_end_rates(text: str):
    out = []
    for part in text.split(","):
        lam, _, dim = part.partition(":")
        out.append(_spectra.CriticalRate(lam=float(lam), degree=0,
                                         multiplicity=int(dim),
                                         gen_type="end"))
    return out


def _cmd_spectra_index_change(args, cfg: RunConfig) -> int:
    spec = load_spectrum(args.input)
    deltas = [float(x) for x in args.delta.split(",")]
    dprimes = [float(x) for x in args.delta_prime.split(",")]
    if len(deltas) != len(dprimes) or len(deltas) < 1:
        raise ValueError("delta and delta-prime must have equal length >= 1")
    cone_w, end_w = tuple(deltas[:-1]), deltas[-1]
    cone_wp, end_wp = tuple(dprimes[:-1]), dprimes[-1]
    cats = []
    for lo, hi in zip(cone_w, cone_wp):
        if args.functions:
            cats.append(_spectra.function_rates(args.n, spec.coclosed(0),
                                                (lo, hi)))
        else:
            cats.append(_spectra.harmonic_rate_catalog(spec, args.p, (lo, hi)))
    end_cat = _parse_end_rates(args.end_rates)
    N = _spectra.index_change(
        cats, end_cat,
        _spectra.WeightVector(cone_w, end_w),
        _spectra.WeightVector(cone_wp, end_wp))
    print(json.dumps({"N": N}))
    if args.verify and N < 0:
        return _fail("index change must be nonnegative")
    return 0


# ---------------------------------------------------------------------------
# edge


def _read_rhs(path: str):
    rs, zs = [], []
    with open(path) as fh:
        for row in csv.reader(fh):
            if len(row) < 2:
                continue
            try:
                r, z = float(row[0]), float(row[1])
            except ValueError:
                continue  # header or comment row
            rs.append(r)
            zs.append(z)
    return np.array(rs), np.array(zs)


def _mode_problem(args, cfg: RunConfig) -> _edge.ModeProblem:
    if args.rhs:
        grid, z = _read_rhs(args.rhs)
    else:
        grid = _edge.log_grid(cfg.edge_rmin, 1.0, cfg.edge_points)
        z = np.zeros_like(grid)
    support = args.support
    if support is None:
        nz = np.nonzero(z)[0]
        support = float(grid[nz[-1]]) if nz.size else float(grid[0])
        support = min(support, 0.999999)
    return _edge.ModeProblem(n=args.n, mu=args.mu, grid=grid, rhs=z,
                             support_max=support)


def _cmd_edge_solve(args, cfg: RunConfig) -> int:
    prob = _mode_problem(args, cfg)
    y = _edge.solve_mode(prob)
    _emit_rows(("r", "y"), [(f"{r:.12g}", f"{v:.12g}")
                            for r, v in zip(prob.grid, y)], cfg.format)
    res = _edge.operator_residual(prob, y)
    print(f"operator residual {res:.3e}", file=sys.stderr)
    if args.verify and res > 1e-6 * (1.0 + float(np.max(np.abs(prob.rhs)))):
        return _fail(f"operator residual {res:.3e}")
    return 0


def _cmd_edge_split(args, cfg: RunConfig) -> int:
    prob = _mode_problem(args, cfg)
    sol = _edge.split_solution(prob, args.delta_p, args.delta_pp)
    lhs, rhs = (None, None)
    if prob.n != 0:
        lhs, rhs = _edge.coefficient_bound_check(prob, args.delta_pp)
    print(json.dumps({
        "c_low": sol.c_low,
        "c_low_regularized": sol.c_low_regularized,
        "delta_pp": sol.delta_pp,
        "shell_norms": [float(x) for x in sol.shell_norms],
        "coefficient_bound": {"lhs": lhs, "rhs": rhs},
    }, indent=2))
    if args.verify and lhs is not None and lhs > rhs:
        return _fail(f"coefficient bound violated: {lhs} > {rhs}")
    return 0


def _cmd_edge_kernel(args, cfg: RunConfig) -> int:
    modes = _edge.kernel_modes(args.nmax)
    rows = [(m.n, f"{m.identity_residual:.6e}", f"{m.ode0_residual:.6e}",
             f"{m.ode1_residual:.6e}", f"{m.log_ratio:.8f}",
             f"{m.inverse_ratio:.8f}", m.normal_form) for m in modes]
    _emit_rows(("n", "identity_residual", "ode0_residual", "ode1_residual",
                "log_ratio", "inverse_ratio", "normal_form"), rows, cfg.format)
    worst = max(max(m.identity_residual, m.ode0_residual, m.ode1_residual)
                for m in modes)
    print(f"{len(modes)} modes, worst residual {worst:.3e}", file=sys.stderr)
    if worst > cfg.kernel_tol:
        return _fail(f"kernel residual {worst:.3e} > {cfg.kernel_tol:.1e}")
    return 0


# ---------------------------------------------------------------------------
# lattice


def _named_vectors():
    L = _lattice.build_k3_lattice()
    emb = _lattice.matching_embedding(L)
    return L, dict(zip(emb.labels, emb.images)), emb


def _cmd_lattice_build(args, cfg: RunConfig) -> int:
    L = _lattice.build_k3_lattice()
    print(json.dumps({
        "rank": L.rank,
        "determinant": int(L.determinant()),
        "signature": list(L.signature()),
        "even": L.is_even(),
    }, indent=2))
    if args.verify:
        rng = np.random.default_rng(cfg.seed)
        for _ in range(200):
            v = rng.integers(-9, 10, L.rank)
            if int(_lattice.pairing(L, v, v)) % 2 != 0:
                return _fail("even-lattice square parity")
    return 0


def _cmd_lattice_match(args, cfg: RunConfig) -> int:
    L, named, emb = _named_vectors()
    print(json.dumps({
        "labels": list(emb.labels),
        "gram": [[int(x) for x in row] for row in emb.source_gram],
        "images": {lab: [int(x) for x in vec]
                   for lab, vec in zip(emb.labels, emb.images)},
    }, indent=2))
    if args.verify:
        got = [[int(_lattice.pairing(L, a, b)) for b in emb.images]
               for a in emb.images]
        if got != [[int(x) for x in row] for row in emb.source_gram]:
            return _fail("embedding Gram mismatch")
    return 0


def _parse_dots(text, named):
    out = []
    if not text:
        return out
    for part in text.split(","):
        name, _, val = part.partition(":")
        if name not in named:
            raise ValueError(f"unknown vector {name!r}; use pi, kplus, kminus")
        out.append((named[name], int(val)))
    return out


def _cmd_lattice_search(args, cfg: RunConfig) -> int:
    L, named, emb = _named_vectors()
    dots = _parse_dots(args.dots, named)
    res = _lattice.constrained_class_search(list(emb.images), args.square,
                                            dots, args.bound, L=L)
    cert = None
    if res.certificate:
        cert = {"modulus": res.certificate.modulus,
                "lhs_residues": list(res.certificate.lhs_residues),
                "rhs_residue": res.certificate.rhs_residue,
                "reduced_form": res.certificate.reduced_form}
    print(json.dumps({"solutions": [list(s) for s in res.solutions],
                      "certificate": cert}, indent=2))
    if args.verify:
        if res.certificate is not None and res.solutions:
            return _fail("certificate contradicts a found solution")
        for sol in res.solutions:
            vec = sum(c * v for c, v in zip(sol, emb.images))
            if int(_lattice.pairing(L, vec, vec)) != args.square or any(
                    int(_lattice.pairing(L, vec, w)) != val
                    for w, val in dots):
                return _fail(f"solution {sol} fails the exact constraints")
    return 0


def _cmd_lattice_complement(args, cfg: RunConfig) -> int:
    L, named, emb = _named_vectors()
    names = args.of.split(",") if args.of else ["pi", "kplus", "kminus"]
    vecs = [named[n] for n in names]
    basis = _lattice.orthogonal_complement(L, vecs)
    rows = [[int(x) for x in b] for b in basis]
    _emit_rows(tuple(f"e{i}" for i in range(L.rank)), rows, cfg.format)
    print(f"complement rank {len(basis)}", file=sys.stderr)
    if args.verify:
        for b in basis:
            if any(int(_lattice.pairing(L, b, v)) != 0 for v in vecs):
                return _fail("complement vector pairs nonzero")
    return 0


def _cmd_lattice_generic(args, cfg: RunConfig) -> int:
    L, named, emb = _named_vectors()
    basis = _lattice.orthogonal_complement(L, list(emb.images))
    avoid = []
    for square, dots in ((-2, [(named["kplus"], 0)]),
                         (0, [(named["kplus"], 0), (named["kminus"], 2)])):
        found = _lattice.constrained_class_search(
            list(emb.images), square, dots, bound=args.avoid_bound, L=L)
        for coeffs in found.solutions:
            vec = sum(c * v for c, v in zip(coeffs, emb.images))
            avoid.append(vec)
    gd = _lattice.generic_direction(L, basis, avoid,
                                    seed=args.seed if args.seed is not None
                                    else cfg.seed)
    print(json.dumps({
        "coords": [str(c) for c in gd.coords],
        "square": str(gd.square),
        "normalized": gd.normalized,
        "avoid_count": len(avoid),
        "avoid_vacuous": not avoid,
    }, indent=2))
    if args.verify:
        from fractions import Fraction
        vec = np.array([Fraction(c) for c in gd.coords], dtype=object)
        if gd.square <= 0 or any(
                (vec @ L.gram @ np.asarray(C, dtype=object)) == 0
                for C in avoid):
            return _fail("generic direction hits an avoid hyperplane")
    return 0


# ---------------------------------------------------------------------------
# parser wiring


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="cone-forge", description=__doc__)
    p.add_argument("--config", help="JSON config path "
                   "(default: $CONE_FORGE_CONFIG)")
    sub = p.add_subparsers(dest="group", required=True)

    g2p = sub.add_parser("g2").add_subparsers(dest="command", required=True)
    q = g2p.add_parser("lincheck")
    q.add_argument("--samples", type=int, default=100)
    q.add_argument("--step", type=float)
    q.add_argument("--seed", type=int)
    q.add_argument("--verify", action="store_true")
    q.set_defaults(func=_cmd_g2_lincheck)

    bp = sub.add_parser("bessel").add_subparsers(dest="command", required=True)
    q = bp.add_parser("eval")
    q.add_argument("--mu", type=float, required=True)
    q.add_argument("--x", type=float, required=True)
    q.add_argument("--verify", action="store_true")
    q.set_defaults(func=_cmd_bessel_eval)

    stp = sub.add_parser("stenzel").add_subparsers(dest="command", required=True)
    q = stp.add_parser("profile")
    q.add_argument("--n", type=int, default=3)
    q.add_argument("--wmax", type=float)
    q.add_argument("--steps", type=int)
    q.add_argument("--out")
    q.add_argument("--verify", action="store_true")
    q.set_defaults(func=_cmd_stenzel_profile)
    q = stp.add_parser("ma-check")
    q.add_argument("--eps", type=lambda s: tuple(float(x) for x in s.split(",")))
    q.add_argument("--points", type=int, default=50)
    q.add_argument("--seed", type=int)
    q.add_argument("--verify", action="store_true")
    q.set_defaults(func=_cmd_stenzel_ma_check)

    spp = sub.add_parser("spectra").add_subparsers(dest="command", required=True)
    q = spp.add_parser("rates")
    q.add_argument("--input", required=True)
    q.add_argument("--p", type=int, default=0)
    q.add_argument("--window", required=True)
    q.add_argument("--kind", choices=("harmonic", "one-form", "paired",
                                      "functions"), default="functions")
    q.add_argument("--n", type=int, default=3)
    q.add_argument("--verify", action="store_true")
    q.set_defaults(func=_cmd_spectra_rates)
    q = spp.add_parser("index-change")
    q.add_argument("--input", required=True)
    q.add_argument("--delta", required=True,
                   help="comma list: cone weights then end weight")
    q.add_argument("--delta-prime", required=True)
    q.add_argument("--p", type=int, default=0)
    q.add_argument("--functions", action="store_true")
    q.add_argument("--n", type=int, default=3)
    q.add_argument("--end-rates", default="0:2",
                   help="end catalog as rate:dim pairs, comma-separated")
    q.add_argument("--verify", action="store_true")
    q.set_defaults(func=_cmd_spectra_index_change)

    ep = sub.add_parser("edge").add_subparsers(dest="command", required=True)
    q = ep.add_parser("solve")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--mu", type=float, required=True)
    q.add_argument("--rhs", required=True, help="CSV file with rows r,z")
    q.add_argument("--support", type=float)
    q.add_argument("--verify", action="store_true")
    q.set_defaults(func=_cmd_edge_solve)
    q = ep.add_parser("split")
    q.add_argument("--n", type=int, required=True)
    q.add_argument("--mu", type=float, required=True)
    q.add_argument("--rhs", required=True)
    q.add_argument("--support", type=float)
    q.add_argument("--delta-p", type=float, default=0.0)
    q.add_argument("--delta-pp", type=float, required=True)
    q.add_argument("--verify", action="store_true")
    q.set_defaults(func=_cmd_edge_split)
    q = ep.add_parser("kernel")
    q.add_argument("--nmax", type=int, required=True)
    q.add_argument("--verify", action="store_true")
    q.set_defaults(func=_cmd_edge_kernel)

    lp = sub.add_parser("lattice").add_subparsers(dest="command", required=True)
    q = lp.add_parser("build")
    q.add_argument("--verify", action="store_true")
    q.set_defaults(func=_cmd_lattice_build)
    q = lp.add_parser("match")
    q.add_argument("--verify", action="store_true")
    q.set_defaults(func=_cmd_lattice_match)
    q = lp.add_parser("search")
    q.add_argument("--square", type=int, required=True)
    q.add_argument("--dots", default="",
                   help="name:value pairs over pi,kplus,kminus")
    q.add_argument("--bound", type=int, default=1000)
    q.add_argument("--verify", action="store_true")
    q.set_defaults(func=_cmd_lattice_search)
    q = lp.add_parser("complement")
    q.add_argument("--of", help="comma list of pi,kplus,kminus")
    q.add_argument("--verify", action="store_true")
    q.set_defaults(func=_cmd_lattice_complement)
    q = lp.add_parser("generic")
    q.add_argument("--seed", type=int)
    q.add_argument("--avoid-bound", type=int, default=50)
    q.add_argument("--verify", action="store_true")
    q.set_defaults(func=_cmd_lattice_generic)
    return p


_INPUT_ERRORS = (
    _spectra.SchemaError, _spectra.ConstraintViolation,
    _spectra.WindowOutOfRange, _spectra.DegreeOutOfRange,
    _spectra.WeightOrderViolation, _spectra.CriticalEndpoint,
    _stenzel.BelowVertex, _stenzel.OutOfProfileRange,
    _edge.WeightOrderViolation, _edge.UnsupportedMode,
    _edge.DivergentConstant,
    FileNotFoundError, json.JSONDecodeError, ValueError, KeyError,
)


def dispatch(argv) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE_ERROR if exc.code else 0
    try:
        cfg = RunConfig.load(args.config)
        return args.func(args, cfg)
    except _INPUT_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE_ERROR


def main() -> None:
    sys.exit(dispatch(sys.argv[1:]))
