"""Command-line front end: factorization queries, verification suites,
kernel checks, square-norm classification, and integrand sampling.

Exit codes: 0 success, 1 usage error, 2 mathematical-domain error
(element outside a cell or domain), 3 verification failure.  All machine
output goes through the canonical JSON writer, so identical invocations
produce byte-identical artifacts.
"""

import argparse
import math
import sys

import numpy as np

from .errors import (
    DivergentIntegral,
    Inconclusive,
    NotInCell,
    NotInDenseCell,
    NotUnipotent,
    OutsideDomain,
)
from .groups import GROUPS, get_group, hc_factorize, in_group
from .holods import (
    KRep,
    constant_section,
    domain_quadrature,
    ds_inner_product,
    ds_params,
    extract_mu,
    kernel_section,
)
from .pkn import pkn_factorize
from .rootdata import build_root_datum
from .serialize import dumps, fmt_float, parse_basis_vector, parse_matrix
from .verify import SUITE_NAMES, run_verify
from .whittaker import (
    DIVERGENT,
    WhittakerKernel,
    gn_l2_norm_full,
    gn_l2_norm_reduced,
    reduced_integrand,
    t_lkt_eval,
)

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DOMAIN = 2
EXIT_VERIFY = 3

_DOMAIN_ERRORS = (NotInCell, NotInDenseCell, NotUnipotent, OutsideDomain,
                  Inconclusive, DivergentIntegral)

_REAL_FORMS = ("su11", "su21", "su22")


class _Parser(argparse.ArgumentParser):
    """argparse variant whose usage failures exit with code 1, not 2."""

    def error(self, message):
        self.print_usage(sys.stderr)
        sys.stderr.write(f"{self.prog}: error: {message}\n")
        raise SystemExit(EXIT_USAGE)


def _write_out(args, text):
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
            if not text.endswith("\n"):
                fh.write("\n")
    else:
        print(text)


def _resolve_pi(spec, args):
    """A K-type from --pi, or from --lambda as the character of weight -n."""
    if getattr(args, "pi", None):
        return KRep.parse(spec, args.pi)
    if getattr(args, "lam", None) is not None:
        return KRep.parse(spec, f"char:-{args.lam}")
    raise ValueError("provide --pi or --lambda")


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------

def cmd_roots(args):
    rd = build_root_datum(args.group)
    from .rootdata import moore_table

    want = moore_table(rd.p, rd.q)
    got = rd.observed_table()
    table_ok = want == got
    worst = 0.0
    for t in rd.triples:
        worst = max(
            worst,
            float(np.linalg.norm(t.h @ t.e - t.e @ t.h - 2 * t.e)),
            float(np.linalg.norm(t.h @ t.f - t.f @ t.h + 2 * t.f)),
            float(np.linalg.norm(t.e @ t.f - t.f @ t.e - t.h)),
        )
    rho_n, rho_l, rho = rd.rho_constants()
    payload = {
        "schema": 1,
        "group": args.group,
        "rank": rd.rank,
        "tube_type": bool(rd.spec.is_tube),
        "roots": [
            {"label": list(lab), "multiplicity": int(mult)}
            for lab, mult in sorted(got.items())
        ],
        "rho_n": [float(v) for v in rho_n],
        "rho_l": [float(v) for v in rho_l],
        "rho": [float(v) for v in rho],
        "checks": {
            "table_matches_closed_form": bool(table_ok),
            "bracket_residual": worst,
        },
    }
    if args.json:
        _write_out(args, dumps(payload))
    else:
        lines = [f"group {args.group}: rank {rd.rank}, "
                 f"{'tube' if rd.spec.is_tube else 'non-tube'} type"]
        for entry in payload["roots"]:
            lines.append(f"  root {tuple(entry['label'])}  "
                         f"multiplicity {entry['multiplicity']}")
        lines.append(f"  rho_n = {[float(v) for v in rho_n]}  "
                     f"rho_l = {[float(v) for v in rho_l]}  "
                     f"rho = {[float(v) for v in rho]}")
        lines.append(f"  table matches closed form: {table_ok}; "
                     f"bracket residual {worst:.2e}")
        _write_out(args, "\n".join(lines))
    return EXIT_OK if table_ok else EXIT_VERIFY


def cmd_decompose(args):
    spec = get_group(args.group)
    m = parse_matrix(args.element)
    if m.shape != (spec.n, spec.n):
        raise ValueError(
            f"element must be {spec.n}x{spec.n} for {args.group}, "
            f"got {m.shape[0]}x{m.shape[1]}")
    if not in_group(spec, m):
        raise NotInCell(f"matrix is not in {spec.name}")
    payload = {"schema": 1, "group": args.group, "mode": args.mode}
    if args.mode == "hc":
        trip = hc_factorize(spec, m)
        payload.update({
            "zplus": trip.zplus,
            "k": trip.k,
            "zminus": trip.zminus,
            "residual": float(np.linalg.norm(trip.reassemble() - m)),
        })
    else:
        rd = build_root_datum(spec)
        trip = pkn_factorize(rd, m, sign=args.sign)
        key = "zplus" if trip.sign == "plus" else "zminus"
        payload.update({
            "sign": trip.sign,
            key: trip.p_block,
            "k": trip.k,
            "n": trip.n,
            "n_log": trip.n_log,
            "residual": float(trip.residual_against(m)),
            "gauge": trip.gauge,
        })
    _write_out(args, dumps(payload))
    return EXIT_OK


def cmd_plancherel(args):
    spec = get_group(args.group)
    if spec.complexified:
        raise ValueError("kernel checks run on the real forms su11/su21/su22")
    pi = _resolve_pi(spec, args)
    quad = domain_quadrature(spec, n_rad=args.quad_nodes)
    nodes = list(getattr(quad, "shape_params", (quad.n_rad, quad.n_ang)))
    if args.check == "reproducing":
        rng = np.random.default_rng(args.seed)
        xi = pi.basis_vector(0)
        one = constant_section(pi, xi)
        value, worst = 1.0 + 0.0j, -1.0
        for _ in range(20):
            w = rng.standard_normal((spec.p, spec.q)) \
                + 1j * rng.standard_normal((spec.p, spec.q))
            w *= 0.8 * rng.random() / max(np.linalg.norm(w, 2), 1e-12)
            val = ds_inner_product(pi, one, kernel_section(pi, w, xi), quad=quad)
            if abs(val - 1.0) > worst:
                worst = abs(val - 1.0)
                value = val
        expected = 1.0
    else:  # norm of the degree-2 monomial section against the closed form
        if pi.dim != 1:
            raise ValueError("the norm check is defined for characters")
        lam = -pi.m
        if lam <= 1:
            raise DivergentIntegral(
                f"weight {lam} does not give a square-integrable kernel")
        z2 = _monomial_section(pi, k=2)
        value = ds_inner_product(pi, z2, z2, quad=quad)
        expected = 2.0 / (lam * (lam + 1.0))
    payload = {
        "schema": 1,
        "group": args.group,
        "pi": pi.label(),
        "check": args.check,
        "value": complex(value),
        "expected": expected,
        "abs_err": abs(complex(value) - expected),
        "nodes": [int(v) for v in nodes],
    }
    _write_out(args, dumps(payload))
    return EXIT_OK


def _monomial_section(pi, k=2):
    from .holods import HoloFunction

    def fn(z):
        return np.array([complex(z[0, 0]) ** k], dtype=complex)

    return HoloFunction(pi.dim, fn)


def cmd_whittaker(args):
    spec = get_group(args.group)
    if spec.complexified:
        raise ValueError("sections are computed on the real forms")
    rd = build_root_datum(spec)
    pi = _resolve_pi(spec, args)
    eta = parse_basis_vector(args.eta, pi.dim)
    xi = parse_basis_vector(args.xi, pi.dim)
    x = parse_matrix(args.at)
    if x.shape != (spec.n, spec.n):
        raise ValueError(f"--at matrix must be {spec.n}x{spec.n}")
    if not in_group(spec, x):
        raise NotInCell(f"--at matrix is not in {spec.name}")
    wk = WhittakerKernel(rd, pi, eta, degree_cap=args.degree_cap)
    vec = t_lkt_eval(wk, xi, x)
    payload = {
        "schema": 1,
        "group": args.group,
        "pi": pi.label(),
        "eta": eta,
        "xi": xi,
        "x": x,
        "section": vec,
    }
    _write_out(args, dumps(payload))
    return EXIT_OK


def cmd_l2norm(args):
    spec = get_group(args.group)
    if spec.complexified:
        raise ValueError("square norms are computed on the real forms")
    rd = build_root_datum(spec)
    pi = _resolve_pi(spec, args)
    eta = parse_basis_vector(args.eta, pi.dim)
    xi = parse_basis_vector(args.xi, pi.dim)
    wk = WhittakerKernel(rd, pi, eta, degree_cap=args.degree_cap)
    params = ds_params(pi, rd)
    status, value, err = None, None, None
    if params.status == "boundary":
        # the classifier gate: boundary parameters are flagged, not integrated
        status = "boundary"
    elif args.method == "reduced":
        out = gn_l2_norm_reduced(wk, xi)
        if out is DIVERGENT:
            status = "divergent"
        else:
            status, value, err = "finite", float(out), float(out) * 1e-9
    else:
        if params.status == "below":
            status = "divergent"
        else:
            value, err = gn_l2_norm_full(wk, xi, seed=args.seed)
            status, value, err = "finite", float(value), float(err)
    payload = {
        "schema": 1,
        "group": args.group,
        "pi": pi.label(),
        "method": args.method,
        "status": status,
        "value": value,
        "err": err,
    }
    _write_out(args, dumps(payload))
    return EXIT_OK


def cmd_verify(args):
    report = run_verify(args.suite, seed=args.seed, group=args.group)
    _write_out(args, dumps(report.jsonable()))
    print(report.human_table(), file=sys.stderr)
    return EXIT_OK if report.ok else EXIT_VERIFY


def cmd_sample_integrand(args):
    spec = get_group(args.group)
    if spec.complexified:
        raise ValueError("the integrand is defined on the real forms")
    if spec.rank != 1:
        raise ValueError("integrand sampling is implemented for rank one")
    rd = build_root_datum(spec)
    pi = _resolve_pi(spec, args)
    mu, _ = extract_mu(pi, rd)
    # endpoint-excluded grid so round counts place t = 0 exactly on a node
    ts = args.t_min + (args.t_max - args.t_min) * np.arange(args.rows) / args.rows
    vals = np.array([float(reduced_integrand(rd, mu, np.array([t])))
                     for t in ts])
    partial = np.concatenate(
        [[0.0], np.cumsum(0.5 * (vals[1:] + vals[:-1]) * np.diff(ts))])
    lines = ["t,integrand,partial_integral"]
    for t, v, s in zip(ts, vals, partial):
        lines.append(f"{fmt_float(t)},{fmt_float(v)},{fmt_float(s)}")
    _write_out(args, "\n".join(lines))
    return EXIT_OK


# ---------------------------------------------------------------------------
# parser assembly
# ---------------------------------------------------------------------------

def _add_common(sub, *, group=True, pi=False, seed=None, cap=None):
    if group:
        sub.add_argument("--group", required=True, choices=sorted(GROUPS))
    if pi:
        sub.add_argument("--pi", help="K-type label, e.g. char:-3 or charsym:-4,1")
        sub.add_argument("--lambda", dest="lam", type=int,
                         help="shorthand for --pi char:-<value>")
    if seed is not None:
        sub.add_argument("--seed", type=int, default=seed)
    if cap is not None:
        sub.add_argument("--degree-cap", dest="degree_cap", type=int, default=cap)
    sub.add_argument("--json", action="store_true",
                     help="emit canonical JSON (default for machine commands)")
    sub.add_argument("--out", help="write the artifact to this path")


def build_parser():
    parser = _Parser(prog="hermwhit",
                     description="Factorizations, kernels, and square-norm "
                                 "classification for holomorphic discrete "
                                 "series on SU(p,q).")
    subs = parser.add_subparsers(dest="command", required=True,
                                 parser_class=_Parser)

    p = subs.add_parser("roots", help="restricted-root table and constants")
    _add_common(p)
    p.set_defaults(func=cmd_roots)

    p = subs.add_parser("decompose", help="factor one group element")
    _add_common(p)
    p.add_argument("--element", required=True,
                   help="square matrix, e.g. [[1,0],[i,1]]")
    p.add_argument("--mode", choices=("pkn", "hc"), default="pkn")
    p.add_argument("--sign", choices=("plus", "minus"), default="plus")
    p.set_defaults(func=cmd_decompose)

    p = subs.add_parser("plancherel", help="weighted Bergman kernel checks")
    _add_common(p, pi=True, seed=5)
    p.add_argument("--check", choices=("reproducing", "norm"),
                   default="reproducing")
    p.add_argument("--quad-nodes", dest="quad_nodes", type=int)
    p.set_defaults(func=cmd_plancherel)

    p = subs.add_parser("whittaker", help="evaluate the section at one point")
    _add_common(p, pi=True, cap=12)
    p.add_argument("--eta", default="e0", help="functional vector (e<k> or list)")
    p.add_argument("--xi", default="e0", help="K-type vector (e<k> or list)")
    p.add_argument("--at", required=True, help="group element, square matrix")
    p.set_defaults(func=cmd_whittaker)

    p = subs.add_parser("l2norm", help="square norm over G/N, or its failure")
    _add_common(p, pi=True, seed=2020, cap=8)
    p.add_argument("--eta", default="e0")
    p.add_argument("--xi", default="e0")
    p.add_argument("--method", choices=("reduced", "full"), default="reduced")
    p.set_defaults(func=cmd_l2norm)

    p = subs.add_parser("verify", help="run a named verification suite")
    p.add_argument("--suite", required=True,
                   choices=tuple(SUITE_NAMES) + ("all",))
    p.add_argument("--group", choices=sorted(GROUPS))
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--json", action="store_true")
    p.add_argument("--out")
    p.set_defaults(func=cmd_verify)

    p = subs.add_parser("sample-integrand",
                        help="CSV sample of the square-norm integrand")
    _add_common(p, pi=True)
    p.add_argument("--rows", type=int, default=400)
    p.add_argument("--t-min", dest="t_min", type=float, default=-2.0)
    p.add_argument("--t-max", dest="t_max", type=float, default=6.0)
    p.add_argument("--csv", action="store_true",
                   help="emit CSV (always on for this command)")
    p.set_defaults(func=cmd_sample_integrand)
    return parser


def main(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        return args.func(args)
    except _DOMAIN_ERRORS as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except (ValueError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
