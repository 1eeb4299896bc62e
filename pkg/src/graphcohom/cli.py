"""Command-line front end.

Subcommands: cohomology, ss, config-space, verify.  Exit codes: 0 ok,
1 input/validation error, 2 resource cap exceeded, 3 verification failure.
Output is deterministic: identical invocations print identical bytes.
"""

import argparse
import json
import sys

from . import algebra as alg
from . import corpus
from . import graph as graphmod
from .coeff import QQ, ring_from_name
from .graph_complex import build, cohomology, poincare
from .polyutil import p1_str, p2_str
from .simplicial import (
    ResourceCapError,
    builtin_complex,
    complex_from_config,
    cover_bicomplex,
    cup_ring,
    diagonal_union,
    relative_cohomology,
)
from .spectral import d_operators, degeneration_check, spectral_sequence


class InputError(Exception):
    pass


def load_algebra(spec, ring):
    if spec.startswith("builtin:"):
        parts = spec.split(":")[1:]
        try:
            return alg.builtin(parts[0], tuple(parts[1:]), ring=ring)
        except ValueError as exc:
            raise InputError(str(exc)) from None
    try:
        with open(spec, "r", encoding="utf-8") as fh:
            return alg.from_config(fh.read())
    except OSError as exc:
        raise InputError(f"cannot read algebra file {spec}: {exc}") from None
    except ValueError as exc:
        raise InputError(str(exc)) from None


def load_dga(spec, ring):
    if spec.startswith("builtin:"):
        name = spec.split(":", 1)[1]
        try:
            return corpus.builtin_dga(name, ring=ring)
        except ValueError as exc:
            raise InputError(str(exc)) from None
    try:
        with open(spec, "r", encoding="utf-8") as fh:
            A = alg.from_config(fh.read())
    except OSError as exc:
        raise InputError(f"cannot read algebra file {spec}: {exc}") from None
    except ValueError as exc:
        raise InputError(str(exc)) from None
    if not A.is_dg:
        A = corpus.formal_dga(A)
    return A


def load_graph(spec):
    if ":" in spec and not spec.endswith(".json"):
        try:
            return graphmod.builtin_graph(spec)
        except ValueError as exc:
            raise InputError(str(exc)) from None
    try:
        with open(spec, "r", encoding="utf-8") as fh:
            return graphmod.from_config(fh.read())
    except OSError as exc:
        raise InputError(f"cannot read graph file {spec}: {exc}") from None
    except ValueError as exc:
        raise InputError(str(exc)) from None


def load_complex(spec):
    name = spec.split(":", 1)[1] if spec.startswith("builtin:") else spec
    try:
        return builtin_complex(name)
    except ValueError:
        pass
    try:
        with open(spec, "r", encoding="utf-8") as fh:
            return complex_from_config(fh.read())
    except OSError as exc:
        raise InputError(f"unknown complex {spec!r} ({exc})") from None
    except ValueError as exc:
        raise InputError(str(exc)) from None


def emit(data, text_lines, fmt, out):
    if fmt == "json":
        out.write(json.dumps(data, sort_keys=True, indent=2) + "\n")
    else:
        for line in text_lines:
            out.write(line + "\n")


def cmd_cohomology(args, out):
    ring = ring_from_name(args.ring)
    A = load_algebra(args.algebra, ring)
    problem = alg.validate(A)
    if problem is not None:
        raise InputError(f"algebra validation failure: {problem}")
    G = load_graph(args.graph)
    C = build(A, G)
    table = cohomology(C)
    rep = poincare(C, table)
    data = {
        "ranks": table.to_json_obj(),
        "poincare": p2_str(rep.cohom_poly),
        "poincare_complex": p2_str(rep.complex_poly),
        "euler": p1_str(rep.euler_complex()),
    }
    lines = [
        f"graph cohomology of {args.algebra} over {args.graph} ({ring.name})",
        table.to_text(include_torsion=(ring.name == "Z")),
        f"P_cohomology(t,u) = {data['poincare']}",
        f"P_complex(t,u)    = {data['poincare_complex']}",
        f"P(t,-1)           = {data['euler']}",
    ]
    emit(data, lines, args.format, out)
    return 0


def cmd_ss(args, out):
    ring = ring_from_name(args.ring)
    if not ring.is_field:
        raise InputError("spectral sequences need field coefficients (Q or Fp:<p>)")
    dga = load_dga(args.dga, ring)
    G = load_graph(args.graph)
    C = build(dga, G)
    ss = spectral_sequence(C.as_bicomplex())
    dops = d_operators(dga, G)
    supports = []
    for i in range(1, dops.imax + 1):
        for p in range(0, G.num_edges - i + 1):
            M = dops.d_matrix(i, p)
            if not M.is_zero():
                supports.append({"i": i, "p": p, "nonzeros": len(M.entries)})
    formal = dga.is_formal_presentation()
    degen = degeneration_check(ss, G, formal=formal)
    pages_out = {}
    top = min(args.pages, ss.stable_r)
    for r in range(1, top + 1):
        pages_out[str(r)] = {
            f"{p},{q}": d for (p, q), d in sorted(ss.page(r).items())
        }
    data = {
        "pages": pages_out,
        "differential_ranks": {
            str(r): {f"{p},{q}": v for (p, q), v in sorted(ranks.items())}
            for r, ranks in sorted(ss.dranks.items())
            if r <= top
        },
        "d_operator_support": supports,
        "stable_page": ss.stable_r,
        "degeneration": degen,
    }
    lines = [f"spectral sequence of {args.dga} over {args.graph} ({ring.name})"]
    for r in range(1, top + 1):
        lines.append(f"E_{r} dimensions:")
        page = ss.page(r)
        for (p, q) in sorted(page):
            lines.append(f"  ({p},{q}): {page[(p, q)]}")
        ranks = ss.dranks.get(r, {})
        if ranks and r <= ss.stable_r:
            for (p, q) in sorted(ranks):
                lines.append(f"  rank d_{r} at ({p},{q}): {ranks[(p, q)]}")
    lines.append(
        "d_i support: "
        + (
            ", ".join(f"d_{s['i']}@p={s['p']}({s['nonzeros']}nz)" for s in supports)
            or "none"
        )
    )
    verdict = "degenerate at E_2" if formal else f"degenerate at E_{degen['witness']['bound']}"
    lines.append(
        f"degeneration: {degen['status']} ({verdict})"
        if degen["status"] == "pass"
        else f"degeneration: FAIL {degen['witness']}"
    )
    emit(data, lines, args.format, out)
    return 0


def cmd_config_space(args, out):
    X = load_complex(args.complex)
    G = load_graph(args.graph)
    if G.has_loop() or len(set(G.edges)) != G.num_edges:
        raise InputError("config-space needs a loopless simple graph")
    bic, Xn, _ = cover_bicomplex(X, G, QQ, cap=args.cap)
    Z = diagonal_union(Xn, list(G.edges))
    rel, _ = relative_cohomology(Xn, Z, QQ)
    data = {"relative_cohomology": {str(k): v for k, v in sorted(rel.items())}}
    lines = [
        f"relative cohomology of ({args.complex}^{G.n}, Z_G) for {args.graph}:",
        "  "
        + (", ".join(f"H^{k} = Q^{v}" for k, v in sorted(rel.items())) or "0"),
        "note: for an R-oriented closed m-manifold M this computes the"
        " configuration-space homology H_{mn-*}(M^G; R) by Lefschetz duality",
    ]
    if args.compare:
        A = cup_ring(X, QQ)
        C = build(A, G)
        dims, d1_ranks = bic.e1_page()
        expect_dims = {}
        for p in range(C.num_columns()):
            for gen in C.gens(p):
                key = (p, C.qdeg(gen))
                expect_dims[key] = expect_dims.get(key, 0) + 1
        from .coeff import rank as mat_rank

        expect_ranks = {}
        for q in C.q_values():
            for p in range(C.num_columns()):
                r = mat_rank(C.delta_block(q, p))
                if r:
                    expect_ranks[(p, q)] = r
        tot = bic.total_cohomology()
        e1_ok = dims == expect_dims and d1_ranks == expect_ranks
        tot_ok = tot == rel
        table = cohomology(C)
        ca_total = {
            k: v for k, v in sorted(table.total_by_degree().items()) if v
        }
        euler_ca = sum((-1) ** k * v for k, v in ca_total.items())
        euler_rel = sum((-1) ** k * v for k, v in rel.items())
        poincare_equal = ca_total == rel
        data["compare"] = {
            "e1_matches_graph_complex": e1_ok,
            "total_equals_relative": tot_ok,
            "euler_equal": euler_ca == euler_rel,
            "total_grading_poincare_equal": poincare_equal,
            "graph_cohomology_by_total_degree": {
                str(k): v for k, v in ca_total.items()
            },
        }
        lines.append(
            f"first-page comparison: E_1 {'PASS' if e1_ok else 'FAIL'};"
            f" total vs relative {'PASS' if tot_ok else 'FAIL'}"
        )
        lines.append(
            f"Euler characteristics equal: {'yes' if euler_ca == euler_rel else 'NO'}"
        )
        lines.append(
            "total-grading Poincare polynomials "
            + ("EQUAL" if poincare_equal else "DIFFER")
            + f" (graph cohomology: {ca_total}, relative: {dict(sorted(rel.items()))})"
        )
    emit(data, lines, args.format, out)
    return 0


def cmd_verify(args, out):
    names = args.suites or list(corpus.SUITES)
    for name in names:
        if name not in corpus.SUITES:
            raise InputError(
                f"unknown suite {name!r}; choose from {', '.join(sorted(corpus.SUITES))}"
            )
    summary, all_ok = corpus.run_suites(names, seed=args.seed)
    data = {
        "status": "pass" if all_ok else "fail",
        "suites": [
            {
                "suite": s["suite"],
                "status": s["status"],
                "checks": s["checks"],
            }
            for s in summary
        ],
    }
    lines = []
    for s in summary:
        n_pass = sum(1 for c in s["checks"] if c["status"] == "pass")
        lines.append(
            f"{s['status'].upper():4}  {s['suite']}  ({n_pass}/{len(s['checks'])} checks)"
        )
        if s["status"] != "pass":
            for c in s["checks"]:
                if c["status"] != "pass":
                    lines.append(f"      FAIL {c['check']}: {c['witness']}")
    lines.append("all suites passed" if all_ok else "VERIFICATION FAILED")
    emit(data, lines, args.format, out)
    return 0 if all_ok else 3


def make_parser():
    ap = argparse.ArgumentParser(
        prog="graphcohom",
        description="Exact graph cohomology of graded algebras, with a "
        "simplicial configuration-space oracle and Massey-product spectral "
        "sequences.",
    )
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("cohomology", help="Betti table and Poincare polynomials of C_A(G)")
    p.add_argument("--algebra", required=True, help="builtin:<name>:<params> or a JSON file")
    p.add_argument("--graph", required=True, help="path:<n>, cycle:<n>, complete:<n>, star:<n> or a JSON file")
    p.add_argument("--ring", default="Q", help="Q, Z or Fp:<prime>")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(fn=cmd_cohomology)

    p = sub.add_parser("ss", help="spectral sequence pages and d_i operators")
    p.add_argument("--dga", required=True, help="builtin:massey|fourfold|evenpair|triple|formal:<alg> or a JSON file")
    p.add_argument("--graph", required=True)
    p.add_argument("--ring", default="Q")
    p.add_argument("--pages", type=int, default=10)
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(fn=cmd_ss)

    p = sub.add_parser("config-space", help="relative cohomology of (M^n, Z_G)")
    p.add_argument("--complex", required=True, help="circle, sphere2, interval, point, torus or a JSON file")
    p.add_argument("--graph", required=True)
    p.add_argument("--compare", action="store_true", help="cross-check against the graph complex")
    p.add_argument("--cap", type=int, default=200_000, help="simplex cap")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(fn=cmd_config_space)

    p = sub.add_parser("verify", help="run the verification corpus")
    p.add_argument("suites", nargs="*", help="suite names (default: all)")
    p.add_argument("--seed", type=int, default=0, help="seed for the permuted-splitting stability check")
    p.add_argument("--format", choices=["text", "json"], default="text")
    p.set_defaults(fn=cmd_verify)
    return ap


def main(argv=None, out=None):
    out = out or sys.stdout
    ap = make_parser()
    args = ap.parse_args(argv)
    try:
        return args.fn(args, out)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ResourceCapError as exc:
        print(f"resource cap exceeded: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
