"""Command-line surface: batch verification, derivation, ad-hoc pairing.

Exit codes: 0 all checks pass, 1 at least one finding, 2 configuration or
usage error.  Reports are deterministic for a fixed config and seed.
"""

from __future__ import annotations

import argparse
import os
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from fractions import Fraction

from . import cases as cs
from . import parser as px
from .duality import (
    DUAL_NAMES,
    DualityEngine,
    derive_dual_structure,
    dual_star,
    verify_dual_structure,
)
from .errors import QGalileiError
from .hopf import run_hopf_suite
from .ncpoly import Alphabet, NcPoly, word_render
from .reports import CheckRecord, Report
from .scalars import MultivariateContext

DEFAULT_SEED = 20240
ALT_ORDER = ("m", "t", "v", "a")


def _seed_default():
    env = os.environ.get("QGALILEI_SEED")
    if env:
        try:
            return int(env)
        except ValueError:
            pass
    return DEFAULT_SEED


def make_parser():
    ap = argparse.ArgumentParser(
        prog="qgalilei",
        description="Verify and re-derive the 16 quantum deformations of the "
                    "centrally extended two-dimensional Galilei group.")
    sub = ap.add_subparsers(dest="command")

    def common(p):
        p.add_argument("--case", default="all",
                       help="case number 1..16 or 'all' (default all)")
        p.add_argument("--degree", type=int, default=5,
                       help="generator-degree truncation N, 1..8 (default 5)")
        p.add_argument("--t-order", type=int, default=None, dest="t_order",
                       help="parameter order T for scaled runs (default N-1)")
        p.add_argument("--seed", type=int, default=_seed_default(),
                       help="seed for instantiation draws (env QGALILEI_SEED)")
        p.add_argument("--format", choices=("text", "json"), default="text")
        p.add_argument("--output", default=None, help="write the report here")
        p.add_argument("--timings", action="store_true",
                       help="include timings (breaks byte-identical reports)")
        p.add_argument("--jobs", type=int, default=1,
                       help="parallel workers for independent checks")

    pv = sub.add_parser("verify", help="run the Jacobi/Hopf axiom suite")
    common(pv)
    pv.add_argument("--side", choices=("group", "dual", "both"), default="both")
    pv.add_argument("--instantiations", type=int, default=3,
                    help="scaled-mode instantiations per dual case (default 3)")

    pd = sub.add_parser("derive", help="re-derive dual structures from the pairing")
    common(pd)
    pd.add_argument("--ordering", choices=("default", "alt", "both", "auto"),
                    default="auto",
                    help="group basis order for the pairing; auto = alt for case 9")
    pd.add_argument("--emit", default=None,
                    help="directory for derived case files")
    pd.add_argument("--star", action="store_true",
                    help="also reconstruct the dual star structure")

    pp = sub.add_parser("pair", help="evaluate one duality pairing exactly")
    pp.add_argument("--case", required=True, help="case number 1..16")
    pp.add_argument("left", help="dual-side expression, e.g. 'K*P - P*K'")
    pp.add_argument("right", help="group-side expression, e.g. 'm'")
    pp.add_argument("--format", choices=("text", "json"), default="text")
    return ap


def _parse_cases(text):
    if text == "all":
        return list(range(1, 17))
    try:
        cid = int(text)
    except ValueError:
        raise QGalileiError(f"bad case selector {text!r}")
    if not 1 <= cid <= 16:
        raise QGalileiError(f"case {cid} out of range 1..16")
    return [cid]


def _validate_common(args):
    if not 1 <= args.degree <= 8:
        raise QGalileiError(f"degree {args.degree} out of range 1..8")
    if args.t_order is not None and args.t_order >= args.degree:
        raise QGalileiError("scaled runs require T < N")


def _inst_str(assignment):
    return ", ".join(f"{k}:={v}" for k, v in assignment.items())


# ---------------------------------------------------------------------------
# verify
# ---------------------------------------------------------------------------

def _verify_group_case(cid):
    pres = cs.build_presentation(cs.builtin(cid, "group"))
    out = []
    for o in run_hopf_suite(pres):
        out.append(CheckRecord(cid, "group", o.name, o.status,
                               mode="multivariate", residual=o.residual,
                               detail=o.detail))
    return out


def _verify_dual_case(cid, N, T, seed, count):
    case = cs.builtin(cid, "dual")
    insts, _rejected = cs.sample_instantiations(case, seed + cid, count)
    out = []
    for assignment in insts:
        pres = cs.build_presentation(case, N=N, T=T, assignment=assignment)
        label = _inst_str(assignment)
        for o in run_hopf_suite(pres):
            out.append(CheckRecord(cid, "dual", o.name, o.status, mode="scaled",
                                   degree=N, order=T, instantiation=label,
                                   residual=o.residual, detail=o.detail))
    return out


def cmd_verify(args) -> Report:
    _validate_common(args)
    cids = _parse_cases(args.case)
    N = args.degree
    T = args.t_order if args.t_order is not None else N - 1
    rep = Report("verify", {
        "case": args.case, "side": args.side, "degree": N, "t_order": T,
        "instantiations": args.instantiations, "seed": args.seed,
    })
    jobs = []
    if args.side in ("group", "both"):
        jobs += [("group", cid) for cid in cids]
    if args.side in ("dual", "both"):
        jobs += [("dual", cid) for cid in cids]

    def run(job):
        side, cid = job
        t0 = time.monotonic()
        if side == "group":
            recs = _verify_group_case(cid)
        else:
            recs = _verify_dual_case(cid, N, T, args.seed, args.instantiations)
        ms = int((time.monotonic() - t0) * 1000)
        for r in recs:
            r.timing_ms = ms
        return recs

    if args.jobs > 1:
        with ThreadPoolExecutor(max_workers=args.jobs) as ex:
            for recs in ex.map(run, jobs):
                rep.checks.extend(recs)
    else:
        for job in jobs:
            rep.checks.extend(run(job))
    return rep.finalize()


# ---------------------------------------------------------------------------
# derive
# ---------------------------------------------------------------------------

def _orderings_for(args, cid):
    if args.ordering == "default":
        return [None]
    if args.ordering == "alt":
        return [ALT_ORDER]
    if args.ordering == "both":
        return [None, ALT_ORDER]
    return [ALT_ORDER] if cid == 9 else [None]


KNOWN_DISCREPANCY_NOTE = (
    "derivation supports the opposite overall sign (classical part +i*M, as in "
    "every other case); the shipped closed form follows the source text")


def cmd_derive(args) -> Report:
    _validate_common(args)
    cids = _parse_cases(args.case)
    N = args.degree
    T = args.t_order if args.t_order is not None else N - 1
    rep = Report("derive", {
        "case": args.case, "degree": N, "t_order": T, "seed": args.seed,
        "ordering": args.ordering,
    })
    for cid in cids:
        dcase = cs.builtin(cid, "dual")
        assignment = cs.default_instantiation(dcase)
        label = _inst_str(assignment)
        dual_pres = cs.build_presentation(dcase, N=N, T=T, assignment=assignment)
        matched_any = False
        for ordering in _orderings_for(args, cid):
            gp = cs.build_presentation(cs.builtin(cid, "group"),
                                       assignment=assignment, N=None,
                                       ordering=ordering, T=T)
            eng = DualityEngine(gp, N)
            cmpres = verify_dual_structure(eng, dual_pres)
            oname = ",".join(ordering or cs.GROUP_ORDER)
            for it in cmpres.items:
                if it.agrees:
                    status, detail = "pass", None
                elif cid == 12 and it.what == "[K,P]" and it.sign_flipped:
                    status, detail = "documented", KNOWN_DISCREPANCY_NOTE
                else:
                    status, detail = "fail", f"derived {it.derived} vs claimed {it.claimed}"
                rep.checks.append(CheckRecord(
                    cid, "dual", f"derive:{it.what}@{oname}", status,
                    mode="scaled", degree=N, order=T, instantiation=label,
                    residual=None if it.agrees else it.derived, detail=detail))
            if cmpres.all_agree:
                matched_any = True
            if args.emit:
                _emit_case(args.emit, cid, oname, eng, N, T)
            if args.star:
                srep = dual_star(eng, dual_pres=dual_pres)
                her = ", ".join(f"{n}{'=' if ok else '!'}" for n, ok in
                                srep.hermitian.items())
                inv = ", ".join(f"{n}:{'ok' if ok else 'no'}" for n, ok in
                                (srep.inverse_identity or {}).items())
                rep.checks.append(CheckRecord(
                    cid, "dual", f"star@{oname}", "pass", mode="scaled",
                    degree=N, order=T, instantiation=label,
                    detail=f"hermitian pattern [{her}]; antipode-inverse "
                           f"identity [{inv}]"))
        if matched_any and args.ordering == "both":
            rep.notes.append(f"case {cid}: at least one ordering reproduces the "
                             "claimed dual structure")
    return rep.finalize()


def _emit_case(path, cid, oname, eng, N, T):
    import os as _os
    _os.makedirs(path, exist_ok=True)
    derived = derive_dual_structure(eng, N)
    text = _render_derived(cid, derived, eng)
    fname = _os.path.join(path, f"derived{cid:02d}_{oname.replace(',', '')}.case")
    with open(fname, "w") as fh:
        fh.write(text)


def _render_derived(cid, derived, eng):
    """Derived structures as a case file; coefficients are t-polynomials."""
    a = eng.dual_alphabet
    rs = lambda c: eng.group.ctx.render(c)
    lines = [f"# notes: derived dual structure {cid}, instantiated coefficients",
             f"[meta] id={cid} side=dual order=M,H,P,K",
             "[params] t",
             "[relations]"]
    for (hi, lo), poly in sorted(derived.brackets.items(), reverse=True):
        if not poly.is_zero():
            lines.append(f"[{a.names[hi]},{a.names[lo]}] = {poly.render(rs)}")
    lines.append("[coproduct]")
    for X in range(4):
        lines.append(f"D({a.names[X]}) = {derived.delta[X].render(rs)}")
    lines.append("[antipode]")
    for X in range(4):
        lines.append(f"S({a.names[X]}) = {derived.antipode[X].render(rs)}")
    lines.append("[counit]")
    for X in range(4):
        lines.append(f"e({a.names[X]}) = 0")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# pair
# ---------------------------------------------------------------------------

def cmd_pair(args):
    cid = int(args.case)
    if not 1 <= cid <= 16:
        raise QGalileiError(f"case {cid} out of range 1..16")
    group_case = cs.builtin(cid, "group")
    gp = cs.build_presentation(group_case)
    eng = DualityEngine(gp, 8)
    dual_alpha = eng.dual_alphabet

    left_ast = px.parse_expr(args.left, params=group_case.params,
                             gens=DUAL_NAMES)
    right_ast = px.parse_expr(args.right, params=group_case.params,
                              gens=group_case.order)
    env_left = cs._Env(gp.ctx, dual_alpha, None, None)
    env_right = cs._Env(gp.ctx, gp.alphabet, None, None)
    X = cs.eval_ast(left_ast, env_left)
    phi = cs.eval_ast(right_ast, env_right)
    if not isinstance(X, NcPoly):
        X = NcPoly.unit(dual_alpha).scale(X)
    if not isinstance(phi, NcPoly):
        phi = NcPoly.unit(gp.alphabet).scale(phi)
    value = eng.pair(X, phi)
    return gp.ctx.render(value)


# ---------------------------------------------------------------------------

def main(argv=None) -> int:
    ap = make_parser()
    argv = list(sys.argv[1:] if argv is None else argv)
    if not argv:
        argv = ["verify", "--case", "all", "--side", "both",
                "--degree", "5", "--instantiations", "3"]
    args = ap.parse_args(argv)
    if args.command is None:
        ap.print_help()
        return 2
    try:
        if args.command == "pair":
            out = cmd_pair(args)
            if args.format == "json":
                import json
                print(json.dumps({"tool": "qgalilei", "command": "pair",
                                  "left": args.left, "right": args.right,
                                  "case": int(args.case), "value": out},
                                 sort_keys=True, indent=2))
            else:
                print(out)
            return 0
        rep = cmd_verify(args) if args.command == "verify" else cmd_derive(args)
    except QGalileiError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    text = rep.to_json(args.timings) if args.format == "json" \
        else rep.to_text(args.timings)
    if args.output:
        with open(args.output, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return 1 if rep.failed else 0


if __name__ == "__main__":
    raise SystemExit(main())
