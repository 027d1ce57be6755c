"""Command-line entry point.

Exit status: 0 nothing found, 1 mathematical anomaly (or a failed property
run), 2 usage error, 3 I/O or checkpoint error.
"""

import argparse
import json
import logging
import re
import sys
from pathlib import Path

from . import forms, pell, scan, tuples, verify

EXIT_OK, EXIT_ANOMALY, EXIT_USAGE, EXIT_IO = 0, 1, 2, 3

_NEG_LIST = re.compile(r"^-\d+(,-?\d+)*$")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def __init__(self, *args, **kwargs):
        super().__init__(*args, **kwargs)
        # let "-21,4" through as a value rather than an unknown flag
        self._negative_number_matcher = re.compile(r"^-\d+(,-?\d+)*$|^-\d*\.\d+$")

    def error(self, message):
        raise UsageError(f"{self.format_usage()}{self.prog}: error: {message}")


def ints(text: str, count: int = None):
    try:
        vals = tuple(int(v) for v in text.split(","))
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if count is not None and len(vals) != count:
        raise argparse.ArgumentTypeError(f"expected {count} integers, got {text!r}")
    return vals


def pair(text):
    return ints(text, 2)


def triple(text):
    return ints(text, 3)


def r_range(text):
    m = re.fullmatch(r"(\d+)(?::(\d+))?", text)
    if not m:
        raise argparse.ArgumentTypeError(f"expected R or RMIN:RMAX, got {text!r}")
    lo = int(m.group(1))
    return lo, int(m.group(2) or lo)


def _normalize_argv(argv):
    out = []
    for tok in argv:
        if out and _NEG_LIST.match(tok) and out[-1].startswith("--") and "=" not in out[-1]:
            out[-1] = f"{out[-1]}={tok}"
        else:
            out.append(tok)
    return out


class Result:
    def __init__(self, data: dict, lines=(), status: int = EXIT_OK):
        self.data = data
        self.lines = list(lines)
        self.status = status


def _form(vals) -> forms.Form:
    return forms.Form(*vals)


def _mat(M: forms.Matrix):
    return [[M.alpha, M.beta], [M.gamma, M.delta]]


# --- form ------------------------------------------------------------------

def cmd_form_compose(args):
    f1, f2 = _form(args.f1), _form(args.f2)
    f3 = forms.compose(f1, f2)
    g = forms.reduced(f3)
    return Result({"compose": list(f3), "reduced": list(g), "discriminant": f3.discriminant},
                  [f"{f1} * {f2} = {f3}", f"reduced: {g}"])


def cmd_form_reduce(args):
    f = _form(args.f)
    g, M = forms.reduce(f)
    cyc = forms.cycle(f)
    return Result({"form": list(f), "reduced": list(g), "matrix": _mat(M),
                   "cycle": [list(h) for h in cyc]},
                  [f"reduced: {g}", f"matrix: {_mat(M)}", f"cycle length: {len(cyc)}"])


def cmd_form_equiv(args):
    f1, f2 = _form(args.f1), _form(args.f2)
    M = forms.equivalence_matrix(f1, f2)
    eq = M is not None
    return Result({"equivalent": eq, "matrix": _mat(M) if eq else None},
                  ["equivalent" if eq else "inequivalent"] + ([f"matrix: {_mat(M)}"] if eq else []))


def cmd_form_roots(args):
    roots = forms.leading_coefficient_roots(args.n, args.D)
    pairs = forms.root_pairs(args.n, args.D)
    return Result({"n": args.n, "D": args.D, "roots": roots, "pairs": [list(p) for p in pairs]},
                  [f"roots: {roots}", f"{len(roots)} roots, {len(pairs)} inverse pairs"])


# --- pell ------------------------------------------------------------------

def _rep(surface, xy, n=None):
    rep = surface.rep(*xy)
    if n is not None and rep.n != n:
        raise ValueError(f"{xy} gives x^2 - {surface.d} y^2 = {rep.n}, not {n}")
    return rep


def cmd_pell_solve(args):
    surface = pell.PellSurface(args.k)
    classes = pell.solve_classes(surface, args.n, args.y_bound)
    data = [{"members": [list(r) for r in c], "primitive": c[0].primitive,
             "label": pell.belongs_to(surface, c[0]) if c[0].primitive else None} for c in classes]
    lines = [f"{len(classes)} classes of x^2 - {surface.d} y^2 = {args.n}"]
    for c in data:
        lab = f"belongs to {c['label']}" if c["primitive"] else "imprimitive"
        lines.append(f"  {', '.join(str(tuple(m)) for m in c['members'])}  [{lab}]")
    return Result({"k": args.k, "d": surface.d, "n": args.n, "classes": data}, lines)


def cmd_pell_belongs(args):
    surface = pell.PellSurface(args.k)
    rep = _rep(surface, args.rep, args.n)
    b = pell.belongs_to(surface, rep)
    return Result({"rep": list(rep), "n": rep.n, "label": b}, [f"{rep} belongs to {b} mod {abs(rep.n)}"])


def cmd_pell_equiv(args):
    surface = pell.PellSurface(args.k)
    r1, r2 = _rep(surface, args.a, args.n), _rep(surface, args.b, args.n)
    eq = pell.equivalent_solutions(surface, r1, r2)
    return Result({"equivalent": eq}, ["equivalent" if eq else "inequivalent"])


def cmd_pell_orbit(args):
    surface = pell.PellSurface(args.k)
    orbit = pell.unit_orbit(surface, _rep(surface, args.rep), args.steps)
    return Result({"unit": list(pell.fundamental_unit(surface)), "orbit": [list(r) for r in orbit]},
                  [str(r) for r in orbit])


# --- tuple -----------------------------------------------------------------

_TUPLE_NAMES = {2: "pair", 3: "triple", 4: "quadruple"}


def cmd_tuple_check(args):
    ok = tuples.is_dminus1_tuple(args.elements)
    name = _TUPLE_NAMES.get(len(args.elements), f"{len(args.elements)}-tuple")
    return Result({"elements": args.elements, "dminus1": ok},
                  [f"D(-1) {name}: {'yes' if ok else 'no'}"])


def _triple_row(tw):
    return {"s": tw.s, "t": tw.t, "c": tw.c, "lemma41": tuples.lemma41_prunes(tw),
            "thm11": tuples.theorem11_exclusions(tw), "gcd_chain": list(tuples.gcd_chain(tw))}


def cmd_tuple_triples(args):
    found = (tuples.triples_naive if args.naive else tuples.triples_for)(args.r, args.s_max)
    rows = [_triple_row(tw) for tw in found]
    lines = [f"{len(rows)} triples {{1, {1 + args.r ** 2}, 1 + s^2}} with s <= {args.s_max}"]
    for row in rows:
        flag = "pruned (standard class)" if row["lemma41"] else "survives"
        lines.append(f"  s={row['s']} t={row['t']}  {flag}  {' '.join(row['thm11'])}".rstrip())
    return Result({"r": args.r, "s_max": args.s_max, "triples": rows}, lines)


def cmd_tuple_scan_quad(args):
    tw = tuples.TripleWitness.from_rs(args.r, args.s)
    cands = tuples.quadruple_scan(tw, args.x_max)
    data = [{"x": q.x, "y": q.y, "z": q.z, "exclusions": tuples.theorem11_exclusions(tw, q.x)}
            for q in cands]
    lines = [f"{len(cands)} quadruple candidates with x <= {args.x_max}"]
    lines += [f"  x={c['x']} y={c['y']} z={c['z']}" for c in data]
    return Result({"r": args.r, "s": args.s, "x_max": args.x_max, "candidates": data}, lines,
                  EXIT_ANOMALY if cands else EXIT_OK)


def cmd_tuple_witness(args):
    surface = pell.PellSurface(args.k)
    n = args.k ** 2
    w = tuples.extract_witness(surface, _rep(surface, args.a, n), _rep(surface, args.b, n))
    return Result({"k": args.k, "p": w.p, "q": w.q, "rep_p4": list(w.rep_p4), "rep_q4": list(w.rep_q4),
                   "I": list(w.I), "J": list(w.J)},
                  [f"k = {w.p} * {w.q}", f"I = {w.I}, J = {w.J}",
                   f"{w.rep_p4} represents {w.p}^4 = {w.rep_p4.n}",
                   f"{w.rep_q4} represents {w.q}^4 = {w.rep_q4.n}"])


def cmd_tuple_thm11(args):
    tw = tuples.TripleWitness.from_rs(args.r, args.s)
    tags = tuples.theorem11_exclusions(tw, args.x)
    return Result({"r": args.r, "s": args.s, "x": args.x, "tags": tags},
                  [", ".join(tags) if tags else "no exclusions"])


def _verdict_result(v):
    lines = [f"{v.theorem}, r={v.r}: {v.status}",
             f"  triples={v.triples} coprime={v.coprime_triples} survivors={v.survivors}"]
    if v.theorem == "thm12":
        lines.append(f"  small-factor exclusion fires: {v.exclusion_fires}")
    lines += [f"  witness: {w}" for w in v.witnesses]
    lines += [f"  ANOMALY: {a}" for a in v.anomalies]
    return Result(v.to_dict(), lines, EXIT_ANOMALY if v.anomalies else EXIT_OK)


def cmd_tuple_thm12(args):
    return _verdict_result(tuples.theorem12_check(args.r, args.s_max))


def cmd_tuple_thm15(args):
    return _verdict_result(tuples.theorem15_check(args.r, args.P, args.phi, args.s_max))


# --- scan ------------------------------------------------------------------

def _finish_scan(report, args, fmt):
    lines = [f"r={report.config['r_min']}..{report.config['r_max']}: "
             f"{report.totals['triples']} triples, pruned {report.totals['pruned_by']}, "
             f"{report.totals['survivors']} extended, {report.totals['quadruples']} quadruples"]
    data = report.to_dict(not args.no_timing)
    if args.out:
        out = scan.emit(report, fmt, args.out, timing=not args.no_timing)
        lines.append(f"report: {out}")
        data = {"report": str(out), "totals": report.totals}
        if not args.no_plot:
            from .plotting import plot_report
            fig = plot_report(report, Path(out).with_suffix(".png"))
            lines.append(f"figure: {fig}")
            data["figure"] = str(fig)
    lines += [f"ANOMALY: {a}" for a in report.anomalies]
    return Result(data, lines, EXIT_OK if report.ok else EXIT_ANOMALY)


def cmd_scan_run(args):
    lo, hi = args.r
    fmt = args.format or ("csv" if args.out and args.out.endswith(".csv") else "json")
    config = scan.ScanConfig(lo, hi, args.s_max, args.x_max, workers=args.workers,
                             checkpoint_path=args.checkpoint, output_format=fmt,
                             checkpoint_every=args.checkpoint_every)
    return _finish_scan(scan.run_scan(config), args, fmt)


def cmd_scan_resume(args):
    data = scan.load_checkpoint(args.checkpoint)
    fmt = args.format or data["config"].get("output_format", "json")
    return _finish_scan(scan.resume(args.checkpoint, workers=args.workers), args, fmt)


# --- verify ----------------------------------------------------------------

def _verify(name, **kw):
    res = verify.PROPERTIES[name](**kw)
    res.pop("rows", None)
    nfail = len(res["failures"])
    lines = [f"{name}: {res['checked']} cases, {nfail} failures"]
    lines += [f"  FAIL {f}" for f in res["failures"][:20]]
    return Result(res, lines, EXIT_ANOMALY if nfail else EXIT_OK)


def cmd_verify_lemma32(args):
    return _verify("lemma32", k_max=args.k_max)


def cmd_verify_lemma33(args):
    return _verify("lemma33", k_max=args.k_max)


def cmd_verify_lemma21c(args):
    return _verify("lemma21c", k_max=args.k_max, n_max=args.n_max)


def cmd_verify_group_laws(args):
    return _verify("group-laws", ks=range(3, args.k_max + 1, 2), forms=args.forms, seed=args.seed)


def cmd_verify_class_parity(args):
    return _verify("class-parity", k_max=args.k_max)


def build_parser():
    common = _Parser(add_help=False)
    common.add_argument("--json", action="store_true", default=argparse.SUPPRESS,
                        help="machine-readable output on stdout")
    common.add_argument("--quiet", action="store_true", default=argparse.SUPPRESS,
                        help="suppress human-readable output")
    common.add_argument("--seed", type=int, default=argparse.SUPPRESS,
                        help="seed for randomized property runs")

    p = _Parser(prog="dlab", description="Binary quadratic forms, Pell classes and D(-1) tuples.",
                parents=[common])
    groups = p.add_subparsers(dest="group", metavar="{form,pell,tuple,scan,verify}")
    groups.required = True

    def sub(group, name, func, help=None):
        sp = group.add_parser(name, parents=[common], help=help)
        sp.set_defaults(func=func)
        return sp

    form = groups.add_parser("form", help="binary quadratic forms").add_subparsers(dest="cmd")
    form.required = True
    sp = sub(form, "compose", cmd_form_compose, "compose two forms a,b,c")
    sp.add_argument("f1", type=triple)
    sp.add_argument("f2", type=triple)
    sp = sub(form, "reduce", cmd_form_reduce, "reduce a form and list its cycle")
    sp.add_argument("f", type=triple)
    sp = sub(form, "equiv", cmd_form_equiv, "decide proper equivalence")
    sp.add_argument("f1", type=triple)
    sp.add_argument("f2", type=triple)
    sp = sub(form, "roots", cmd_form_roots, "roots b in [1, 2n] of b^2 = D mod 4n")
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--D", type=int, required=True)

    pg = groups.add_parser("pell", help="x^2 - (k^2+1) y^2 = n").add_subparsers(dest="cmd")
    pg.required = True
    sp = sub(pg, "solve", cmd_pell_solve, "solution classes")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--n", type=int, required=True)
    sp.add_argument("--y-bound", type=int, default=None)
    sp = sub(pg, "belongs", cmd_pell_belongs, "label b mod n of a primitive solution")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--n", type=int, default=None)
    sp.add_argument("--rep", type=pair, required=True)
    sp = sub(pg, "equiv", cmd_pell_equiv, "equivalence of two solutions")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--n", type=int, default=None)
    sp.add_argument("--a", type=pair, required=True)
    sp.add_argument("--b", type=pair, required=True)
    sp = sub(pg, "orbit", cmd_pell_orbit, "apply the fundamental unit repeatedly")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--rep", type=pair, required=True)
    sp.add_argument("--steps", type=int, default=1)

    tg = groups.add_parser("tuple", help="D(-1) tuples").add_subparsers(dest="cmd")
    tg.required = True
    sp = sub(tg, "check", cmd_tuple_check, "is the set a D(-1) tuple")
    sp.add_argument("elements", type=int, nargs="+")
    sp = sub(tg, "triples", cmd_tuple_triples, "triples {1, r^2+1, s^2+1}")
    sp.add_argument("--r", type=int, required=True)
    sp.add_argument("--s-max", type=int, required=True)
    sp.add_argument("--naive", action="store_true", help="plain s-scan instead of unit orbits")
    sp = sub(tg, "scan-quad", cmd_tuple_scan_quad, "search d = 1 + x^2 extending a triple")
    sp.add_argument("--r", type=int, required=True)
    sp.add_argument("--s", type=int, required=True)
    sp.add_argument("--x-max", type=int, required=True)
    sp = sub(tg, "witness", cmd_tuple_witness, "coprime split k = pq from two inequivalent classes")
    sp.add_argument("--k", type=int, required=True)
    sp.add_argument("--a", type=pair, required=True)
    sp.add_argument("--b", type=pair, required=True)
    sp = sub(tg, "thm11", cmd_tuple_thm11, "excluded shapes of c, s and d")
    sp.add_argument("--r", type=int, required=True)
    sp.add_argument("--s", type=int, required=True)
    sp.add_argument("--x", type=int, default=None)
    sp = sub(tg, "thm12", cmd_tuple_thm12, "r = pq check")
    sp.add_argument("--r", type=int, required=True)
    sp.add_argument("--s-max", type=int, default=10 ** 4)
    sp = sub(tg, "thm15", cmd_tuple_thm15, "r = P phi coprime-triple check")
    sp.add_argument("--r", type=int, required=True)
    sp.add_argument("--P", type=int, required=True)
    sp.add_argument("--phi", type=int, required=True)
    sp.add_argument("--s-max", type=int, default=10 ** 4)

    sg = groups.add_parser("scan", help="resumable exhaustive scans").add_subparsers(dest="cmd")
    sg.required = True
    for name, func in (("run", cmd_scan_run), ("resume", cmd_scan_resume)):
        sp = sub(sg, name, func)
        if name == "run":
            sp.add_argument("--r", type=r_range, required=True, help="R or RMIN:RMAX")
            sp.add_argument("--s-max", type=int, required=True)
            sp.add_argument("--x-max", type=int, required=True)
            sp.add_argument("--checkpoint", default=None)
            sp.add_argument("--checkpoint-every", type=float, default=10.0)
            sp.add_argument("--workers", type=int, default=1)
        else:
            sp.add_argument("--checkpoint", required=True)
            sp.add_argument("--workers", type=int, default=None)
        sp.add_argument("--out", default=None, help="report file (.json or .csv)")
        sp.add_argument("--format", choices=("json", "csv"), default=None)
        sp.add_argument("--no-plot", action="store_true", help="skip the figure next to --out")
        sp.add_argument("--no-timing", action="store_true", help="omit wall_seconds from the report")

    vg = groups.add_parser("verify", help="exhaustive property runs").add_subparsers(dest="cmd")
    vg.required = True
    sp = sub(vg, "lemma32", cmd_verify_lemma32)
    sp.add_argument("--k-max", type=int, default=200)
    sp = sub(vg, "lemma33", cmd_verify_lemma33)
    sp.add_argument("--k-max", type=int, default=301)
    sp = sub(vg, "lemma21c", cmd_verify_lemma21c)
    sp.add_argument("--k-max", type=int, default=15)
    sp.add_argument("--n-max", type=int, default=500)
    sp = sub(vg, "group-laws", cmd_verify_group_laws)
    sp.add_argument("--k-max", type=int, default=21)
    sp.add_argument("--forms", type=int, default=500)
    sp = sub(vg, "class-parity", cmd_verify_class_parity)
    sp.add_argument("--k-max", type=int, default=25)
    return p


def main(argv=None) -> int:
    argv = _normalize_argv(sys.argv[1:] if argv is None else list(argv))
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except SystemExit as exc:  # --help
        return exc.code or 0
    as_json = getattr(args, "json", False)
    quiet = getattr(args, "quiet", False)
    args.seed = getattr(args, "seed", 0)
    logging.basicConfig(level=logging.WARNING if quiet else logging.INFO,
                        format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr)
    logging.getLogger("matplotlib").setLevel(logging.WARNING)
    try:
        res = args.func(args)
    except (scan.CheckpointError, OSError) as exc:
        print(f"dlab: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"dlab: {exc}", file=sys.stderr)
        return EXIT_USAGE
    if as_json:
        if args.group == "verify":
            res.data.setdefault("seed", args.seed)
        print(json.dumps(res.data, sort_keys=True))
    elif not quiet:
        if args.group == "verify" and args.cmd == "group-laws":
            res.lines.insert(0, f"seed: {args.seed}")
        print("\n".join(res.lines))
    return res.status


if __name__ == "__main__":
    sys.exit(main())
