"""Command-line entry point: ``ainfty COMMAND FILE [flags]``.

Exit codes: 0 success, 1 failed check or invariant, 2 parse error,
3 I/O error, 64 unknown command.
"""

from __future__ import annotations

import argparse
import itertools
import sys

from . import io
from .algebra import (AInfAlgebra, ArityError, compose, homotopy_defect, identity_morphism,
                      invert, morphism_defect, stasheff_defect)
from .families import (FamilyForm, FilteredLie, Grid1D, GridError, defect_report, mc_defect)
from .forms import mask_name
from .graded import GradingError, format_scalar, scalar
from .groups import (GroupError, Representation, free_group_cohomology, group_cohomology_dim,
                     strictify_free)
from .hochschild import hh_dimension
from .square import (SquareError, SquareFamily, classical_candidate, collapse,
                     diff_homotopy_defect, hat_mc_defect, hat_morphism_defect, square_homotopy)
from .transport import TransportError, TransportRequest, max_deviation, transport, transport_oracle

EXIT_OK, EXIT_FAIL, EXIT_PARSE, EXIT_IO, EXIT_USAGE = 0, 1, 2, 3, 64
ORACLE_TOL = 1e-8
SAMPLE_TS = ("0", "1/4", "1/3", "1/2", "1")


class Report:
    def __init__(self, out):
        self.out = out
        self.ok = True

    def line(self, text=""):
        self.out.write(text + "\n")

    def fail(self):
        self.ok = False

    def defect(self, label, m):
        """``ZERO`` or ``NONZERO`` with the first nonzero entry as witness."""
        if m.is_zero():
            self.line(f"  {label}: ZERO")
            return True
        ins, out, c = m.witness()
        self.line(f"  {label}: NONZERO witness ({', '.join(ins)}) -> {out}: {format_scalar(c)}")
        self.fail()
        return False

    def field_defect(self, label, field):
        rep = defect_report(field)
        if not rep:
            self.line(f"  {label}: ZERO")
            return True
        self.fail()
        for (m, n), wit in sorted(rep.items()):
            self.line(f"  {label} (form {m}, arity {n}): NONZERO witness {_field_witness(wit)}")
        return False

    def check(self, label, ok, good="EQUAL", bad="DIFFERENT"):
        self.line(f"  {label}: {good if ok else bad}")
        if not ok:
            self.fail()


def _field_witness(w):
    if w is None:
        return "-"
    cell, mask, (i, j), (ins, out, c) = w
    return (f"cell {cell}, form {mask_name(mask)}, s^{i} t^{j}, "
            f"({', '.join(ins)}) -> {out}: {format_scalar(c)}")


def _algebras(doc, name):
    if name:
        return [(name, io._ref(doc.algebras, name, "--name", "algebra"))]
    return sorted(doc.algebras.items())


def _pick(doc, section, name):
    table = getattr(doc, section)
    if name:
        return [(name, io._ref(table, name, "--name", section.rstrip("s")))]
    return sorted(table.items())


def _cap(obj_cap, flag):
    return obj_cap if flag is None else min(obj_cap, flag)


# -- commands ------------------------------------------------------------------

def cmd_validate(args, doc, rep):
    failures = io.validate(doc)
    counts = {s: len(getattr(doc, s)) for s in io.SECTIONS}
    rep.line("validate " + " ".join(f"{k}={v}" for k, v in counts.items()))
    for where, inv, wit in failures:
        rep.line(f"  {where}: FAILED {inv}; witness {wit}")
        rep.fail()
    if not failures:
        rep.line("  all invariants hold")


def cmd_check_ainf(args, doc, rep):
    for name, A in _algebras(doc, args.name):
        rep.line(f"algebra {name}")
        for n in range(_cap(A.arity_cap, args.arity_cap) + 1):
            rep.defect(f"level {n}", stasheff_defect(A, n))


def cmd_check_morphism(args, doc, rep):
    for name, F in _pick(doc, "morphisms", args.name):
        rep.line(f"morphism {name}")
        for n in range(1, _cap(F.arity_cap, args.arity_cap) + 1):
            rep.defect(f"level {n}", morphism_defect(F, n))


def cmd_check_homotopy(args, doc, rep):
    for name, H in _pick(doc, "homotopies", args.name):
        rep.line(f"homotopy {name}")
        for n in range(1, _cap(H.F.arity_cap, args.arity_cap) + 1):
            rep.defect(f"level {n}", homotopy_defect(H, n))


def cmd_mc_check(args, doc, rep):
    for name, f in _pick(doc, "families", args.name):
        rep.line(f"family {name}")
        rep.field_defect("Maurer-Cartan", mc_defect(f))
        bad = f.continuity_defects()
        rep.check("continuity", not bad, "OK", f"JUMPS at {bad}")


def _interval_family(doc, name):
    fam = doc.single("families", name)
    if not isinstance(fam.grid, Grid1D):
        raise io.DocumentError("families", "interval family", "transport needs a 1D grid")
    return fam


def _morphism_doc(doc, F, src="source", tgt="target", name="transport"):
    out = io.Document(doc.space, F.arity_cap)
    out.algebras[src] = F.source
    out.algebras[tgt] = F.target
    out.morphisms[name] = F
    return out


def _summarize(rep, F):
    for n in range(1, F.arity_cap + 1):
        c = F.component(n)
        rep.line(f"  F^{n}: {int((c.table != 0).sum())} nonzero entries")


def cmd_transport(args, doc, rep):
    fam = _interval_family(doc, args.name)
    p = scalar(args.frm if args.frm is not None else "0")
    q = scalar(args.to if args.to is not None else "1")
    cap = _cap(fam.arity_cap, args.arity_cap)
    req = TransportRequest(fam, p, q, cap, args.unary_depth or 0)
    F = transport(req)
    rep.line(f"transport {format_scalar(p)} -> {format_scalar(q)} (arity cap {cap})")
    _summarize(rep, F)
    for n in range(1, cap + 1):
        rep.defect(f"morphism level {n}", morphism_defect(F, n))
    if args.oracle:
        dev = max_deviation(F, transport_oracle(req, 1e-3))
        rep.check(f"float oracle within {ORACLE_TOL:g}", dev <= ORACLE_TOL, "AGREES", "DISAGREES")
    return _morphism_doc(doc, F)


def _load_morphism(path, name=None):
    doc = io.load(path)
    return doc.single("morphisms", name)


def cmd_compose(args, doc, rep):
    """``compose FIRST SECOND``: apply the first file's morphism first."""
    F1 = doc.single("morphisms", args.name)
    if not args.extra:
        raise io.DocumentError("compose", "two morphism files", "missing second file")
    F2 = _load_morphism(args.extra[0])
    if not F1.target == F2.source:
        raise io.DocumentError("compose", "target of the first is the source of the second")
    C = compose(F2, F1)
    rep.line("composite")
    _summarize(rep, C)
    if C.source == C.target:
        rep.check("identity", C.equal_maps(identity_morphism(C.source)), "IDENTITY", "NOT IDENTITY")
    out = _morphism_doc(doc, C, name="composite")
    return out


def cmd_invert(args, doc, rep):
    F = doc.single("morphisms", args.name)
    G = invert(F)
    rep.line("inverse")
    _summarize(rep, G)
    rep.check("left inverse", compose(G, F).equal_maps(identity_morphism(F.source)))
    rep.check("right inverse", compose(F, G).equal_maps(identity_morphism(F.target)))
    return _morphism_doc(doc, G, name="inverse")


def _square(doc, name):
    f = doc.single("families", name)
    return SquareFamily(f)


def cmd_collapse(args, doc, rep):
    hat = collapse(_square(doc, args.name))
    rep.line("collapse")
    rep.line("  components (m, n): " + " ".join(f"({m},{n})" for m, n in hat.components()))
    rep.check("no components with m >= 2", all(m < 2 for m, _ in hat.components()), "OK", "FAILED")
    zero = all(c.is_zero() for c in hat_mc_defect(hat).values())
    rep.check("Maurer-Cartan", zero, "ZERO", "NONZERO")


def cmd_square_homotopy(args, doc, rep):
    sq = _square(doc, args.name)
    cap = _cap(sq.arity_cap, args.arity_cap)
    hat, GG, D = square_homotopy(sq, cap)
    rep.line(f"square homotopy (arity cap {cap})")
    rep.check("collapsed Maurer-Cartan", all(c.is_zero() for c in hat_mc_defect(hat).values()),
              "ZERO", "NONZERO")
    for n in range(1, cap + 1):
        rep.check(f"GG morphism level {n}", hat_morphism_defect(GG, n).is_zero(), "ZERO", "NONZERO")
    for t in SAMPLE_TS:
        for n in range(1, cap + 1):
            rep.defect(f"t={t} level {n}", diff_homotopy_defect(D, scalar(t), n))
    H, report = classical_candidate(D)
    for n, ok in sorted(report.items()):
        if n == 1:
            rep.check("classical candidate level 1", ok, "ZERO", "NONZERO")
        else:
            # integrating Theta only guarantees the relation in arity 1
            rep.line(f"  classical candidate level {n}: {'ZERO' if ok else 'NONZERO'} (informational)")
    out = io.Document(doc.space, cap)
    out.algebras["edge0"] = H.G.source
    out.algebras["edge1"] = H.F.target
    out.morphisms["F0"] = H.G
    out.morphisms["F1"] = H.F
    if all(report.values()):
        out.homotopies["candidate"] = H
    else:
        # a document must validate, so a partial homotopy is not written
        rep.line("  classical candidate not written: not a homotopy at every level")
    return out


def _basis_forms(degree_cap):
    from .interval import form
    out = []
    for j in range(degree_cap + 1):
        poly = [0] * j + [1]
        out.append(form(poly, 0))
        out.append(form(poly, 1))
    return out


def cmd_phi_check(args, doc, rep):
    from .interval import QuiverI, phi
    cap = args.arity_cap or 4
    Q = QuiverI()
    for k, ok in sorted(Q.axioms().items()):
        rep.check(f"quiver {k}", ok, "OK", "FAILED")
    from .interval import form, phi_defect
    val = phi([form([1], 1), form([1], 1)])
    rep.check("Phi^2(dt, dt) = h/2", val.coeffs[Q.space.index["h"]] == scalar("1/2")
              and val.coeffs[Q.space.index["u0"]] == 0 and val.coeffs[Q.space.index["u1"]] == 0)
    basis = _basis_forms(3)
    for k in range(1, cap + 1):
        bad = None
        for args_ in itertools.product(basis, repeat=k):
            if not phi_defect(list(args_)).is_zero():
                bad = args_
                break
        rep.check(f"Phi relation k={k} ({len(basis) ** k} argument lists)", bad is None,
                  "ZERO", f"NONZERO at {bad}")


def cmd_hochschild(args, doc, rep):
    for name, A in _algebras(doc, args.name):
        cap = _cap(A.arity_cap, args.arity_cap)
        rep.line(f"algebra {name}")
        for q in range(cap):
            rep.line(f"  HH^{q} = {hh_dimension(A, q, cap)}")


def cmd_group_cohomology(args, doc, rep):
    top = args.level if args.level is not None else 2
    for name, act in _pick(doc, "actions", args.name):
        rep.line(f"action {name}")
        if act.model is not None or isinstance(act.group, io.FreeGroup):
            gens = sorted(act.matrices)
            for p in range(top + 1):
                rep.line(f"  H^{p} = {free_group_cohomology([act.matrices[g] for g in gens], p)}")
            continue
        module = Representation(act.group, act.matrices)
        for p in range(top + 1):
            rep.line(f"  H^{p} = {group_cohomology_dim(act.group, module, p, max(top, 1))}")


def cmd_gauge(args, doc, rep):
    names = dict(kv.split("=", 1) for kv in (args.extra or []) if "=" in kv)
    gamma = io._ref(doc.gauges, names.get("gamma", "gamma"), "gamma", "gauge")
    alpha = io._ref(doc.gauges, names.get("alpha", "alpha"), "alpha", "gauge")
    A = doc.single("algebras", args.name)
    K = args.level if args.level is not None else A.arity_cap
    lie = FilteredLie(A, gamma.grid)
    rep.line(f"gauge (level {K})")
    rep.field_defect("input Maurer-Cartan", lie.mc_defect(alpha, K))
    result = lie.gauge_exp(gamma, alpha, K, check_mc=False)
    rep.field_defect("output Maurer-Cartan", lie.mc_defect(result, K))
    path = lie.mc_path_check(gamma, alpha, K)
    rep.check("path Maurer-Cartan", path["defect_zero"], "ZERO", "NONZERO")
    rep.check("path starts at alpha", path["slice0"], "OK", "FAILED")
    rep.check("path derivative", path["derivative"], "OK", "FAILED")
    out = io.Document(doc.space, doc.arity_cap)
    out.gauges["result"] = result
    return out


def cmd_strictify(args, doc, rep):
    found = False
    for name, act in _pick(doc, "actions", args.name):
        if act.model is not None:
            res = strictify_free(act.model, args.level or 1)
        elif act.scenario is not None:
            res = act.scenario.strictify()
            rep.line(f"action {name}")
            for k, v in sorted(act.scenario.path_report().items()):
                if isinstance(v, bool):
                    rep.check(f"path check {k}", v, "OK", "FAILED")
        else:
            continue
        if act.model is not None:
            rep.line(f"action {name}")
        found = True
        rep.check("F_e = id", res["identity"])
        for key, ok in sorted(res["table"].items()):
            g, h = key[:2]
            gh = key[2] if len(key) == 3 else act.group.mul(g, h)
            rep.check(f"F_{g} o F_{h} = F_{gh}", ok)
    if not found:
        raise io.DocumentError("actions", "strictification data",
                               "no action with loops or a scenario")


COMMANDS = {
    "validate": cmd_validate,
    "check-ainf": cmd_check_ainf,
    "check-morphism": cmd_check_morphism,
    "check-homotopy": cmd_check_homotopy,
    "mc-check": cmd_mc_check,
    "transport": cmd_transport,
    "compose": cmd_compose,
    "invert": cmd_invert,
    "collapse": cmd_collapse,
    "square-homotopy": cmd_square_homotopy,
    "phi-check": cmd_phi_check,
    "hochschild": cmd_hochschild,
    "group-cohomology": cmd_group_cohomology,
    "gauge": cmd_gauge,
    "strictify": cmd_strictify,
}
NO_FILE = {"phi-check"}


def build_parser():
    p = argparse.ArgumentParser(prog="ainfty", description="Exact A-infinity computations.")
    p.add_argument("command", help=", ".join(COMMANDS))
    p.add_argument("file", nargs="?", help="input document (JSON); '-' reads stdin")
    p.add_argument("extra", nargs="*", help="further files or name=value pairs")
    p.add_argument("--name", help="object to use when a section has several")
    p.add_argument("--arity-cap", type=int, dest="arity_cap")
    p.add_argument("--unary-depth", type=int, dest="unary_depth")
    p.add_argument("--from", dest="frm")
    p.add_argument("--to", dest="to")
    p.add_argument("--level", type=int)
    p.add_argument("--oracle", action="store_true", help="cross-check against a float ODE solver")
    p.add_argument("--out", help="write the computed objects to this file")
    return p


def main(argv=None, stdout=None, stderr=None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    out = stdout or sys.stdout
    err = stderr or sys.stderr
    if argv and not argv[0].startswith("-") and argv[0] not in COMMANDS:
        err.write(f"ainfty: unknown command {argv[0]!r}\n")
        return EXIT_USAGE
    try:
        args = build_parser().parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code == 0 else EXIT_PARSE
    if args.command not in COMMANDS:
        err.write(f"ainfty: unknown command {args.command!r}\n")
        return EXIT_USAGE
    rep = Report(out)
    try:
        if args.file is None:
            if args.command not in NO_FILE:
                err.write(f"ainfty: {args.command} needs an input file\n")
                return EXIT_PARSE
            doc = None
        elif args.file == "-":
            doc = io.loads(sys.stdin.read())
        else:
            doc = io.load(args.file)
        result = COMMANDS[args.command](args, doc, rep)
        if args.out:
            if result is None:
                err.write(f"ainfty: {args.command} has no output document\n")
                return EXIT_PARSE
            io.save(result, args.out)
            rep.line(f"wrote {args.out}")
    except io.ParseError as exc:
        err.write(f"ainfty: parse error: {exc}\n")
        return EXIT_PARSE
    except OSError as exc:
        err.write(f"ainfty: I/O error: {exc}\n")
        return EXIT_IO
    except io.DocumentError as exc:
        err.write(f"ainfty: invariant failed: {exc}\n")
        return EXIT_FAIL
    except (GradingError, GridError, ArityError, TransportError, SquareError, GroupError) as exc:
        err.write(f"ainfty: invariant failed: {type(exc).__name__}: {exc}\n")
        return EXIT_FAIL
    rep.line("result: " + ("PASS" if rep.ok else "FAIL"))
    return EXIT_OK if rep.ok else EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
