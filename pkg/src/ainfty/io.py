"""JSON documents: exact rationals as ``"num/den"`` strings, named objects, validation.

Map tables are written sparsely as ``{"x|y": {"z": "1/2"}}``: the key joins
the input labels with ``|`` and the value sends output labels to
coefficients.  Form-valued maps are lists of terms
``{"form": "ds", "s": i, "t": j, "entries": {...}}``.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field

import numpy as np
from gmpy2 import mpq

from .algebra import (AInfAlgebra, AInfHomotopy, AInfMorphism, ArityError, homotopy_defect,
                      morphism_defect, stasheff_defect)
from .families import FamilyForm, FormField, Grid1D, Grid2D, GridError, mc_defect
from .forms import FormCochain, FormMap, form_degree, mask_name, parse_mask
from .graded import GradedSpace, GradingError, MultiMap, format_scalar, zeros
from .groups import (FiniteGroup, FiniteGroupScenario, FreeGroupModel, GroupError, LinearAction,
                     mat_inverse)

_RATIONAL = re.compile(r"^\s*(-?\d+)(?:\s*/\s*(\d+))?\s*$")
SECTIONS = ("algebras", "morphisms", "homotopies", "families", "groups", "actions", "gauges")


class ParseError(ValueError):
    """Malformed input: bad syntax, wrong types or unparseable rationals."""


class DocumentError(ValueError):
    """Well-formed input that violates a named invariant."""

    def __init__(self, where: str, invariant: str, detail: str = ""):
        self.where = where
        self.invariant = invariant
        super().__init__(f"{where}: {invariant}" + (f" ({detail})" if detail else ""))


def parse_rational(value, where="value") -> mpq:
    if isinstance(value, bool) or isinstance(value, float):
        raise ParseError(f"{where}: expected an integer or a 'num/den' string, got {value!r}")
    if isinstance(value, int):
        return mpq(value)
    if not isinstance(value, str):
        raise ParseError(f"{where}: expected a rational, got {type(value).__name__}")
    m = _RATIONAL.match(value)
    if not m:
        raise ParseError(f"{where}: {value!r} is not a rational literal")
    num = int(m.group(1))
    den = int(m.group(2)) if m.group(2) is not None else 1
    if den == 0:
        raise ParseError(f"{where}: zero denominator in {value!r}")
    return mpq(num, den)


def _expect(obj, kind, where):
    if not isinstance(obj, kind):
        name = kind.__name__ if isinstance(kind, type) else "/".join(k.__name__ for k in kind)
        raise ParseError(f"{where}: expected {name}, got {type(obj).__name__}")
    return obj


def _int(obj, where) -> int:
    if isinstance(obj, bool) or not isinstance(obj, int):
        raise ParseError(f"{where}: expected an integer")
    return obj


def _ref(table: dict, name, where, what):
    if not isinstance(name, str):
        raise ParseError(f"{where}: expected the name of a {what}")
    if name not in table:
        raise DocumentError(where, "unresolved reference", f"no {what} named {name!r}")
    return table[name]


# -- tables -------------------------------------------------------------------

def _parse_table(obj, space, arity, where, target=None) -> np.ndarray:
    target = space if target is None else target
    _expect(obj, dict, where)
    table = zeros((target.dim,) + (space.dim,) * arity)
    for key, out in obj.items():
        labels = tuple(key.split("|")) if key else ()
        if len(labels) != arity:
            raise ParseError(f"{where}: key {key!r} does not have {arity} inputs")
        try:
            idx = tuple(space.index[l] for l in labels)
        except KeyError as exc:
            raise DocumentError(where, "unresolved reference", f"unknown basis label {exc}") from None
        _expect(out, dict, f"{where}[{key!r}]")
        for label, c in out.items():
            if label not in target.index:
                raise DocumentError(where, "unresolved reference", f"unknown basis label {label!r}")
            table[(target.index[label],) + idx] += parse_rational(c, f"{where}[{key!r}][{label!r}]")
    return table


def _dump_table(table: np.ndarray, space, target=None) -> dict:
    target = space if target is None else target
    out = {}
    for idx in np.argwhere(table != 0):
        idx = tuple(int(i) for i in idx)
        key = "|".join(space.labels[i] for i in idx[1:])
        out.setdefault(key, {})[target.labels[idx[0]]] = format_scalar(table[idx])
    return out


def _parse_maps(obj, space, shift_of, where, target=None) -> dict:
    _expect(obj, dict, where)
    maps = {}
    for key, entries in obj.items():
        try:
            n = int(key)
        except ValueError:
            raise ParseError(f"{where}: arity key {key!r} is not an integer") from None
        table = _parse_table(entries, space, n, f"{where}[{n}]", target)
        try:
            maps[n] = MultiMap(space, n, shift_of(n), table, target=target)
        except GradingError as exc:
            raise DocumentError(f"{where}[{n}]", f"degree of arity-{n} map must be shift "
                                f"{shift_of(n)}", str(exc)) from None
    return maps


def _dump_maps(maps: dict) -> dict:
    return {str(n): _dump_table(f.table, f.source, f.target)
            for n, f in sorted(maps.items()) if not f.is_zero()}


# -- fields -------------------------------------------------------------------

def _parse_grid(obj, where):
    _expect(obj, dict, where)
    def axis(name):
        pts = _expect(obj[name], list, f"{where}.{name}")
        return Grid1D([parse_rational(p, f"{where}.{name}") for p in pts])
    try:
        if "t" in obj:
            return Grid2D(axis("s"), axis("t"))
        return axis("s")
    except KeyError:
        raise ParseError(f"{where}: grid needs breakpoints 's'") from None
    except GridError as exc:
        raise DocumentError(where, "grid breakpoints increase from 0 to 1", str(exc)) from None


def _dump_grid(grid) -> dict:
    if isinstance(grid, Grid2D):
        return {"s": [format_scalar(p) for p in grid.s.breakpoints],
                "t": [format_scalar(p) for p in grid.t.breakpoints]}
    return {"s": [format_scalar(p) for p in grid.breakpoints]}


def _cell_key(idx) -> str:
    return ",".join(str(i) for i in idx) if isinstance(idx, tuple) else str(idx)


def _parse_cell_key(key, two_d, where):
    try:
        parts = tuple(int(x) for x in key.split(","))
    except ValueError:
        raise ParseError(f"{where}: bad cell key {key!r}") from None
    if len(parts) != (2 if two_d else 1):
        raise ParseError(f"{where}: cell key {key!r} has the wrong dimension")
    return parts if two_d else parts[0]


def _parse_cochain(obj, space, degree, cap, where) -> FormCochain:
    _expect(obj, dict, where)
    parts = {}
    for key, terms in obj.items():
        try:
            n = int(key)
        except ValueError:
            raise ParseError(f"{where}: arity key {key!r} is not an integer") from None
        if n > cap:
            raise DocumentError(where, "arity within the cap", f"arity {n} > {cap}")
        _expect(terms, list, f"{where}[{n}]")
        out = {}
        for k, term in enumerate(terms):
            w = f"{where}[{n}][{k}]"
            _expect(term, dict, w)
            try:
                mask = parse_mask(str(term.get("form", "1")))
            except GradingError as exc:
                raise ParseError(f"{w}: {exc}") from None
            i, j = _int(term.get("s", 0), w), _int(term.get("t", 0), w)
            if i < 0 or j < 0:
                raise ParseError(f"{w}: negative exponent")
            table = _parse_table(term.get("entries", {}), space, n, w)
            shift = degree - form_degree(mask) - n + 1
            try:
                MultiMap(space, n, shift, table)
            except GradingError as exc:
                raise DocumentError(w, f"total degree {degree}", str(exc)) from None
            key3 = (mask, i, j)
            out[key3] = out[key3] + table if key3 in out else table
        parts[n] = FormMap(space, n, degree, out)
    return FormCochain(space, degree, cap, parts)


def _dump_cochain(c: FormCochain) -> dict:
    out = {}
    for n, f in sorted(c.parts.items()):
        terms = []
        for (mask, i, j), table in sorted(f.terms.items()):
            terms.append({"form": mask_name(mask), "s": i, "t": j,
                          "entries": _dump_table(table, f.source, f.target)})
        out[str(n)] = terms
    return out


def parse_field(obj, space, cap, where, degree=None) -> FormField:
    _expect(obj, dict, where)
    grid = _parse_grid(obj.get("grid", {"s": [0, 1]}), f"{where}.grid")
    deg = _int(obj.get("degree", 1 if degree is None else degree), f"{where}.degree")
    if degree is not None and deg != degree:
        raise DocumentError(where, f"total degree {degree}", f"declared {deg}")
    cells_obj = _expect(obj.get("cells", {}), dict, f"{where}.cells")
    two_d = isinstance(grid, Grid2D)
    cells = {}
    for key, c in cells_obj.items():
        idx = _parse_cell_key(key, two_d, f"{where}.cells")
        cells[idx] = _parse_cochain(c, space, deg, cap, f"{where}.cells[{key}]")
    for idx in grid.cell_indices():
        cells.setdefault(idx, FormCochain(space, deg, cap))
    extra = set(cells) - set(grid.cell_indices())
    if extra:
        raise DocumentError(where, "cells lie on the grid", f"unknown cells {sorted(extra)}")
    try:
        return FormField(grid, space, deg, cap, cells)
    except (GradingError, GridError) as exc:
        raise DocumentError(where, "form field", str(exc)) from None


def dump_field(f: FormField) -> dict:
    return {"grid": _dump_grid(f.grid), "degree": f.degree,
            "cells": {_cell_key(k): _dump_cochain(c) for k, c in sorted(f.cells.items())}}


# -- documents ----------------------------------------------------------------

@dataclass
class FreeGroup:
    generators: tuple


@dataclass
class Document:
    space: GradedSpace
    arity_cap: int
    algebras: dict = field(default_factory=dict)
    morphisms: dict = field(default_factory=dict)
    homotopies: dict = field(default_factory=dict)
    families: dict = field(default_factory=dict)
    groups: dict = field(default_factory=dict)
    actions: dict = field(default_factory=dict)
    gauges: dict = field(default_factory=dict)

    def single(self, section: str, name: str | None = None):
        table = getattr(self, section)
        if name is not None:
            return _ref(table, name, section, section.rstrip("s"))
        if len(table) != 1:
            raise DocumentError(section, "name required",
                                f"{len(table)} entries; pick one with --name")
        return next(iter(table.values()))

    def name_of(self, section: str, obj) -> str:
        for k, v in getattr(self, section).items():
            if v is obj:
                return k
        raise KeyError(obj)


@dataclass
class Action:
    """An action record: a finite-group action, a free-group model or a scenario."""

    group: object
    algebra: AInfAlgebra
    matrices: dict
    linear: LinearAction | None = None
    model: FreeGroupModel | None = None
    scenario: FiniteGroupScenario | None = None
    raw: dict = field(default_factory=dict)


def _parse_space(obj) -> GradedSpace:
    _expect(obj, dict, "space")
    labels = _expect(obj.get("labels"), list, "space.labels")
    degrees = _expect(obj.get("degrees"), list, "space.degrees")
    if len(labels) != len(degrees):
        raise ParseError("space: labels and degrees differ in length")
    for l in labels:
        if not isinstance(l, str) or not l or "|" in l:
            raise ParseError(f"space: bad basis label {l!r}")
    if len(set(labels)) != len(labels):
        raise DocumentError("space", "basis labels are distinct")
    return GradedSpace(labels, [_int(d, "space.degrees") for d in degrees])


def _matrix(obj, dim, where):
    rows = _expect(obj, list, where)
    if len(rows) != dim or any(not isinstance(r, list) or len(r) != dim for r in rows):
        raise ParseError(f"{where}: expected a {dim}x{dim} matrix")
    m = zeros((dim, dim))
    for i, r in enumerate(rows):
        for j, x in enumerate(r):
            m[i, j] = parse_rational(x, where)
    return m


def _dump_matrix(m) -> list:
    return [[format_scalar(x) for x in row] for row in m]


def _constant_parts(f: FormField, where) -> dict:
    """``{arity: MultiMap}`` of a field that is a constant 0-form."""
    first = f.cells[next(iter(f.grid.cell_indices()))]
    for c in f.cells.values():
        if not c == first:
            raise DocumentError(where, "constant element", "cells differ")
    out = {}
    for n, fm in first.parts.items():
        if set(fm.terms) - {(0, 0, 0)}:
            raise DocumentError(where, "constant element", "polynomial or form terms present")
        out[n] = fm.coefficient(0)
    return out


def from_dict(raw) -> Document:
    _expect(raw, dict, "document")
    unknown = set(raw) - set(SECTIONS) - {"space", "arity_cap", "format"}
    if unknown:
        raise ParseError(f"document: unknown sections {sorted(unknown)}")
    if "space" not in raw:
        raise ParseError("document: missing 'space'")
    space = _parse_space(raw["space"])
    cap = _int(raw.get("arity_cap", 3), "arity_cap")
    if cap < 1:
        raise DocumentError("arity_cap", "arity cap at least 1")
    doc = Document(space, cap)
    for section in SECTIONS:
        _expect(raw.get(section, {}), dict, section)

    for name, obj in sorted(raw.get("algebras", {}).items()):
        w = f"algebras.{name}"
        _expect(obj, dict, w)
        acap = _int(obj.get("arity_cap", cap), f"{w}.arity_cap")
        maps = _parse_maps(obj.get("maps", {}), space, lambda n: 2 - n, f"{w}.maps")
        try:
            doc.algebras[name] = AInfAlgebra(space, maps, acap, bool(obj.get("flat", True)))
        except (GradingError, ArityError) as exc:
            raise DocumentError(w, "A-infinity data", str(exc)) from None

    for name, obj in sorted(raw.get("morphisms", {}).items()):
        w = f"morphisms.{name}"
        _expect(obj, dict, w)
        A = _ref(doc.algebras, obj.get("source"), f"{w}.source", "algebra")
        B = _ref(doc.algebras, obj.get("target"), f"{w}.target", "algebra")
        maps = _parse_maps(obj.get("maps", {}), space, lambda n: 1 - n, f"{w}.maps")
        try:
            doc.morphisms[name] = AInfMorphism(A, B, maps)
        except (GradingError, ArityError) as exc:
            raise DocumentError(w, "morphism data", str(exc)) from None

    for name, obj in sorted(raw.get("homotopies", {}).items()):
        w = f"homotopies.{name}"
        _expect(obj, dict, w)
        F = _ref(doc.morphisms, obj.get("F"), f"{w}.F", "morphism")
        G = _ref(doc.morphisms, obj.get("G"), f"{w}.G", "morphism")
        maps = _parse_maps(obj.get("maps", {}), space, lambda n: -n, f"{w}.maps")
        try:
            doc.homotopies[name] = AInfHomotopy(F, G, maps)
        except (GradingError, ArityError) as exc:
            raise DocumentError(w, "homotopy data", str(exc)) from None

    for name, obj in sorted(raw.get("families", {}).items()):
        w = f"families.{name}"
        f = parse_field(obj, space, cap, w, degree=1)
        try:
            doc.families[name] = FamilyForm(f.grid, space, cap, f.cells,
                                            bool(obj.get("unary_flat", True)))
        except (GradingError, GridError) as exc:
            raise DocumentError(w, "family flags", str(exc)) from None

    for name, obj in sorted(raw.get("gauges", {}).items()):
        w = f"gauges.{name}"
        f = parse_field(obj, space, cap, w)
        for idx, c in f.cells.items():
            for n, fm in c.parts.items():
                for mask in fm.masks():
                    if fm.map_shift(mask) > -1:
                        raise DocumentError(w, "filtered element (every shift <= -1)",
                                            f"cell {idx}, arity {n}, form {mask_name(mask)}")
        doc.gauges[name] = f

    for name, obj in sorted(raw.get("groups", {}).items()):
        w = f"groups.{name}"
        _expect(obj, dict, w)
        if "free" in obj:
            gens = _expect(obj["free"], list, f"{w}.free")
            if any(not isinstance(g, str) or len(g) != 1 or not g.islower() or g == "e"
                   for g in gens):
                raise ParseError(f"{w}: free generators are single lower-case letters other than e")
            doc.groups[name] = FreeGroup(tuple(gens))
            continue
        elements = _expect(obj.get("elements"), list, f"{w}.elements")
        table = _expect(obj.get("table"), list, f"{w}.table")
        try:
            doc.groups[name] = FiniteGroup(elements, table, obj.get("identity"))
        except GroupError as exc:
            raise DocumentError(w, "group axioms", str(exc)) from None

    for name, obj in sorted(raw.get("actions", {}).items()):
        w = f"actions.{name}"
        _expect(obj, dict, w)
        group = _ref(doc.groups, obj.get("group"), f"{w}.group", "group")
        A = _ref(doc.algebras, obj.get("algebra"), f"{w}.algebra", "algebra")
        mats_obj = _expect(obj.get("matrices", {}), dict, f"{w}.matrices")
        mats = {g: _matrix(m, space.dim, f"{w}.matrices[{g}]") for g, m in mats_obj.items()}
        act = Action(group, A, mats, raw=obj)
        try:
            if isinstance(group, FreeGroup):
                loops = _expect(obj.get("loops", {}), dict, f"{w}.loops")
                if set(loops) != set(group.generators) or set(mats) != set(group.generators):
                    raise DocumentError(w, "one loop and one matrix per generator")
                fams = {g: (_ref(doc.families, loops[g], f"{w}.loops[{g}]", "family"), mats[g])
                        for g in group.generators}
                act.model = FreeGroupModel(A, fams)
            else:
                act.linear = LinearAction(group, space, mats)
                if not act.linear.preserves(A):
                    raise DocumentError(w, "group acts by algebra automorphisms")
                sc = obj.get("scenario")
                if sc is not None:
                    _expect(sc, dict, f"{w}.scenario")
                    a1 = _ref(doc.gauges, sc.get("alpha1"), f"{w}.scenario.alpha1", "gauge")
                    gm = _ref(doc.gauges, sc.get("gamma"), f"{w}.scenario.gamma", "gauge")
                    a0 = sc.get("alpha0")
                    a0 = None if a0 is None else _constant_parts(
                        _ref(doc.gauges, a0, f"{w}.scenario.alpha0", "gauge"), w)
                    K = _int(sc.get("level", A.arity_cap), f"{w}.scenario.level")
                    act.scenario = FiniteGroupScenario(
                        A, act.linear, _constant_parts(a1, w), _constant_parts(gm, w), K, a0)
        except (GroupError, GradingError, GridError) as exc:
            raise DocumentError(w, "action data", str(exc)) from None
        doc.actions[name] = act
    return doc


def to_dict(doc: Document) -> dict:
    out = {"space": {"labels": list(doc.space.labels), "degrees": list(doc.space.degrees)},
           "arity_cap": doc.arity_cap}
    if doc.algebras:
        out["algebras"] = {n: {"arity_cap": A.arity_cap, "maps": _dump_maps(A.maps)}
                           for n, A in doc.algebras.items()}
    if doc.morphisms:
        out["morphisms"] = {n: {"source": doc.name_of("algebras", F.source),
                                "target": doc.name_of("algebras", F.target),
                                "maps": _dump_maps(F.maps)} for n, F in doc.morphisms.items()}
    if doc.homotopies:
        out["homotopies"] = {n: {"F": doc.name_of("morphisms", H.F),
                                 "G": doc.name_of("morphisms", H.G),
                                 "maps": _dump_maps(H.maps)} for n, H in doc.homotopies.items()}
    if doc.families:
        out["families"] = {}
        for n, f in doc.families.items():
            d = dump_field(f)
            d["unary_flat"] = f.unary_flat
            out["families"][n] = d
    if doc.gauges:
        out["gauges"] = {n: dump_field(f) for n, f in doc.gauges.items()}
    if doc.groups:
        out["groups"] = {}
        for n, g in doc.groups.items():
            if isinstance(g, FreeGroup):
                out["groups"][n] = {"free": list(g.generators)}
            else:
                out["groups"][n] = {"elements": list(g.labels), "identity": g.identity,
                                    "table": [[g.mul(a, b) for b in g.labels] for a in g.labels]}
    if doc.actions:
        out["actions"] = {}
        for n, a in doc.actions.items():
            rec = {"group": doc.name_of("groups", a.group),
                   "algebra": doc.name_of("algebras", a.algebra),
                   "matrices": {g: _dump_matrix(m) for g, m in a.matrices.items()}}
            for key in ("loops", "scenario"):
                if key in a.raw:
                    rec[key] = a.raw[key]
            out["actions"][n] = rec
    return out


def dumps(doc_or_dict) -> str:
    d = to_dict(doc_or_dict) if isinstance(doc_or_dict, Document) else doc_or_dict
    return json.dumps(d, indent=2, sort_keys=True, ensure_ascii=False) + "\n"


def loads(text: str) -> Document:
    try:
        raw = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"invalid JSON: {exc}") from None
    return from_dict(raw)


def load(path) -> Document:
    with open(path, encoding="utf-8") as fh:
        text = fh.read()
    return loads(text)


def save(doc, path):
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(dumps(doc))


# -- validation ---------------------------------------------------------------

def validate(doc: Document) -> list:
    """Semantic invariants on top of the structural ones checked while loading.

    Returns ``(where, invariant, witness)`` triples for every failure.
    """
    failures = []
    for name, A in sorted(doc.algebras.items()):
        for n in range(A.arity_cap + 1):
            d = stasheff_defect(A, n)
            if not d.is_zero():
                failures.append((f"algebras.{name}", f"Stasheff relation at level {n}", d.witness()))
    for name, F in sorted(doc.morphisms.items()):
        for n in range(1, F.arity_cap + 1):
            d = morphism_defect(F, n)
            if not d.is_zero():
                failures.append((f"morphisms.{name}", f"morphism relation at level {n}", d.witness()))
    for name, H in sorted(doc.homotopies.items()):
        for n in range(1, H.F.arity_cap + 1):
            d = homotopy_defect(H, n)
            if not d.is_zero():
                failures.append((f"homotopies.{name}", f"homotopy relation at level {n}", d.witness()))
    for name, f in sorted(doc.families.items()):
        d = mc_defect(f)
        if not d.is_zero():
            failures.append((f"families.{name}", "Maurer-Cartan equation", d.bidegrees()))
        for bad in f.continuity_defects():
            failures.append((f"families.{name}", "continuity across breakpoints", bad))
    return failures
