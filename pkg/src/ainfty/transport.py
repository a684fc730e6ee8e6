"""Parallel transport of A-infinity morphisms along an interval family.

For a family ``A(s) + ds ^ B(s)`` the transport ``F_{p->q}`` solves
``dF/ds = X_s * F`` with ``F_{p->p} = id`` and generator ``X = -B``, where
``(X * F)^n = sum X^k(F^{m_1}, ..., F^{m_k})``.  Expanding the equation
gives a sum over level trees (one node of ``X`` per level, levels ordered
by time) of iterated integrals over the simplex ``p <= t_1 <= ... <= t_i <= q``.
Those integrals are evaluated exactly, top-down from the root: the subtree
above a node at time ``t`` is the integral from ``t`` to ``q``.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .algebra import AInfMorphism, ArityError, compositions
from .families import FamilyForm, Grid1D, GridError, mc_defect
from .forms import FormCochain
from .graded import MultiMap, scalar


class TransportError(ValueError):
    pass


@dataclass(frozen=True)
class LevelTree:
    """A planar tree with one node per level, listed from the root down.

    ``nodes[l] = (r, slot)``: the node at level ``l`` has arity ``r`` and is
    grafted onto strand ``slot`` of the partial tree above it (strands are
    numbered left to right).  The root has slot 0.
    """

    nodes: tuple

    @property
    def levels(self) -> int:
        return len(self.nodes)

    @property
    def leaves(self) -> int:
        return 1 + sum(r - 1 for r, _ in self.nodes)

    @property
    def unary(self) -> int:
        return sum(1 for r, _ in self.nodes if r == 1)

    def describe(self) -> str:
        return " <- ".join(f"a{r}@{slot}" for r, slot in self.nodes)


def enumerate_level_trees(i: int, n: int, d: int = 0) -> list:
    """All level trees with ``i`` levels, ``n`` leaves and at most ``d`` unary nodes."""
    if i < 1 or n < 1:
        raise ValueError("need at least one level and one leaf")
    out = []

    def grow(nodes, strands, unary):
        if len(nodes) == i:
            if strands == n:
                out.append(LevelTree(tuple(nodes)))
            return
        for r in range(1, n - strands + 2):
            u = unary + (r == 1)
            if u > d:
                continue
            for slot in range(strands):
                grow(nodes + [(r, slot)], strands + r - 1, u)

    grow([], 1, 0)
    return out


@dataclass
class TransportRequest:
    family: FamilyForm
    p: object
    q: object
    arity_cap: int | None = None
    unary_depth: int = 0
    check_mc: bool = True

    def __post_init__(self):
        self.p = scalar(self.p)
        self.q = scalar(self.q)
        for x in (self.p, self.q):
            if x < 0 or x > 1:
                raise GridError(f"endpoint {x} lies outside the grid [0, 1]")
        cap = self.family.arity_cap
        self.arity_cap = cap if self.arity_cap is None else int(self.arity_cap)
        if self.arity_cap > cap:
            raise ArityError(f"arity cap {self.arity_cap} exceeds the family cap {cap}")
        if self.unary_depth < 0:
            raise ValueError("unary depth must be non-negative")


# -- piecewise integration -------------------------------------------------

def _cells_between(grid: Grid1D, lo, hi):
    out = []
    for k in grid.cell_indices():
        a, b = grid.cell(k)
        if b > lo and a < hi:
            out.append((k, max(a, lo), min(b, hi)))
    return out


def _integral_to(pieces: dict, cells, q):
    """Cell-wise ``G(u) = int_u^q f``; the orientation handles ``u > q``."""
    C = {}
    carry = None
    for k, a, b in cells:
        anti = pieces[k].map(lambda f, a=a: f.antiderivative("s", a))
        if carry is not None:
            anti = anti + carry
        C[k] = anti
        carry = anti.map(lambda f, b=b: f.substitute("s", b))
    kq = next(k for k, a, b in cells if a <= q <= b)
    at_q = C[kq].map(lambda f: f.substitute("s", q))
    return {k: at_q - C[k] for k in C}


def _evaluate(pieces: dict, cells, u):
    k = next(k for k, a, b in cells if a <= u <= b)
    return pieces[k].map(lambda f: f.substitute("s", u))


def _circle(S: FormCochain, X: FormCochain, cap: int) -> FormCochain:
    parts = {}
    for a, f in S.parts.items():
        for r, g in X.parts.items():
            n = a + r - 1
            if n > cap:
                continue
            term = f.circle(g)
            parts[n] = parts[n] + term if n in parts else term
    return FormCochain(S.space, S.degree, cap, parts)


def generator(family: FamilyForm) -> dict:
    """``X = -B`` cell by cell, as degree-0 cochains of 0-forms."""
    return {k: -c.map(lambda f: f.strip("s"), 0) for k, c in family.cells.items()}


def transport_series(grid: Grid1D, X: dict, p, q, cap: int, unary_depth: int = 0) -> dict:
    """Sum of all level-tree integrals, returned as ``{arity: FormMap}``.

    ``X`` maps cells to degree-0 cochains whose pieces may carry further form
    coefficients (used by the collapsed square picture).  The identity is not
    included.
    """
    p, q = scalar(p), scalar(q)
    if p == q:
        return {}
    cells = _cells_between(grid, min(p, q), max(p, q))
    split = {}
    for u in (0, 1):
        split[u] = {k: c.filter_parts(lambda n, m, s, u=u: n <= cap and (n == 1) == (u == 1))
                    for k, c in X.items()}
    level = {}
    for u in range(min(unary_depth, 1) + 1):
        level[u] = _integral_to(split[u], cells, q)
    total = {}
    while level:
        for u, pieces in level.items():
            value = _evaluate(pieces, cells, p)
            for n, f in value.parts.items():
                total[n] = total[n] + f if n in total else f
        nxt = {}
        for u, pieces in level.items():
            for du in (0, 1):
                if u + du > unary_depth:
                    continue
                integrand = {k: _circle(pieces[k], split[du][k], cap) for k, _, _ in cells}
                if all(c.is_zero() for c in integrand.values()):
                    continue
                G = _integral_to(integrand, cells, q)
                nxt[u + du] = _add_piecewise(nxt[u + du], G) if u + du in nxt else G
        level = {u: v for u, v in nxt.items() if v}
        for u in list(level):
            if all(c.is_zero() for c in level[u].values()):
                del level[u]
    return {n: f for n, f in total.items() if not f.is_zero()}


def _add_piecewise(a: dict, b: dict) -> dict:
    return {k: a[k] + b[k] for k in a}


def _check_family(req: TransportRequest):
    fam = req.family
    if not isinstance(fam.grid, Grid1D):
        raise GridError("transport runs along interval families")
    if req.unary_depth == 0:
        for k, c in fam.cells.items():
            unary = c.parts.get(1)
            if unary is not None and not unary.strip("s").is_zero():
                raise TransportError("the unary one-form part is nonzero; declare a unary depth")
    if req.check_mc:
        defect = mc_defect(fam)
        if not defect.is_zero():
            raise TransportError(f"family is not Maurer-Cartan (bidegrees {defect.bidegrees()})")


def transport(req: TransportRequest) -> AInfMorphism:
    """Exact transport morphism from the fibre at ``p`` to the fibre at ``q``."""
    _check_family(req)
    fam = req.family
    source = fam.fibre(req.p).with_cap(req.arity_cap)
    target = fam.fibre(req.q).with_cap(req.arity_cap)
    series = transport_series(fam.grid, generator(fam), req.p, req.q,
                              req.arity_cap, req.unary_depth)
    maps = {n: f.coefficient(0) for n, f in series.items()}
    ident = MultiMap.identity(fam.space)
    maps[1] = maps[1] + ident if 1 in maps else ident
    return AInfMorphism(source, target, maps)


def tree_term(req: TransportRequest, tree: LevelTree) -> MultiMap:
    """The iterated integral of a single level tree."""
    fam = req.family
    p, q = req.p, req.q
    X = generator(fam)
    space = fam.space
    if p == q:
        return MultiMap.zero(space, tree.leaves, 1 - tree.leaves)
    cells = _cells_between(fam.grid, min(p, q), max(p, q))
    pick = lambda r: {k: FormCochain(space, 0, r, {r: X[k].part(r)}) for k, _, _ in cells}
    r0, _ = tree.nodes[0]
    current = _integral_to(pick(r0), cells, q)
    arity = r0
    for r, slot in tree.nodes[1:]:
        node = pick(r)
        arity += r - 1
        integrand = {}
        for k, _, _ in cells:
            f = current[k].part(arity - r + 1)
            g = node[k].part(r)
            integrand[k] = FormCochain(space, 0, arity, {arity: f.insert(g, slot)})
        current = _integral_to(integrand, cells, q)
    return _evaluate(current, cells, p).part(arity).coefficient(0)


# -- floating point oracle --------------------------------------------------

def _float_table(table):
    return np.array(table, dtype=float)


def _float_generator(fam: FamilyForm, cap: int):
    """Per cell: list of ``(power, {arity: float table})``."""
    out = {}
    for k, c in fam.cells.items():
        polys = {}
        for n, f in c.parts.items():
            if n > cap:
                continue
            b = f.strip("s")
            for (mask, i, j), v in b.terms.items():
                polys.setdefault(i, {})
                cur = polys[i].get(n)
                polys[i][n] = -_float_table(v) + (cur if cur is not None else 0)
        out[k] = sorted(polys.items())
    return out


def _x_at(gen, k, s):
    acc = {}
    for i, tables in gen[k]:
        w = s ** i
        for n, t in tables.items():
            acc[n] = acc[n] + w * t if n in acc else w * t
    return acc


def _star(X: dict, F: dict, cap: int, dim: int) -> dict:
    """``(X * F)^n``; every piece has even shifted degree so no signs arise."""
    out = {}
    for n in range(1, cap + 1):
        total = np.zeros((dim,) * (n + 1))
        for k, x in X.items():
            if k > n:
                continue
            for parts in compositions(n, k):
                if any(m not in F for m in parts):
                    continue
                t = x
                for m in parts:
                    # contract the next open slot; the inputs of F^m are appended last
                    t = np.tensordot(t, F[m], axes=([1], [0]))
                total = total + t
        out[n] = total
    return out


def transport_oracle(req: TransportRequest, step: float = 1e-3) -> dict:
    """Classical RK4 solution of ``dF/ds = X_s * F``; returns float tables by arity."""
    if step <= 0:
        raise ValueError("step must be positive")
    _check_family(TransportRequest(req.family, req.p, req.q, req.arity_cap,
                                   req.unary_depth, check_mc=False))
    fam = req.family
    cap = req.arity_cap
    dim = fam.space.dim
    gen = _float_generator(fam, cap)
    F = {1: np.eye(dim)}
    for n in range(2, cap + 1):
        F[n] = np.zeros((dim,) * (n + 1))
    p, q = float(req.p), float(req.q)
    if p == q:
        return F
    lo, hi = min(req.p, req.q), max(req.p, req.q)
    pieces = _cells_between(fam.grid, lo, hi)
    if req.p > req.q:
        pieces = pieces[::-1]
    direction = 1.0 if req.q > req.p else -1.0
    for k, a, b in pieces:
        start, end = (float(a), float(b)) if direction > 0 else (float(b), float(a))
        length = abs(end - start)
        steps = max(1, int(round(length / step)))
        h = direction * length / steps
        s = start
        for _ in range(steps):
            k1 = _star(_x_at(gen, k, s), F, cap, dim)
            F2 = {n: F[n] + h / 2 * k1[n] for n in F}
            k2 = _star(_x_at(gen, k, s + h / 2), F2, cap, dim)
            F3 = {n: F[n] + h / 2 * k2[n] for n in F}
            k3 = _star(_x_at(gen, k, s + h / 2), F3, cap, dim)
            F4 = {n: F[n] + h * k3[n] for n in F}
            k4 = _star(_x_at(gen, k, s + h), F4, cap, dim)
            F = {n: F[n] + h / 6 * (k1[n] + 2 * k2[n] + 2 * k3[n] + k4[n]) for n in F}
            s += h
    return F


def max_deviation(exact: AInfMorphism, approx: dict) -> float:
    worst = 0.0
    for n, table in approx.items():
        ex = _float_table(exact.component(n).table)
        worst = max(worst, float(np.max(np.abs(ex - table))) if table.size else 0.0)
    return worst
