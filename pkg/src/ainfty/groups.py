"""Group actions: finite groups, cohomology, averaging and strict representatives.

Monodromy convention: a loop labelled ``l`` carries a family ``alpha_l`` on
``[0, 1]`` whose end structure is ``rho_l^{-1} . A`` when it starts at ``A``;
the action of ``l`` is ``Lin(rho_l) o T(alpha_l)``.  With this convention
loops concatenate into words and ``F_g o F_h = F_{gh}``.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass

import numpy as np

from .algebra import AInfAlgebra, AInfMorphism, compose, identity_morphism, linear_morphism
from .families import (FamilyForm, FilteredLie, FormField, Grid1D, GridError, field_level,
                       gauge_action, mc_defect)
from .forms import DS, FormCochain, FormMap, conjugate_table
from .graded import ONE, ZERO, GradingError, MultiMap, as_object_array, scalar, zeros
from .linalg import inverse as mat_inverse, rank
from .transport import TransportRequest, transport


class GroupError(ValueError):
    pass


def _mat_mul(a, b):
    return np.dot(a, b)


def _identity(n):
    out = zeros((n, n))
    for i in range(n):
        out[i, i] = ONE
    return out


class FiniteGroup:
    """A group given by its multiplication table (``table[a][b] = ab``)."""

    def __init__(self, labels, table, identity=None):
        self.labels = tuple(str(l) for l in labels)
        self.index = {l: i for i, l in enumerate(self.labels)}
        n = len(self.labels)
        if isinstance(table, dict):
            rows = [[table[(a, b)] for b in self.labels] for a in self.labels]
        else:
            rows = table
        try:
            self.table = [[self.index[str(x)] for x in row] for row in rows]
        except KeyError as exc:
            raise GroupError(f"table entry {exc} is not an element") from None
        if len(self.table) != n or any(len(r) != n for r in self.table):
            raise GroupError("multiplication table must be square")
        if identity is None:
            identity = next((self.labels[e] for e in range(n)
                             if all(self.table[e][g] == g == self.table[g][e] for g in range(n))),
                            None)
            if identity is None:
                raise GroupError("no identity element")
        self.e = self.index[str(identity)]
        for g in range(n):
            if self.table[self.e][g] != g or self.table[g][self.e] != g:
                raise GroupError(f"{identity} is not an identity")
        for a, b, c in itertools.product(range(n), repeat=3):
            if self.table[self.table[a][b]][c] != self.table[a][self.table[b][c]]:
                raise GroupError("multiplication is not associative")
        self.inv = []
        for g in range(n):
            h = next((h for h in range(n) if self.table[g][h] == self.e), None)
            if h is None or self.table[h][g] != self.e:
                raise GroupError(f"{self.labels[g]} has no inverse")
            self.inv.append(h)

    @property
    def order(self):
        return len(self.labels)

    def mul(self, a: str, b: str) -> str:
        return self.labels[self.table[self.index[a]][self.index[b]]]

    def inverse(self, a: str) -> str:
        return self.labels[self.inv[self.index[a]]]

    @property
    def identity(self) -> str:
        return self.labels[self.e]

    @classmethod
    def cyclic(cls, n: int):
        labels = [f"g{k}" for k in range(n)]
        return cls(labels, [[labels[(a + b) % n] for b in range(n)] for a in range(n)], "g0")

    @classmethod
    def symmetric3(cls):
        perms = list(itertools.permutations(range(3)))
        labels = ["".join(map(str, p)) for p in perms]
        compose_ = lambda p, q: tuple(p[q[i]] for i in range(3))
        table = [[labels[perms.index(compose_(p, q))] for q in perms] for p in perms]
        return cls(labels, table, "012")

    @classmethod
    def trivial(cls):
        return cls(["e"], [["e"]], "e")


class Representation:
    """Matrices ``rho_g`` (acting on column vectors) forming a representation."""

    def __init__(self, group: FiniteGroup, matrices: dict):
        self.group = group
        self.matrices = {g: as_object_array(m) for g, m in matrices.items()}
        if set(self.matrices) != set(group.labels):
            raise GroupError("need one matrix per group element")
        dims = {m.shape for m in self.matrices.values()}
        if len(dims) != 1:
            raise GroupError("matrices differ in size")
        self.dim = dims.pop()[0]
        if not np.all(self.matrices[group.identity] == _identity(self.dim)):
            raise GroupError("identity must act trivially")
        for a, b in itertools.product(group.labels, repeat=2):
            if not np.all(_mat_mul(self.matrices[a], self.matrices[b])
                          == self.matrices[group.mul(a, b)]):
                raise GroupError(f"rho({a}) rho({b}) != rho({group.mul(a, b)})")

    @classmethod
    def trivial(cls, group, dim=1):
        return cls(group, {g: _identity(dim) for g in group.labels})

    def invariant_dimension(self) -> int:
        rows = np.concatenate([self.matrices[g] - _identity(self.dim) for g in self.group.labels])
        return self.dim - rank(list(rows.T))


class LinearAction(Representation):
    """A representation on a graded space by degree-0 automorphisms."""

    def __init__(self, group, space, matrices: dict):
        super().__init__(group, matrices)
        self.space = space
        if self.dim != space.dim:
            raise GroupError("action matrices do not match the space")
        for g, m in self.matrices.items():
            MultiMap.linear(space, m)  # raises unless degree-preserving
        self.inverses = {g: self.matrices[self.group.inverse(g)] for g in group.labels}

    def act(self, g: str, f: MultiMap) -> MultiMap:
        """``rho_g o f o (rho_g^{-1})^{(x) n}``."""
        table = conjugate_table(f.table, self.matrices[g], self.inverses[g])
        return MultiMap(f.source, f.arity, f.shift, table, f.target, check=False)

    def preserves(self, A: AInfAlgebra) -> bool:
        return all(self.act(g, f) == f for g in self.group.labels for f in A.maps.values())

    def cochain_representation(self, arity: int, shift: int = 0) -> Representation:
        """The induced representation on ``Hom(V^{(x) arity}, V)`` of the given shift."""
        from .hochschild import cochain_basis
        basis = list(cochain_basis(self.space, arity, shift))
        index = {}
        coords = []
        for k, b in enumerate(basis):
            idx = tuple(int(i) for i in np.argwhere(b.table != 0)[0])
            index[idx] = k
            coords.append(idx)
        mats = {}
        for g in self.group.labels:
            m = zeros((len(basis), len(basis)))
            for col, b in enumerate(basis):
                image = self.act(g, b).table
                for idx in np.argwhere(image != 0):
                    idx = tuple(int(i) for i in idx)
                    m[index[idx], col] = image[idx]
            mats[g] = m
        return Representation(self.group, mats)


def average_invariant(f, act: LinearAction):
    """``(1/|G|) sum_g g . f`` for a map or a ``{arity: map}`` dictionary."""
    if isinstance(f, dict):
        return {n: average_invariant(v, act) for n, v in f.items()}
    total = None
    for g in act.group.labels:
        term = act.act(g, f)
        total = term if total is None else total + term
    return scalar(1) / act.group.order * total


# -- bar complex ---------------------------------------------------------------

class BarComplex:
    """Normalized bar complex of a finite group (simplices avoid the identity).

    ``boundary(q)`` is the integer matrix from ``q``-simplices to
    ``(q-1)``-simplices with faces ``[g2|..]``, ``(-1)^i [..|g_i g_{i+1}|..]``
    and ``(-1)^q [..|g_{q-1}]``; faces containing the identity vanish.
    """

    def __init__(self, group: FiniteGroup, cap: int = 3):
        self.group = group
        self.cap = cap
        self.nontrivial = [g for g in group.labels if g != group.identity]

    def simplices(self, q: int):
        if q > self.cap + 1:
            raise GroupError(f"dimension {q} beyond the bar complex cap {self.cap}")
        return list(itertools.product(self.nontrivial, repeat=q))

    def faces(self, simplex):
        q = len(simplex)
        out = [(1, simplex[1:])]
        for i in range(q - 1):
            merged = self.group.mul(simplex[i], simplex[i + 1])
            out.append(((-1) ** (i + 1), simplex[:i] + (merged,) + simplex[i + 2:]))
        out.append(((-1) ** q, simplex[:-1]))
        e = self.group.identity
        return [(s, f) for s, f in out if e not in f]

    def boundary(self, q: int) -> np.ndarray:
        rows = {s: i for i, s in enumerate(self.simplices(q - 1))}
        cols = self.simplices(q)
        m = np.zeros((len(rows), len(cols)), dtype=np.int64)
        for j, s in enumerate(cols):
            for sign, f in self.faces(s):
                m[rows[f], j] += sign
        return m

    def coboundary(self, rep: Representation, p: int) -> np.ndarray:
        """``delta: C^p -> C^{p+1}`` on normalized cochains with values in ``rep``."""
        src = self.simplices(p)
        dst = self.simplices(p + 1)
        m = rep.dim
        si = {s: i for i, s in enumerate(src)}
        out = zeros((len(dst) * m, len(src) * m))
        e = self.group.identity
        for r, simplex in enumerate(dst):
            row = slice(r * m, (r + 1) * m)
            # g_1 . f(g_2, ..)
            head = simplex[1:]
            if e not in head:
                c = si[head]
                out[row, c * m:(c + 1) * m] += rep.matrices[simplex[0]]
            for i in range(p):
                merged = self.group.mul(simplex[i], simplex[i + 1])
                face = simplex[:i] + (merged,) + simplex[i + 2:]
                if e in face:
                    continue
                c = si[face]
                out[row, c * m:(c + 1) * m] += (-1) ** (i + 1) * _identity(m)
            tail = simplex[:-1]
            if e not in tail:
                c = si[tail]
                out[row, c * m:(c + 1) * m] += (-1) ** (p + 1) * _identity(m)
        return out


def _rank(m) -> int:
    if m.size == 0:
        return 0
    return rank(list(np.asarray(m).T))


def group_cohomology_dim(group: FiniteGroup, rep: Representation, p: int, cap: int = 3) -> int:
    """``dim H^p(group; rep)`` from normalized bar cochains and exact ranks."""
    if p < 0:
        raise GroupError("p must be non-negative")
    if p > cap:
        raise GroupError(f"p = {p} exceeds the bar complex cap {cap}")
    bar = BarComplex(group, cap)
    dim_p = len(bar.simplices(p)) * rep.dim
    out_rank = _rank(bar.coboundary(rep, p))
    in_rank = _rank(bar.coboundary(rep, p - 1)) if p > 0 else 0
    return dim_p - out_rank - in_rank


def free_group_cohomology(generator_matrices, p: int) -> int:
    """``H^p`` of a free group acting through the given generator matrices.

    Uses the two-term resolution: ``H^0`` is the common invariant subspace,
    ``H^1`` the cokernel of ``u -> (g_s u - u)_s``, everything above vanishes.
    """
    if p < 0:
        raise GroupError("p must be non-negative")
    mats = [as_object_array(m) for m in generator_matrices]
    if not mats:
        raise GroupError("need at least one generator")
    m = mats[0].shape[0]
    if p >= 2:
        return 0
    delta = np.concatenate([_identity(m) - g for g in mats])
    r = _rank(delta)
    if p == 0:
        return m - r
    return len(mats) * m - r


# -- strictification -----------------------------------------------------------

def concatenate(families, arity_cap) -> FamilyForm:
    """Traverse the families one after another on ``[0, 1]``."""
    k = len(families)
    points = [scalar(0)]
    cells = {}
    idx = 0
    for j, fam in enumerate(families):
        for c in fam.grid.cell_indices():
            a, b = fam.grid.cell(c)
            lo = (j + a) / k
            hi = (j + b) / k
            if points[-1] != lo:
                raise GridError("families do not tile the interval")
            points.append(hi)
            # local coordinate u = k s - j
            cells[idx] = fam.cells[c].map(lambda f, j=j: f.reparametrize("s", -j, k))
            idx += 1
    grid = Grid1D(points)
    first = families[0]
    return FamilyForm(grid, first.space, arity_cap, cells)


def reverse_family(fam: FamilyForm) -> FamilyForm:
    """``s -> 1 - s`` (the ``ds`` part changes sign)."""
    pts = fam.grid.breakpoints
    grid = Grid1D([1 - b for b in reversed(pts)])
    n = fam.grid.ncells
    cells = {n - 1 - c: fam.cells[c].map(lambda f: f.reparametrize("s", 1, -1))
             for c in fam.grid.cell_indices()}
    return FamilyForm(grid, fam.space, fam.arity_cap, cells)


def conjugate_family(fam: FamilyForm, rho) -> FamilyForm:
    rho = as_object_array(rho)
    rho_inv = mat_inverse(rho)
    field = fam.act(rho, rho_inv)
    return FamilyForm(fam.grid, fam.space, fam.arity_cap, field.cells)


@dataclass
class Loop:
    family: FamilyForm
    rho: np.ndarray


class FreeGroupModel:
    """Wedge of circles: one loop family and one monodromy per generator.

    Generators are lower-case labels; their inverses are the upper-case ones.
    """

    def __init__(self, base: AInfAlgebra, loops: dict, check: bool = True):
        self.base = base
        self.arity_cap = base.arity_cap
        self.loops = {}
        for name, (fam, rho) in loops.items():
            if not name.islower() or len(name) != 1 or name == "e":
                raise GroupError("generators are single lower-case letters other than e")
            rho = as_object_array(rho)
            MultiMap.linear(base.space, rho)
            if check:
                defect = mc_defect(fam)
                if not defect.is_zero():
                    raise GroupError(f"loop {name} is not Maurer-Cartan")
                if not fam.fibre(0) == base:
                    raise GroupError(f"loop {name} does not start at the base algebra")
                end = fam.fibre(1, side="left")
                if not conjugate_algebra(base, mat_inverse(rho)) == end:
                    raise GroupError(f"loop {name} does not end at rho^-1 . A")
            self.loops[name] = Loop(fam, rho)

    @property
    def rank(self):
        return len(self.loops)

    def letter(self, ch: str) -> Loop:
        if ch.islower():
            return self.loops[ch]
        loop = self.loops[ch.lower()]
        fam = conjugate_family(reverse_family(loop.family), loop.rho)
        return Loop(fam, mat_inverse(loop.rho))

    def cohomology(self, rep_matrices: dict, p: int) -> int:
        return free_group_cohomology([rep_matrices[g] for g in sorted(self.loops)], p)

    def action(self, word: str) -> AInfMorphism:
        """``F_w = Lin(rho_{l_1} ... rho_{l_k}) o T(path)`` for ``w = l_1 ... l_k``."""
        A = self.base
        word = reduce_word(word)
        if not word:
            return identity_morphism(A)
        # the path runs through l_k first; piece l_j is conjugated back by
        # (rho_{l_{j+1}} ... rho_{l_k})^{-1} so that the pieces join up
        pieces = []
        acc = _identity(A.space.dim)
        for ch in reversed(word):
            loop = self.letter(ch)
            pieces.append(conjugate_family(loop.family, mat_inverse(acc)))
            acc = _mat_mul(loop.rho, acc)
        path = concatenate(pieces, self.arity_cap)
        T = transport(TransportRequest(path, 0, 1, check_mc=False))
        back = linear_morphism(T.target, A, acc)
        return compose(back, T)


def conjugate_algebra(A: AInfAlgebra, rho) -> AInfAlgebra:
    rho = as_object_array(rho)
    inv = mat_inverse(rho)
    maps = {}
    for n, f in A.maps.items():
        maps[n] = MultiMap(A.space, n, f.shift, conjugate_table(f.table, rho, inv), check=False)
    return AInfAlgebra(A.space, maps, A.arity_cap)


def reduce_word(word: str) -> str:
    out = []
    for ch in word:
        if out and out[-1] != ch and out[-1].lower() == ch.lower():
            out.pop()
        else:
            out.append(ch)
    return "".join(out)


def words(generators, length: int):
    letters = list(generators) + [g.upper() for g in generators]
    out = [""]
    for n in range(1, length + 1):
        for w in itertools.product(letters, repeat=n):
            w = "".join(w)
            if reduce_word(w) == w:
                out.append(w)
    return out


def strictify_free(model: FreeGroupModel, length: int = 1) -> dict:
    """``F_w`` for reduced words up to ``length`` and the composition table check."""
    ws = words(sorted(model.loops), length)
    cache = {}

    def F(w):
        w = reduce_word(w)
        if w not in cache:
            cache[w] = model.action(w)
        return cache[w]

    table = {}
    for g, h in itertools.product(ws, repeat=2):
        key = (g or "e", h or "e", reduce_word(g + h) or "e")
        table[key] = compose(F(g), F(h)).equal_maps(F(g + h))
    identity_ok = F("").equal_maps(identity_morphism(model.base))
    return {"representatives": {w or "e": F(w) for w in ws}, "table": table,
            "identity": identity_ok, "ok": identity_ok and all(table.values())}


# -- finite groups via a gauge-connected pair of families ---------------------

class FiniteGroupScenario:
    """Finite-group action data at the basepoint.

    ``alpha1`` is an invariant deformation (strict action by ``rho``),
    ``gamma`` a degree-0 cochain, and ``alpha0 = exp(-gamma) * alpha1``
    modulo ``F_{K+1}``.  Both deformations sit on top of ``base`` (only ``mu^2``).
    """

    def __init__(self, base: AInfAlgebra, action: LinearAction, alpha1: dict, gamma: dict,
                 K: int | None = None, alpha0: dict | None = None):
        self.base = base
        self.action = action
        self.arity_cap = base.arity_cap
        self.K = self.arity_cap if K is None else K
        self.grid = Grid1D()
        self.lie = FilteredLie(base, self.grid)
        cap = self.arity_cap
        self.alpha1 = _point_field(self.grid, base.space, 1, cap, alpha1)
        self.gamma = _point_field(self.grid, base.space, 0, cap, gamma)
        self.lie.check(self.alpha1)
        self.lie.check(self.gamma)
        if not self.lie.mc_defect(self.alpha1, self.K).is_zero():
            raise GroupError("alpha1 is not Maurer-Cartan modulo the truncation")
        for g in action.group.labels:
            for f in alpha1.values():
                if not action.act(g, f) == f:
                    raise GroupError(f"data is not invariant under {g}")
        if not action.preserves(base):
            raise GroupError("the group does not act by algebra automorphisms")
        derived = self.lie.gauge_exp(-self.gamma, self.alpha1, self.K)
        if alpha0 is not None:
            given = _point_field(self.grid, base.space, 1, cap, alpha0)
            if not self.lie.truncate(given, self.K) == derived:
                raise GroupError("alpha0 is not exp(-gamma) * alpha1")
        self.alpha0 = derived

    def algebra(self, which: int) -> AInfAlgebra:
        alpha = self.alpha0 if which == 0 else self.alpha1
        maps = dict(self.base.maps)
        for n, f in alpha.cells[0].parts.items():
            m = f.coefficient(0)
            maps[n] = maps[n] + m if n in maps else m
        return AInfAlgebra(self.base.space, maps, self.arity_cap)

    def path_family(self) -> FamilyForm:
        """``mu + alpha_t - dt ^ gamma`` written in the transport variable."""
        alpha_t, _ = self.lie.embed_path(self.gamma, self.alpha0, self.K)
        cells = {}
        for k, c in alpha_t.cells.items():
            # rename t -> s; data is constant along the base point direction
            moved = c.map(lambda f: _swap_vars(f))
            mu = FormCochain(self.base.space, 1, self.arity_cap,
                             {n: FormMap.constant(f) for n, f in self.base.maps.items()})
            ds_gamma = self.gamma.cells[k].map(lambda f: f.prepend("s"), 1)
            cells[k] = mu + moved - ds_gamma
        return FamilyForm(self.grid, self.base.space, self.arity_cap, cells)

    def path_report(self) -> dict:
        return self.lie.mc_path_check(self.gamma, self.alpha0, self.K)

    def strictify(self) -> dict:
        fam = self.path_family()
        G01 = transport(TransportRequest(fam, 0, 1))
        G10 = transport(TransportRequest(fam, 1, 0))
        A1 = self.algebra(1)
        reps = {}
        for g in self.action.group.labels:
            # the loop for g carries the constant invariant family alpha1, so
            # its transport is the identity and only the gluing map remains
            F_p1 = linear_morphism(A1, A1, self.action.matrices[g])
            reps[g] = compose(G10, compose(F_p1, G01))
        group = self.action.group
        table = {}
        for g, h in itertools.product(group.labels, repeat=2):
            table[(g, h)] = compose(reps[g], reps[h]).equal_maps(reps[group.mul(g, h)])
        identity_ok = reps[group.identity].equal_maps(identity_morphism(self.algebra(0)))
        return {"representatives": reps, "table": table, "identity": identity_ok,
                "ok": identity_ok and all(table.values()), "G01": G01, "G10": G10}


def _swap_vars(f: FormMap) -> FormMap:
    terms = {}
    for (mask, i, j), v in f.terms.items():
        if mask:
            raise GradingError("expected 0-form data")
        terms[(0, j, i)] = v
    return FormMap(f.source, f.arity, f.degree, terms, f.target)


def _point_field(grid, space, degree, cap, parts: dict) -> FormField:
    cochain = FormCochain(space, degree, cap, {n: FormMap.constant(f) for n, f in parts.items()})
    return FormField.constant(grid, cochain)
