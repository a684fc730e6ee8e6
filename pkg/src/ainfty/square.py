"""Families over the square, their collapse to the interval, and differential homotopies.

A square family ``alpha = A + ds^B_s + dt^B_t + ds^dt^C`` is collapsed to a
family over ``I_s`` whose operations take values in polynomial forms in
``t``: the fibre part keeps everything without ``ds`` (plus the operator
``d_t``) and the transport part is the ``ds`` coefficient.  Transporting the
collapsed family along ``s`` with one unary level gives ``GG = F + dt ^ Theta``
where ``F_t`` is a family of morphisms between the edge algebras and
``Theta`` is its differential homotopy.
"""

from __future__ import annotations

import random
from dataclasses import dataclass

from .algebra import (AInfAlgebra, AInfHomotopy, AInfMorphism, compositions,
                      homotopy_defect)
from .families import (FamilyForm, FormField, Grid1D, Grid2D, GridError, gauge_action,
                       mc_defect)
from .forms import DS, DT, FormCochain, FormMap, compose_forms, form_degree
from .graded import GradingError, MultiMap, compose_tensor, insert, scalar
from .transport import transport_series

S_ONE_MINUS_S = {(1, 0): 1, (2, 0): -1}


class SquareError(ValueError):
    pass


class SquareFamily:
    """A Maurer-Cartan field on a :class:`Grid2D` whose edges ``s = 0, 1`` are constant."""

    def __init__(self, field: FormField, check: bool = True):
        if not isinstance(field.grid, Grid2D):
            raise GridError("square families live on a Grid2D")
        self.family = FamilyForm.from_field(field, unary_flat=True)
        self.grid = field.grid
        self.space = field.space
        self.arity_cap = field.arity_cap
        if check:
            defect = mc_defect(self.family)
            if not defect.is_zero():
                raise SquareError(f"square is not Maurer-Cartan (bidegrees {defect.bidegrees()})")
            bad = self.boundary_defects()
            if bad:
                raise SquareError(f"edge data is not constant: {bad}")

    def column(self, i: int) -> FormCochain:
        """The polynomial data of s-column ``i``; all its t-cells must agree."""
        cells = [self.family.cells[(i, j)] for j in range(self.grid.t.ncells)]
        if any(not c == cells[0] for c in cells[1:]):
            raise SquareError("collapse needs data polynomial in t on each s-column")
        return cells[0]

    def boundary_defects(self):
        """Edges where the structure moves in ``t`` or a ``dt`` component survives."""
        bad = []
        for s, i in ((0, 0), (1, self.grid.s.ncells - 1)):
            for j in range(self.grid.t.ncells):
                c = self.family.cells[(i, j)]
                for n, f in c.parts.items():
                    edge = f.substitute("s", s)
                    if edge.select(0).max_exponents()[1] > 0:
                        bad.append((s, j, n, "t-dependent"))
                    if not edge.select(DT).is_zero():
                        bad.append((s, j, n, "dt part"))
        return bad

    def edge_algebra(self, s) -> AInfAlgebra:
        return self.family.fibre(s, 0, side="left" if scalar(s) == 1 else "right")


@dataclass
class HatFamily:
    """Collapsed family over ``I_s``: fibre part ``hat0`` and transport part ``hat1``.

    Both are stored per s-cell as cochains of form maps with masks ``1`` and
    ``dt``; the fibre operation in arity 1 is ``d_t + hat0[1]``.
    """

    grid: Grid1D
    space: object
    arity_cap: int
    hat0: dict
    hat1: dict

    def field(self) -> dict:
        """``hat0 + ds ^ hat1`` cell by cell (without the ``d_t`` summand)."""
        return {k: self.hat0[k] + self.hat1[k].map(lambda f: f.prepend("s"), 1)
                for k in self.grid.cell_indices()}

    def components(self):
        """``(m, n)`` pairs with nonzero ``alpha-hat^{m,n}`` (``m`` counts ``ds``)."""
        out = set()
        for k in self.grid.cell_indices():
            out.update((0, n) for n in self.hat0[k].parts)
            out.update((1, n) for n in self.hat1[k].parts)
        return sorted(out | {(0, 1)})

    def fibre_maps(self, s) -> dict:
        """Fibre operations at ``s`` as form maps in ``t`` (``d_t`` implicit)."""
        s = scalar(s)
        k = self.grid.locate(s, "left" if s == 1 else "right")
        return {n: f.substitute("s", s) for n, f in self.hat0[k].parts.items()}


def collapse(sq: SquareFamily) -> HatFamily:
    hat0, hat1 = {}, {}
    g1 = sq.grid.s
    for i in g1.cell_indices():
        col = sq.column(i)
        hat0[i] = col.filter_parts(lambda n, mask, shift: not mask & DS)
        with_ds = col.filter_parts(lambda n, mask, shift: bool(mask & DS))
        hat1[i] = with_ds.map(lambda f: f.strip("s"), 0)
    return HatFamily(g1, sq.space, sq.arity_cap, hat0, hat1)


def hat_mc_defect(hat: HatFamily) -> dict:
    """``d_s a + [d_t, a] + 1/2 [a, a]`` per cell, ``a = hat0 + ds ^ hat1``.

    ``[d_t, f]`` is the derivative of the ``t``-coefficients of ``f``, since
    ``d_t`` is a derivation and every form map acts linearly over forms.
    """
    out = {}
    for k, a in hat.field().items():
        ds_a = a.d("s")
        dt_a = a.d("t")
        out[k] = ds_a + dt_a + a.bracket(a).scale(scalar("1/2"))
    return out


def hat_defect_is_zero(hat: HatFamily) -> bool:
    return all(c.is_zero() for c in hat_mc_defect(hat).values())


@dataclass
class HatMorphism:
    """``GG^n`` as form maps in ``t`` between the fibres of a collapsed family."""

    hat: HatFamily
    maps: dict

    def F(self, n: int) -> FormMap:
        return self.component(n).select(0)

    def G(self, n: int) -> FormMap:
        return self.component(n).select(DT)

    def theta(self, n: int) -> FormMap:
        return self.G(n).strip("t")

    def component(self, n: int) -> FormMap:
        return self.maps.get(n) or FormMap.zero(self.hat.space, n, 0)


def hat_transport(hat: HatFamily, arity_cap: int | None = None) -> HatMorphism:
    """Transport of the collapsed family from ``s = 0`` to ``s = 1`` with one unary level."""
    cap = hat.arity_cap if arity_cap is None else arity_cap
    for k in hat.grid.cell_indices():
        unary = hat.hat1[k].parts.get(1)
        if unary is not None and any(m != DT for m in unary.masks()):
            raise SquareError("the unary transport part must be a pure dt form (square-zero)")
        unary0 = hat.hat0[k].parts.get(1)
        if unary0 is not None and not unary0.select(DT).is_zero():
            raise SquareError("the unary fibre part must not carry dt")
    X = {k: -c for k, c in hat.hat1.items()}
    series = transport_series(hat.grid, X, 0, 1, cap, unary_depth=1)
    ident = FormMap.constant(MultiMap.identity(hat.space))
    series[1] = series[1] + ident if 1 in series else ident
    return HatMorphism(hat, series)


def hat_morphism_defect(GG: HatMorphism, n: int) -> FormMap:
    """Morphism relation for ``GG`` with fibre operations ``d_t + hat0`` at the ends."""
    hat = GG.hat
    A = hat.fibre_maps(0)
    B = hat.fibre_maps(1)
    total = FormMap.zero(hat.space, n, 1)
    for r, mu in B.items():
        if r > n:
            continue
        for parts in compositions(n, r):
            inner = [GG.maps.get(m) for m in parts]
            if any(x is None for x in inner):
                continue
            total = total + compose_forms(mu, inner)
    for m, mu in A.items():
        if m > n:
            continue
        outer = GG.maps.get(n - m + 1)
        if outer is None:
            continue
        for j in range(n - m + 1):
            total = total - outer.insert(mu, j)
    own = GG.maps.get(n)
    if own is not None:
        total = total + own.d("t")
    return total


# -- differential homotopies -------------------------------------------------

class DiffHomotopy:
    """``F_t`` and ``Theta_t`` as polynomial maps in ``t`` between two algebras."""

    def __init__(self, source: AInfAlgebra, target: AInfAlgebra, F: dict, theta: dict):
        self.source = source
        self.target = target
        self.arity_cap = source.arity_cap
        self.F = {n: f for n, f in F.items() if not f.is_zero()}
        self.Theta = {n: f for n, f in theta.items() if not f.is_zero()}
        for n, f in self.F.items():
            if f.masks() not in ([], [0]):
                raise GradingError("F_t must be a 0-form in t")
        for n, f in self.Theta.items():
            if f.masks() not in ([], [0]):
                raise GradingError("Theta_t must be a 0-form in t")

    @classmethod
    def from_hat(cls, GG: HatMorphism, source: AInfAlgebra, target: AInfAlgebra):
        return cls(source, target, {n: GG.F(n) for n in GG.maps},
                   {n: GG.theta(n) for n in GG.maps})

    @staticmethod
    def _check_t(t):
        t = scalar(t)
        if t < 0 or t > 1:
            raise GridError(f"t = {t} is outside [0, 1]")
        return t

    def F_at(self, t) -> AInfMorphism:
        t = self._check_t(t)
        return AInfMorphism(self.source, self.target,
                            {n: f.coefficient(0, t=t) for n, f in self.F.items()})

    def theta_at(self, t, n: int) -> MultiMap:
        t = self._check_t(t)
        if n in self.Theta:
            return self.Theta[n].coefficient(0, t=t)
        return MultiMap.zero(self.source.space, n, -n, target=self.target.space)

    def dF_at(self, t, n: int) -> MultiMap:
        t = self._check_t(t)
        if n in self.F:
            return self.F[n].partial("t").coefficient(0, t=t)
        return MultiMap.zero(self.source.space, n, 1 - n, target=self.target.space)


def diff_homotopy_defect(D: DiffHomotopy, t, n: int) -> MultiMap:
    """``dF^n/dt - sum mu_B(F, .., Theta, .., F) - sum Theta(.., mu_A, ..)`` at ``t``."""
    Ft = D.F_at(t)
    total = D.dF_at(t, n)
    for k, mu in D.target.maps.items():
        if k == 0 or k > n:
            continue
        for parts in compositions(n, k):
            for pos in range(k):
                inner = [Ft.maps.get(m) for m in parts]
                inner[pos] = D.theta_at(t, parts[pos])
                if any(x is None for x in inner):
                    continue
                total = total - compose_tensor(mu, inner)
    for m, mu in D.source.maps.items():
        if m == 0 or m > n:
            continue
        outer = D.theta_at(t, n - m + 1)
        for j in range(n - m + 1):
            total = total - insert(outer, mu, j)
    return total


def classical_candidate(D: DiffHomotopy):
    """``T^n = int_0^1 Theta^n dt`` as a homotopy from ``F_0`` to ``F_1``, with defects.

    Returns the homotopy and ``{n: True/False}`` recording whether the
    homotopy relation holds exactly at level ``n``.
    """
    T = {}
    for n, f in D.Theta.items():
        T[n] = f.antiderivative("t", 0).substitute("t", 1).coefficient(0)
    H = AInfHomotopy(D.F_at(1), D.F_at(0), T)
    report = {n: homotopy_defect(H, n).is_zero() for n in range(1, D.arity_cap + 1)}
    return H, report


# -- random squares ------------------------------------------------------------

def _replicate(grid: Grid2D, cochain: FormCochain) -> FormField:
    return FormField.constant(grid, cochain)


def random_square(rng: random.Random, A0: AInfAlgebra, grid: Grid2D | None = None,
                  unary: bool | None = None, density: float = 0.4,
                  bound: int = 2) -> SquareFamily:
    """A valid square obtained by gauge transformations of the constant family ``A0``.

    A 0-form ``beta = beta_1(s) + s(1-s) beta_2(s, t)`` of arity >= 2 and a
    1-form ``ds gamma_s + dt s(1-s) gamma_t`` act on ``A0`` in turn.  Both
    leave the edges ``s = 0, 1`` with a t-constant structure and no ``dt``
    part.  Arity-1 pieces of the 1-form (which feed the unary ``ds^dt``
    component) are used only when ``A0`` has no ``mu^1``.
    """
    from .constructions import random_poly_map
    grid = grid or Grid2D()
    V = A0.space
    cap = A0.arity_cap
    if unary is None:
        unary = A0.mu(1).is_zero()
    elif unary and not A0.mu(1).is_zero():
        raise SquareError("unary gauge pieces need an algebra without mu^1")
    mu = FormCochain(V, 1, cap, {n: FormMap.constant(f) for n, f in A0.maps.items()})
    beta = {}
    for n in range(2, cap + 1):
        b1 = random_poly_map(rng, V, n, 1 - n, 0, 1, 0, density, bound)
        b2 = random_poly_map(rng, V, n, 1 - n, 0, 1, 1, density, bound)
        beta[n] = b1 + b2.multiply_poly(S_ONE_MINUS_S)
    gamma = {}
    for n in range(1 if unary else 2, cap + 1):
        gs = random_poly_map(rng, V, n, -n, DS, 1, 1, density, bound)
        gt = random_poly_map(rng, V, n, -n, DT, 1, 1, density, bound)
        gamma[n] = gs + gt.multiply_poly(S_ONE_MINUS_S)
    alpha = _replicate(grid, mu)
    alpha = gauge_action(_replicate(grid, FormCochain(V, 0, cap, beta)), alpha)
    alpha = gauge_action(_replicate(grid, FormCochain(V, 0, cap, gamma)), alpha)
    return SquareFamily(alpha)


def constant_square(A0: AInfAlgebra, grid: Grid2D | None = None) -> SquareFamily:
    grid = grid or Grid2D()
    mu = FormCochain(A0.space, 1, A0.arity_cap,
                     {n: FormMap.constant(f) for n, f in A0.maps.items()})
    return SquareFamily(_replicate(grid, mu))


def square_homotopy(sq: SquareFamily, arity_cap: int | None = None):
    """Collapse, transport and split: returns ``(hat, GG, DiffHomotopy)``."""
    hat = collapse(sq)
    GG = hat_transport(hat, arity_cap)
    cap = hat.arity_cap if arity_cap is None else arity_cap
    D = DiffHomotopy.from_hat(GG, sq.edge_algebra(0).with_cap(cap),
                              sq.edge_algebra(1).with_cap(cap))
    return hat, GG, D


__all__ = [
    "SquareFamily", "HatFamily", "HatMorphism", "DiffHomotopy", "SquareError",
    "collapse", "hat_mc_defect", "hat_defect_is_zero", "hat_transport",
    "hat_morphism_defect", "diff_homotopy_defect", "classical_candidate",
    "random_square", "constant_square", "square_homotopy", "form_degree",
]
