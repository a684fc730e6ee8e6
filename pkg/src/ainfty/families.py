"""Families of A-infinity structures as Maurer-Cartan elements on gridded bases.

A field on a grid stores one :class:`FormCochain` per cell, written in the
global coordinates ``s`` (and ``t`` on squares).  Degree-1 fields whose
Maurer-Cartan defect ``d a + 1/2 [a, a]`` vanishes are families; their
0-form parts are the fibrewise operations and their 1-form parts drive
parallel transport.
"""

from __future__ import annotations

from math import factorial

from gmpy2 import mpq

from .algebra import AInfAlgebra
from .forms import DS, DT, FormCochain, FormMap, form_degree
from .graded import GradedSpace, GradingError, MultiMap, scalar


class GridError(ValueError):
    pass


class Grid1D:
    """Strictly increasing rational breakpoints from 0 to 1."""

    def __init__(self, breakpoints=(0, 1)):
        pts = tuple(scalar(b) for b in breakpoints)
        if len(pts) < 2 or pts[0] != 0 or pts[-1] != 1:
            raise GridError("breakpoints must start at 0 and end at 1")
        if any(b <= a for a, b in zip(pts, pts[1:])):
            raise GridError("breakpoints must be strictly increasing")
        self.breakpoints = pts

    @classmethod
    def uniform(cls, cells: int):
        return cls([mpq(k, cells) for k in range(cells + 1)])

    @property
    def ncells(self):
        return len(self.breakpoints) - 1

    def cell(self, k):
        return self.breakpoints[k], self.breakpoints[k + 1]

    def cell_indices(self):
        return list(range(self.ncells))

    def locate(self, x, side: str = "right") -> int:
        """Cell containing ``x``; at a breakpoint pick the cell on ``side``."""
        x = scalar(x)
        if x < 0 or x > 1:
            raise GridError(f"{x} outside [0, 1]")
        for k in range(self.ncells):
            a, b = self.cell(k)
            if side == "right" and a <= x < b:
                return k
            if side == "left" and a < x <= b:
                return k
        return self.ncells - 1 if x == 1 else 0

    def __eq__(self, other):
        return isinstance(other, Grid1D) and self.breakpoints == other.breakpoints

    def __repr__(self):
        return f"Grid1D({[str(b) for b in self.breakpoints]})"


class Grid2D:
    """Product partition of the unit square; ``s`` is the first factor."""

    def __init__(self, s_breaks=(0, 1), t_breaks=(0, 1)):
        self.s = s_breaks if isinstance(s_breaks, Grid1D) else Grid1D(s_breaks)
        self.t = t_breaks if isinstance(t_breaks, Grid1D) else Grid1D(t_breaks)

    def cell_indices(self):
        return [(i, j) for i in range(self.s.ncells) for j in range(self.t.ncells)]

    def __eq__(self, other):
        return isinstance(other, Grid2D) and self.s == other.s and self.t == other.t

    def __repr__(self):
        return f"Grid2D(s={self.s!r}, t={self.t!r})"


class FormField:
    """Piecewise-polynomial element of ``Omega*(grid) (x) g`` of one total degree."""

    def __init__(self, grid, space: GradedSpace, degree: int, arity_cap: int, cells: dict):
        self.grid = grid
        self.space = space
        self.degree = degree
        self.arity_cap = arity_cap
        missing = set(grid.cell_indices()) - set(cells)
        if missing:
            raise GridError(f"no data for cells {sorted(missing)}")
        self.cells = {}
        for idx, c in cells.items():
            if c.degree != degree:
                raise GradingError(f"cell {idx} has degree {c.degree}, expected {degree}")
            self.cells[idx] = c
        self.dimension = 1 if isinstance(grid, Grid1D) else 2

    @classmethod
    def constant(cls, grid, cochain: FormCochain):
        return cls(grid, cochain.space, cochain.degree, cochain.arity_cap,
                   {k: cochain for k in grid.cell_indices()})

    @classmethod
    def zero(cls, grid, space, degree, arity_cap):
        return cls.constant(grid, FormCochain(space, degree, arity_cap))

    def _new(self, cells, degree=None):
        return FormField(self.grid, self.space, self.degree if degree is None else degree,
                         self.arity_cap, cells)

    def map(self, fn, degree=None):
        return self._new({k: fn(c) for k, c in self.cells.items()}, degree)

    def _zip(self, other, fn, degree=None):
        if self.grid != other.grid:
            raise GridError("fields live on different grids")
        return self._new({k: fn(c, other.cells[k]) for k, c in self.cells.items()}, degree)

    def __add__(self, other):
        return self._zip(other, lambda a, b: a + b)

    def __sub__(self, other):
        return self._zip(other, lambda a, b: a - b)

    def __neg__(self):
        return self.map(lambda c: -c)

    def scale(self, c):
        return self.map(lambda x: x.scale(c))

    def __rmul__(self, c):
        return self.scale(c)

    def d(self, var=None):
        """Exterior derivative; ``var`` restricts it to one coordinate."""
        return self.map(lambda c: c.d(var), self.degree + 1)

    def bracket(self, other):
        return self._zip(other, lambda a, b: a.bracket(b), self.degree + other.degree)

    def is_zero(self):
        return all(c.is_zero() for c in self.cells.values())

    def __eq__(self, other):
        if not isinstance(other, FormField):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def filter_parts(self, keep):
        return self.map(lambda c: c.filter_parts(keep))

    def multiply_poly(self, poly):
        return self.map(lambda c: c.map(lambda f: f.multiply_poly(poly)))

    def _check_forms(self):
        if self.dimension == 2:
            return
        for c in self.cells.values():
            for f in c.parts.values():
                if any(mask & DT for mask in f.masks()):
                    raise GradingError("interval fields carry no dt forms")

    def bidegrees(self):
        """Sorted ``(m, n)`` pairs carrying a nonzero component somewhere."""
        out = set()
        for c in self.cells.values():
            for n, f in c.parts.items():
                for mask in f.masks():
                    out.add((form_degree(mask), n))
        return sorted(out)

    def component(self, m: int, n: int) -> "FormField":
        return self.filter_parts(lambda a, mask, shift: a == n and form_degree(mask) == m)

    def at(self, s=None, t=None, side="right") -> FormCochain:
        """Cochain obtained by evaluating the polynomial of the cell at a point."""
        if self.dimension == 1:
            idx = self.grid.locate(s, side)
            return self.cells[idx].map(lambda f: f.substitute("s", s))
        idx = (self.grid.s.locate(s, side), self.grid.t.locate(t, side))
        return self.cells[idx].map(lambda f: f.substitute("s", s).substitute("t", t))

    def act(self, rho, rho_inv):
        return self.map(lambda c: c.map(lambda f: f.act(rho, rho_inv)))

    def continuity_defects(self):
        """Interior breakpoints where a tangential component jumps."""
        bad = []
        if self.dimension == 1:
            pts = self.grid.breakpoints
            for k in range(1, len(pts) - 1):
                left = self.cells[k - 1].map(lambda f: f.substitute("s", pts[k]).select(0))
                right = self.cells[k].map(lambda f: f.substitute("s", pts[k]).select(0))
                if not left == right:
                    bad.append(("s", pts[k]))
            return bad
        for axis, grid1 in (("s", self.grid.s), ("t", self.grid.t)):
            tangent = DT if axis == "s" else DS
            pts = grid1.breakpoints
            for k in range(1, len(pts) - 1):
                for idx in self.grid.cell_indices():
                    pos = idx[0] if axis == "s" else idx[1]
                    if pos != k:
                        continue
                    prev = (k - 1, idx[1]) if axis == "s" else (idx[0], k - 1)

                    def restrict(c, p=pts[k]):
                        return c.map(lambda f: f.substitute(axis, p).select(0)
                                     + f.substitute(axis, p).select(tangent))

                    if not restrict(self.cells[prev]) == restrict(self.cells[idx]):
                        bad.append((axis, pts[k], idx))
        return bad

    def __repr__(self):
        return f"FormField(degree={self.degree}, grid={self.grid!r}, bidegrees={self.bidegrees()})"


class FamilyForm(FormField):
    """A degree-1 field meant to solve the Maurer-Cartan equation.

    ``unary_flat`` additionally requires the arity-1 one-form part to vanish.
    """

    def __init__(self, grid, space, arity_cap, cells, unary_flat: bool = True):
        super().__init__(grid, space, 1, arity_cap, cells)
        self.unary_flat = unary_flat
        self.validate_flags()

    @classmethod
    def from_field(cls, field: FormField, unary_flat=True):
        return cls(field.grid, field.space, field.arity_cap, field.cells, unary_flat)

    def validate_flags(self):
        for idx, c in self.cells.items():
            if 0 in c.parts:
                raise GradingError(f"cell {idx}: arity-0 components must vanish (flat family)")
            if self.unary_flat and 1 in c.parts:
                if any(form_degree(m) == 1 for m in c.parts[1].masks()):
                    raise GradingError(f"cell {idx}: the unary one-form part must vanish")
        self._check_forms()

    def fibre(self, s=None, t=None, side="right") -> AInfAlgebra:
        """The A-infinity algebra sitting over a point."""
        c = self.at(s, t, side)
        maps = {n: f.coefficient(0) for n, f in c.parts.items()
                if not f.select(0).is_zero()}
        return AInfAlgebra(self.space, maps, self.arity_cap)

    def one_form(self, var="s") -> FormField:
        """The ``d var`` coefficient (a degree-0 field of maps)."""
        return self.map(lambda c: c.map(lambda f: f.strip(var), 0), 0)


def d_nabla(field: FormField) -> FormField:
    """Cell-wise exterior derivative in the trivialised local system."""
    return field.d()


def form_bracket(a: FormField, b: FormField) -> FormField:
    return a.bracket(b)


def mc_defect(alpha: FormField) -> FormField:
    """``d alpha + 1/2 [alpha, alpha]``; zero exactly for families."""
    return alpha.d() + alpha.bracket(alpha).scale(mpq(1, 2))


def defect_report(defect: FormField) -> dict:
    """``{(m, n): witness}`` for every bidegree where the defect is nonzero.

    The witness is ``(cell, mask, (i, j), (inputs, output, coeff))`` for the
    first nonzero coefficient of ``s^i t^j`` in that bidegree.
    """
    out = {}
    for idx in sorted(defect.cells):
        for n, f in sorted(defect.cells[idx].parts.items()):
            for (mask, i, j), table in sorted(f.terms.items()):
                key = (form_degree(mask), n)
                if key in out:
                    continue
                m = MultiMap(f.source, n, f.map_shift(mask), table, f.target, check=False)
                out[key] = (idx, mask, (i, j), m.witness())
    return out


def is_mc(alpha: FormField) -> bool:
    return mc_defect(alpha).is_zero()


# -- filtered setting --------------------------------------------------------

def level_of_shift(shift: int) -> int:
    """Filtration level of a component of internal shift ``shift``."""
    return -shift


def field_level(x: FormField):
    """Lowest filtration level among the components of ``x`` (``None`` if zero)."""
    levels = [level_of_shift(f.map_shift(mask))
              for c in x.cells.values() for f in c.parts.values() for mask in f.masks()]
    return min(levels) if levels else None


class FilteredElement:
    """A field all of whose components sit in filtration level ``>= level``."""

    def __init__(self, field: FormField, level: int = 1):
        if level < 1:
            raise GradingError("filtration levels start at 1")
        low = field_level(field)
        if low is not None and low < level:
            raise GradingError(f"component of level {low} below the declared level {level}")
        self.field = field
        self.level = level

    def bracket(self, other: "FilteredElement") -> "FilteredElement":
        return FilteredElement(self.field.bracket(other.field), self.level + other.level)


class GaugeElement(FilteredElement):
    """Degree-0 filtered field; ``gamma^{0,0} = gamma^{0,1} = gamma^{1,0} = 0`` by the level bound."""

    def __init__(self, field: FormField):
        if field.degree != 0:
            raise GradingError("gauge elements have total degree 0")
        super().__init__(field, 1)


def _field(x):
    return x.field if isinstance(x, FilteredElement) else x


class FilteredLie:
    """Negative-shift cochains around a fixed algebra ``mu`` with ``d_j = d + [mu, .]``.

    Elements are fields whose components all have shift ``<= -1``; the level
    of a component is minus its shift and brackets add levels.
    """

    def __init__(self, base: AInfAlgebra, grid):
        for k, f in base.maps.items():
            if k != 2 and not f.is_zero():
                raise GradingError("the filtered setting needs a base with only mu^2")
        self.base_algebra = base
        self.grid = grid
        self.arity_cap = base.arity_cap
        mu = FormCochain(base.space, 1, base.arity_cap,
                         {2: FormMap.constant(base.mu(2))})
        self.mu = FormField.constant(grid, mu)

    def check(self, x):
        """Reject elements with a component of shift above -1."""
        x = _field(x)
        for idx, c in x.cells.items():
            for n, f in c.parts.items():
                for mask in f.masks():
                    if f.map_shift(mask) > -1:
                        raise GradingError(
                            f"component (form {mask}, arity {n}) has shift "
                            f"{f.map_shift(mask)}; filtered elements need shift <= -1")
        return x

    def truncate(self, x: FormField, K: int) -> FormField:
        """Reduce modulo ``F_{K+1}``."""
        return x.filter_parts(lambda n, mask, shift: level_of_shift(shift) <= K)

    def d_j(self, x: FormField) -> FormField:
        # on an interval base the second variable is free for the path parameter
        var = "s" if isinstance(self.grid, Grid1D) else None
        return x.d(var) + self.mu.bracket(x)

    def mc_defect(self, alpha, K: int | None = None) -> FormField:
        alpha = _field(alpha)
        out = self.d_j(alpha) + alpha.bracket(alpha).scale(mpq(1, 2))
        return out if K is None else self.truncate(out, K)

    def infinitesimal(self, gamma: FormField, alpha: FormField) -> FormField:
        return gamma.bracket(alpha) - self.d_j(gamma)

    def gauge_exp(self, gamma, alpha0, K: int, check_mc: bool = True) -> FormField:
        """``exp(gamma) * alpha0`` modulo ``F_{K+1}``."""
        gamma, alpha0 = _field(gamma), _field(alpha0)
        if K < 1:
            raise GradingError("truncation level must be at least 1")
        self.check(gamma)
        self.check(alpha0)
        if gamma.degree != 0 or alpha0.degree != 1:
            raise GradingError("gauge needs a degree-0 gamma and a degree-1 alpha")
        if check_mc and not self.mc_defect(alpha0, K).is_zero():
            raise GradingError("alpha0 is not Maurer-Cartan modulo F_{K+1}")
        result = alpha0
        term = alpha0
        dgamma = self.truncate(self.d_j(gamma), K)
        dterm = dgamma
        result = result - dgamma
        for k in range(1, K + 1):
            term = self.truncate(gamma.bracket(term), K)
            dterm = self.truncate(gamma.bracket(dterm), K)
            if term.is_zero() and dterm.is_zero():
                break
            result = result + term.scale(mpq(1, factorial(k))) - dterm.scale(mpq(1, factorial(k + 1)))
        return self.truncate(result, K)

    def embed_path(self, gamma, alpha0, K: int):
        """``alpha_t`` on the square ``grid x I_t`` together with ``alpha_t - dt ^ gamma``."""
        gamma, alpha0 = _field(gamma), _field(alpha0)
        if not isinstance(self.grid, Grid1D):
            raise GridError("path checks are implemented over interval bases")
        square = Grid2D(self.grid, Grid1D())
        t_gamma = gamma.multiply_poly({(0, 1): 1})
        alpha_t = self.gauge_exp(t_gamma, alpha0, K, check_mc=False)
        lift = lambda f: FormField(square, f.space, f.degree, f.arity_cap,
                                   {(i, 0): f.cells[i] for i in self.grid.cell_indices()})
        alpha_sq = lift(alpha_t)
        gamma_dt = lift(gamma).map(lambda c: c.map(lambda f: f.prepend("t"), 1), 1)
        return alpha_t, alpha_sq - gamma_dt

    def mc_path_check(self, gamma, alpha0, K: int,
                      samples=(0, mpq(1, 3), mpq(1, 2), 1)) -> dict:
        """Check that ``alpha_t - dt ^ gamma`` is Maurer-Cartan modulo ``F_{K+1}``.

        Also compares ``d alpha_t / dt`` with ``-d_j gamma + [gamma, alpha_t]``
        at the sampled ``t``.
        """
        gamma, alpha0 = _field(gamma), _field(alpha0)
        alpha_t, path = self.embed_path(gamma, alpha0, K)
        sq_mu = FormField.constant(path.grid, self.mu.cells[0])
        defect = path.d() + sq_mu.bracket(path) + path.bracket(path).scale(mpq(1, 2))
        defect = self.truncate(defect, K)
        slice0 = alpha_t.map(lambda c: c.map(lambda f: f.substitute("t", 0))) == self.truncate(alpha0, K)
        deriv = alpha_t.map(lambda c: c.map(lambda f: f.partial("t")))
        ok = True
        for t in samples:
            at = lambda x: x.map(lambda c: c.map(lambda f: f.substitute("t", t)))
            rhs = self.truncate(self.infinitesimal(gamma, at(alpha_t)), K)
            if not at(deriv) == rhs:
                ok = False
        return {"defect_zero": defect.is_zero(), "defect_bidegrees": defect.bidegrees(),
                "slice0": slice0, "derivative": ok}


def eta_embed(f: MultiMap, grid, arity_cap: int) -> FormField:
    """Constant 0-form field with value ``f``."""
    c = FormCochain(f.source, f.degree, arity_cap, {f.arity: FormMap.constant(f)})
    return FormField.constant(grid, c)


def eta_embed_cochain(parts: dict, grid, arity_cap: int) -> FormField:
    """``eta`` of an inhomogeneous-arity cochain ``{arity: MultiMap}``."""
    degrees = {f.degree for f in parts.values()}
    if len(degrees) > 1:
        raise GradingError("cochain pieces must share a shifted degree")
    degree = degrees.pop() if degrees else 0
    c = FormCochain(next(iter(parts.values())).source if parts else None, degree, arity_cap,
                    {n: FormMap.constant(f) for n, f in parts.items()})
    return FormField.constant(grid, c)


def gauge_action(gamma: FormField, alpha: FormField, max_terms: int = 32) -> FormField:
    """``exp(gamma) * alpha`` for the plain exterior derivative.

    The series is summed until both ``ad_gamma`` chains vanish, which happens
    after finitely many steps when ``gamma`` raises arity or form degree.
    """
    if gamma.degree != 0 or alpha.degree != 1:
        raise GradingError("gauge needs a degree-0 gamma and a degree-1 alpha")
    term = alpha
    dterm = gamma.d()
    result = alpha - dterm
    for k in range(1, max_terms + 1):
        term = gamma.bracket(term)
        dterm = gamma.bracket(dterm)
        if term.is_zero() and dterm.is_zero():
            return result
        result = result + term.scale(mpq(1, factorial(k))) - dterm.scale(mpq(1, factorial(k + 1)))
    raise GradingError("ad(gamma) is not nilpotent within the term budget")
