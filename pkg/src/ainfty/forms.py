"""Polynomial differential forms on the square with multilinear-map coefficients.

A :class:`FormMap` is a finite sum ``sum w(s, t) (x) f`` where ``w`` runs over
the form monomials ``1, ds, dt, ds^dt`` times monomials ``s^i t^j`` and ``f``
is a multilinear map.  Its *degree* is the total degree: form degree plus the
shifted degree of ``f``.  Composition follows the Koszul rule

    (w (x) f) o (v (x) g) = (-1)^(||f|| |v|) (w ^ v) (x) (f o g)

which makes the forms-valued cochains a dg Lie algebra under the commutator
of the pre-Lie product and the exterior derivative.  Intervals use only the
variable ``s``.
"""

from __future__ import annotations

from math import comb

import numpy as np

from .graded import (ONE, ZERO, GradedSpace, GradingError, MultiMap, is_zero_array,
                     plug, scalar, zeros)

DS = 1
DT = 2
VARS = ("s", "t")
_VAR_MASK = {"s": DS, "t": DT}
_MASK_NAME = {0: "1", DS: "ds", DT: "dt", DS | DT: "ds^dt"}
_NAME_MASK = {v: k for k, v in _MASK_NAME.items()}


def form_degree(mask: int) -> int:
    return bin(mask).count("1")


def wedge(m1: int, m2: int):
    """Sign and mask of ``m1 ^ m2``; sign 0 when the product vanishes."""
    if m1 & m2:
        return 0, 0
    sign = -1 if (m1 & DT and m2 & DS) else 1
    return sign, m1 | m2


def mask_name(mask: int) -> str:
    return _MASK_NAME[mask]


def parse_mask(name: str) -> int:
    try:
        return _NAME_MASK[name.replace(" ", "").replace("∧", "^")]
    except KeyError:
        raise GradingError(f"unknown form monomial {name!r}") from None


class FormMap:
    """Homogeneous form-valued map of fixed arity and total degree.

    ``terms`` maps ``(mask, i, j)`` to the coefficient table of
    ``s^i t^j`` times the form monomial ``mask``.
    """

    __slots__ = ("source", "target", "arity", "degree", "terms")

    def __init__(self, source: GradedSpace, arity: int, degree: int, terms=None,
                 target: GradedSpace | None = None):
        self.source = source
        self.target = source if target is None else target
        self.arity = arity
        self.degree = degree
        self.terms = {}
        for key, table in (terms or {}).items():
            if not is_zero_array(table):
                self.terms[key] = table

    # construction --------------------------------------------------------
    @classmethod
    def zero(cls, source, arity, degree, target=None):
        return cls(source, arity, degree, target=target)

    @classmethod
    def constant(cls, f: MultiMap, mask: int = 0, exps=(0, 0), coeff=ONE):
        return cls(f.source, f.arity, f.degree + form_degree(mask),
                   {(mask,) + tuple(exps): f.table * scalar(coeff)}, target=f.target)

    @classmethod
    def from_polynomial(cls, f: MultiMap, poly: dict, mask: int = 0):
        """``sum_{(i,j)} c_ij s^i t^j (x) f`` for a scalar polynomial ``poly``."""
        terms = {(mask, i, j): f.table * scalar(c) for (i, j), c in poly.items()}
        return cls(f.source, f.arity, f.degree + form_degree(mask), terms, target=f.target)

    def map_shift(self, mask: int) -> int:
        return self.degree - form_degree(mask) - self.arity + 1

    def _new(self, terms, degree=None):
        return FormMap(self.source, self.arity, self.degree if degree is None else degree,
                       terms, self.target)

    # linear structure ----------------------------------------------------
    def _check(self, other):
        if (self.arity != other.arity or self.degree != other.degree
                or self.source != other.source or self.target != other.target):
            raise GradingError("form maps differ in arity, degree or spaces")

    def __add__(self, other):
        self._check(other)
        terms = dict(self.terms)
        for k, v in other.terms.items():
            terms[k] = terms[k] + v if k in terms else v
        return self._new(terms)

    def __neg__(self):
        return self._new({k: -v for k, v in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        c = scalar(c)
        if c == 0:
            return self._new({})
        return self._new({k: v * c for k, v in self.terms.items()})

    def __rmul__(self, c):
        return self.scale(c)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        if not isinstance(other, FormMap):
            return NotImplemented
        try:
            return (self - other).is_zero()
        except GradingError:
            return False

    __hash__ = None

    def masks(self):
        return sorted({k[0] for k in self.terms})

    def max_exponents(self):
        if not self.terms:
            return (0, 0)
        return (max(k[1] for k in self.terms), max(k[2] for k in self.terms))

    def __repr__(self):
        parts = sorted({(mask_name(k[0]), k[1], k[2]) for k in self.terms})
        return f"FormMap(arity={self.arity}, degree={self.degree}, terms={parts})"

    # forms ------------------------------------------------------------------
    def select(self, mask: int) -> "FormMap":
        return self._new({k: v for k, v in self.terms.items() if k[0] == mask})

    def with_form_degree(self, m: int) -> "FormMap":
        return self._new({k: v for k, v in self.terms.items() if form_degree(k[0]) == m})

    def strip(self, var: str) -> "FormMap":
        """Coefficient of the 1-form ``d var`` written on the left."""
        bit = _VAR_MASK[var]
        terms = {}
        for (mask, i, j), v in self.terms.items():
            if mask & bit:
                rest = mask & ~bit
                sign, _ = wedge(bit, rest)
                terms[(rest, i, j)] = v * sign
        return self._new(terms, self.degree - 1)

    def prepend(self, var: str) -> "FormMap":
        """``d var ^ self``."""
        bit = _VAR_MASK[var]
        terms = {}
        for (mask, i, j), v in self.terms.items():
            sign, m = wedge(bit, mask)
            if sign:
                terms[(m, i, j)] = v * sign
        return self._new(terms, self.degree + 1)

    def d(self, var: str | None = None) -> "FormMap":
        """Exterior derivative (optionally only the ``var`` direction)."""
        terms = {}
        for name in (VARS if var is None else (var,)):
            bit = _VAR_MASK[name]
            for (mask, i, j), v in self.terms.items():
                e = i if name == "s" else j
                if e == 0:
                    continue
                sign, m = wedge(bit, mask)
                if not sign:
                    continue
                key = (m, i - 1, j) if name == "s" else (m, i, j - 1)
                val = v * (sign * e)
                terms[key] = terms[key] + val if key in terms else val
        return self._new(terms, self.degree + 1)

    def partial(self, var: str) -> "FormMap":
        terms = {}
        for (mask, i, j), v in self.terms.items():
            if var == "s" and i:
                terms[(mask, i - 1, j)] = v * i
            elif var == "t" and j:
                terms[(mask, i, j - 1)] = v * j
        return self._new(terms)

    def antiderivative(self, var: str, lower=0) -> "FormMap":
        """Coefficient-wise ``int_lower^var`` (no form bookkeeping)."""
        lower = scalar(lower)
        terms = {}
        for (mask, i, j), v in self.terms.items():
            e = i if var == "s" else j
            up = (mask, i + 1, j) if var == "s" else (mask, i, j + 1)
            c = ONE / (e + 1)
            terms[up] = terms[up] + v * c if up in terms else v * c
            if lower != 0:
                low = (mask, 0, j) if var == "s" else (mask, i, 0)
                val = -v * c * lower ** (e + 1)
                terms[low] = terms[low] + val if low in terms else val
        return self._new(terms)

    def substitute(self, var: str, value) -> "FormMap":
        """Set ``var`` to a rational constant (forms untouched)."""
        value = scalar(value)
        terms = {}
        for (mask, i, j), v in self.terms.items():
            e = i if var == "s" else j
            key = (mask, 0, j) if var == "s" else (mask, i, 0)
            val = v * (value ** e)
            terms[key] = terms[key] + val if key in terms else val
        return self._new(terms)

    def reparametrize(self, var: str, offset, scale_) -> "FormMap":
        """Pull back along ``var -> offset + scale * var`` (``d var`` scales too)."""
        a, b = scalar(offset), scalar(scale_)
        bit = _VAR_MASK[var]
        terms = {}
        for (mask, i, j), v in self.terms.items():
            e = i if var == "s" else j
            fac = b if mask & bit else ONE
            for k in range(e + 1):
                c = comb(e, k) * a ** (e - k) * b ** k * fac
                if c == 0:
                    continue
                key = (mask, k, j) if var == "s" else (mask, i, k)
                terms[key] = terms[key] + v * c if key in terms else v * c
        return self._new(terms)

    def multiply_poly(self, poly: dict) -> "FormMap":
        terms = {}
        for (mask, i, j), v in self.terms.items():
            for (a, b), c in poly.items():
                key = (mask, i + a, j + b)
                val = v * scalar(c)
                terms[key] = terms[key] + val if key in terms else val
        return self._new(terms)

    def coefficient(self, mask: int = 0, s=None, t=None) -> MultiMap:
        """Evaluate the ``mask`` coefficient at a point as a :class:`MultiMap`."""
        out = zeros((self.target.dim,) + (self.source.dim,) * self.arity)
        for (m, i, j), v in self.terms.items():
            if m != mask:
                continue
            c = ONE
            if i:
                if s is None:
                    raise GradingError("coefficient depends on s; give a value")
                c *= scalar(s) ** i
            if j:
                if t is None:
                    raise GradingError("coefficient depends on t; give a value")
                c *= scalar(t) ** j
            out = out + v * c
        return MultiMap(self.source, self.arity, self.map_shift(mask), out,
                        target=self.target, check=False)

    def act(self, rho: np.ndarray, rho_inv: np.ndarray) -> "FormMap":
        """``rho o f o (rho^-1)^{(x) n}`` for a degree-0 automorphism ``rho``."""
        terms = {}
        for key, v in self.terms.items():
            terms[key] = conjugate_table(v, rho, rho_inv)
        return self._new(terms)

    # composition ---------------------------------------------------------
    def _plug(self, axis: int, inner: "FormMap", degree: int) -> dict:
        """Insert ``inner`` at ``axis`` of a partial composite of total ``degree``."""
        out = {}
        for (m1, i1, j1), v1 in self.terms.items():
            outer_deg = degree - form_degree(m1)
            for (m2, i2, j2), v2 in inner.terms.items():
                sign, m = wedge(m1, m2)
                if not sign:
                    continue
                fd = form_degree(m2)
                if (outer_deg * fd) % 2:
                    sign = -sign
                inner_deg = inner.degree - fd
                table = plug(v1, axis, v2, inner.arity, inner.source, inner_deg % 2 == 1)
                key = (m, i1 + i2, j1 + j2)
                val = table if sign == 1 else -table
                out[key] = out[key] + val if key in out else val
        return out

    def insert(self, other: "FormMap", j: int) -> "FormMap":
        if not 0 <= j < self.arity:
            raise IndexError(f"slot {j} out of range for arity {self.arity}")
        if other.target != self.source:
            raise GradingError("inner map does not land in the outer source")
        terms = self._plug(1 + j, other, self.degree)
        return FormMap(other.source, self.arity + other.arity - 1,
                       self.degree + other.degree, terms, self.target)

    def circle(self, other: "FormMap") -> "FormMap":
        out = FormMap(other.source, self.arity + other.arity - 1,
                      self.degree + other.degree, {}, self.target)
        for j in range(self.arity):
            out = out + self.insert(other, j)
        return out

    def bracket(self, other: "FormMap") -> "FormMap":
        a = self.circle(other)
        b = other.circle(self)
        return a + b if (self.degree * other.degree) % 2 else a - b


def compose_forms(f: FormMap, gs) -> FormMap:
    """``f o (g_1 (x) ... (x) g_k)`` with Koszul signs for maps and forms."""
    if len(gs) != f.arity:
        raise GradingError("need one inner map per input")
    source = gs[0].source if gs else f.source
    partial = f
    pos = 1
    degree = f.degree
    for g in gs:
        if g.target != f.source or g.source != source:
            raise GradingError("inner maps must share a source mapping into the outer source")
        terms = partial._plug(pos, g, degree)
        degree += g.degree
        pos += g.arity
        partial = FormMap(source, 0, degree, terms, f.target)
    return FormMap(source, pos - 1, degree, partial.terms, f.target)


def conjugate_table(table: np.ndarray, rho: np.ndarray, rho_inv: np.ndarray) -> np.ndarray:
    out = np.tensordot(rho, table, axes=([1], [0]))
    for k in range(1, table.ndim):
        out = np.moveaxis(np.tensordot(out, rho_inv, axes=([k], [0])), -1, k)
    return out


class FormCochain:
    """A sum of :class:`FormMap` pieces of common total degree, keyed by arity."""

    def __init__(self, space: GradedSpace, degree: int, arity_cap: int, parts=None):
        self.space = space
        self.degree = degree
        self.arity_cap = arity_cap
        self.parts = {}
        for n, f in (parts or {}).items():
            if f.degree != degree or f.arity != n:
                raise GradingError(f"piece of arity {f.arity}/degree {f.degree} keyed {n}")
            if n > arity_cap:
                continue
            if not f.is_zero():
                self.parts[n] = f

    def part(self, n: int) -> FormMap:
        return self.parts.get(n) or FormMap.zero(self.space, n, self.degree)

    def _new(self, parts, degree=None):
        return FormCochain(self.space, self.degree if degree is None else degree,
                           self.arity_cap, parts)

    def __add__(self, other):
        parts = dict(self.parts)
        for n, f in other.parts.items():
            parts[n] = parts[n] + f if n in parts else f
        return self._new(parts)

    def __neg__(self):
        return self._new({n: -f for n, f in self.parts.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, c):
        return self._new({n: f.scale(c) for n, f in self.parts.items()})

    def __rmul__(self, c):
        return self.scale(c)

    def map(self, fn, degree=None):
        return self._new({n: fn(f) for n, f in self.parts.items()}, degree)

    def d(self, var=None):
        return self.map(lambda f: f.d(var), self.degree + 1)

    def bracket(self, other: "FormCochain") -> "FormCochain":
        parts = {}
        for n1, f in self.parts.items():
            for n2, g in other.parts.items():
                n = n1 + n2 - 1
                if n < 0 or n > self.arity_cap:
                    continue
                b = f.bracket(g)
                parts[n] = parts[n] + b if n in parts else b
        return self._new(parts, self.degree + other.degree)

    def is_zero(self):
        return not self.parts

    def __eq__(self, other):
        if not isinstance(other, FormCochain):
            return NotImplemented
        return (self - other).is_zero()

    __hash__ = None

    def filter_parts(self, keep):
        """Keep only ``(arity, mask, shift)`` components accepted by ``keep``."""
        parts = {}
        for n, f in self.parts.items():
            terms = {k: v for k, v in f.terms.items() if keep(n, k[0], f.map_shift(k[0]))}
            parts[n] = f._new(terms)
        return self._new(parts)

    def component(self, m: int, n: int) -> FormMap:
        """Bidegree ``(m, n)``: form degree ``m`` and arity ``n``."""
        return self.part(n).with_form_degree(m)

    def __repr__(self):
        return f"FormCochain(degree={self.degree}, arities={sorted(self.parts)})"
