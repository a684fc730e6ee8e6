"""Exact scalars, graded spaces and multilinear maps.

Every map is stored as a dense object array of ``mpq`` rationals with axis
layout ``(output, input_1, ..., input_n)``.  Signs follow the Koszul rule for
*shifted* degrees: a basis element ``a`` of degree ``|a|`` contributes
``|a| - 1`` whenever a map of odd shifted degree is moved past it.
"""

from __future__ import annotations

from fractions import Fraction
from functools import lru_cache

import numpy as np
from gmpy2 import mpq

ZERO = mpq(0)
ONE = mpq(1)


class GradingError(ValueError):
    """Raised when a map or element violates its declared degree."""


def scalar(x) -> mpq:
    """Coerce ints, Fractions, mpq or ``"num/den"`` strings to ``mpq``."""
    if isinstance(x, str):
        text = x.strip()
        if "/" in text:
            num, den = text.split("/", 1)
            num, den = int(num), int(den)
            if den == 0:
                raise ZeroDivisionError(f"zero denominator in {x!r}")
            return mpq(num, den)
        return mpq(int(text))
    if isinstance(x, Fraction):
        return mpq(x.numerator, x.denominator)
    if isinstance(x, float):
        raise TypeError("floating point values are not exact scalars")
    return mpq(x)


def format_scalar(x) -> str:
    x = mpq(x)
    if x.denominator == 1:
        return str(x.numerator)
    return f"{x.numerator}/{x.denominator}"


def zeros(shape) -> np.ndarray:
    return np.full(shape, ZERO, dtype=object)


def as_object_array(values) -> np.ndarray:
    arr = np.array(values, dtype=object)
    flat = arr.reshape(-1)
    for k, v in enumerate(flat):
        flat[k] = scalar(v)
    return arr


def is_zero_array(arr: np.ndarray) -> bool:
    return not np.any(arr != 0)


class GradedSpace:
    """Finite graded vector space with a labelled homogeneous basis."""

    def __init__(self, labels, degrees):
        labels = tuple(str(l) for l in labels)
        degrees = tuple(int(d) for d in degrees)
        if not labels:
            raise GradingError("a graded space needs at least one basis element")
        if len(labels) != len(degrees):
            raise GradingError("labels and degrees differ in length")
        if len(set(labels)) != len(labels):
            raise GradingError("basis labels must be unique")
        self.labels = labels
        self.degrees = degrees
        self.index = {l: i for i, l in enumerate(labels)}
        self.degree_array = np.array(degrees, dtype=np.int64)
        # parity of the shifted degree |a| - 1
        self.parity = (self.degree_array - 1) % 2
        self.sign = np.where(self.parity == 1, -1, 1).astype(np.int64)

    @property
    def dim(self) -> int:
        return len(self.labels)

    @property
    def degree_range(self) -> tuple[int, int]:
        return min(self.degrees), max(self.degrees)

    def __eq__(self, other):
        return (isinstance(other, GradedSpace) and self.labels == other.labels
                and self.degrees == other.degrees)

    def __hash__(self):
        return hash((self.labels, self.degrees))

    def __repr__(self):
        body = ", ".join(f"{l}:{d}" for l, d in zip(self.labels, self.degrees))
        return f"GradedSpace({body})"

    def basis(self, label) -> "Element":
        vec = zeros(self.dim)
        vec[self.index[label]] = ONE
        return Element(self, vec)


def koszul_prefix_sign(degrees, j: int) -> int:
    """Return ``(-1)**sum(degrees[i] - 1 for i < j)``."""
    if j < 0 or j > len(degrees):
        raise IndexError(f"prefix length {j} out of range for {len(degrees)} inputs")
    return -1 if sum(d - 1 for d in degrees[:j]) % 2 else 1


class Element:
    """A vector in a graded space, optionally tagged with a degree."""

    __slots__ = ("space", "coeffs", "degree")

    def __init__(self, space: GradedSpace, coeffs, degree: int | None = None):
        coeffs = np.asarray(coeffs, dtype=object)
        if coeffs.shape != (space.dim,):
            raise GradingError("coefficient vector has the wrong length")
        self.space = space
        self.coeffs = coeffs
        if degree is None:
            self.degree = self.homogeneous_degree()
        else:
            nz = np.nonzero(coeffs != 0)[0]
            if any(space.degrees[i] != degree for i in nz):
                raise GradingError(f"element is not homogeneous of degree {degree}")
            self.degree = degree

    def homogeneous_degree(self):
        nz = np.nonzero(self.coeffs != 0)[0]
        degs = {self.space.degrees[i] for i in nz}
        if len(degs) == 1:
            return degs.pop()
        return None

    def is_zero(self) -> bool:
        return is_zero_array(self.coeffs)

    def __add__(self, other):
        return Element(self.space, self.coeffs + other.coeffs)

    def __sub__(self, other):
        return Element(self.space, self.coeffs - other.coeffs)

    def __rmul__(self, c):
        return Element(self.space, self.coeffs * scalar(c))

    def __eq__(self, other):
        return (isinstance(other, Element) and self.space == other.space
                and not np.any(self.coeffs != other.coeffs))

    def __repr__(self):
        terms = [f"{format_scalar(c)}*{l}" for c, l in zip(self.coeffs, self.space.labels) if c != 0]
        return " + ".join(terms) if terms else "0"


@lru_cache(maxsize=None)
def _degree_mask(source: GradedSpace, target: GradedSpace, arity: int, shift: int):
    total = target.degree_array.reshape((-1,) + (1,) * arity)
    for k in range(arity):
        shape = [1] * (arity + 1)
        shape[k + 1] = source.dim
        total = total - source.degree_array.reshape(shape)
    return np.broadcast_to(total, (target.dim,) + (source.dim,) * arity) == shift


@lru_cache(maxsize=None)
def prefix_sign_tensor(space: GradedSpace, j: int) -> np.ndarray:
    """Signs ``(-1)**(sum of shifted degrees)`` over ``j`` leading inputs."""
    out = np.ones((), dtype=np.int64)
    for _ in range(j):
        out = np.multiply.outer(out, space.sign)
    return out


def plug(table: np.ndarray, axis: int, inner: np.ndarray, inner_arity: int,
         space: GradedSpace | None = None, odd: bool = False) -> np.ndarray:
    """Substitute the output of ``inner`` into input ``axis`` of ``table``.

    The inputs of ``inner`` take the place of that axis.  When ``odd`` is set,
    entries are multiplied by the Koszul sign of the inputs sitting on axes
    ``1 .. axis-1`` (all of which must belong to ``space``).
    """
    ndim = table.ndim
    out = np.tensordot(table, inner, axes=([axis], [0]))
    # axes now: 0..axis-1, axis+1..ndim-1 (shifted down by one), then inner inputs
    rest = ndim - 1 - axis
    order = (list(range(axis)) + list(range(ndim - 1, ndim - 1 + inner_arity))
             + list(range(axis, axis + rest)))
    out = np.transpose(out, order)
    if odd and axis > 1:
        sign = prefix_sign_tensor(space, axis - 1)
        shape = (1,) + sign.shape + (1,) * (out.ndim - 1 - sign.ndim)
        out = out * sign.reshape(shape)
    return out


class MultiMap:
    """A multilinear map ``V^{(x) n} -> W`` of fixed degree shift.

    ``shift`` is the internal degree change (output degree equals the sum of
    input degrees plus ``shift``); ``degree`` is the shifted (Hochschild)
    degree ``shift + arity - 1`` that governs every Koszul sign.
    """

    __slots__ = ("source", "target", "arity", "shift", "table")

    def __init__(self, source: GradedSpace, arity: int, shift: int, table=None,
                 target: GradedSpace | None = None, check: bool = True):
        target = source if target is None else target
        shape = (target.dim,) + (source.dim,) * arity
        if table is None:
            table = zeros(shape)
        else:
            table = np.asarray(table, dtype=object)
            if table.shape != shape:
                raise GradingError(f"table shape {table.shape} != expected {shape}")
        if arity < 0:
            raise GradingError("arity must be non-negative")
        self.source = source
        self.target = target
        self.arity = arity
        self.shift = shift
        self.table = table
        if check:
            bad = (table != 0) & ~_degree_mask(source, target, arity, shift)
            if np.any(bad):
                idx = tuple(int(i) for i in np.argwhere(bad)[0])
                raise GradingError(
                    f"entry {self._describe(idx)} is not of shift {shift}")

    # construction -----------------------------------------------------
    @classmethod
    def zero(cls, source, arity, shift, target=None):
        return cls(source, arity, shift, target=target, check=False)

    @classmethod
    def identity(cls, space):
        table = zeros((space.dim, space.dim))
        for i in range(space.dim):
            table[i, i] = ONE
        return cls(space, 1, 0, table, check=False)

    @classmethod
    def linear(cls, source, matrix, target=None):
        """Degree-0 linear map given by a (target x source) matrix."""
        return cls(source, 1, 0, as_object_array(matrix), target=target)

    @classmethod
    def from_entries(cls, source, arity, shift, entries, target=None):
        """Build from ``{(input labels...): {output label: coeff}}``."""
        target = source if target is None else target
        table = zeros((target.dim,) + (source.dim,) * arity)
        for inputs, out in entries.items():
            if isinstance(inputs, str):
                inputs = (inputs,)
            inputs = tuple(inputs)
            if len(inputs) != arity:
                raise GradingError(f"entry {inputs} does not have {arity} inputs")
            idx = tuple(source.index[l] for l in inputs)
            for label, c in out.items():
                table[(target.index[label],) + idx] += scalar(c)
        return cls(source, arity, shift, table, target=target)

    def entries(self):
        """Sparse view ``{(input labels): {output label: coeff}}``."""
        result = {}
        for idx in np.argwhere(self.table != 0):
            idx = tuple(int(i) for i in idx)
            key = tuple(self.source.labels[i] for i in idx[1:])
            result.setdefault(key, {})[self.target.labels[idx[0]]] = self.table[idx]
        return result

    # algebra -----------------------------------------------------------
    @property
    def degree(self) -> int:
        return self.shift + self.arity - 1

    def _like(self, table):
        return MultiMap(self.source, self.arity, self.shift, table, self.target, check=False)

    def _compatible(self, other):
        if (self.source != other.source or self.target != other.target
                or self.arity != other.arity or self.shift != other.shift):
            raise GradingError("maps differ in space, arity or shift")

    def __add__(self, other):
        self._compatible(other)
        return self._like(self.table + other.table)

    def __sub__(self, other):
        self._compatible(other)
        return self._like(self.table - other.table)

    def __neg__(self):
        return self._like(-self.table)

    def __rmul__(self, c):
        return self._like(self.table * scalar(c))

    def __eq__(self, other):
        if not isinstance(other, MultiMap):
            return NotImplemented
        return (self.source == other.source and self.target == other.target
                and self.arity == other.arity and self.shift == other.shift
                and not np.any(self.table != other.table))

    __hash__ = None

    def is_zero(self) -> bool:
        return is_zero_array(self.table)

    def witness(self):
        """First nonzero entry as ``(input labels, output label, coeff)``."""
        nz = np.argwhere(self.table != 0)
        if len(nz) == 0:
            return None
        idx = tuple(int(i) for i in nz[0])
        return (tuple(self.source.labels[i] for i in idx[1:]),
                self.target.labels[idx[0]], self.table[idx])

    def _describe(self, idx):
        ins = ",".join(self.source.labels[i] for i in idx[1:])
        return f"({ins}) -> {self.target.labels[idx[0]]}"

    def __call__(self, *args):
        return evaluate(self, list(args))

    def __repr__(self):
        return (f"MultiMap(arity={self.arity}, shift={self.shift}, "
                f"nonzero={int(np.count_nonzero(self.table != 0))})")


def evaluate(f: MultiMap, args) -> Element:
    """Apply ``f`` to homogeneous elements; multilinear in every slot."""
    if len(args) != f.arity:
        raise GradingError(f"map of arity {f.arity} given {len(args)} arguments")
    degree = f.shift
    out = f.table
    for a in args:
        if a.degree is None:
            if a.is_zero():
                return Element(f.target, zeros(f.target.dim))
            raise GradingError("arguments must be homogeneous")
        degree += a.degree
    for a in reversed(args):
        out = np.tensordot(out, a.coeffs, axes=([out.ndim - 1], [0]))
    vec = np.asarray(out, dtype=object).reshape(f.target.dim)
    return Element(f.target, vec, degree if not is_zero_array(vec) else None)


def insert(f: MultiMap, g: MultiMap, j: int, signed: bool = True) -> MultiMap:
    """``f(a_1, .., a_j, g(..), ..)`` with sign ``(-1)**(||g|| * shifted prefix)``."""
    if not 0 <= j < f.arity:
        raise IndexError(f"slot {j} out of range for arity {f.arity}")
    if g.target != f.source:
        raise GradingError("inner map does not land in the source of the outer map")
    odd = signed and g.degree % 2 == 1
    table = plug(f.table, 1 + j, g.table, g.arity, f.source, odd)
    return MultiMap(g.source, f.arity + g.arity - 1, f.shift + g.shift, table,
                    target=f.target, check=False)


def compose_tensor(f: MultiMap, gs) -> MultiMap:
    """``f o (g_1 (x) ... (x) g_k)`` with the Koszul tensor sign."""
    if len(gs) != f.arity:
        raise GradingError("need one inner map per input of the outer map")
    table = f.table
    pos = 1
    shift = f.shift
    source = gs[0].source if gs else f.source
    for g in gs:
        if g.target != f.source or g.source != source:
            raise GradingError("inner maps must map a common source into the outer source")
        table = plug(table, pos, g.table, g.arity, source, g.degree % 2 == 1)
        pos += g.arity
        shift += g.shift
    return MultiMap(source, pos - 1, shift, table, target=f.target, check=False)
