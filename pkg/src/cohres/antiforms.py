"""
Differential forms in dz_1..dz_n, dzb_1..dzb_n with rational coefficients.

Monomials are stored in canonical order: all dz factors (increasing) followed
by all dzb factors (increasing).  Only the dbar operator is provided.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import numpy as np

from ._numeval import CompiledRational, power_table
from .polyring import (
    DEFAULT_POLE_FLOOR,
    Polynomial,
    RationalFunction,
    as_rational,
    format_rational,
)


class FormError(ValueError):
    pass


@dataclass(frozen=True, order=True)
class FormMonomial:
    hol: tuple = ()
    anti: tuple = ()

    def __post_init__(self):
        for idx in (self.hol, self.anti):
            if any(b <= a for a, b in zip(idx, idx[1:])):
                raise FormError(f"index list {idx} is not strictly increasing")

    @property
    def bidegree(self):
        return len(self.hol), len(self.anti)

    @property
    def degree(self):
        return len(self.hol) + len(self.anti)

    def render(self):
        parts = [f"dz[{j + 1}]" for j in self.hol] + [f"dz~[{j + 1}]" for j in self.anti]
        return "*".join(parts) if parts else "1"


ONE = FormMonomial()


def _merge_sign(a, b):
    """(sign, merged) for the wedge of two increasing index lists, or (0, None)."""
    if set(a) & set(b):
        return 0, None
    inv = 0
    for x in a:
        for y in b:
            if y < x:
                inv += 1
    return (-1) ** inv, tuple(sorted(a + b))


def monomial_wedge(m1, m2):
    s1, hol = _merge_sign(m1.hol, m2.hol)
    if not s1:
        return 0, None
    s2, anti = _merge_sign(m1.anti, m2.anti)
    if not s2:
        return 0, None
    # move the dz factors of m2 past the dzb factors of m1
    s3 = (-1) ** (len(m1.anti) * len(m2.hol))
    return s1 * s2 * s3, FormMonomial(hol, anti)


class DifferentialForm:
    """Finite sum coefficient * monomial; zero coefficients are dropped."""

    __slots__ = ("nvars", "terms")

    def __init__(self, nvars, terms=None):
        self.nvars = nvars
        out = {}
        for m, c in (terms or {}).items():
            if any(j >= nvars for j in m.hol + m.anti):
                raise FormError("form index exceeds dimension")
            c = as_rational(c, nvars)
            if not c.is_zero():
                out[m] = c
        self.terms = out

    @classmethod
    def scalar(cls, f, nvars=None):
        if nvars is None:
            nvars = f.nvars
        return cls(nvars, {ONE: f})

    @classmethod
    def dzb(cls, nvars, j):
        return cls(nvars, {FormMonomial((), (j,)): 1})

    @classmethod
    def dz(cls, nvars, j):
        return cls(nvars, {FormMonomial((j,), ()): 1})

    @classmethod
    def zero(cls, nvars):
        return cls(nvars)

    def is_zero(self):
        return not self.terms

    def __bool__(self):
        return bool(self.terms)

    def bidegrees(self):
        return {m.bidegree for m in self.terms}

    def is_homogeneous(self):
        return len(self.bidegrees()) <= 1

    def bidegree(self):
        bd = self.bidegrees()
        if len(bd) > 1:
            raise FormError(f"mixed bidegrees {sorted(bd)}")
        return bd.pop() if bd else None

    def degree(self):
        bd = self.bidegree()
        return 0 if bd is None else sum(bd)

    def __add__(self, other):
        if not isinstance(other, DifferentialForm):
            return NotImplemented
        out = dict(self.terms)
        for m, c in other.terms.items():
            out[m] = out[m] + c if m in out else c
        return DifferentialForm(self.nvars, out)

    def __neg__(self):
        return DifferentialForm(self.nvars, {m: -c for m, c in self.terms.items()})

    def __sub__(self, other):
        return self + (-other)

    def scale(self, f):
        """Multiply every coefficient by a scalar function (degree-0 factor)."""
        f = as_rational(f, self.nvars)
        return DifferentialForm(self.nvars, {m: c * f for m, c in self.terms.items()})

    def __mul__(self, f):
        if isinstance(f, DifferentialForm):
            return wedge(self, f)
        return self.scale(f)

    __rmul__ = scale

    def __eq__(self, other):
        if not isinstance(other, DifferentialForm):
            return NotImplemented
        keys = set(self.terms) | set(other.terms)
        z = RationalFunction.from_poly(Polynomial.zero(self.nvars))
        return all(self.terms.get(k, z) == other.terms.get(k, z) for k in keys)

    def map_coefficients(self, fn):
        return DifferentialForm(self.nvars, {m: fn(c) for m, c in self.terms.items()})

    def __repr__(self):
        return f"DifferentialForm({render(self)!r})"

    def __str__(self):
        return render(self)


def wedge(a, b):
    out = {}
    for m1, c1 in a.terms.items():
        for m2, c2 in b.terms.items():
            s, m = monomial_wedge(m1, m2)
            if not s:
                continue
            c = c1 * c2
            if s < 0:
                c = -c
            out[m] = out[m] + c if m in out else c
    return DifferentialForm(a.nvars, out)


def dbar(a):
    """sum_j d(coef)/dzb_j dzb_j ^ monomial."""
    out = {}
    for m, c in a.terms.items():
        for j in range(a.nvars):
            if j in m.anti:
                continue
            d = c.dbar_partial(j)
            if d.is_zero():
                continue
            sign = (-1) ** (len(m.hol) + sum(1 for k in m.anti if k < j))
            mm = FormMonomial(m.hol, tuple(sorted(m.anti + (j,))))
            d = d if sign > 0 else -d
            out[mm] = out[mm] + d if mm in out else d
    return DifferentialForm(a.nvars, out)


def evaluate_form(a, point, floor=DEFAULT_POLE_FLOOR):
    """{FormMonomial: complex} at a single point."""
    return {m: c.evaluate(point, floor) for m, c in a.terms.items()}


class NumericForm:
    """{FormMonomial: array of values over a batch of points}."""

    def __init__(self, nvars, terms):
        self.nvars = nvars
        self.terms = dict(terms)

    def wedge(self, other):
        out = {}
        for m1, c1 in self.terms.items():
            for m2, c2 in other.terms.items():
                s, m = monomial_wedge(m1, m2)
                if s:
                    v = s * c1 * c2
                    out[m] = out[m] + v if m in out else v
        return NumericForm(self.nvars, out)

    def __getitem__(self, m):
        return self.terms.get(m, 0.0)


def numeric_wedge(a, b):
    """Wedge of pointwise forms given as {FormMonomial: value}."""
    return NumericForm(0, a).wedge(NumericForm(0, b)).terms


class CompiledForm:
    """A DifferentialForm prepared for batch evaluation."""

    def __init__(self, a):
        self.nvars = a.nvars
        self.parts = [(m, CompiledRational(c)) for m, c in sorted(a.terms.items())]
        self.maxdeg = max([cr.maxdeg for _, cr in self.parts], default=0)

    def __call__(self, Z, powers=None, floor=DEFAULT_POLE_FLOOR):
        Z = np.atleast_2d(np.asarray(Z, dtype=complex))
        if powers is None:
            powers = power_table(Z, self.maxdeg)
        return NumericForm(self.nvars, {m: cr(Z, powers, floor) for m, cr in self.parts})


def volume_constant(n):
    """kappa_n: canonical top monomial = kappa_n * Lebesgue measure on C^n."""
    return (-1) ** (n * (n - 1) // 2) * (-2j) ** n


def top_monomial(n):
    return FormMonomial(tuple(range(n)), tuple(range(n)))


def top_density(a, point=None, floor=DEFAULT_POLE_FLOOR):
    """Lebesgue density of an (n, n)-form (or of a pointwise numeric one)."""
    if isinstance(a, dict):
        n = None
        vals = a
        for m in vals:
            if m.hol != m.anti or len(m.hol) != len(set(m.hol)):
                raise FormError("non-top-degree input")
            n = len(m.hol)
        if n is None:
            return 0.0
        return volume_constant(n) * vals[top_monomial(n)]
    n = a.nvars
    if a.is_zero():
        return 0.0
    if a.bidegrees() != {(n, n)}:
        raise FormError(f"top_density needs bidegree ({n},{n}), got {sorted(a.bidegrees())}")
    return volume_constant(n) * a.terms[top_monomial(n)].evaluate(point, floor)


def render(a):
    """Terms as '(coef)*dz[i]*dz~[j]' joined by ' + ', in monomial order."""
    if not a.terms:
        return "0"
    parts = []
    for m in sorted(a.terms):
        c = format_rational(a.terms[m])
        if m == ONE:
            parts.append(f"({c})")
        else:
            parts.append(f"({c})*{m.render()}")
    return " + ".join(parts)


def anti_monomials(n, q):
    return [FormMonomial((), I) for I in combinations(range(n), q)]
