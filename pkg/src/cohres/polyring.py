"""
Exact polynomials and rational functions in z_1..z_n and their conjugates.

The conjugate variables zb_j are independent formal symbols; the relation
zb_j = conj(z_j) is only imposed when a value is evaluated at a point.  This
makes the Wirtinger derivative d/dzb_j an ordinary formal partial derivative.

A Polynomial over the Gaussian rationals is stored as a pair (re, im) of
sympy sparse polynomials over QQ.  Almost everything this package builds has
real coefficients, and the pair keeps that case on the fast QQ path.
"""

from __future__ import annotations

import cmath
import math
from fractions import Fraction
from functools import lru_cache
from numbers import Rational

import sympy.core.random as sympy_random
from sympy.polys.domains import QQ
from sympy.polys.orderings import grlex
from sympy.polys.rings import ring as _sympy_ring


class PolyError(ValueError):
    pass


class ParseError(PolyError):
    def __init__(self, msg, pos=None, text=None):
        self.pos = pos
        self.text = text
        if pos is not None:
            msg = f"{msg} at position {pos}"
        super().__init__(msg)


class NearPoleError(ArithmeticError):
    """Denominator magnitude at an evaluation point fell below the floor."""

    def __init__(self, magnitude, floor):
        self.magnitude = magnitude
        self.floor = floor
        super().__init__(f"near-pole evaluation: |den| = {magnitude:.3e} < floor {floor:.1e}")


class ExpressionSwellError(ArithmeticError):
    pass


# Term-count ceiling for any numerator produced by RationalFunction arithmetic.
TERM_CEILING = 200_000
# Polynomials above this size are not factored when they enter a denominator.
FACTOR_CAP = 2_000
DEFAULT_POLE_FLOOR = 1e-200


class GaussianRational:
    """re + i*im with exact rational parts."""

    __slots__ = ("re", "im")

    def __init__(self, re=0, im=0):
        self.re = Fraction(re)
        self.im = Fraction(im)

    @classmethod
    def coerce(cls, x):
        if isinstance(x, GaussianRational):
            return x
        if isinstance(x, (int, Fraction, Rational)):
            return cls(x, 0)
        if isinstance(x, complex):
            return cls(Fraction(x.real), Fraction(x.imag))
        try:
            return cls(Fraction(int(x.numerator), int(x.denominator)), 0)
        except AttributeError:
            raise TypeError(f"cannot coerce {x!r} to GaussianRational") from None

    def __add__(self, other):
        o = GaussianRational.coerce(other)
        return GaussianRational(self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = GaussianRational.coerce(other)
        return GaussianRational(self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        return GaussianRational.coerce(other) - self

    def __mul__(self, other):
        o = GaussianRational.coerce(other)
        return GaussianRational(self.re * o.re - self.im * o.im, self.re * o.im + self.im * o.re)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = GaussianRational.coerce(other)
        n = o.re * o.re + o.im * o.im
        if n == 0:
            raise ZeroDivisionError("GaussianRational division by zero")
        return self * GaussianRational(o.re / n, -o.im / n)

    def __rtruediv__(self, other):
        return GaussianRational.coerce(other) / self

    def __neg__(self):
        return GaussianRational(-self.re, -self.im)

    def conjugate(self):
        return GaussianRational(self.re, -self.im)

    def __eq__(self, other):
        try:
            o = GaussianRational.coerce(other)
        except TypeError:
            return NotImplemented
        return self.re == o.re and self.im == o.im

    def __hash__(self):
        if self.im == 0:
            return hash(self.re)
        return hash((self.re, self.im))

    def __bool__(self):
        return bool(self.re) or bool(self.im)

    def __complex__(self):
        return complex(float(self.re), float(self.im))

    def __repr__(self):
        return f"GaussianRational({self.re}, {self.im})"

    def __str__(self):
        return _fmt_coeff(self)


I = GaussianRational(0, 1)


@lru_cache(maxsize=None)
def poly_ring(nvars):
    """The sympy ring QQ[z1..zn, zb1..zbn] in graded-lex order."""
    names = [f"z{j}" for j in range(1, nvars + 1)] + [f"zb{j}" for j in range(1, nvars + 1)]
    R = _sympy_ring(names, QQ, grlex)[0]
    return R


def _qq(x):
    if isinstance(x, Fraction):
        return QQ(x.numerator, x.denominator)
    return QQ(x)


def _frac(c):
    return Fraction(int(c.numerator), int(c.denominator))


def _swap_key(k, n):
    return k[n:] + k[:n]


class Polynomial:
    """Sparse polynomial in z, zb over Q(i); immutable."""

    __slots__ = ("nvars", "re", "im", "_hash")

    def __init__(self, nvars, re, im=None):
        R = poly_ring(nvars)
        self.nvars = nvars
        self.re = re
        self.im = R.zero if im is None else im
        self._hash = None

    # constructors
    @classmethod
    def zero(cls, nvars):
        return cls(nvars, poly_ring(nvars).zero)

    @classmethod
    def one(cls, nvars):
        return cls(nvars, poly_ring(nvars).one)

    @classmethod
    def constant(cls, nvars, c):
        c = GaussianRational.coerce(c)
        R = poly_ring(nvars)
        return cls(nvars, R(_qq(c.re)), R(_qq(c.im)))

    @classmethod
    def var(cls, nvars, j, conj=False):
        """z_j (0-based j), or zb_j when conj is set."""
        if not 0 <= j < nvars:
            raise PolyError(f"variable index {j} out of range for n={nvars}")
        R = poly_ring(nvars)
        return cls(nvars, R.gens[j + nvars if conj else j])

    @classmethod
    def from_terms(cls, nvars, terms):
        """terms: {(a, b): coeff} with a, b exponent tuples of length nvars."""
        R = poly_ring(nvars)
        re, im = {}, {}
        for (a, b), c in terms.items():
            c = GaussianRational.coerce(c)
            key = tuple(a) + tuple(b)
            if len(key) != 2 * nvars:
                raise PolyError("exponent tuple has wrong length")
            if c.re:
                re[key] = re.get(key, QQ(0)) + _qq(c.re)
            if c.im:
                im[key] = im.get(key, QQ(0)) + _qq(c.im)
        return cls(nvars, R.from_dict({k: v for k, v in re.items() if v}),
                   R.from_dict({k: v for k, v in im.items() if v}))

    # inspection
    @property
    def terms(self):
        n = self.nvars
        out = {}
        for k, v in self.re.items():
            out[k] = GaussianRational(_frac(v), 0)
        for k, v in self.im.items():
            g = out.get(k, GaussianRational())
            out[k] = GaussianRational(g.re, _frac(v))
        return {(k[:n], k[n:]): c for k, c in out.items()}

    def sorted_terms(self):
        """Terms in descending graded-lex order over the concatenated exponents."""
        n = self.nvars
        items = self.terms
        keys = sorted(items, key=lambda ab: grlex(ab[0] + ab[1]), reverse=True)
        return [(k, items[k]) for k in keys]

    def monomial_keys(self):
        return set(self.re.keys()) | set(self.im.keys())

    def __len__(self):
        return len(self.monomial_keys())

    @property
    def is_real(self):
        return not self.im

    def is_zero(self):
        return not self.re and not self.im

    def __bool__(self):
        return not self.is_zero()

    def is_holomorphic(self):
        n = self.nvars
        return all(not any(k[n:]) for k in self.monomial_keys())

    def is_antiholomorphic(self):
        n = self.nvars
        return all(not any(k[:n]) for k in self.monomial_keys())

    def is_monomial(self):
        return len(self) == 1

    def is_constant(self):
        return all(not any(k) for k in self.monomial_keys())

    def total_degree(self):
        keys = self.monomial_keys()
        return max((sum(k) for k in keys), default=-1)

    def degree_in(self, v):
        """Degree in ring generator v (0..2n-1, conjugates at n..2n-1)."""
        return max((k[v] for k in self.monomial_keys()), default=-1)

    def holomorphic_degree(self):
        n = self.nvars
        return max((sum(k[:n]) for k in self.monomial_keys()), default=-1)

    def leading(self):
        """(exponent key, GaussianRational) of the grlex-leading term."""
        keys = self.monomial_keys()
        if not keys:
            raise PolyError("zero polynomial has no leading term")
        k = max(keys, key=grlex)
        return k, GaussianRational(_frac(self.re.get(k, QQ(0))), _frac(self.im.get(k, QQ(0))))

    def constant_term(self):
        k = (0,) * (2 * self.nvars)
        return GaussianRational(_frac(self.re.get(k, QQ(0))), _frac(self.im.get(k, QQ(0))))

    # arithmetic
    def _lift(self, other):
        if isinstance(other, Polynomial):
            if other.nvars != self.nvars:
                raise PolyError("nvars mismatch")
            return other
        if isinstance(other, (int, Fraction, GaussianRational, Rational)):
            return Polynomial.constant(self.nvars, other)
        return NotImplemented

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return Polynomial(self.nvars, self.re + o.re, self.im + o.im)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return Polynomial(self.nvars, self.re - o.re, self.im - o.im)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return o - self

    def __neg__(self):
        return Polynomial(self.nvars, -self.re, -self.im)

    def __mul__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        a, b, c, d = self.re, self.im, o.re, o.im
        if not b and not d:
            return Polynomial(self.nvars, a * c)
        if not b:
            return Polynomial(self.nvars, a * c, a * d)
        if not d:
            return Polynomial(self.nvars, a * c, b * c)
        return Polynomial(self.nvars, a * c - b * d, a * d + b * c)

    __rmul__ = __mul__

    def __pow__(self, e):
        if not isinstance(e, int) or e < 0:
            raise PolyError("polynomial powers must be nonnegative integers")
        if self.is_real:
            return Polynomial(self.nvars, self.re ** e)
        out = Polynomial.one(self.nvars)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def scale(self, c):
        c = GaussianRational.coerce(c)
        return self * Polynomial.constant(self.nvars, c)

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.nvars == other.nvars and self.re == other.re and self.im == other.im
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        return self == o

    def __hash__(self):
        if self._hash is None:
            self._hash = hash((self.nvars, frozenset(self.re.items()), frozenset(self.im.items())))
        return self._hash

    def conjugate(self):
        """Swap z_j <-> zb_j and conjugate every coefficient."""
        n, R = self.nvars, poly_ring(self.nvars)
        re = R.from_dict({_swap_key(k, n): v for k, v in self.re.items()})
        im = R.from_dict({_swap_key(k, n): -v for k, v in self.im.items()})
        return Polynomial(n, re, im)

    def diff(self, v):
        """Formal partial derivative in ring generator v (0..2n-1)."""
        R = poly_ring(self.nvars)
        g = R.gens[v]
        return Polynomial(self.nvars, self.re.diff(g), self.im.diff(g) if self.im else R.zero)

    def dbar_partial(self, j):
        return self.diff(self.nvars + j)

    def d_partial(self, j):
        return self.diff(j)

    def divides(self, other):
        """Exact quotient other / self, or None when self does not divide other."""
        if self.is_zero():
            raise ZeroDivisionError("division by zero polynomial")
        if other.is_zero():
            return Polynomial.zero(self.nvars)
        n2 = 2 * self.nvars
        for v in range(n2):
            if self.degree_in(v) > other.degree_in(v):
                return None
        if self.is_real:
            F = self.re
            q1, r1 = other.re.div(F)
            if r1:
                return None
            if other.im:
                q2, r2 = other.im.div(F)
                if r2:
                    return None
            else:
                q2 = poly_ring(self.nvars).zero
            return Polynomial(self.nvars, q1, q2)
        # Gaussian divisor q: other / q = other * qc / (q * qc), qc = coefficient conjugate
        qc = Polynomial(self.nvars, self.re, -self.im)
        norm = (self * qc)
        assert norm.is_real
        return norm.divides(other * qc)

    def evaluate(self, point):
        """Value at z = point, zb = conj(point), with compensated summation."""
        n = self.nvars
        if len(point) != n:
            raise PolyError("point dimension mismatch")
        vals = [complex(p) for p in point] + [complex(p).conjugate() for p in point]
        re_acc, im_acc = [], []
        for k, c in self.terms_items():
            t = c
            for v, e in enumerate(k):
                if e:
                    t = t * vals[v] ** e
            re_acc.append(t.real)
            im_acc.append(t.imag)
        return complex(math.fsum(re_acc), math.fsum(im_acc))

    def terms_items(self):
        """(exponent key, complex coefficient) pairs for numerics."""
        out = {}
        for k, v in self.re.items():
            out[k] = complex(float(v), 0.0)
        for k, v in self.im.items():
            out[k] = out.get(k, 0j) + complex(0.0, float(v))
        return list(out.items())

    def substitute_zero_conj(self):
        """Drop every term containing a conjugate variable."""
        n, R = self.nvars, poly_ring(self.nvars)
        re = R.from_dict({k: v for k, v in self.re.items() if not any(k[n:])})
        im = R.from_dict({k: v for k, v in self.im.items() if not any(k[n:])})
        return Polynomial(n, re, im)

    def __repr__(self):
        return f"Polynomial({self.nvars}, {format_poly(self)!r})"

    def __str__(self):
        return format_poly(self)


# ---------------------------------------------------------------------------
# rational functions with factored denominators


def _monic(p):
    """(c, q) with p = c*q and q having leading coefficient 1."""
    _, c = p.leading()
    if c == 1:
        return GaussianRational(1), p
    return c, p.scale(GaussianRational(1) / c)


@lru_cache(maxsize=4096)
def _factorize(p):
    """Split a nonzero Polynomial into (scalar, ((monic factor, exp), ...))."""
    if p.is_constant():
        return p.constant_term(), ()
    if p.is_real and len(p) <= FACTOR_CAP:
        # Wang's algorithm draws random evaluation points from sympy's global
        # generator; pin it so results and running time do not depend on history
        state = sympy_random.rng.getstate()
        sympy_random.rng.seed(0)
        try:
            content, fl = p.re.factor_list()
        finally:
            sympy_random.rng.setstate(state)
        scalar = GaussianRational(_frac(content))
        out = []
        for f, e in fl:
            c, q = _monic(Polynomial(p.nvars, f))
            scalar = scalar * _gpow(c, e)
            out.append((q, e))
        return scalar, tuple(out)
    c, q = _monic(p)
    return c, ((q, 1),)


def _gpow(c, e):
    out = GaussianRational(1)
    for _ in range(e):
        out = out * c
    return out


def _fkey(f):
    return grlex(f.leading()[0]), len(f), format_poly(f)


class RationalFunction:
    """num / prod(F_i ** e_i) with monic, pairwise distinct factors F_i."""

    __slots__ = ("num", "factors", "nvars")

    def __init__(self, num, factors=(), _reduce=True):
        self.nvars = num.nvars
        if num.is_zero():
            self.num, self.factors = num, ()
            return
        if _reduce:
            num, factors = _reduce_by_factors(num, factors)
        self.num = num
        self.factors = tuple(sorted(factors, key=lambda fe: _fkey(fe[0])))
        if len(self.num) > TERM_CEILING:
            raise ExpressionSwellError(f"numerator has {len(self.num)} terms (ceiling {TERM_CEILING})")

    @classmethod
    def from_poly(cls, p):
        return cls(p, (), _reduce=False)

    @classmethod
    def const(cls, nvars, c):
        return cls.from_poly(Polynomial.constant(nvars, c))

    @classmethod
    def fraction(cls, num, den):
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        scalar, facs = _factorize(den)
        return cls(num.scale(GaussianRational(1) / scalar), facs)

    @property
    def den(self):
        out = Polynomial.one(self.nvars)
        for f, e in self.factors:
            out = out * f ** e
        return out

    def is_zero(self):
        return self.num.is_zero()

    def __bool__(self):
        return not self.is_zero()

    def is_polynomial(self):
        return not self.factors

    def _lift(self, other):
        if isinstance(other, RationalFunction):
            return other
        if isinstance(other, Polynomial):
            return RationalFunction.from_poly(other)
        if isinstance(other, (int, Fraction, GaussianRational, Rational)):
            return RationalFunction.const(self.nvars, other)
        return NotImplemented

    def __add__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        if o.is_zero():
            return self
        if self.is_zero():
            return o
        if self.factors == o.factors:
            return RationalFunction(self.num + o.num, self.factors)
        da, db = dict(self.factors), dict(o.factors)
        lcm = {f: max(da.get(f, 0), db.get(f, 0)) for f in set(da) | set(db)}
        na, nb = self.num, o.num
        for f, e in lcm.items():
            if e - da.get(f, 0):
                na = na * f ** (e - da.get(f, 0))
            if e - db.get(f, 0):
                nb = nb * f ** (e - db.get(f, 0))
        return RationalFunction(na + nb, tuple(lcm.items()))

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.factors, _reduce=False)

    def __sub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return self + (-o)

    def __rsub__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return o - self

    def __mul__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        if self.is_zero() or o.is_zero():
            return RationalFunction.from_poly(Polynomial.zero(self.nvars))
        if not o.factors and o.num.is_constant():
            return RationalFunction(self.num * o.num, self.factors, _reduce=False)
        d = dict(self.factors)
        for f, e in o.factors:
            d[f] = d.get(f, 0) + e
        # only cross cancellation is possible: self.num with o.factors, o.num with self.factors
        na, fa = _reduce_by_factors(self.num, o.factors)
        nb, fb = _reduce_by_factors(o.num, self.factors)
        fac = dict(fa)
        for f, e in fb:
            fac[f] = fac.get(f, 0) + e
        return RationalFunction(na * nb, tuple(fac.items()), _reduce=False)

    __rmul__ = __mul__

    def inverse(self):
        if self.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        scalar, facs = _factorize(self.num)
        num = Polynomial.constant(self.nvars, GaussianRational(1) / scalar)
        for f, e in self.factors:
            num = num * f ** e
        return RationalFunction(num, facs)

    def __truediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return self * o.inverse()

    def __rtruediv__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return o
        return o / self

    def __pow__(self, e):
        if not isinstance(e, int):
            raise PolyError("integer powers only")
        if e < 0:
            return self.inverse() ** (-e)
        return RationalFunction(self.num ** e, tuple((f, k * e) for f, k in self.factors), _reduce=False)

    def __eq__(self, other):
        o = self._lift(other)
        if o is NotImplemented:
            return NotImplemented
        # cross-multiplication, with the shared part of the denominators cancelled first
        da, db = dict(self.factors), dict(o.factors)
        lhs, rhs = self.num, o.num
        for f in set(da) | set(db):
            ea, eb = da.get(f, 0), db.get(f, 0)
            if eb > ea:
                lhs = lhs * f ** (eb - ea)
            elif ea > eb:
                rhs = rhs * f ** (ea - eb)
        return lhs == rhs

    def __hash__(self):
        return hash((self.num, self.factors))

    def conjugate(self):
        num = self.num.conjugate()
        facs = []
        for f, e in self.factors:
            c, q = _monic(f.conjugate())
            num = num.scale(GaussianRational(1) / _gpow(c, e))
            facs.append((q, e))
        return RationalFunction(num, tuple(facs), _reduce=False)

    def diff(self, v):
        """Formal partial derivative in ring generator v via the quotient rule."""
        dn = self.num.diff(v)
        live = [(f, e, f.diff(v)) for f, e in self.factors]
        live = [t for t in live if not t[2].is_zero()]
        if not live:
            return RationalFunction(dn, self.factors)
        prod_all = Polynomial.one(self.nvars)
        for f, _, _ in live:
            prod_all = prod_all * f
        num = dn * prod_all
        for i, (f, e, df) in enumerate(live):
            rest = Polynomial.one(self.nvars)
            for j, (g, _, _) in enumerate(live):
                if j != i:
                    rest = rest * g
            num = num - self.num * df * rest * e
        fac = dict(self.factors)
        for f, _, _ in live:
            fac[f] += 1
        return RationalFunction(num, tuple(fac.items()))

    def dbar_partial(self, j):
        return self.diff(self.nvars + j)

    def is_holomorphic(self):
        return self.num.is_holomorphic() and all(f.is_holomorphic() for f, _ in self.factors)

    def evaluate(self, point, floor=DEFAULT_POLE_FLOOR):
        den = 1 + 0j
        for f, e in self.factors:
            den *= f.evaluate(point) ** e
        if abs(den) < floor:
            raise NearPoleError(abs(den), floor)
        return self.num.evaluate(point) / den

    def size(self):
        return len(self.num) + sum(len(f) for f, _ in self.factors)

    def __repr__(self):
        return f"RationalFunction({format_rational(self)!r})"

    def __str__(self):
        return format_rational(self)


def _reduce_by_factors(num, factors):
    out = []
    for f, e in factors:
        while e > 0:
            q = f.divides(num)
            if q is None:
                break
            num = q
            e -= 1
        if e:
            out.append((f, e))
    return num, tuple(out)


def as_rational(x, nvars):
    if isinstance(x, RationalFunction):
        return x
    if isinstance(x, Polynomial):
        return RationalFunction.from_poly(x)
    return RationalFunction.const(nvars, x)


# Module-level operation names.

def arith(op, a, b):
    if op == "add":
        return a + b
    if op == "sub":
        return a - b
    if op == "mul":
        return a * b
    if op == "div":
        return a / b
    raise PolyError(f"unknown operation {op!r}")


def conjugate(f):
    return f.conjugate()


def wirtinger_dbar_partial(f, j):
    """d/dzb_j of f (0-based j)."""
    if not 0 <= j < f.nvars:
        raise PolyError(f"index {j} out of range")
    return f.dbar_partial(j)


def evaluate(f, point, floor=DEFAULT_POLE_FLOOR):
    if isinstance(f, Polynomial):
        return f.evaluate(point)
    return f.evaluate(point, floor)


# ---------------------------------------------------------------------------
# text grammar
#
#   expr   := term (('+' | '-') term)*
#   term   := unary (['*'] unary)*            juxtaposition multiplies
#   unary  := ('+' | '-') unary | power
#   power  := atom ('^' INT)*
#   atom   := INT ['/' INT] | 'i' | VAR | '(' expr ')'
#   VAR    := z<j> | x | y | z (n <= 3; z also names z1 when n = 1),
#             conjugated by suffix '~' or prefix 'conj'

MAX_EXPONENT = 1000


def var_names(nvars):
    if nvars == 1:
        return ["z"]
    if nvars <= 3:
        return ["x", "y", "z"][:nvars]
    return [f"z{j}" for j in range(1, nvars + 1)]


def _tokenize(text):
    toks = []
    i, L = 0, len(text)
    while i < L:
        c = text[i]
        if c.isspace():
            i += 1
        elif c.isdigit():
            j = i
            while j < L and text[j].isdigit():
                j += 1
            toks.append(("int", text[i:j], i))
            i = j
        elif c.isalpha() or c == "_":
            j = i
            while j < L and (text[j].isalnum() or text[j] == "_"):
                j += 1
            name = text[i:j]
            if j < L and text[j] == "~":
                name += "~"
                j += 1
            toks.append(("name", name, i))
            i = j
        elif text.startswith("**", i):
            toks.append(("op", "^", i))
            i += 2
        elif c in "+-*/^()":
            toks.append(("op", c, i))
            i += 1
        else:
            raise ParseError(f"unexpected character {c!r}", i, text)
    toks.append(("end", "", L))
    return toks


class _Parser:
    def __init__(self, text, nvars):
        self.text = text
        self.nvars = nvars
        self.toks = _tokenize(text)
        self.i = 0
        self.names = {}
        aliases = nvars <= 3
        for j in range(nvars):
            names = [f"z{j + 1}"] + ([["x", "y", "z"][j]] if aliases else [])
            if nvars == 1:
                names.append("z")
            for nm in names:
                self.names[nm] = (j, False)
                self.names[nm + "~"] = (j, True)
                self.names["conj" + nm] = (j, True)

    def peek(self):
        return self.toks[self.i]

    def take(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def parse(self):
        p = self.expr()
        t = self.peek()
        if t[0] != "end":
            raise ParseError(f"unexpected {t[1]!r}", t[2], self.text)
        return p

    def expr(self):
        p = self.term()
        while self.peek()[0] == "op" and self.peek()[1] in "+-":
            op = self.take()[1]
            q = self.term()
            p = p + q if op == "+" else p - q
        return p

    def _starts_atom(self, t):
        return t[0] in ("int", "name") or (t[0] == "op" and t[1] == "(")

    def term(self):
        p = self.unary()
        while True:
            t = self.peek()
            if t[0] == "op" and t[1] == "*":
                self.take()
                p = p * self.unary()
            elif self._starts_atom(t):
                p = p * self.power()
            else:
                return p

    def unary(self):
        t = self.peek()
        if t[0] == "op" and t[1] in "+-":
            self.take()
            p = self.unary()
            return -p if t[1] == "-" else p
        return self.power()

    def power(self):
        p = self.atom()
        while self.peek()[0] == "op" and self.peek()[1] == "^":
            self.take()
            t = self.take()
            if t[0] != "int":
                raise ParseError("exponent must be a nonnegative integer literal", t[2], self.text)
            e = int(t[1])
            if e > MAX_EXPONENT:
                raise ParseError(f"exponent overflow ({e} > {MAX_EXPONENT})", t[2], self.text)
            p = p ** e
        return p

    def atom(self):
        t = self.take()
        n = self.nvars
        if t[0] == "int":
            num = int(t[1])
            if self.peek()[0] == "op" and self.peek()[1] == "/":
                self.take()
                d = self.take()
                if d[0] != "int":
                    raise ParseError("only integer/integer division is allowed", d[2], self.text)
                if int(d[1]) == 0:
                    raise ParseError("zero denominator", d[2], self.text)
                return Polynomial.constant(n, Fraction(num, int(d[1])))
            return Polynomial.constant(n, num)
        if t[0] == "name":
            if t[1] == "i":
                return Polynomial.constant(n, I)
            if t[1] not in self.names:
                raise ParseError(f"unknown variable {t[1]!r}", t[2], self.text)
            j, c = self.names[t[1]]
            return Polynomial.var(n, j, conj=c)
        if t[0] == "op" and t[1] == "(":
            p = self.expr()
            c = self.take()
            if c[1] != ")":
                raise ParseError("expected ')'", c[2], self.text)
            return p
        raise ParseError(f"unexpected {t[1] or 'end of input'!r}", t[2], self.text)


def parse_poly(text, nvars):
    if nvars < 1:
        raise PolyError("nvars must be positive")
    return _Parser(text, nvars).parse()


def parse_rational(text, nvars):
    """'num' or '(num)/(den)' with both parts in the polynomial grammar."""
    text = text.strip()
    depth = 0
    for pos, c in enumerate(text):
        if c == "(":
            depth += 1
        elif c == ")":
            depth -= 1
        elif c == "/" and depth == 0 and pos > 0 and text[pos - 1] == ")":
            return RationalFunction.fraction(parse_poly(text[:pos], nvars), parse_poly(text[pos + 1:], nvars))
    return RationalFunction.from_poly(parse_poly(text, nvars))


def _fmt_rat(q):
    q = Fraction(q)
    return str(q.numerator) if q.denominator == 1 else f"{q.numerator}/{q.denominator}"


def _fmt_coeff(c):
    if c.im == 0:
        return _fmt_rat(c.re)
    if c.re == 0:
        return "i" if c.im == 1 else ("-i" if c.im == -1 else f"{_fmt_rat(c.im)}*i")
    sign = "+" if c.im > 0 else "-"
    return f"({_fmt_rat(c.re)} {sign} {_fmt_rat(abs(c.im))}*i)"


def _fmt_monomial(key, nvars):
    names = var_names(nvars)
    parts = []
    for j, e in enumerate(key[:nvars]):
        if e:
            parts.append(names[j] + (f"^{e}" if e > 1 else ""))
    for j, e in enumerate(key[nvars:]):
        if e:
            parts.append(names[j] + "~" + (f"^{e}" if e > 1 else ""))
    return "*".join(parts)


def format_poly(p):
    terms = p.sorted_terms()
    if not terms:
        return "0"
    out = []
    for idx, ((a, b), c) in enumerate(terms):
        mono = _fmt_monomial(a + b, p.nvars)
        neg = c.im == 0 and c.re < 0 or (c.re == 0 and c.im < 0)
        cc = -c if neg else c
        if not mono:
            body = _fmt_coeff(cc)
        elif cc == 1:
            body = mono
        else:
            body = f"{_fmt_coeff(cc)}*{mono}"
        if idx == 0:
            out.append(("-" if neg else "") + body)
        else:
            out.append((" - " if neg else " + ") + body)
    return "".join(out)


def format_rational(f):
    if not f.factors:
        return format_poly(f.num)
    den = []
    for g, e in f.factors:
        s = format_poly(g)
        if len(g) > 1:
            s = f"({s})"
        den.append(s + (f"^{e}" if e > 1 else ""))
    num = format_poly(f.num)
    if len(f.num) > 1:
        num = f"({num})"
    den = "*".join(den)
    if len(f.factors) > 1 or f.factors[0][1] > 1 and len(f.factors[0][0]) == 1:
        den = f"({den})"
    return f"{num}/{den}"
