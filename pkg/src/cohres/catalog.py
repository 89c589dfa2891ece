"""Shipped ideals, resolutions and closed-form reference residue forms for two of them."""

from __future__ import annotations

import os

from .antiforms import DifferentialForm, dbar, wedge
from .freecomplex import IdealSpec, load_complex, resolve_ideal
from .polyring import Polynomial, RationalFunction, parse_poly

DATA = os.path.join(os.path.dirname(__file__), "data")


def data_path(name):
    return os.path.join(DATA, name)


_IDEALS = {
    # name: (nvars, generators, kind, resolution)
    "z": (1, ["z"], "complete-intersection", "koszul"),
    "z3": (1, ["z^3"], "complete-intersection", "koszul"),
    "z1z2": (2, ["z1", "z2"], "complete-intersection", "koszul"),
    "x2y": (2, ["x^2", "y"], "complete-intersection", "koszul"),
    "x2y3": (2, ["x^2", "y^3"], "complete-intersection", "koszul"),
    "z1_in_C2": (2, ["z1"], "complete-intersection", "koszul"),
    "x2_xy_y2": (2, ["x^2", "x*y", "y^2"], "monomial", "min_x2_xy_y2.cx"),
    "x2_y2_z2_yz": (3, ["y^2", "y*z", "z^2", "x^2"], "monomial", "min_x2_y2_z2_yz.cx"),
}


def shipped_names():
    return sorted(_IDEALS)


def shipped_ideal(name):
    n, gens, kind, res = _IDEALS[name]
    if res not in ("koszul", "taylor"):
        res = data_path(res)
    return IdealSpec(n, [parse_poly(g, n) for g in gens], kind, None, res, None, name=name)


def shipped_complex(name, resolution=None):
    spec = shipped_ideal(name)
    return spec, resolve_ideal(spec, resolution)


def minimal_resolution(name):
    return load_complex(data_path({"x2_xy_y2": "min_x2_xy_y2.cx",
                                   "x2_y2_z2_yz": "min_x2_y2_z2_yz.cx"}[name]))


# ---------------------------------------------------------------------------
# reference forms.  In their published notation the symbol d(xb^2) is read
# either as the exterior derivative 2 xb dxb ("chain") or as dxb ^ dxb = 0
# ("square").


def _d(expr, n, reading):
    """Differential of a power of a single conjugate variable under a reading."""
    p = parse_poly(expr, n)
    if reading == "chain":
        return dbar(DifferentialForm.scalar(RationalFunction.from_poly(p), n))
    (a, b), _ = next(iter(p.terms.items()))
    if sum(b) == 1:
        return dbar(DifferentialForm.scalar(RationalFunction.from_poly(p), n))
    return DifferentialForm.zero(n)


def _f(expr, n):
    return RationalFunction.from_poly(parse_poly(expr, n))


def _frac(num_form, den, n):
    return num_form.scale(RationalFunction.from_poly(Polynomial.one(n)) / _f(den, n))


def reference_forms(name, reading="chain"):
    if reading not in ("chain", "square"):
        raise ValueError("reading is 'chain' or 'square'")
    if name == "x2_xy_y2":
        n = 2
        w1 = _d("y~", n, reading).scale(_f("x~^2", n)) - _d("x~^2", n, reading).scale(_f("y~", n))
        w2 = _d("x~", n, reading).scale(_f("y~^2", n)) - _d("y~^2", n, reading).scale(_f("x~", n))
        return [_frac(w1, "(x^2*x~^2 + y*y~)^2", n), _frac(w2, "(y^2*y~^2 + x*x~)^2", n)]
    if name == "x2_y2_z2_yz":
        n = 3
        dx2, dy, dz2 = _d("x~^2", n, reading), _d("y~", n, reading), _d("z~^2", n, reading)
        w1 = (wedge(dy, dz2).scale(_f("x~^2", n)) - wedge(dx2, dz2).scale(_f("y~", n))
              + wedge(dx2, dy).scale(_f("z~^2", n)))
        dy2, dz = _d("y~^2", n, reading), _d("z~", n, reading)
        w2 = (wedge(dy2, dz).scale(_f("x~^2", n)) - wedge(dx2, dz).scale(_f("y~^2", n))
              + wedge(dx2, dy2).scale(_f("z~", n)))
        return [_frac(w1, "(x^2*x~^2 + y*y~ + z^2*z~^2)^3", n), _frac(w2, "(x^2*x~^2 + y^2*y~^2 + z*z~)^3", n)]
    raise ValueError(f"no reference forms for {name!r}")
