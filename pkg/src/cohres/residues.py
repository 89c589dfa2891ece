"""Residue forms omega_l = xi_l . u_p and their phi-multiples."""

from __future__ import annotations

from dataclasses import dataclass, field

from .antiforms import DifferentialForm, dbar
from .freecomplex import check_xi
from .polyring import FACTOR_CAP, Polynomial, RationalFunction, _factorize
from .supercalc import SuperSection, apply_u_operator, nabla


class ResidueError(ValueError):
    pass


class ClosednessError(AssertionError):
    pass


@dataclass
class ResidueClass:
    xi: list
    omega: DifferentialForm
    p: int
    provenance: dict = field(default_factory=dict)

    @property
    def ell(self):
        return self.provenance.get("ell", 0)

    def bidegree(self):
        return (0, self.p - 1)


def xi_times(xi, col, n):
    acc = DifferentialForm.zero(n)
    for x, w in zip(xi, col):
        if x and not w.is_zero():
            acc = acc + w.scale(x)
    return acc


def is_dbar_closed(w):
    return dbar(w).is_zero()


def residue_forms(c, au, xis, certify=True):
    """omega_l = xi_l u_p for each xi_l, certified dbar-closed."""
    n, p = c.nvars, c.codim
    out = []
    for ell, xi in enumerate(xis, start=1):
        xi = [x if isinstance(x, Polynomial) else Polynomial.constant(n, x) for x in xi]
        if len(xi) != c.ranks[p] or not check_xi(c, xi, p):
            raise ResidueError(f"xi_{ell} does not satisfy xi f_{p + 1} = 0")
        omega = simplify(xi_times(xi, au.u[p], n))
        bd = omega.bidegrees()
        if bd and bd != {(0, p - 1)}:
            raise ClosednessError(f"omega_{ell} has bidegree {sorted(bd)}")
        if certify and not is_dbar_closed(omega):
            raise ClosednessError(f"omega_{ell} is not dbar-closed")
        out.append(ResidueClass(xi, omega, p, {"complex": c.name, "metric": au.metric.name, "ell": ell}))
    return out


def multiply_phi(r, phi):
    if not phi.is_holomorphic():
        raise ResidueError("phi must be holomorphic")
    return r.omega.scale(phi)


def simplify_coefficient(f):
    """Cancel numerator factors against the factored denominator."""
    if f.is_zero() or not f.factors:
        return f
    if not f.num.is_real or len(f.num) > FACTOR_CAP:
        return f
    scalar, nf = _factorize(f.num)
    den = dict(f.factors)
    num = Polynomial.constant(f.nvars, scalar)
    changed = False
    for g, e in nf:
        d = den.get(g, 0)
        k = min(d, e)
        if k:
            changed = True
            den[g] = d - k
        num = num * g ** (e - k)
    if not changed:
        return f
    out = RationalFunction(num, tuple((g, e) for g, e in den.items() if e), _reduce=False)
    assert out == f
    return out


def simplify(w):
    return w.map_coefficients(simplify_coefficient)


# ---------------------------------------------------------------------------
# the membership direction, made symbolic


def member_transport_check(c, au, xi, a):
    """
    For phi = sum_j f_j a_j (a holomorphic) check
        xi u_p phi = [p = 1] xi a - dbar(xi (u w)_p),   w = u phi - a,
    with u the operator sigma + sigma[dbar, sigma] + ... .  Returns
    (ok, nabla_ok) where nabla_ok records nabla(u w) = w.
    """
    n, p = c.nvars, c.codim
    phi = Polynomial.zero(n)
    for g, aj in zip(c.generators(), a):
        phi = phi + g * aj
    sig = au.sigmas
    ops = {k - 1: sig[k] for k in sig}
    s_phi = SuperSection(c, {(0, _one_mono()): [phi]})
    uphi = apply_u_operator(ops, s_phi)
    s_a = SuperSection(c, {(1, _one_mono()): list(a)})
    w = uphi - s_a
    uw = apply_u_operator(ops, w)
    nabla_ok = nabla(uw) == w
    lhs = xi_times(xi, uphi.level_forms(p), n)
    rhs = -dbar(xi_times(xi, uw.level_forms(p), n))
    if p == 1:
        rhs = rhs + xi_times(xi, [DifferentialForm.scalar(RationalFunction.from_poly(x), n) for x in a], n)
    return lhs == rhs, nabla_ok


def _one_mono():
    from .antiforms import ONE

    return ONE
