"""
Hermitian metrics, minimal inverses sigma_k of the differentials, and the
applied form of u = sigma + sigma(dbar sigma) + ... acting on E_0.

sigma_k is the metric Moore-Penrose inverse of f_k over the field of rational
functions in z and zb.  Writing f = B C with B of full column rank and C of
full row rank,

    sigma = C^+ B^+,   C^+ = h^-1 C* (C h^-1 C*)^-1,   B^+ = (B* g B)^-1 B* g,

where g, h are the metrics on the target and source of f.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import linalg
from .antiforms import DifferentialForm, dbar
from .freecomplex import _split_top, _strip, koszul_basis
from .polyring import ParseError, Polynomial, RationalFunction, as_rational, parse_rational


class IdentityFailure(AssertionError):
    pass


def _z(n):
    return RationalFunction.from_poly(Polynomial.zero(n))


def _o(n):
    return RationalFunction.from_poly(Polynomial.one(n))


@dataclass
class Metric:
    nvars: int
    mats: dict
    name: str = "identity"
    diagonal: bool = True

    def h(self, k, r):
        if k in self.mats:
            return self.mats[k]
        return linalg.identity(r, self.nvars)

    def hermitian_ok(self):
        return all(linalg.equal(linalg.adjoint(M), M) for M in self.mats.values())

    def positive_definite_ok(self, points=20, seed=0):
        rng = np.random.default_rng(seed)
        for _ in range(points):
            z = rng.standard_normal(self.nvars) + 1j * rng.standard_normal(self.nvars)
            for M in self.mats.values():
                A = np.array([[x.evaluate(z) for x in row] for row in M])
                if np.linalg.eigvalsh((A + A.conj().T) / 2).min() <= 0:
                    return False
        return True


def identity_metric(c):
    return Metric(c.nvars, {}, "identity", True)


def weighted_metric(c):
    """Diagonal weights h_k[i, i] = 1 + |z_j|^2 with j = (i + k) mod n; h_0 = 1."""
    n = c.nvars
    mats = {}
    for k in range(1, c.length + 1):
        r = c.ranks[k]
        M = linalg.zeros(r, r, n)
        for i in range(r):
            j = (i + k) % n
            w = Polynomial.one(n) + Polynomial.var(n, j) * Polynomial.var(n, j, conj=True)
            M[i][i] = RationalFunction.from_poly(w)
        mats[k] = M
    return Metric(n, mats, "weighted", True)


def koszul_product_metric(m, weights, n):
    """Metric on the exterior powers induced by diag(w_1..w_m) on E_1."""
    weights = [as_rational(w, n) for w in weights]
    mats = {}
    for k in range(1, m + 1):
        B = koszul_basis(m, k)
        M = linalg.zeros(len(B), len(B), n)
        for i, I in enumerate(B):
            w = _o(n)
            for t in I:
                w = w * weights[t]
            M[i][i] = w
        mats[k] = M
    return Metric(n, mats, "koszul-product", True)


def make_metric(name, c):
    if name == "identity":
        return identity_metric(c)
    if name == "weighted":
        return weighted_metric(c)
    return load_metric(name, c)


def parse_metric(text, c, name="file"):
    """'[hk]' headers followed by the rows of h_k; unspecified levels are the identity."""
    n = c.nvars
    mats, cur, rows = {}, None, []

    def flush():
        if cur is not None:
            r = c.rank(cur)
            if len(rows) != r or any(len(x) != r for x in rows):
                raise ParseError(f"h{cur} must be {r}x{r}")
            mats[cur] = rows[:]

    for raw in text.splitlines():
        line = _strip(raw)
        if not line:
            continue
        if line.startswith("[h") and line.endswith("]"):
            flush()
            cur, rows = int(line[2:-1]), []
        elif cur is None:
            continue
        else:
            rows.append([parse_rational(s, n) for s in _split_top(line, ",")])
    flush()
    diag = all(all(M[i][j].is_zero() for i in range(len(M)) for j in range(len(M)) if i != j)
               for M in mats.values())
    return Metric(n, mats, name, diag)


def load_metric(path, c):
    with open(path) as fh:
        return parse_metric(fh.read(), c, name=path)


# ---------------------------------------------------------------------------


def _inv_metric(M, n, diagonal):
    if diagonal:
        out = linalg.zeros(len(M), len(M), n)
        for i in range(len(M)):
            out[i][i] = M[i][i].inverse()
        return out
    return linalg.inverse(M, n)


def sigma_step(f, g, h, n, diagonal=False):
    """
    Minimal inverse of f (r_{k-1} x r_k, holomorphic entries) with metric g on
    the target and h on the source.
    """
    F = linalg.lift(f, n)
    if linalg.is_zero(F):
        raise linalg.RankFactorizationError("zero matrix has no minimal inverse")
    B, C, _ = linalg.rank_factorization(F, n)
    hinv = _inv_metric(h, n, diagonal)
    Cs = linalg.adjoint(C)
    Bs = linalg.adjoint(B)
    hinvCs = linalg.matmul(hinv, Cs, n)
    left = linalg.matmul(hinvCs, linalg.inverse(linalg.matmul(C, hinvCs, n), n), n)
    BsG = linalg.matmul(Bs, g, n)
    right = linalg.matmul(linalg.inverse(linalg.matmul(BsG, B, n), n), BsG, n)
    return linalg.matmul(left, right, n)


def sigmas_for(c, metric, upto=None):
    upto = c.length if upto is None else upto
    n = c.nvars
    out = {}
    for k in range(1, upto + 1):
        g = metric.h(k - 1, c.rank(k - 1))
        h = metric.h(k, c.rank(k))
        out[k] = sigma_step(c.f(k), g, h, n, diagonal=metric.diagonal)
    return out


def koszul_sigma(gens, weights=None):
    """
    sigma_k = (s ^ .) / |f|_w^2 with s = sum_j (conj f_j / w_j) e_j, for the
    product metric induced by diag(w) on E_1.  Returns {k: matrix}.
    """
    m = len(gens)
    n = gens[0].nvars
    if weights is None:
        weights = [1] * m
    w = [as_rational(x, n) for x in weights]
    s = [RationalFunction.from_poly(g.conjugate()) / w[j] for j, g in enumerate(gens)]
    norm = _z(n)
    for j, g in enumerate(gens):
        norm = norm + RationalFunction.from_poly(g) * s[j]
    inv = norm.inverse()
    out = {}
    for k in range(1, m + 1):
        src = koszul_basis(m, k - 1)
        tgt = {I: r for r, I in enumerate(koszul_basis(m, k))}
        M = linalg.zeros(len(tgt), len(src), n)
        for col, J in enumerate(src):
            for i in range(m):
                if i in J:
                    continue
                sign = (-1) ** sum(1 for j in J if j < i)
                I = tuple(sorted(J + (i,)))
                val = s[i] * inv
                M[tgt[I]][col] = val if sign > 0 else -val
        out[k] = M
    return out


@dataclass
class AppliedU:
    """u_k for k = 1..top: columns (length r_k) of (0, k-1)-forms."""

    complex: object
    metric: Metric
    sigmas: dict
    u: dict
    top: int
    meta: dict = field(default_factory=dict)

    def level(self, k):
        return self.u[k]

    @property
    def p(self):
        return self.complex.codim


def _mat_times_forms(M, col, n):
    out = []
    for row in M:
        acc = DifferentialForm.zero(n)
        for a, w in zip(row, col):
            if not a.is_zero() and not w.is_zero():
                acc = acc + w.scale(a)
        out.append(acc)
    return out


def build_u(c, metric, upto=None, sigmas=None, check=True):
    """
    u_1 = sigma_1 and u_{k+1} = (-1)^k sigma_{k+1} dbar(u_k), so that
    f_1 u_1 = 1 and (-1)^k f_{k+1} u_{k+1} = dbar u_k.
    """
    n = c.nvars
    top = c.codim if upto is None else upto
    if sigmas is None:
        sigmas = sigmas_for(c, metric, upto=top)
    u = {1: [DifferentialForm.scalar(row[0], n) for row in sigmas[1]]}
    for k in range(1, top):
        du = [dbar(w) for w in u[k]]
        nxt = _mat_times_forms(sigmas[k + 1], du, n)
        if k % 2:
            nxt = [-w for w in nxt]
        u[k + 1] = nxt
    au = AppliedU(c, metric, sigmas, u, top)
    if check:
        for name, ok in applied_u_checks(au):
            if not ok:
                raise IdentityFailure(f"identity failed: {name}")
    return au


def applied_u_checks(au):
    c, n = au.complex, au.complex.nvars
    out = []
    f1u1 = _mat_times_forms(linalg.lift(c.f(1), n), au.u[1], n)
    out.append(("f1 u1 = 1", f1u1[0] == DifferentialForm.scalar(_o(n), n)))
    for k in range(1, min(au.top, c.codim)):
        lhs = _mat_times_forms(linalg.lift(c.f(k + 1), n), au.u[k + 1], n)
        if k % 2:
            lhs = [-w for w in lhs]
        rhs = [dbar(w) for w in au.u[k]]
        out.append((f"(-1)^{k} f{k + 1} u{k + 1} = dbar u{k}", all(a == b for a, b in zip(lhs, rhs))))
    return out


@dataclass
class IdentityReport:
    items: list
    applied_u: object = None   # the AppliedU built for the u checks, for reuse

    @property
    def passed(self):
        return all(ok for _, ok in self.items)

    def first_failure(self):
        return next((name for name, ok in self.items if not ok), None)

    def lines(self):
        return [f"{'pass' if ok else 'FAIL'}  {name}" for name, ok in self.items]


def verify_identities(c, metric, with_u=True):
    n = c.nvars
    items = [(f"f{k} f{k + 1} = 0", ok) for k, ok in c.composition_zero()]
    try:
        sig = sigmas_for(c, metric)
    except (linalg.RankFactorizationError, linalg.SingularMatrixError) as e:
        items.append((f"sigma construction ({e})", False))
        return IdentityReport(items)
    F = {k: linalg.lift(c.f(k), n) for k in range(1, c.length + 1)}
    for k in range(1, c.length + 1):
        f, s = F[k], sig[k]
        fs = linalg.matmul(f, s, n)
        sf = linalg.matmul(s, f, n)
        items.append((f"f{k} sigma{k} f{k} = f{k}", linalg.equal(linalg.matmul(fs, f, n), f)))
        items.append((f"sigma{k} f{k} sigma{k} = sigma{k}", linalg.equal(linalg.matmul(sf, s, n), s)))
        g = metric.h(k - 1, c.rank(k - 1))
        h = metric.h(k, c.rank(k))
        items.append((f"f{k} sigma{k} is self-adjoint for h{k - 1}",
                      linalg.equal(linalg.matmul(linalg.adjoint(fs), g, n), linalg.matmul(g, fs, n))))
        items.append((f"sigma{k} f{k} is self-adjoint for h{k}",
                      linalg.equal(linalg.matmul(linalg.adjoint(sf), h, n), linalg.matmul(h, sf, n))))
    for j in range(0, c.length + 1):
        r = c.rank(j)
        M = linalg.zeros(r, r, n)
        if j + 1 <= c.length:
            M = linalg.add(M, linalg.matmul(F[j + 1], sig[j + 1], n))
        if j >= 1:
            M = linalg.add(M, linalg.matmul(sig[j], F[j], n))
        items.append((f"f sigma + sigma f = id on E{j}", linalg.equal(M, linalg.identity(r, n))))
    for k in range(1, c.length):
        items.append((f"sigma{k + 1} sigma{k} = 0", linalg.is_zero(linalg.matmul(sig[k + 1], sig[k], n))))
    if with_u:
        au = build_u(c, metric, sigmas=sig, check=False)
        items.extend(applied_u_checks(au))
        return IdentityReport(items, au)
    return IdentityReport(items)
