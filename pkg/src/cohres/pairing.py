"""
Numerical residue pairings  int phi * omega ^ dbar(psi)  against compactly
supported test forms, plus the quadrature rules they use.

Test forms.  With T the complement of the index set I (|T| = p) write
s_T = |z_T|, s_I = |z_I| and let m_I be the part of the antiholomorphic
monomial m that only involves zb_I.  The form is

    psi = chi_T(s_T) chi_I(s_I) h(z) mu dz_1 ^ ... ^ dz_n ^ dzb_I,
    mu  = theta(v) m + (1 - theta(v)) m_I,        v = sum_j |f_j|^2,

with chi = 1 on [0, r], 0 on [R, oo) and theta = 0 for v <= delta, 1 for
v >= 2 delta, both C^k polynomial smoothsteps.  Near Z (where theta = 0 and,
under the support condition Z n supp psi in {s_T < r}, chi_T = 1) the form is
chi_I(s_I) h m_I dz ^ dzb_I, which is dbar-closed because only dzb_j with
j in T could survive the wedge with dzb_I.  A form that vanishes identically
near Z would pair to zero with every dbar-closed omega (Stokes), so the
theta factor interpolates towards m_I instead of towards 0.

Quadrature.  Each block of variables (T, and I when p < n) is written in
polar-simplex coordinates z_j = s sqrt(t_j) e^{i a_j} with t on the standard
simplex; the volume element is 2^{1-b} s^{2b-1} ds dt da for a block of b
variables.  Angles use the periodic trapezoid rule, which is exact for the
torus-invariant denominators of monomial ideals and diagonal metrics as soon
as the node count exceeds the angular mode bound.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass, field
from itertools import combinations

import numpy as np
from scipy.special import betainc, gammaln
from scipy.stats import qmc

from ._numeval import CompiledPoly, power_table
from .antiforms import CompiledForm, FormMonomial, monomial_wedge, volume_constant
from .polyring import DEFAULT_POLE_FLOOR, NearPoleError, Polynomial


class PairingError(ValueError):
    pass


# ---------------------------------------------------------------------------
# smoothsteps


def smoothstep(x, k):
    """C^k step: 0 for x <= 0, 1 for x >= 1, derivative c x^k (1-x)^k."""
    return betainc(k + 1, k + 1, np.clip(x, 0.0, 1.0))


def smoothstep_deriv(x, k):
    xc = np.clip(x, 0.0, 1.0)
    logc = gammaln(2 * k + 2) - 2 * gammaln(k + 1)
    return np.exp(logc) * (xc * (1 - xc)) ** k


def cutoff(s, r, R, k):
    """(chi, chi') with chi = 1 on [0, r] and 0 on [R, oo)."""
    x = (s - r) / (R - r)
    return 1.0 - smoothstep(x, k), -smoothstep_deriv(x, k) / (R - r)


def shell(v, delta, k):
    """(theta, theta') with theta = 0 for v <= delta and 1 for v >= 2 delta."""
    x = (v - delta) / delta
    return smoothstep(x, k), smoothstep_deriv(x, k) / delta


# ---------------------------------------------------------------------------
# data


@dataclass(frozen=True)
class TestForm:
    """One element of the test battery; see the module docstring."""

    r: float = 0.5
    R: float = 1.0
    delta: float | None = None
    k: int = 4
    h: Polynomial | None = None
    m: tuple = ()
    I: tuple = ()
    tid: str = ""
    delta_scale: float = 1.0

    __test__ = False  # not a pytest class

    def __post_init__(self):
        if not 0 < self.r < self.R:
            raise PairingError("need 0 < r < R")
        if self.k < 3:
            raise PairingError("smoothness order must be >= 3")
        if self.delta is not None and self.delta <= 0:
            raise PairingError("delta must be positive")
        if list(self.I) != sorted(set(self.I)):
            raise PairingError("I must be strictly increasing")

    def shape_key(self):
        """Everything except h (which enters as a scalar factor); delta only matters with a T-part."""
        t_part = any(e for j, e in enumerate(self.m) if j not in self.I)
        delta = (self.delta, self.delta_scale) if t_part else None
        return (self.r, self.R, delta, self.k, tuple(self.m), tuple(self.I))

    def m_exps(self, n):
        m = tuple(self.m) if self.m else (0,) * n
        if len(m) != n:
            raise PairingError("m exponent tuple has the wrong length")
        return m

    def has_t_part(self, n):
        m = self.m_exps(n)
        return any(m[j] for j in range(n) if j not in self.I)

    def hol(self, n):
        return self.h if self.h is not None else Polynomial.one(n)


@dataclass(frozen=True)
class QuadratureSpec:
    method: str = "tensor-grid"
    resolution: int = 24
    seed: int = 0
    box: float | None = None
    angular: int | None = None

    def __post_init__(self):
        if self.method not in ("tensor-grid", "monte-carlo", "quasi-monte-carlo"):
            raise PairingError(f"unknown quadrature method {self.method!r}")
        if self.resolution <= 0:
            raise PairingError("resolution must be positive")

    def halved(self):
        return QuadratureSpec(self.method, max(1, self.resolution // 2), self.seed, self.box, self.angular)

    def doubled(self):
        return QuadratureSpec(self.method, self.resolution * 2, self.seed, self.box, self.angular)

    def key(self):
        return (self.method, self.resolution, self.seed, self.angular)


def default_quadrature(n, seed=0):
    if n <= 2:
        return QuadratureSpec("tensor-grid", 24, seed)
    return QuadratureSpec("quasi-monte-carlo", 2 ** 20, seed)


@dataclass
class PairingResult:
    value: complex
    err_est: float
    rho: float
    rho_half: float
    scale: float
    value_half: complex
    npoints: int = 0

    @property
    def refinement_delta(self):
        return abs(self.value - self.value_half) / max(abs(self.value), self.scale, 1e-300)


# ---------------------------------------------------------------------------
# dbar psi


def _monomial_values(Z, exps, conj=True):
    W = Z.conj() if conj else Z
    out = np.ones(Z.shape[0], dtype=complex)
    for j, e in enumerate(exps):
        if e:
            out = out * W[:, j] ** e
    return out


class DbarPsi:
    """Vectorized evaluation of dbar(chi_T chi_I mu) ^ dz ^ dzb_I (h excluded)."""

    def __init__(self, gens, n):
        self.n = n
        self.gens = [CompiledPoly(g) for g in gens]
        # d f_i / d z_j, conjugated at evaluation time
        self.dgens = [[CompiledPoly(g.d_partial(j)) for j in range(n)] for g in gens]
        self.maxdeg = max(int(g.maxdeg.max(initial=0)) for g in self.gens)

    def v(self, Z, powers=None):
        if powers is None:
            powers = power_table(Z, self.maxdeg)
        acc = np.zeros(Z.shape[0])
        for g in self.gens:
            acc = acc + np.abs(g(Z, powers)) ** 2
        return acc

    def __call__(self, tf, Z, delta):
        n = self.n
        Z = np.atleast_2d(np.asarray(Z, dtype=complex))
        N = Z.shape[0]
        I = tuple(tf.I)
        T = tuple(j for j in range(n) if j not in I)
        m = tf.m_exps(n)
        mI = tuple(m[j] if j in I else 0 for j in range(n))
        sT = np.sqrt(np.sum(np.abs(Z[:, list(T)]) ** 2, axis=1))
        chiT, dchiT = cutoff(sT, tf.r, tf.R, tf.k)
        if I:
            sI = np.sqrt(np.sum(np.abs(Z[:, list(I)]) ** 2, axis=1))
            chiI, _ = cutoff(sI, tf.r, tf.R, tf.k)
        else:
            chiI = np.ones(N)
        mIv = _monomial_values(Z, mI)
        base = FormMonomial(tuple(range(n)), I)
        terms = {}
        with np.errstate(invalid="ignore", divide="ignore"):
            radial = np.where(sT > 0, dchiT / (2 * np.where(sT > 0, sT, 1.0)), 0.0)
        if tf.has_t_part(n):
            powers = power_table(Z, self.maxdeg)
            fv = [g(Z, powers) for g in self.gens]
            v = sum(np.abs(x) ** 2 for x in fv)
            th, dth = shell(v, delta, tf.k)
            mv = _monomial_values(Z, m)
            mu = th * mv + (1 - th) * mIv
        else:
            mu = mIv
        for j in T:
            g = radial * Z[:, j] * mu
            if tf.has_t_part(n):
                dv = np.zeros(N, dtype=complex)
                live = dth != 0
                if live.any():
                    for fi, dfi in zip(fv, self.dgens):
                        dv = dv + fi * np.conj(dfi[j](Z, powers))
                dmu = dth * dv * (mv - mIv)
                if m[j]:
                    mm = list(m)
                    mm[j] -= 1
                    dmu = dmu + th * m[j] * _monomial_values(Z, mm)
                g = g + chiT * dmu
            g = g * chiI
            s, mono = monomial_wedge(FormMonomial((), (j,)), base)
            if s:
                terms[mono] = terms.get(mono, 0) + s * g
        return terms


def resolve_delta(tf, gens, n, samples=4096):
    """delta = 0.5 * min v over {|z_T| = r/2, |z_I| <= R} (deterministic sample)."""
    if tf.delta is not None:
        return tf.delta * tf.delta_scale
    rng = np.random.default_rng(20240611)
    I = list(tf.I)
    T = [j for j in range(n) if j not in I]
    Z = np.zeros((samples, n), dtype=complex)
    g = rng.standard_normal((samples, len(T))) + 1j * rng.standard_normal((samples, len(T)))
    g /= np.linalg.norm(g, axis=1, keepdims=True)
    Z[:, T] = g * (tf.r / 2)
    if I:
        gi = rng.standard_normal((samples, len(I))) + 1j * rng.standard_normal((samples, len(I)))
        rad = tf.R * rng.random(samples) ** (1 / (2 * len(I)))
        Z[:, I] = gi / np.linalg.norm(gi, axis=1, keepdims=True) * rad[:, None]
    v = DbarPsi(gens, n).v(Z)
    vmin = float(v.min())
    if vmin <= 0:
        raise PairingError("v vanishes on the sampling sphere; the support condition fails")
    return 0.5 * vmin * tf.delta_scale


def eval_dbar_psi(tf, phi, point, gens, delta=None):
    """dbar(phi psi) at one point as {FormMonomial: complex}."""
    n = len(point)
    if delta is None:
        delta = resolve_delta(tf, gens, n)
    Z = np.asarray(point, dtype=complex).reshape(1, n)
    terms = DbarPsi(gens, n)(tf, Z, delta)
    scal = phi.evaluate(point) * tf.hol(n).evaluate(point)
    return {m: complex(v[0] * scal) for m, v in terms.items() if v[0] != 0}


# ---------------------------------------------------------------------------
# quadrature nodes


def _gl(a, b, N):
    x, w = np.polynomial.legendre.leggauss(N)
    return 0.5 * (b - a) * x + 0.5 * (b + a), 0.5 * (b - a) * w


def _simplex_rule(b, N):
    """(t array (M, b), weights) for the standard simplex {t >= 0, sum t = 1}."""
    if b == 1:
        return np.ones((1, 1)), np.ones(1)
    if b == 2:
        x, w = _gl(0.0, 1.0, N)
        return np.stack([x, 1 - x], axis=1), w
    if b == 3:
        x, w = _gl(0.0, 1.0, N)
        A, B = np.meshgrid(x, x, indexing="ij")
        WA, WB = np.meshgrid(w, w, indexing="ij")
        A, B, W = A.ravel(), B.ravel(), (WA * WB).ravel()
        t = np.stack([A, (1 - A) * B, (1 - A) * (1 - B)], axis=1)
        return t, W * (1 - A)
    raise PairingError("blocks of more than three variables are not supported")


def _directions(b, Nt, M):
    """Unit vectors of C^b (sqrt(t) e^{i angle}) with simplex x angle weights."""
    t, wt = _simplex_rule(b, Nt)
    ang = 2 * np.pi * np.arange(M) / M
    grids = np.meshgrid(*([ang] * b), indexing="ij")
    A = np.stack([g.ravel() for g in grids], axis=1)
    wa = (2 * np.pi / M) ** b
    U = np.repeat(np.sqrt(t), len(A), axis=0) * np.exp(1j * np.tile(A, (len(t), 1)))
    return U, np.repeat(wt, len(A)) * wa


def _block_tensor(b, panels, Ns, Nt, M):
    ss, ws = [], []
    for lo, hi in panels:
        x, w = _gl(lo, hi, Ns)
        ss.append(x)
        ws.append(w)
    s, ws = np.concatenate(ss), np.concatenate(ws)
    U, wu = _directions(b, Nt, M)
    Z = np.repeat(s, len(U))[:, None] * np.tile(U, (len(s), 1))
    S = np.repeat(s, len(U))
    W = (2.0 ** (1 - b)) * S ** (2 * b - 1) * np.repeat(ws, len(U)) * np.tile(wu, len(s))
    return Z, W


def _ray_crossing(vfun, base, U, T, level, hi, iters=60):
    """Smallest s in [0, hi] with v(base + s U on T) >= level, by bisection (v assumed monotone on rays)."""
    lo_s = np.zeros(len(U))
    hi_s = np.full(len(U), hi)
    for _ in range(iters):
        mid = 0.5 * (lo_s + hi_s)
        Z = base.copy()
        Z[:, T] = mid[:, None] * U
        up = vfun(Z) >= level
        hi_s = np.where(up, mid, hi_s)
        lo_s = np.where(up, lo_s, mid)
    return hi_s


def _adapted_nodes(tf, N, M, n, vfun, delta):
    """
    Tensor rule for test forms with a T-part: along every ray the inner
    T-panel [0, r/2] is split where v crosses delta and 2 delta, so the
    transition band of the shell function gets its own Gauss panel.
    """
    I = list(tf.I)
    T = [j for j in range(n) if j not in I]
    U, wu = _directions(len(T), N, M)
    if I:
        ZI, WI = _block_tensor(len(I), radial_panels(tf, "I", n), N, N, M)
    else:
        ZI, WI = np.zeros((1, 0), dtype=complex), np.ones(1)
    K = len(U) * len(WI)
    UU = np.repeat(U, len(WI), axis=0)
    WU = np.repeat(wu, len(WI))
    base = np.zeros((K, n), dtype=complex)
    if I:
        base[:, I] = np.tile(ZI, (len(U), 1))
    WB = np.tile(WI, len(U))
    h = tf.r / 2
    a = _ray_crossing(vfun, base, UU, T, delta, h)
    b = np.maximum(a, _ray_crossing(vfun, base, UU, T, 2 * delta, h))
    x, w = _gl(0.0, 1.0, N)
    edges = [(np.zeros(K), a), (a, b), (b, np.full(K, h)), (np.full(K, h), np.full(K, tf.r)),
             (np.full(K, tf.r), np.full(K, tf.R))]
    bT = len(T)
    Zs, Ws = [], []
    for lo, hi in edges:
        S = lo[:, None] + (hi - lo)[:, None] * x[None, :]           # (K, N)
        WS = (hi - lo)[:, None] * w[None, :]
        Z = np.repeat(base, N, axis=0)
        Z[:, T] = S.reshape(-1)[:, None] * np.repeat(UU, N, axis=0)
        Wt = (2.0 ** (1 - bT)) * S ** (2 * bT - 1) * WS * (WU * WB)[:, None]
        Zs.append(Z)
        Ws.append(Wt.reshape(-1))
    return np.concatenate(Zs), np.concatenate(Ws)


def _block_random(b, lo, hi, U):
    """Map uniform samples U (N, 2b) to the block; returns (Z, W) with W the density factor."""
    s = lo + (hi - lo) * U[:, 0]
    if b == 1:
        t = np.ones((len(s), 1))
        jac = np.ones(len(s))
        ang = U[:, 1:2]
    elif b == 2:
        t = np.stack([U[:, 1], 1 - U[:, 1]], axis=1)
        jac = np.ones(len(s))
        ang = U[:, 2:4]
    elif b == 3:
        a, c = U[:, 1], U[:, 2]
        t = np.stack([a, (1 - a) * c, (1 - a) * (1 - c)], axis=1)
        jac = 1 - a
        ang = U[:, 3:6]
    else:
        raise PairingError("blocks of more than three variables are not supported")
    Z = s[:, None] * np.sqrt(t) * np.exp(2j * np.pi * ang)
    W = (hi - lo) * jac * (2 * np.pi) ** b * (2.0 ** (1 - b)) * s ** (2 * b - 1)
    return Z, W


def _combine(blocks, n, idx):
    """Tensor product of per-block (Z_B, W_B) into full points."""
    Z = np.zeros((1, n), dtype=complex)
    W = np.ones(1)
    for (ZB, WB), cols in zip(blocks, idx):
        N0, N1 = len(W), len(WB)
        Z = np.repeat(Z, N1, axis=0)
        Z[:, cols] = np.tile(ZB, (N0, 1))
        W = np.repeat(W, N1) * np.tile(WB, N0)
    return Z, W


def radial_panels(tf, block, n):
    """Radial integration panels for block 'T' or 'I'."""
    if block == "T":
        if tf.has_t_part(n):
            return [(0.0, tf.r / 2), (tf.r / 2, tf.r), (tf.r, tf.R)]
        return [(tf.r, tf.R)]
    return [(0.0, tf.r), (tf.r, tf.R)]


def quadrature_nodes(tf, q, n, angular_min=8, vfun=None, delta=None, angular_exact=False):
    """
    (Z, W) covering the support of dbar psi for this test form.  With
    angular_exact the integrand is known to be a trigonometric polynomial of
    degree < angular_min in every angle, so the angular count stays fixed and
    the resolution only refines the radial and simplex rules.
    """
    I = list(tf.I)
    T = [j for j in range(n) if j not in I]
    blocks_idx = [T] + ([I] if I else [])
    names = ["T"] + (["I"] if I else [])
    if q.method == "tensor-grid":
        N = q.resolution
        if q.angular is not None:
            M = q.angular
        else:
            M = angular_min if angular_exact else max(N, angular_min)
        if tf.has_t_part(n) and vfun is not None:
            return _adapted_nodes(tf, N, M, n, vfun, delta)
        blocks = []
        for nm, cols in zip(names, blocks_idx):
            panels = radial_panels(tf, nm, n)
            blocks.append(_block_tensor(len(cols), panels, N, N, M))
        return _combine(blocks, n, blocks_idx)
    dims = sum(2 * len(c) for c in blocks_idx)
    Npts = q.resolution
    if q.method == "quasi-monte-carlo":
        sob = qmc.Sobol(d=dims, scramble=True, seed=q.seed)
        U = sob.random(Npts)
    else:
        U = np.random.default_rng(q.seed).random((Npts, dims))
    Z = np.zeros((Npts, n), dtype=complex)
    W = np.ones(Npts) / Npts
    off = 0
    for nm, cols in zip(names, blocks_idx):
        panels = radial_panels(tf, nm, n)
        lo, hi = panels[0][0], panels[-1][1]
        ZB, WB = _block_random(len(cols), lo, hi, U[:, off:off + 2 * len(cols)])
        off += 2 * len(cols)
        Z[:, cols] = ZB
        W = W * WB
    return Z, W


def first_half(q):
    """Half-resolution rule: first half of the sample sequence, or N/2 per axis."""
    return q.halved()


# ---------------------------------------------------------------------------
# engine


def _digest(*parts):
    h = hashlib.sha256()
    for p in parts:
        h.update(repr(p).encode())
    return h.hexdigest()[:16]


class PairingEngine:
    """
    Caches G = kappa_n * top-coefficient(omega ^ dbar(chi mu) ^ dz ^ dzb_I)
    on quadrature nodes, so that every (phi, h) costs one polynomial evaluation.
    """

    def __init__(self, gens, forms, q, max_phi_degree=4, max_h_degree=4, floor=DEFAULT_POLE_FLOOR):
        self.gens = list(gens)
        self.n = gens[0].nvars
        self.forms = list(forms)
        self.compiled = [CompiledForm(w) for w in self.forms]
        self.q = q
        self.floor = floor
        self.dpsi = DbarPsi(gens, self.n)
        self.kappa = volume_constant(self.n)
        num_deg = max((c.num.total_degree() for w in self.forms for c in w.terms.values()), default=0)
        gdeg = max(g.total_degree() for g in gens)
        self.angular_min = max_phi_degree + max_h_degree + num_deg + 2 * gdeg + 4
        self.degree_budget = max_phi_degree + max_h_degree
        # |monomial|^2 does not depend on the angles, so with monomial generators
        # every factor of the integrand is a trigonometric polynomial in them
        # (denominators are built from |f|^2 and angle-free metric weights)
        self.angular_exact = all(g.is_monomial() for g in gens) and all(
            _angle_free_denominators(w) for w in self.forms)
        self._cache = {}
        self._deltas = {}
        self._results = {}

    def release_grids(self):
        """Drop cached quadrature grids (memoized pairing results are kept)."""
        self._cache.clear()

    def delta(self, tf):
        key = tf.shape_key()
        if key not in self._deltas:
            self._deltas[key] = resolve_delta(tf, self.gens, self.n)
        return self._deltas[key]

    def _grid_G(self, ell, tf, q):
        key = (ell, tf.shape_key(), q.key())
        hit = self._cache.get(key)
        if hit is not None:
            return hit
        n = self.n
        delta = self.delta(tf)
        Z, W = quadrature_nodes(tf, q, n, self.angular_min, self.dpsi.v, delta, self.angular_exact)
        terms = self.dpsi(tf, Z, delta)
        mask = np.zeros(len(W), dtype=bool)
        for v in terms.values():
            mask |= v != 0
        G = np.zeros(len(W), dtype=complex)
        if mask.any():
            Zm = Z[mask]
            try:
                om = self.compiled[ell](Zm, floor=self.floor).terms
            except NearPoleError as e:
                raise PairingError(f"near-pole evaluation in the pairing integrand "
                                   f"(delta too small for this quadrature): {e}") from None
            top = FormMonomial(tuple(range(n)), tuple(range(n)))
            acc = np.zeros(mask.sum(), dtype=complex)
            for m1, c1 in om.items():
                for m2, c2 in terms.items():
                    s, mm = monomial_wedge(m1, m2)
                    if s and mm == top:
                        acc = acc + s * c1 * c2[mask]
                    elif s:
                        raise PairingError("integrand is not of top degree (|I| mismatch)")
            G[mask] = self.kappa * acc
        Zm, Wm, Gm = Z[mask], W[mask], G[mask]
        out = (Zm, Wm, Gm)
        self._cache[key] = out
        return out

    def integrate(self, ell, phi, tf, q=None):
        q = q or self.q
        Z, W, G = self._grid_G(ell, tf, q)
        if len(W) == 0:
            return 0j, 0.0
        ph = phi * tf.hol(self.n)
        if self.angular_exact and ph.total_degree() > self.degree_budget:
            raise PairingError(f"deg(phi h) = {ph.total_degree()} exceeds the engine budget "
                               f"{self.degree_budget}; raise max_phi_degree")
        f = CompiledPoly(ph)
        g = W * f(Z) * G
        return _pairwise_sum(g), float(_pairwise_sum(np.abs(g)).real)

    def pairing(self, ell, phi, tf):
        key = (ell, str(phi), tf.shape_key(), str(tf.hol(self.n)))
        hit = self._results.get(key)
        if hit is None:
            hit = self._results[key] = self._pairing(ell, phi, tf)
        return hit

    def _pairing(self, ell, phi, tf):
        v, sc = self.integrate(ell, phi, tf, self.q)
        vh, sch = self.integrate(ell, phi, tf, self.q.halved())
        rho = abs(v) / sc if sc > 0 else 0.0
        rhoh = abs(vh) / sch if sch > 0 else 0.0
        err = abs(v - vh) + 1e-13 * sc
        npts = len(self._grid_G(ell, tf, self.q)[1])
        return PairingResult(v, err, rho, rhoh, sc, vh, npts)


def _angle_free_denominators(w):
    """True when every denominator factor is a polynomial in the |z_j|^2."""
    for c in w.terms.values():
        for g, _ in c.factors:
            for (a, b) in g.terms:
                if tuple(a) != tuple(b):
                    return False
    return True


def _pairwise_sum(x):
    """Fixed-shape pairwise reduction (bit-reproducible for a given array)."""
    x = np.asarray(x)
    if x.size == 0:
        return x.dtype.type(0)
    while x.size > 1:
        if x.size % 2:
            x = np.concatenate([x, np.zeros(1, dtype=x.dtype)])
        x = x[0::2] + x[1::2]
    return x[0]


def residue_pairing(r_or_form, phi, tf, q, gens):
    """One-off pairing of a ResidueClass (or a bare form) against tf."""
    form = getattr(r_or_form, "omega", r_or_form)
    eng = PairingEngine(gens, [form], q, max_phi_degree=phi.total_degree(),
                        max_h_degree=tf.hol(len(gens) and gens[0].nvars).total_degree())
    return eng.pairing(0, phi, tf)


def contour_oracle_1d(phi, h, omega_fn, radius=0.75, N=256):
    """-oint_{|z| = radius} phi h omega dz by the trapezoid rule (n = 1)."""
    t = 2 * np.pi * np.arange(N) / N
    z = radius * np.exp(1j * t)
    dz = 1j * z * (2 * np.pi / N)
    vals = np.array([phi.evaluate([zz]) * h.evaluate([zz]) * omega_fn(zz) for zz in z])
    return -np.sum(vals * dz)


def index_sets(n, p):
    return [tuple(I) for I in combinations(range(n), n - p)]
