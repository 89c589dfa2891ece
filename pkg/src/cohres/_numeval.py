"""Vectorized numeric evaluation of Polynomial / RationalFunction on point arrays."""

import numpy as np

from .polyring import DEFAULT_POLE_FLOOR, NearPoleError, Polynomial, RationalFunction


class CompiledPoly:
    """Exponent matrix plus complex coefficients, evaluated with power tables."""

    def __init__(self, p):
        items = p.terms_items()
        self.nvars = p.nvars
        if items:
            self.exps = np.array([k for k, _ in items], dtype=np.int64)
            self.coef = np.array([c for _, c in items], dtype=complex)
        else:
            self.exps = np.zeros((0, 2 * p.nvars), dtype=np.int64)
            self.coef = np.zeros(0, dtype=complex)
        self.maxdeg = self.exps.max(axis=0) if len(items) else np.zeros(2 * p.nvars, dtype=np.int64)

    def __call__(self, Z, powers=None):
        Z = np.atleast_2d(np.asarray(Z, dtype=complex))
        if powers is None:
            powers = power_table(Z, self.maxdeg)
        N = Z.shape[0]
        if len(self.coef) == 1:
            t = np.full(N, self.coef[0], dtype=complex)
            for v, e in enumerate(self.exps[0]):
                if e:
                    t = t * powers[v][e]
            return t
        # Neumaier-compensated accumulation over terms
        s = np.zeros(N, dtype=complex)
        c = np.zeros(N, dtype=complex)
        for row, a in zip(self.exps, self.coef):
            t = np.full(N, a, dtype=complex)
            for v, e in enumerate(row):
                if e:
                    t = t * powers[v][e]
            s_new = s + t
            big = np.abs(s) >= np.abs(t)
            c += np.where(big, (s - s_new) + t, (t - s_new) + s)
            s = s_new
        return s + c


def power_table(Z, maxdeg):
    """
    powers[v][e] = w_v ** e with w = (z, conj z); v ranges over 2n generators.
    maxdeg is a bound for every generator or an array of per-generator bounds.
    """
    Z = np.atleast_2d(Z)
    nv = 2 * Z.shape[1]
    degs = np.broadcast_to(np.asarray(maxdeg, dtype=np.int64), (nv,))
    out = []
    for v in range(nv):
        if degs[v] == 0:
            out.append([None])
            continue
        w = Z[:, v] if v < Z.shape[1] else Z[:, v - Z.shape[1]].conj()
        col = [None, w]
        for _ in range(degs[v] - 1):
            col.append(col[-1] * w)
        out.append(col)
    return out


class CompiledRational:
    def __init__(self, f):
        if isinstance(f, Polynomial):
            f = RationalFunction.from_poly(f)
        self.num = CompiledPoly(f.num)
        self.dens = [(CompiledPoly(g), e) for g, e in f.factors]
        self.maxdeg = max([int(self.num.maxdeg.max(initial=0))]
                          + [int(g.maxdeg.max(initial=0)) for g, _ in self.dens])

    def __call__(self, Z, powers=None, floor=DEFAULT_POLE_FLOOR):
        Z = np.atleast_2d(np.asarray(Z, dtype=complex))
        if powers is None:
            powers = power_table(Z, self.maxdeg)
        val = self.num(Z, powers)
        if self.dens:
            den = np.ones(Z.shape[0], dtype=complex)
            for g, e in self.dens:
                den = den * g(Z, powers) ** e
            m = np.abs(den)
            if m.size and m.min() < floor:
                raise NearPoleError(float(m.min()), floor)
            val = val / den
        return val


def compile_function(f):
    return CompiledRational(f)
