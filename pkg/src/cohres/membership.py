"""Batteries of test forms, membership verdicts and exact membership oracles."""

from __future__ import annotations

import csv
import io
import shlex
from dataclasses import dataclass, field

from sympy.polys.matrices import DomainMatrix

from .freecomplex import _domain, _to_dom, hol_monomials
from .pairing import PairingError, TestForm, index_sets
from .polyring import ParseError, Polynomial, parse_poly

MEMBER, NON_MEMBER, INCONCLUSIVE, NOT_APPLICABLE = "member", "non-member", "inconclusive", "not-applicable"


@dataclass(frozen=True)
class Thresholds:
    low: float = 1e-4
    high: float = 1e-1

    @classmethod
    def parse(cls, text):
        """'low,high' or 'low=..,high=..'."""
        parts = [s.strip() for s in text.split(",") if s.strip()]
        kv = {}
        for i, s in enumerate(parts):
            if "=" in s:
                k, v = s.split("=", 1)
                kv[k.strip()] = float(v)
            else:
                kv[["low", "high"][i]] = float(s)
        t = cls(kv.get("low", cls.low), kv.get("high", cls.high))
        if not 0 < t.low < t.high:
            raise ValueError("thresholds need 0 < low < high")
        return t


@dataclass
class Evidence:
    ell: int
    tid: str
    value: complex
    rho: float
    rho_half: float
    err_est: float
    refinement: float
    R: float = 0.0


@dataclass
class MembershipVerdict:
    verdict: str
    evidence: list
    oracle_verdict: str | None = None
    raw_verdict: str | None = None
    diagnostics: list = field(default_factory=list)

    def max_rho(self):
        return max((e.rho for e in self.evidence), default=0.0)

    def rho_by_R(self):
        out = {}
        for e in self.evidence:
            out[e.R] = max(out.get(e.R, 0.0), e.rho)
        return out


# ---------------------------------------------------------------------------
# batteries


def _monomials_up_to(n, D, cols=None):
    cols = list(range(n)) if cols is None else list(cols)
    out = []
    for a in hol_monomials(len(cols), D):
        full = [0] * n
        for c, e in zip(cols, a):
            full[c] = e
        out.append(tuple(full))
    return out


def _mono_poly(n, a):
    return Polynomial.from_terms(n, {(tuple(a), (0,) * n): 1})


def _mono_name(a, names=("x", "y", "z")):
    n = len(a)
    nm = names if n <= 3 else tuple(f"z{j + 1}" for j in range(n))
    if n == 1:
        nm = ("z",)
    parts = [nm[j] + (f"^{e}" if e > 1 else "") for j, e in enumerate(a) if e]
    return "*".join(parts) or "1"


def default_h_degree(gens):
    n = gens[0].nvars
    return n * (max(g.total_degree() for g in gens) - 1)


def default_battery(n, p, gens, h_degree=None, radii=((0.5, 1.0), (0.35, 0.8)),
                    delta_scales=(1.0, 0.5), k=4, t_part=None, m_degree=1):
    """
    All (radius pair, delta scale, index set I, h, m) combinations, with h over
    the holomorphic monomials up to h_degree and m over 1, the zb_I monomials
    of degree <= m_degree, and (for n <= 2) one monomial with a T-part.
    """
    if h_degree is None:
        h_degree = default_h_degree(gens)
    if t_part is None:
        t_part = n <= 2
    hs = _monomials_up_to(n, h_degree)
    out = []
    for (r, R) in radii:
        for ds in delta_scales:
            for I in index_sets(n, p):
                T = [j for j in range(n) if j not in I]
                ms = [(0,) * n]
                if I:
                    ms += [tuple(b) for b in _monomials_up_to(n, m_degree, I) if any(b)]
                if t_part:
                    b = [0] * n
                    b[T[0]] = 1
                    ms.append(tuple(b))
                for m in ms:
                    for a in hs:
                        tid = (f"r{r:g}_R{R:g}_d{ds:g}_I{''.join(str(i + 1) for i in I) or '0'}"
                               f"_m{_mono_name(m)}_h{_mono_name(a)}")
                        out.append(TestForm(r, R, None, k, _mono_poly(n, a), tuple(m), tuple(I), tid, ds))
    return out


def battery_coverage(battery, n, p):
    """Problems with the spanning precondition, as a list of messages."""
    msgs = []
    if not battery:
        return ["battery is empty"]
    if len({tf.R for tf in battery}) < 2:
        msgs.append("battery uses fewer than two radii")
    if len({(tf.delta, tf.delta_scale) for tf in battery}) < 2:
        msgs.append("battery uses fewer than two delta values")
    need = set(index_sets(n, p))
    have = {tuple(tf.I) for tf in battery}
    if not need <= have:
        msgs.append(f"battery misses index sets {sorted(need - have)}")
    return msgs


def parse_battery(text, n):
    """
    One test form per line as key=value tokens:
        id=a r=0.5 R=1 delta=auto k=4 h=x*y m=0,1 I=2
    I lists 1-based indices (empty or 0 for none); m lists zb exponents.
    """
    out = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        kv = {}
        for tok in shlex.split(line):
            if "=" not in tok:
                raise ParseError(f"battery line {lineno}: bad token {tok!r}")
            k, v = tok.split("=", 1)
            kv[k] = v
        try:
            delta = kv.get("delta", "auto")
            scale = float(kv.get("delta_scale", "1"))
            I = tuple(int(s) - 1 for s in kv.get("I", "").split(",") if s.strip() and s.strip() != "0")
            m = tuple(int(s) for s in kv["m"].split(",")) if "m" in kv else (0,) * n
            tf = TestForm(float(kv.get("r", 0.5)), float(kv.get("R", 1.0)),
                          None if delta == "auto" else float(delta), int(kv.get("k", 4)),
                          parse_poly(kv.get("h", "1"), n), m, I, kv.get("id", f"tf{lineno}"), scale)
        except (ValueError, PairingError) as e:
            raise ParseError(f"battery line {lineno}: {e}") from None
        out.append(tf)
    return out


def format_battery(battery, n):
    lines = []
    for tf in battery:
        I = ",".join(str(i + 1) for i in tf.I) or "0"
        delta = "auto" if tf.delta is None else repr(tf.delta)
        lines.append(f"id={tf.tid} r={tf.r!r} R={tf.R!r} delta={delta} delta_scale={tf.delta_scale!r} "
                     f"k={tf.k} h={tf.hol(n)} m={','.join(map(str, tf.m_exps(n)))} I={I}")
    return "\n".join(lines) + "\n"


def load_battery(path, n):
    with open(path) as fh:
        return parse_battery(fh.read(), n)


# ---------------------------------------------------------------------------
# verdicts


def membership_test(engine, phi, battery, thresholds=Thresholds(), oracle=None, p=None, ells=None):
    """
    Evaluate every (ell, test form) pairing of phi and classify:
    non-member if some rho exceeds the high threshold at both refinements,
    member if every rho (working resolution) is below the low threshold,
    otherwise inconclusive.
    """
    n = engine.n
    if not phi.is_holomorphic():
        raise ValueError("phi must be holomorphic")
    ells = range(len(engine.forms)) if ells is None else ells
    ev = []
    for ell in ells:
        for tf in battery:
            res = engine.pairing(ell, phi, tf)
            ev.append(Evidence(ell + 1, tf.tid, res.value, res.rho, res.rho_half, res.err_est,
                               res.refinement_delta, tf.R))
    diags = []
    if any(e.rho > thresholds.high and e.rho_half > thresholds.high for e in ev):
        raw = NON_MEMBER
    elif all(e.rho < thresholds.low for e in ev):
        raw = MEMBER
    else:
        raw = INCONCLUSIVE
    verdict = raw
    if raw == MEMBER and p is not None:
        gaps = battery_coverage(battery, n, p)
        if gaps:
            verdict = INCONCLUSIVE
            diags.append("battery too coarse for a member verdict: " + "; ".join(gaps))
    if oracle in (MEMBER, NON_MEMBER) and verdict in (MEMBER, NON_MEMBER) and verdict != oracle:
        diags.append(f"!!! verdict {verdict} contradicts the exact oracle ({oracle}); downgraded")
        verdict = INCONCLUSIVE
    return MembershipVerdict(verdict, ev, oracle if oracle != NOT_APPLICABLE else None, raw, diags)


def evidence_csv(verdict):
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(["ell", "testform_id", "re", "im", "rho", "err_est"])
    for e in verdict.evidence:
        w.writerow([e.ell, e.tid, f"{e.value.real:.17g}", f"{e.value.imag:.17g}", f"{e.rho:.17g}",
                    f"{e.err_est:.17g}"])
    return buf.getvalue()


# ---------------------------------------------------------------------------
# exact oracles


def _is_homogeneous(p):
    return len({sum(a) for (a, b) in p.terms}) <= 1


def oracle_membership(ideal, phi, D=None):
    """member / non-member / not-applicable, by exact algebra."""
    n = ideal.nvars
    gens = ideal.generators
    if not phi.is_holomorphic():
        raise ValueError("phi must be holomorphic")
    if phi.is_zero():
        return MEMBER
    if ideal.kind == "monomial":
        keys = [next(iter(g.terms))[0] for g in gens]
        for (a, _), _c in phi.terms.items():
            if not any(all(x >= y for x, y in zip(a, k)) for k in keys):
                return NON_MEMBER
        return MEMBER
    if ideal.kind == "complete-intersection" and all(_is_homogeneous(g) for g in gens):
        D = phi.total_degree() if D is None else D
        return MEMBER if solve_combination(gens, phi, D) is not None else NON_MEMBER
    return NOT_APPLICABLE


def solve_combination(gens, phi, D):
    """Polynomials a_j of degree <= D with sum a_j g_j = phi, or None."""
    n = phi.nvars
    mons = hol_monomials(n, D)
    zb = (0,) * n
    K = _domain(list(gens) + [phi])
    unknowns = [(j, a) for j in range(len(gens)) for a in mons]
    rows = {}
    for u, (j, a) in enumerate(unknowns):
        for (e, _), c in gens[j].terms.items():
            key = tuple(x + y for x, y in zip(a, e))
            rows.setdefault(key, {})[u] = c
    for (e, _), c in phi.terms.items():
        rows.setdefault(tuple(e), {})
    keys = sorted(rows)
    A = [[K.zero] * (len(unknowns) + 1) for _ in keys]
    for i, key in enumerate(keys):
        for u, c in rows[key].items():
            A[i][u] = _to_dom(c, K)
        c = phi.terms.get((key, zb))
        if c is not None:
            A[i][-1] = _to_dom(c, K)
    M = DomainMatrix(A, (len(keys), len(unknowns) + 1), K)
    R, piv = M.rref()
    if len(unknowns) in piv:
        return None
    sol = [K.zero] * len(unknowns)
    Rl = R.to_list()
    for i, pc in enumerate(piv):
        sol[pc] = Rl[i][-1]
    from .freecomplex import _from_dom

    out = []
    for j in range(len(gens)):
        t = {}
        for u, (jj, a) in enumerate(unknowns):
            if jj == j and sol[u]:
                t[(a, zb)] = _from_dom(sol[u], K)
        out.append(Polynomial.from_terms(n, t))
    return out
