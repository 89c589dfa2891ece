"""
Free complexes 0 <- E_0 <- E_1 <- ... <- E_N with polynomial differentials.

f_k is stored as an r_{k-1} x r_k matrix of holomorphic Polynomials, so that
f_k acts on column vectors.  Builders for the Koszul and Taylor complexes,
the dual complex, exactness diagnostics and exact bounded-degree kernels live
here too.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field
from itertools import combinations, combinations_with_replacement

import numpy as np
from sympy.polys.domains import QQ, QQ_I
from sympy.polys.matrices import DomainMatrix

from .polyring import GaussianRational, ParseError, Polynomial, parse_poly


class ComplexError(ValueError):
    pass


class ExtDegreeBoundError(ComplexError):
    """No Ext generator found at the requested degree bound."""


class SamplingError(RuntimeError):
    pass


def _poly_matmul(A, B, n):
    z = Polynomial.zero(n)
    out = []
    for row in A:
        new = []
        for j in range(len(B[0]) if B else 0):
            acc = z
            for k, a in enumerate(row):
                if a and B[k][j]:
                    acc = acc + a * B[k][j]
            new.append(acc)
        out.append(new)
    return out


@dataclass
class FreeComplex:
    nvars: int
    ranks: list
    diffs: list
    codim: int
    name: str = ""

    def __post_init__(self):
        self.ranks = list(self.ranks)
        if not self.ranks or self.ranks[0] != 1:
            raise ComplexError("E_0 must have rank 1")
        if len(self.diffs) != len(self.ranks) - 1:
            raise ComplexError("need one differential per level")
        for k, f in enumerate(self.diffs, start=1):
            if len(f) != self.ranks[k - 1] or any(len(row) != self.ranks[k] for row in f):
                raise ComplexError(f"f_{k} has the wrong shape")
            for row in f:
                for x in row:
                    if x.nvars != self.nvars:
                        raise ComplexError(f"f_{k} entry has wrong nvars")
                    if not x.is_holomorphic():
                        raise ComplexError(f"f_{k} entry {x} is not holomorphic")
        if not 1 <= self.codim <= len(self.diffs):
            raise ComplexError(f"codim {self.codim} outside 1..{len(self.diffs)}")

    @property
    def length(self):
        return len(self.diffs)

    def f(self, k):
        """f_k for 1 <= k <= N; zero matrices outside that range."""
        if 1 <= k <= self.length:
            return self.diffs[k - 1]
        rows = self.ranks[k - 1] if 0 <= k - 1 < len(self.ranks) else 0
        cols = self.ranks[k] if 0 <= k < len(self.ranks) else 0
        return [[Polynomial.zero(self.nvars)] * cols for _ in range(rows)]

    def rank(self, k):
        return self.ranks[k] if 0 <= k < len(self.ranks) else 0

    def composition_zero(self):
        """[(k, ok)] for f_k f_{k+1} = 0."""
        out = []
        for k in range(1, self.length):
            P = _poly_matmul(self.diffs[k - 1], self.diffs[k], self.nvars)
            out.append((k, all(x.is_zero() for row in P for x in row)))
        return out

    def generators(self):
        return list(self.diffs[0][0])

    def with_diff(self, k, matrix):
        diffs = list(self.diffs)
        diffs[k - 1] = matrix
        return FreeComplex(self.nvars, self.ranks, diffs, self.codim, self.name + "*")


@dataclass
class DualComplex:
    """E_0* -> E_1* -> ...; the k-th map is the transpose of f_k, acting on columns."""

    nvars: int
    ranks: list
    maps: list

    def g(self, k):
        return self.maps[k - 1]


@dataclass
class IdealSpec:
    nvars: int
    generators: list
    kind: str = "general"
    declared_codim: int | None = None
    resolution: str | None = None
    xi: list | None = None
    name: str = ""
    metadata: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.kind not in ("complete-intersection", "monomial", "general"):
            raise ComplexError(f"unknown ideal kind {self.kind!r}")
        for g in self.generators:
            if g.is_zero():
                raise ComplexError("zero generator")
            if not g.is_holomorphic():
                raise ComplexError(f"generator {g} is not holomorphic")
            if g.constant_term():
                raise ComplexError(f"generator {g} does not vanish at the origin")
        if self.kind == "monomial" and not all(g.is_monomial() for g in self.generators):
            raise ComplexError("monomial ideal with a non-monomial generator")

    def codim(self):
        if self.declared_codim is not None:
            return self.declared_codim
        if self.kind == "complete-intersection":
            return len(self.generators)
        if self.kind == "monomial":
            return monomial_codim(self.generators)
        raise ComplexError("codimension must be declared for general ideals")


# ---------------------------------------------------------------------------
# builders


def koszul_complex(gens, codim=None):
    """Koszul complex; f_k(e_I) = sum_{i in I} (-1)^{pos(i, I)} g_i e_{I \\ i}."""
    m = len(gens)
    if m < 1:
        raise ComplexError("need at least one generator")
    n = gens[0].nvars
    z = Polynomial.zero(n)
    bases = [list(combinations(range(m), k)) for k in range(m + 1)]
    diffs = []
    for k in range(1, m + 1):
        src = bases[k]
        tgt = {I: r for r, I in enumerate(bases[k - 1])}
        M = [[z] * len(src) for _ in range(len(tgt))]
        for c, I in enumerate(src):
            for pos, i in enumerate(I):
                J = I[:pos] + I[pos + 1:]
                M[tgt[J]][c] = gens[i] if pos % 2 == 0 else -gens[i]
        diffs.append(M)
    return FreeComplex(n, [len(b) for b in bases], diffs, codim or m, name="koszul")


def koszul_basis(m, k):
    return list(combinations(range(m), k))


def _mono_key(p):
    if not p.is_monomial():
        raise ComplexError(f"{p} is not a monomial")
    (a, b), c = next(iter(p.terms.items()))
    if any(b):
        raise ComplexError(f"{p} is not holomorphic")
    return a, c


def _lcm(keys, n):
    return tuple(max((k[j] for k in keys), default=0) for j in range(n))


def taylor_complex(gens, codim=None):
    """Taylor resolution of a monomial ideal (rank C(m, k) at level k)."""
    m = len(gens)
    if m < 1:
        raise ComplexError("need at least one generator")
    n = gens[0].nvars
    keys = []
    for g in gens:
        a, c = _mono_key(g)
        keys.append(a)
    if any(_mono_key(g)[1] != 1 for g in gens):
        raise ComplexError("Taylor complex needs monic monomial generators")
    zero = Polynomial.zero(n)
    bases = [list(combinations(range(m), k)) for k in range(m + 1)]
    diffs = []
    for k in range(1, m + 1):
        src = bases[k]
        tgt = {I: r for r, I in enumerate(bases[k - 1])}
        M = [[zero] * len(src) for _ in range(len(tgt))]
        for c, I in enumerate(src):
            LI = _lcm([keys[i] for i in I], n)
            for pos, i in enumerate(I):
                J = I[:pos] + I[pos + 1:]
                LJ = _lcm([keys[j] for j in J], n)
                q = tuple(x - y for x, y in zip(LI, LJ))
                ent = Polynomial.from_terms(n, {(q, (0,) * n): 1})
                M[tgt[J]][c] = ent if pos % 2 == 0 else -ent
        diffs.append(M)
    if codim is None:
        codim = monomial_codim(gens)
    return FreeComplex(n, [len(b) for b in bases], diffs, codim, name="taylor")


def monomial_codim(gens):
    """Smallest number of coordinate hyperplanes containing the zero set."""
    n = gens[0].nvars
    supports = [frozenset(j for j, e in enumerate(_mono_key(g)[0]) if e) for g in gens]
    for k in range(1, n + 1):
        for S in combinations(range(n), k):
            if all(s & set(S) for s in supports):
                return k
    raise ComplexError("monomial ideal contains a unit")


def dual_complex(c):
    return DualComplex(c.nvars, list(c.ranks), [[list(col) for col in zip(*f)] for f in c.diffs])


def dual_of_dual(d):
    """Transpose back; recovers the original differentials."""
    return [[list(col) for col in zip(*g)] for g in d.maps]


# ---------------------------------------------------------------------------
# exactness


@dataclass
class ExactnessReport:
    passed: bool
    levels: list
    homology: list
    trials: int
    seed: int
    note: str = ""

    def lines(self):
        out = []
        for k, ok, detail in self.levels:
            out.append(f"level {k}: {'pass' if ok else 'FAIL'} ({detail})")
        for k, ok, detail in self.homology:
            out.append(f"homology at origin, level {k}: {'pass' if ok else 'FAIL'} ({detail})")
        if self.note:
            out.append(self.note)
        return out


def _num_matrix(M, z):
    return np.array([[x.evaluate(z) for x in row] for row in M], dtype=complex).reshape(len(M), len(M[0]) if M else 0)


def _num_rank(A, tol=1e-9):
    if A.size == 0:
        return 0
    s = np.linalg.svd(A, compute_uv=False)
    return int(np.sum(s > tol * max(1.0, s[0])))


def generic_exactness_check(c, trials=8, seed=0, threshold=1e-3, max_draws=10000, degree_bound=None):
    """
    Random-point rank test off Z plus an exact homology test at the origin.

    The rank test is a probabilistic certificate: at random points with
    sum |f_j|^2 > threshold it checks rank f_k + rank f_{k+1} = r_k and
    rank f_1 = 1.  Pointwise exactness off Z cannot see homology supported
    on Z (a Koszul complex on a non-regular sequence is exact off Z), so for
    complexes with homogeneous entries the graded homology in degrees <= D is
    also computed exactly.
    """
    if trials < 1:
        raise ComplexError("trials must be >= 1")
    rng = np.random.default_rng(seed)
    n, N = c.nvars, c.length
    gens = c.generators()
    good = {k: True for k in range(1, N + 1)}
    details = {k: [] for k in range(1, N + 1)}
    drawn = accepted = 0
    while accepted < trials:
        drawn += 1
        if drawn > max_draws:
            raise SamplingError("cannot sample points off the zero locus")
        z = (rng.standard_normal(n) + 1j * rng.standard_normal(n)) / np.sqrt(2)
        if sum(abs(g.evaluate(z)) ** 2 for g in gens) <= threshold:
            continue
        accepted += 1
        rk = {k: _num_rank(_num_matrix(c.diffs[k - 1], z)) for k in range(1, N + 1)}
        rk[N + 1] = 0
        for k in range(1, N + 1):
            want = 1 if k == 1 else c.ranks[k - 1]
            got = rk[k] if k == 1 else rk[k - 1] + rk[k]
            if k == 1:
                ok = rk[1] == 1
            else:
                ok = rk[k - 1] + rk[k] == c.ranks[k - 1]
            if not ok:
                good[k] = False
                details[k].append(f"rank sum {got} != {want}")
        if rk[N] != c.ranks[N]:
            good[N] = False
            details[N].append(f"last map rank {rk[N]} < {c.ranks[N]}")
    levels = [(k, good[k], "; ".join(sorted(set(details[k]))) or f"{trials} points") for k in range(1, N + 1)]
    homology = []
    note = ""
    if is_homogeneous(c):
        D = degree_bound if degree_bound is not None else max_entry_degree(c) + 1
        for k in range(1, N + 1):
            kern = bounded_degree_kernel(c.diffs[k - 1], D, side="right")
            if k < N:
                imgdim = _image_dim_in_degree(c.diffs[k], D, n)
            else:
                imgdim = 0
            ok = len(kern) == imgdim
            homology.append((k, ok, f"deg<={D}: dim ker {len(kern)}, dim im {imgdim}"))
    else:
        note = "homology at origin: skipped (non-homogeneous entries)"
    passed = all(ok for _, ok, _ in levels) and all(ok for _, ok, _ in homology)
    return ExactnessReport(passed, levels, homology, trials, seed, note)


def is_homogeneous(c):
    for f in c.diffs:
        for row in f:
            for x in row:
                if x and len({sum(a) for (a, b) in x.terms}) > 1:
                    return False
    return True


def max_entry_degree(c):
    return max((x.total_degree() for f in c.diffs for row in f for x in row), default=0)


# ---------------------------------------------------------------------------
# exact linear algebra on coefficient vectors


def hol_monomials(n, D):
    """Exponent tuples of z-monomials of total degree <= D, in degree order."""
    out = []
    for d in range(D + 1):
        for combo in combinations_with_replacement(range(n), d):
            a = [0] * n
            for j in combo:
                a[j] += 1
            out.append(tuple(a))
    return out


def _domain(polys):
    return QQ_I if any(not p.is_real for p in polys) else QQ


def _to_dom(c, K):
    c = GaussianRational.coerce(c)
    if K == QQ:
        return QQ(c.re.numerator, c.re.denominator)
    return QQ_I(QQ(c.re.numerator, c.re.denominator), QQ(c.im.numerator, c.im.denominator))


def _from_dom(x, K):
    if K == QQ:
        return GaussianRational(_fr(x))
    return GaussianRational(_fr(x.x), _fr(x.y))


def _fr(q):
    from fractions import Fraction

    return Fraction(int(q.numerator), int(q.denominator))


def _coeff_map(M, D, n, side):
    """
    Exact matrix of v -> M v (side='right', v a column) or v -> v M (side='left',
    v a row) on vectors with entries of degree <= D, in coefficient coordinates.
    """
    rows, cols = len(M), len(M[0])
    mons = hol_monomials(n, D)
    nin = cols if side == "right" else rows
    nout = rows if side == "right" else cols
    unknowns = [(i, a) for i in range(nin) for a in mons]
    K = _domain([x for row in M for x in row])
    outkeys = {}
    entries = {}
    zb = (0,) * n
    for u, (i, a) in enumerate(unknowns):
        for o in range(nout):
            x = M[o][i] if side == "right" else M[i][o]
            if not x:
                continue
            for (e, _), cf in x.terms.items():
                key = (o, tuple(p + q for p, q in zip(a, e)))
                r = outkeys.setdefault(key, len(outkeys))
                entries[(r, u)] = entries.get((r, u), GaussianRational(0)) + cf
    A = [[K.zero] * len(unknowns) for _ in range(max(len(outkeys), 1))]
    for (r, u), cf in entries.items():
        A[r][u] = _to_dom(cf, K)
    return DomainMatrix(A, (len(A), len(unknowns)), K), unknowns, K


def _vec_from_coeffs(coeffs, unknowns, nin, n, K):
    terms = [dict() for _ in range(nin)]
    zb = (0,) * n
    for x, (i, a) in zip(coeffs, unknowns):
        if x:
            terms[i][(a, zb)] = _from_dom(x, K)
    return [Polynomial.from_terms(n, t) for t in terms]


def bounded_degree_kernel(M, D, side="right"):
    """
    Basis of {v : M v = 0} (or {v : v M = 0} for side='left') with polynomial
    entries of degree <= D.  Exact: coefficients are equated over Q or Q(i).
    """
    if D < 0:
        raise ComplexError("degree bound must be >= 0")
    n = next(x.nvars for row in M for x in row)
    A, unknowns, K = _coeff_map(M, D, n, side)
    nin = len(M[0]) if side == "right" else len(M)
    null = A.nullspace()
    basis = null.to_list() if null.shape[0] else []
    basis = [row for row in basis if any(row)]
    return [_vec_from_coeffs(row, unknowns, nin, n, K) for row in basis]


def _image_rows(M, D, n, side):
    """Coefficient vectors of M v for all basis monomial vectors v whose image has degree <= D."""
    # for homogeneous M, only inputs of degree <= D can land in degree <= D
    rows, cols = len(M), len(M[0])
    nin = cols if side == "right" else rows
    out = []
    zb = (0,) * n
    for i in range(nin):
        for a in hol_monomials(n, D):
            mono = Polynomial.from_terms(n, {(a, zb): 1})
            if side == "right":
                vec = [M[o][i] * mono for o in range(rows)]
            else:
                vec = [M[i][o] * mono for o in range(cols)]
            if all(x.total_degree() <= D for x in vec) and any(vec):
                out.append(vec)
    return out


def _vecs_to_matrix(vecs, n, D):
    mons = {a: j for j, a in enumerate(hol_monomials(n, D))}
    polys = [x for v in vecs for x in v]
    K = _domain(polys) if polys else QQ
    if not vecs:
        return DomainMatrix([], (0, 0), K), K
    width = len(vecs[0]) * len(mons)
    rows = []
    for v in vecs:
        row = [K.zero] * width
        for i, x in enumerate(v):
            for (a, _), cf in x.terms.items():
                row[i * len(mons) + mons[a]] = _to_dom(cf, K)
        rows.append(row)
    return DomainMatrix(rows, (len(rows), width), K), K


def _rank(vecs, n, D):
    if not vecs:
        return 0
    A, _ = _vecs_to_matrix(vecs, n, D)
    return A.rank()


def _image_dim_in_degree(M, D, n):
    return _rank(_image_rows(M, D, n, "right"), n, D)


def ext_generators(c, p=None, D=None):
    """
    Row vectors xi at level p with xi f_{p+1} = 0, modulo the image of the dual
    of f_p, up to degree D.  Cohen-Macaulay case (E_{p+1} = 0): coordinate vectors.
    """
    if p is None:
        p = c.codim
    if p != c.codim:
        raise ComplexError(f"p = {p} differs from the complex codimension {c.codim}")
    n = c.nvars
    r = c.ranks[p]
    zb = (0,) * n
    if p == c.length:
        return [[Polynomial.constant(n, 1 if i == j else 0) for j in range(r)] for i in range(r)]
    if D is None:
        D = 1 + max(g.total_degree() for g in c.generators())
    kern = bounded_degree_kernel(c.diffs[p], D, side="left")
    image = _image_rows(c.diffs[p - 1], D, n, "left")
    # greedy extension of the image by kernel vectors, lowest degree first
    kern = sorted(kern, key=lambda v: (max(x.total_degree() for x in v), _vec_key(v)))
    chosen = []
    base = list(image)
    rk = _rank(base, n, D)
    for v in kern:
        rk2 = _rank(base + [v], n, D)
        if rk2 > rk:
            chosen.append(v)
            base.append(v)
            rk = rk2
    if not chosen:
        raise ExtDegreeBoundError(f"no Ext generator of degree <= {D}; raise the degree bound")
    return chosen


def _vec_key(v):
    return tuple(str(x) for x in v)


def check_xi(c, xi, p=None):
    """Exact check xi f_{p+1} = 0."""
    p = c.codim if p is None else p
    if p >= c.length:
        return len(xi) == c.ranks[p]
    f = c.diffs[p]
    for j in range(len(f[0])):
        acc = Polynomial.zero(c.nvars)
        for i, x in enumerate(xi):
            if x and f[i][j]:
                acc = acc + x * f[i][j]
        if acc:
            return False
    return True


# ---------------------------------------------------------------------------
# file formats


def _strip(line):
    return line.split("#", 1)[0].strip()


def _split_top(text, sep):
    out, depth, cur = [], 0, []
    for ch in text:
        if ch == "(":
            depth += 1
        elif ch == ")":
            depth -= 1
        if ch == sep and depth == 0:
            out.append("".join(cur))
            cur = []
        else:
            cur.append(ch)
    out.append("".join(cur))
    return [s.strip() for s in out]


def parse_complex(text, name=""):
    """
    Header lines 'nvars = n', 'ranks = r0, r1, ...', 'codim = p', then the rows
    of f_1, f_2, ... in order, entries comma-separated.  '#' starts a comment.
    """
    header = {}
    rows = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip(raw)
        if not line:
            continue
        key = line.split("=", 1)[0].strip().lower() if "=" in line else None
        if key in ("nvars", "ranks", "codim"):
            header[key] = line.split("=", 1)[1].strip()
        elif line.startswith("[") and line.endswith("]"):
            continue
        else:
            rows.append((lineno, line))
    for k in ("nvars", "ranks", "codim"):
        if k not in header:
            raise ParseError(f"complex file is missing '{k}'")
    try:
        n = int(header["nvars"])
        ranks = [int(x) for x in header["ranks"].split(",")]
        codim = int(header["codim"])
    except ValueError as e:
        raise ParseError(f"bad header value: {e}") from None
    need = sum(ranks[k - 1] for k in range(1, len(ranks)))
    if len(rows) != need:
        raise ParseError(f"expected {need} matrix rows, found {len(rows)}")
    diffs, it = [], iter(rows)
    for k in range(1, len(ranks)):
        M = []
        for _ in range(ranks[k - 1]):
            lineno, line = next(it)
            cells = _split_top(line, ",")
            if len(cells) != ranks[k]:
                raise ParseError(f"line {lineno}: expected {ranks[k]} entries, found {len(cells)}")
            try:
                M.append([parse_poly(s, n) for s in cells])
            except ParseError as e:
                raise ParseError(f"line {lineno}: {e}") from None
        diffs.append(M)
    return FreeComplex(n, ranks, diffs, codim, name=name)


def format_complex(c):
    lines = [f"nvars = {c.nvars}", "ranks = " + ", ".join(map(str, c.ranks)), f"codim = {c.codim}"]
    for k, f in enumerate(c.diffs, 1):
        lines.append(f"[f{k}]")
        for row in f:
            lines.append(", ".join(str(x) for x in row))
    return "\n".join(lines) + "\n"


def load_complex(path):
    with open(path) as fh:
        return parse_complex(fh.read(), name=os.path.basename(path))


def parse_ideal(text, base_dir="."):
    """
    key = value lines: nvars, kind, generators (comma list), codim, resolution
    (koszul | taylor | path to a complex file), xi (rows separated by ';').
    """
    kv = {}
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = _strip(raw)
        if not line:
            continue
        if "=" not in line:
            raise ParseError(f"line {lineno}: expected 'key = value'")
        k, v = line.split("=", 1)
        kv[k.strip().lower()] = v.strip()
    if "nvars" not in kv or "generators" not in kv:
        raise ParseError("ideal file needs 'nvars' and 'generators'")
    try:
        n = int(kv["nvars"])
    except ValueError:
        raise ParseError("nvars must be an integer") from None
    gens = [parse_poly(s, n) for s in _split_top(kv["generators"], ",")]
    codim = int(kv["codim"]) if "codim" in kv else None
    res = kv.get("resolution")
    if res and res not in ("koszul", "taylor") and not os.path.isabs(res):
        res = os.path.join(base_dir, res)
    xi = None
    if "xi" in kv:
        xi = [[parse_poly(s, n) for s in _split_top(row, ",")] for row in kv["xi"].split(";")]
    try:
        return IdealSpec(n, gens, kv.get("kind", "general"), codim, res, xi, name=kv.get("name", ""))
    except ComplexError as e:
        raise ParseError(str(e)) from None


def load_ideal(path):
    with open(path) as fh:
        spec = parse_ideal(fh.read(), base_dir=os.path.dirname(os.path.abspath(path)))
    if not spec.name:
        spec.name = os.path.splitext(os.path.basename(path))[0]
    return spec


def resolve_ideal(spec, resolution=None):
    """FreeComplex for an IdealSpec; resolution overrides spec.resolution."""
    how = resolution or spec.resolution
    if how is None:
        how = "taylor" if spec.kind == "monomial" else "koszul"
    if how == "koszul":
        return koszul_complex(spec.generators, codim=spec.declared_codim or len(spec.generators))
    if how == "taylor":
        return taylor_complex(spec.generators, codim=spec.declared_codim)
    c = load_complex(how)
    if c.nvars != spec.nvars:
        raise ComplexError("resolution file nvars differs from the ideal")
    gens = c.generators()
    if any(a != b for a, b in zip(gens, spec.generators)) or len(gens) != len(spec.generators):
        raise ComplexError("first differential of the resolution file does not match the generators")
    return c
