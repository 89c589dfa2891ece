"""Dense matrices over RationalFunction: products, adjoints, inverses, rank factorization."""

from .polyring import Polynomial, RationalFunction, as_rational


class SingularMatrixError(ArithmeticError):
    pass


class RankFactorizationError(ArithmeticError):
    pass


def zero(n):
    return RationalFunction.from_poly(Polynomial.zero(n))


def one(n):
    return RationalFunction.from_poly(Polynomial.one(n))


def lift(M, n):
    return [[as_rational(x, n) for x in row] for row in M]


def zeros(r, c, n):
    z = zero(n)
    return [[z] * c for _ in range(r)]


def identity(r, n):
    z, o = zero(n), one(n)
    return [[o if i == j else z for j in range(r)] for i in range(r)]


def shape(M):
    return len(M), (len(M[0]) if M else 0)


def matmul(A, B, n):
    ra, ca = len(A), (len(A[0]) if A else 0)
    rb, cb = len(B), (len(B[0]) if B else 0)
    if ca != rb:
        raise ValueError(f"shape mismatch {ra}x{ca} @ {rb}x{cb}")
    out = []
    for i in range(ra):
        row = []
        for j in range(cb):
            acc = zero(n)
            for k in range(ca):
                a, b = A[i][k], B[k][j]
                if a.is_zero() or b.is_zero():
                    continue
                acc = acc + a * b
            row.append(acc)
        out.append(row)
    return out


def add(A, B):
    return [[a + b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def sub(A, B):
    return [[a - b for a, b in zip(ra, rb)] for ra, rb in zip(A, B)]


def transpose(A):
    return [list(col) for col in zip(*A)] if A and A[0] else []


def adjoint(A):
    """Conjugate transpose (formal conjugation z <-> zb)."""
    return [[x.conjugate() for x in col] for col in zip(*A)] if A and A[0] else []


def is_zero(A):
    return all(x.is_zero() for row in A for x in row)


def equal(A, B):
    if shape(A) != shape(B):
        return False
    return all(a == b for ra, rb in zip(A, B) for a, b in zip(ra, rb))


def submatrix(A, rows, cols):
    return [[A[i][j] for j in cols] for i in rows]


def inverse(A, n):
    """Gauss-Jordan over the fraction field; smallest available pivot first."""
    m = len(A)
    if m == 0:
        return []
    if any(len(row) != m for row in A):
        raise ValueError("inverse of a non-square matrix")
    if m == 1:
        if A[0][0].is_zero():
            raise SingularMatrixError("singular 1x1 matrix")
        return [[A[0][0].inverse()]]
    M = [list(row) + [one(n) if i == j else zero(n) for j in range(m)] for i, row in enumerate(A)]
    for c in range(m):
        cands = [r for r in range(c, m) if not M[r][c].is_zero()]
        if not cands:
            raise SingularMatrixError("matrix is singular over the fraction field")
        p = min(cands, key=lambda r: (M[r][c].size(), r))
        M[c], M[p] = M[p], M[c]
        inv = M[c][c].inverse()
        M[c] = [x * inv for x in M[c]]
        for r in range(m):
            if r != c and not M[r][c].is_zero():
                fac = M[r][c]
                M[r] = [x - fac * y if not y.is_zero() else x for x, y in zip(M[r], M[c])]
    return [row[m:] for row in M]


def pivots(A, n):
    """Pivot (rows, cols) of a maximal nonsingular submatrix, by exact elimination."""
    M = [list(row) for row in A]
    r, c = shape(M)
    rows_left = list(range(r))
    prow, pcol = [], []
    work = {i: list(M[i]) for i in range(r)}
    for j in range(c):
        cand = [i for i in rows_left if not work[i][j].is_zero()]
        if not cand:
            continue
        i = min(cand, key=lambda t: (work[t][j].size(), t))
        prow.append(i)
        pcol.append(j)
        rows_left.remove(i)
        inv = work[i][j].inverse()
        for t in rows_left:
            if not work[t][j].is_zero():
                fac = work[t][j] * inv
                work[t] = [x - fac * y for x, y in zip(work[t], work[i])]
    return sorted(prow), pcol


def rank_factorization(A, n):
    """(B, C, rank) with A = B C, B of full column rank and C of full row rank."""
    r, c = shape(A)
    rows, cols = pivots(A, n)
    k = len(cols)
    if k == 0:
        raise RankFactorizationError("zero matrix has no rank factorization")
    if k == r:
        return identity(r, n), A, k
    if k == c:
        return A, identity(c, n), k
    B = submatrix(A, range(r), cols)
    Ainv = inverse(submatrix(A, rows, cols), n)
    C = matmul(Ainv, submatrix(A, rows, range(c)), n)
    if not equal(matmul(B, C, n), A):
        raise RankFactorizationError("rank factorization did not reproduce the matrix")
    return B, C, k
