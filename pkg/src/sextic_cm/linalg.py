"""Exact integer and rational linear algebra.

Matrices are lists of rows of Python ints or Fractions. Nothing in here
touches floating point except the enumeration bounds in
``short_vectors``, which are re-checked exactly.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import Sequence

Matrix = list[list]


def identity(n: int) -> Matrix:
    return [[int(i == j) for j in range(n)] for i in range(n)]


def transpose(a: Matrix) -> Matrix:
    return [list(r) for r in zip(*a)]


def matmul(a: Matrix, b: Matrix) -> Matrix:
    bt = transpose(b)
    return [[sum(x * y for x, y in zip(row, col)) for col in bt] for row in a]


def vecmat(v: Sequence, a: Matrix) -> list:
    n = len(a[0]) if a else 0
    out = [0] * n
    for vi, row in zip(v, a):
        if vi:
            for j in range(n):
                out[j] += vi * row[j]
    return out


def det_bareiss(a: Matrix) -> int:
    """Determinant of a square integer matrix (fraction free)."""
    m = [list(r) for r in a]
    n = len(m)
    if n == 0:
        return 1
    sign = 1
    prev = 1
    for k in range(n - 1):
        if m[k][k] == 0:
            for i in range(k + 1, n):
                if m[i][k] != 0:
                    m[k], m[i] = m[i], m[k]
                    sign = -sign
                    break
            else:
                return 0
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                m[i][j] = (m[i][j] * m[k][k] - m[i][k] * m[k][j]) // prev
        prev = m[k][k]
    return sign * m[n - 1][n - 1]


def det_fraction(a: Matrix) -> Fraction:
    m = [[Fraction(x) for x in r] for r in a]
    n = len(m)
    d = Fraction(1)
    for k in range(n):
        piv = next((i for i in range(k, n) if m[i][k] != 0), None)
        if piv is None:
            return Fraction(0)
        if piv != k:
            m[k], m[piv] = m[piv], m[k]
            d = -d
        d *= m[k][k]
        inv = 1 / m[k][k]
        for i in range(k + 1, n):
            f = m[i][k] * inv
            if f:
                for j in range(k, n):
                    m[i][j] -= f * m[k][j]
    return d


def inverse_fraction(a: Matrix) -> Matrix:
    n = len(a)
    m = [[Fraction(x) for x in r] + [Fraction(int(i == j)) for j in range(n)] for i, r in enumerate(a)]
    for k in range(n):
        piv = next((i for i in range(k, n) if m[i][k] != 0), None)
        if piv is None:
            raise ZeroDivisionError("singular matrix")
        m[k], m[piv] = m[piv], m[k]
        inv = 1 / m[k][k]
        m[k] = [x * inv for x in m[k]]
        for i in range(n):
            if i != k and m[i][k] != 0:
                f = m[i][k]
                m[i] = [x - f * y for x, y in zip(m[i], m[k])]
    return [r[n:] for r in m]


def solve_fraction(a: Matrix, b: Sequence) -> list[Fraction]:
    """Solve a x = b for square nonsingular a."""
    inv = inverse_fraction(a)
    return [sum(Fraction(x) * y for x, y in zip(row, b)) for row in inv]


def common_denominator(rows) -> int:
    d = 1
    for r in rows:
        for x in r:
            if isinstance(x, Fraction):
                d = d * x.denominator // math.gcd(d, x.denominator)
    return d


# ---------------------------------------------------------------------------
# Hermite normal form


def hnf(rows: Matrix, ncols: int | None = None, modulus: int | None = None) -> Matrix:
    """Row-style Hermite normal form of the lattice spanned by ``rows``.

    Returns the nonzero rows only: upper triangular (echelon) with positive
    pivots and entries above each pivot reduced into ``[0, pivot)``.
    If ``modulus`` is given it must be a multiple of the lattice index, so
    that ``modulus * Z^n`` lies in the lattice (full rank case).
    """
    if ncols is None:
        ncols = len(rows[0]) if rows else 0
    work = [list(map(int, r)) for r in rows if any(r)]
    if modulus is not None:
        modulus = abs(int(modulus))
        work = [[x % modulus for x in r] for r in work]
        work = [r for r in work if any(r)]
    out: Matrix = []
    col = 0
    while col < ncols:
        if modulus is not None:
            e = [0] * ncols
            e[col] = modulus
            work.append(e)
        active = [r for r in work if r[col] != 0]
        rest = [r for r in work if r[col] == 0]
        while len(active) > 1:
            active.sort(key=lambda r: abs(r[col]))
            p = active[0]
            nxt = [p]
            for r in active[1:]:
                q = r[col] // p[col]
                r = [x - q * y for x, y in zip(r, p)]
                if modulus is not None:
                    r = [r[j] if j <= col else r[j] % modulus for j in range(ncols)]
                if r[col] != 0:
                    nxt.append(r)
                elif any(r):
                    rest.append(r)
            active = nxt
        if active:
            p = active[0]
            if p[col] < 0:
                p = [-x for x in p]
            if modulus is not None:
                p = [p[j] if j <= col else p[j] % modulus for j in range(ncols)]
            out.append(p)
        if modulus is not None:
            rest = [[x % modulus for x in r] for r in rest]
            rest = [r for r in rest if any(r)]
        work = rest
        col += 1
    # reduce above pivots
    for i in range(len(out)):
        pc = next(j for j in range(ncols) if out[i][j] != 0)
        piv = out[i][pc]
        for k in range(i):
            q = out[k][pc] // piv
            if q:
                out[k] = [x - q * y for x, y in zip(out[k], out[i])]
    return out


def lattice_contains(h: Matrix, v: Sequence[int]) -> bool:
    """Membership of an integer vector in the row lattice of an HNF ``h``."""
    v = list(v)
    n = len(v)
    for row in h:
        pc = next(j for j in range(n) if row[j] != 0)
        if any(v[j] for j in range(pc)):
            return False
        q, r = divmod(v[pc], row[pc])
        if r:
            return False
        if q:
            v = [x - q * y for x, y in zip(v, row)]
    return not any(v)


def lattice_coordinates(h: Matrix, v: Sequence[int]) -> list[int] | None:
    """Integer coordinates of ``v`` on the rows of HNF ``h`` (or None)."""
    v = list(v)
    n = len(v)
    coords = []
    for row in h:
        pc = next(j for j in range(n) if row[j] != 0)
        if any(v[j] for j in range(pc)):
            return None
        q, r = divmod(v[pc], row[pc])
        if r:
            return None
        coords.append(q)
        if q:
            v = [x - q * y for x, y in zip(v, row)]
    return coords if not any(v) else None


def integer_kernel(a: Matrix) -> Matrix:
    """Basis (rows) of {x in Z^m : x a = 0} for an m x n integer matrix a."""
    m = len(a)
    if m == 0:
        return []
    n = len(a[0])
    aug = [list(a[i]) + [int(i == j) for j in range(m)] for i in range(m)]
    h = hnf(aug, n + m)
    return [r[n:] for r in h if not any(r[:n])]


# ---------------------------------------------------------------------------
# Smith normal form


def smith(a: Matrix):
    """Smith normal form with transforms: returns (d, U, V) with U a V = D.

    ``d`` lists the diagonal of D (length min(m, n)); U is m x m and V is
    n x n, both unimodular.
    """
    m = len(a)
    n = len(a[0]) if m else 0
    A = [list(map(int, r)) for r in a]
    U = identity(m)
    V = identity(n)

    def swap_rows(i, j):
        A[i], A[j] = A[j], A[i]
        U[i], U[j] = U[j], U[i]

    def swap_cols(i, j):
        for r in A:
            r[i], r[j] = r[j], r[i]
        for r in V:
            r[i], r[j] = r[j], r[i]

    def add_row(dst, src, q):  # row_dst -= q row_src
        A[dst] = [x - q * y for x, y in zip(A[dst], A[src])]
        U[dst] = [x - q * y for x, y in zip(U[dst], U[src])]

    def add_col(dst, src, q):  # col_dst -= q col_src
        for r in A:
            r[dst] -= q * r[src]
        for r in V:
            r[dst] -= q * r[src]

    t = 0
    while t < min(m, n):
        nz = [(abs(A[i][j]), i, j) for i in range(t, m) for j in range(t, n) if A[i][j] != 0]
        if not nz:
            break
        _, i, j = min(nz)
        swap_rows(t, i)
        swap_cols(t, j)
        while True:
            done = True
            for i in range(t + 1, m):
                if A[i][t]:
                    q = A[i][t] // A[t][t]
                    add_row(i, t, q)
                    if A[i][t]:
                        done = False
            for j in range(t + 1, n):
                if A[t][j]:
                    q = A[t][j] // A[t][t]
                    add_col(j, t, q)
                    if A[t][j]:
                        done = False
            if done:
                bad = None
                for i in range(t + 1, m):
                    for j in range(t + 1, n):
                        if A[i][j] % A[t][t]:
                            bad = i
                            break
                    if bad is not None:
                        break
                if bad is None:
                    break
                # fold the offending row in to force divisibility
                A[t] = [x + y for x, y in zip(A[t], A[bad])]
                U[t] = [x + y for x, y in zip(U[t], U[bad])]
                continue
            # move the smallest remaining entry of row/col t to the pivot
            cand = [(abs(A[i][t]), i, t) for i in range(t, m) if A[i][t]]
            cand += [(abs(A[t][j]), t, j) for j in range(t, n) if A[t][j]]
            _, i, j = min(cand)
            if i != t:
                swap_rows(t, i)
            if j != t:
                swap_cols(t, j)
        if A[t][t] < 0:
            A[t] = [-x for x in A[t]]
            U[t] = [-x for x in U[t]]
        t += 1
    d = [A[i][i] for i in range(min(m, n))]
    return d, U, V


# ---------------------------------------------------------------------------
# LLL (integral version on a Gram matrix)


def lll_gram(gram: Matrix, delta: Fraction = Fraction(99, 100)):
    """Integral LLL on a positive definite integer Gram matrix.

    Returns ``(T, G)`` where the rows of T express the reduced basis in the
    input basis and ``G = T gram T^t``. Pure integer arithmetic, so the
    result is deterministic.
    """
    n = len(gram)
    G = [list(map(int, r)) for r in gram]
    H = identity(n)
    if n == 0:
        return H, G
    a, b = delta.numerator, delta.denominator
    lam = [[0] * n for _ in range(n)]
    d = [0] * (n + 1)  # d[i+1] = d_i in 1-based notation; d[0] = 1
    d[0] = 1
    d[1] = G[0][0]
    if d[1] <= 0:
        raise ValueError("Gram matrix not positive definite")
    kmax = 0
    k = 1

    def red(k, l):
        if 2 * abs(lam[k][l]) > d[l + 1]:
            q = (2 * lam[k][l] + d[l + 1]) // (2 * d[l + 1])
            H[k] = [x - q * y for x, y in zip(H[k], H[l])]
            # b_k <- b_k - q b_l
            gkl, gll = G[k][l], G[l][l]
            G[k][k] += -2 * q * gkl + q * q * gll
            for j in range(n):
                if j != k:
                    G[k][j] -= q * G[l][j]
                    G[j][k] = G[k][j]
            lam[k][l] -= q * d[l + 1]
            for i in range(l):
                lam[k][i] -= q * lam[l][i]

    def swap(k):
        H[k], H[k - 1] = H[k - 1], H[k]
        G[k], G[k - 1] = G[k - 1], G[k]
        for r in G:
            r[k], r[k - 1] = r[k - 1], r[k]
        for j in range(k - 1):
            lam[k][j], lam[k - 1][j] = lam[k - 1][j], lam[k][j]
        lm = lam[k][k - 1]
        B = (d[k - 1] * d[k + 1] + lm * lm) // d[k]
        for i in range(k + 1, kmax + 1):
            t = lam[i][k]
            lam[i][k] = (d[k + 1] * lam[i][k - 1] - lm * t) // d[k]
            lam[i][k - 1] = (B * t + lm * lam[i][k]) // d[k + 1]
        d[k] = B

    while k < n:
        if k > kmax:
            kmax = k
            for j in range(k + 1):
                u = G[k][j]
                for i in range(j):
                    u = (d[i + 1] * u - lam[k][i] * lam[j][i]) // d[i]
                if j < k:
                    lam[k][j] = u
                else:
                    if u <= 0:
                        raise ValueError("Gram matrix not positive definite")
                    d[k + 1] = u
        while True:
            red(k, k - 1)
            if b * d[k + 1] * d[k - 1] < a * d[k] * d[k] - b * lam[k][k - 1] ** 2:
                swap(k)
                k = max(1, k - 1)
            else:
                for l in range(k - 2, -1, -1):
                    red(k, l)
                k += 1
                break
    return H, G


def lll_reduce_gram(gram: Matrix, delta: Fraction = Fraction(99, 100)):
    """LLL on a Gram matrix with rational or integer entries."""
    den = common_denominator(gram)
    ig = [[int(x * den) for x in r] for r in gram]
    T, G = lll_gram(ig, delta)
    return T, [[Fraction(x, den) for x in r] for r in G]


def quadratic_form(gram: Matrix, x: Sequence) -> Fraction | int:
    n = len(x)
    s = 0
    for i in range(n):
        if x[i]:
            row = gram[i]
            s += x[i] * sum(row[j] * x[j] for j in range(n) if x[j])
    return s


def short_vectors(gram: Matrix, bound, limit: int | None = None, reduce: bool = True):
    """All nonzero integer x (up to sign) with x^t gram x <= bound.

    ``gram`` may hold ints or Fractions; the final comparison is exact. The
    vectors are returned sorted by (norm, coordinates) for determinism.
    """
    n = len(gram)
    bound = Fraction(bound)
    if reduce:
        T, G = lll_reduce_gram(gram)
    else:
        T, G = identity(n), [[Fraction(x) for x in r] for r in gram]
    q = _cholesky_q(G)
    qf = [[float(x) for x in r] for r in q]
    bf = float(bound) * (1 + 1e-9) + 1e-12
    found = []
    x = [0] * n

    def rec(i, remaining):
        if i < 0:
            found.append(list(x))
            return
        c = -sum(qf[i][j] * x[j] for j in range(i + 1, n))
        if qf[i][i] <= 0:
            raise ValueError("not positive definite")
        r = math.sqrt(max(remaining, 0.0) / qf[i][i])
        lo = math.ceil(c - r - 1e-9)
        hi = math.floor(c + r + 1e-9)
        for v in range(lo, hi + 1):
            x[i] = v
            t = qf[i][i] * (v - c) ** 2
            if t <= remaining + 1e-9 * (1 + remaining):
                rec(i - 1, remaining - t)
            if limit is not None and len(found) > 4 * limit + 1000:
                return
        x[i] = 0

    rec(n - 1, bf)
    out = []
    seen = set()
    for y in found:
        if not any(y):
            continue
        v = vecmat(y, T)
        key = tuple(v)
        neg = tuple(-t for t in v)
        if key in seen or neg in seen:
            continue
        nv = quadratic_form(gram, v)
        if nv <= bound:
            # canonical sign: first nonzero coordinate positive
            fnz = next(t for t in v if t)
            if fnz < 0:
                v = [-t for t in v]
            seen.add(tuple(v))
            out.append((Fraction(nv), v))
    out.sort(key=lambda p: (p[0], p[1]))
    if limit is not None:
        out = out[:limit]
    return out


def _cholesky_q(G):
    """Cohen's q_ij decomposition: Q(x) = sum_i q_ii (x_i + sum_{j>i} q_ij x_j)^2."""
    n = len(G)
    q = [[Fraction(x) for x in r] for r in G]
    for i in range(n):
        for j in range(i + 1, n):
            q[j][i] = q[i][j]
            q[i][j] = q[i][j] / q[i][i]
        for k in range(i + 1, n):
            for l in range(k, n):
                q[k][l] -= q[k][i] * q[i][l]
    return q


# ---------------------------------------------------------------------------
# Linear algebra over F_p


def rref_mod(rows: Matrix, p: int):
    """Reduced row echelon form over F_p; returns (rows, pivot columns)."""
    A = [[x % p for x in r] for r in rows]
    if not A:
        return [], []
    n = len(A[0])
    piv = []
    r = 0
    for c in range(n):
        sel = next((i for i in range(r, len(A)) if A[i][c]), None)
        if sel is None:
            continue
        A[r], A[sel] = A[sel], A[r]
        inv = pow(A[r][c], -1, p)
        A[r] = [(x * inv) % p for x in A[r]]
        for i in range(len(A)):
            if i != r and A[i][c]:
                f = A[i][c]
                A[i] = [(x - f * y) % p for x, y in zip(A[i], A[r])]
        piv.append(c)
        r += 1
        if r == len(A):
            break
    return A[:r], piv


def kernel_mod(rows: Matrix, p: int) -> Matrix:
    """Basis of {x : x A = 0 over F_p} for A given as rows (m x n)."""
    m = len(rows)
    if m == 0:
        return []
    n = len(rows[0])
    aug = [list(rows[i]) + [int(i == j) for j in range(m)] for i in range(m)]
    R, piv = rref_mod(aug, p)
    # rows whose pivot sits in the identity block have zero left part
    return [r[n:] for r, c in zip(R, piv) if c >= n]


def reduce_mod_space(v: Sequence[int], echelon: Matrix, pivots: Sequence[int], p: int) -> list[int]:
    v = [x % p for x in v]
    for row, c in zip(echelon, pivots):
        if v[c]:
            f = v[c]
            v = [(x - f * y) % p for x, y in zip(v, row)]
    return v
