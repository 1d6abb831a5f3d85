"""From a CM triple to a reduced small period matrix.

Polarisation E(x, y) = Tr(xi x conj(y)) on the basis of a, a symplectic
basis (e1, e2, e3, f1, f2, f3) with E(e_i, f_j) = delta_ij, the big period
matrix P = (P1 | P2) with P1 = Phi(e), P2 = Phi(f), and tau = P2^-1 P1.
"""
from __future__ import annotations

from dataclasses import dataclass, field as dfield
from math import gcd

import mpmath

from . import linalg
from .errors import NonConvergence, NotPrincipal, SingularBlock, VerificationFailed

MAX_REDUCTION_STEPS = 1000


def polarization_matrix(a, xi):
    """Integer matrix E_ij = Tr(xi b_i conj(b_j)) on the HNF basis of a."""
    K = a.field
    basis = a.basis_elements()
    conj = [K.conj(b) for b in basis]
    n = len(basis)
    E = [[0] * n for _ in range(n)]
    for i in range(n):
        xb = xi * basis[i]
        for j in range(i + 1, n):
            t = (xb * conj[j]).trace()
            if t.denominator != 1:
                raise VerificationFailed("polarisation form is not integral")
            E[i][j] = int(t)
            E[j][i] = -int(t)
    if abs(linalg.det_bareiss(E)) != 1:
        raise NotPrincipal("polarisation is not principal")
    return E


def _form(E, x, y):
    return sum(x[i] * E[i][j] * y[j] for i in range(len(x)) for j in range(len(y)) if x[i] and y[j])


def _xgcd_combination(values):
    """Integers c with sum c_i values_i = gcd(values)."""
    c = [0] * len(values)
    g = 0
    for i, v in enumerate(values):
        if v == 0:
            continue
        if g == 0:
            g, c = abs(v), [0] * len(values)
            c[i] = 1 if v > 0 else -1
            continue
        # extended gcd of g and v
        old_r, r, old_s, s, old_t, t = g, v, 1, 0, 0, 1
        while r:
            q = old_r // r
            old_r, r = r, old_r - q * r
            old_s, s = s, old_s - q * s
            old_t, t = t, old_t - q * t
        if old_r < 0:
            old_r, old_s, old_t = -old_r, -old_s, -old_t
        c = [old_s * x for x in c]
        c[i] += old_t
        g = old_r
    return g, c


def frobenius_basis(E):
    """Unimodular T (columns e1, e2, e3, f1, f2, f3) with T^t E T = J."""
    n = len(E)
    W = linalg.identity(n)  # rows: current basis of the complement
    es, fs = [], []
    while W:
        e = W[0]
        vals = [_form(E, e, w) for w in W]
        g, c = _xgcd_combination(vals)
        if g != 1:
            raise NotPrincipal("form is not unimodular")
        f = [sum(ci * w[k] for ci, w in zip(c, W)) for k in range(n)]
        es.append(e)
        fs.append(f)
        proj = []
        for w in W:
            a = -_form(E, w, f)
            b = _form(E, w, e)
            proj.append([w[k] + a * e[k] + b * f[k] for k in range(n)])
        W = linalg.hnf(proj, n)
    cols = es + fs
    T = linalg.transpose(cols)
    J = standard_J(n // 2)
    if linalg.matmul(linalg.matmul(linalg.transpose(T), E), T) != J:
        raise VerificationFailed("symplectic basis check failed")
    return T


def standard_J(g):
    J = [[0] * (2 * g) for _ in range(2 * g)]
    for i in range(g):
        J[i][g + i] = 1
        J[g + i][i] = -1
    return J


@dataclass
class SmallPeriodMatrix:
    tau: object  # mpmath matrix
    precision: int
    certificate: list = dfield(default_factory=list)

    def to_json(self, digits=None):
        digits = digits or self.precision
        out = []
        for i in range(3):
            for j in range(3):
                z = self.tau[i, j]
                out.append([mpmath.nstr(z.real, digits, min_fixed=-1, max_fixed=1), mpmath.nstr(z.imag, digits, min_fixed=-1, max_fixed=1)])
        return {"precision": self.precision, "entries": out}


def big_period_matrix(a, T, phi, precision):
    """3 x 6 matrix of phi_r(symplectic basis element k)."""
    basis = a.basis_elements()
    K = a.field
    n = len(basis)
    vecs = []
    for k in range(n):
        x = K(0)
        for i in range(n):
            if T[i][k]:
                x = x + T[i][k] * basis[i]
        vecs.append(x.embeddings(precision))
    with mpmath.workdps(precision + 20):
        return mpmath.matrix([[vecs[k][p] for k in range(n)] for p in phi])


def _is_posdef(Y):
    try:
        mpmath.cholesky(Y)
        return True
    except (ValueError, ZeroDivisionError):
        return False


def big_to_small(P, precision):
    """tau = P2^-1 P1 with a sign fix: returns (tau, flipped).

    If the trace form has the opposite sign convention Im tau is negative
    definite; the symplectic basis for -E is (e, -f), which replaces tau by
    -tau.
    """
    with mpmath.workdps(precision + 20):
        P1 = P[:, 0:3]
        P2 = P[:, 3:6]
        if abs(mpmath.det(P2)) < mpmath.mpf(10) ** (-(precision // 2)):
            raise SingularBlock("P2 is singular at this precision")
        tau = mpmath.inverse(P2) * P1
        sym = mpmath.mnorm(tau - tau.T, 1)
        if sym > mpmath.mpf(10) ** (-(precision // 2)):
            raise VerificationFailed(f"tau is not symmetric (defect {mpmath.nstr(sym, 5)})")
        tau = (tau + tau.T) / 2
        Y = mpmath.matrix([[tau[i, j].imag for j in range(3)] for i in range(3)])
        if _is_posdef(Y):
            return tau, False
        if _is_posdef(-Y):
            return -tau, True
        raise VerificationFailed("Im tau is indefinite; type and xi disagree")


def riemann_defect(P, precision):
    """|P J^-1 P^t| for the Riemann relation (should vanish)."""
    with mpmath.workdps(precision + 20):
        J = mpmath.matrix(standard_J(3))
        Ji = mpmath.inverse(J)
        return mpmath.mnorm(P * Ji * P.T, 1)


# ---------------------------------------------------------------------------
# Siegel reduction


def _act(M, tau):
    A = M[0:3, 0:3]
    B = M[0:3, 3:6]
    C = M[3:6, 0:3]
    D = M[3:6, 3:6]
    return (A * tau + B) * mpmath.inverse(C * tau + D)


def _block(A, B, C, D):
    M = [[0] * 6 for _ in range(6)]
    for i in range(3):
        for j in range(3):
            M[i][j] = A[i][j]
            M[i][j + 3] = B[i][j]
            M[i + 3][j] = C[i][j]
            M[i + 3][j + 3] = D[i][j]
    return M


def _int_inverse(U):
    inv = linalg.inverse_fraction(U)
    return [[int(x) for x in r] for r in inv]


def minkowski_reduce(Y, scale_digits=30):
    """Unimodular U (integer rows) with U^t Y U Minkowski reduced (dim 3).

    In dimension 3 the successive minima are attained by a basis, so a
    greedy choice of shortest vectors extending a primitive system works.
    """
    S = mpmath.mpf(10) ** scale_digits
    G = [[int(mpmath.nint(Y[i, j] * S)) for j in range(3)] for i in range(3)]
    T, R = linalg.lll_gram(G)  # rows of T are the reduced basis
    bound = max(R[i][i] for i in range(3))
    vecs = [v for _, v in linalg.short_vectors(R, bound, reduce=False)]
    vecs = [linalg.vecmat(v, T) for v in vecs]
    chosen = []
    for v in vecs:
        cand = chosen + [v]
        if _primitive_system(cand):
            chosen = cand
            if len(chosen) == 3:
                break
    if len(chosen) < 3:
        chosen = [list(r) for r in T]
    U = linalg.transpose(chosen)  # columns are the new basis vectors
    if linalg.det_bareiss(U) < 0:
        U = [[-x if j == 0 else x for j, x in enumerate(r)] for r in U]
    return U


def _primitive_system(vs):
    k = len(vs)
    if k == 1:
        return gcd(*vs[0]) == 1
    import itertools

    g = 0
    for cols in itertools.combinations(range(3), k):
        m = [[v[c] for c in cols] for v in vs]
        g = gcd(g, linalg.det_bareiss(m))
    return g == 1


def siegel_reduce(tau, precision, max_steps=MAX_REDUCTION_STEPS):
    """Reduce tau into the Siegel fundamental domain (practical version).

    Steps: Minkowski-reduce Im tau, move Re tau into [-1/2, 1/2], and invert
    the first coordinate while |tau_11| < 1.  Returns a SmallPeriodMatrix
    whose certificate lists the integral symplectic matrices applied.
    """
    cert = []
    I3 = linalg.identity(3)
    Z3 = [[0] * 3 for _ in range(3)]
    with mpmath.workdps(precision + 20):
        tau = mpmath.matrix(tau)
        for _ in range(max_steps):
            Y = mpmath.matrix([[tau[i, j].imag for j in range(3)] for i in range(3)])
            U = minkowski_reduce(Y)
            if U != I3:
                Ut = linalg.transpose(U)
                M = _block(Ut, Z3, Z3, _int_inverse(U))
                tau = _act(mpmath.matrix(M), tau)
                cert.append(M)
            B = [[int(mpmath.nint(tau[i, j].real)) for j in range(3)] for i in range(3)]
            if any(any(r) for r in B):
                M = _block(I3, [[-x for x in r] for r in B], Z3, I3)
                tau = _act(mpmath.matrix(M), tau)
                cert.append(M)
            tau = (tau + tau.T) / 2
            if abs(tau[0, 0]) < 1 - mpmath.mpf(10) ** (-(precision // 2)):
                A = [[0, 0, 0], [0, 1, 0], [0, 0, 1]]
                Bm = [[-1, 0, 0], [0, 0, 0], [0, 0, 0]]
                C = [[1, 0, 0], [0, 0, 0], [0, 0, 0]]
                M = _block(A, Bm, C, A)
                tau = _act(mpmath.matrix(M), tau)
                tau = (tau + tau.T) / 2
                cert.append(M)
                continue
            return SmallPeriodMatrix(tau, precision, cert)
    raise NonConvergence("Siegel reduction did not terminate", cert)


def compose(cert):
    """Product of the certificate matrices (last applied on the left)."""
    M = linalg.identity(6)
    for N in cert:
        M = linalg.matmul(N, M)
    return M


def is_symplectic(M):
    J = standard_J(3)
    return linalg.matmul(linalg.matmul(linalg.transpose(M), J), M) == J


def period_matrix(triple, precision):
    """Reduced small period matrix of a CM triple."""
    E = polarization_matrix(triple.a, triple.xi)
    T = frobenius_basis(E)
    P = big_period_matrix(triple.a, T, triple.phi, precision)
    tau, flipped = big_to_small(P, precision)
    red = siegel_reduce(tau, precision)
    red.flipped = flipped
    return red
