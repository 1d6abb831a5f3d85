"""Genus-3 theta constants by direct summation with a certified tail, and the
vanishing count of the 36 even theta-nulls."""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import mpmath

from .errors import Indeterminate, TailBoundFailure

HYPERELLIPTIC = "Hyperelliptic"
PLANE_QUARTIC = "PlaneQuartic"
DECOMPOSABLE = "NotIndecomposableJacobian"
INDETERMINATE_WINDOW = 10


@dataclass(frozen=True)
class ThetaCharacteristic:
    epsilon: tuple
    delta: tuple

    @property
    def parity(self):
        return sum(a * b for a, b in zip(self.epsilon, self.delta)) % 2

    @property
    def even(self):
        return self.parity == 0

    def label(self):
        return "".join(map(str, self.epsilon)) + "|" + "".join(map(str, self.delta))


def characteristics(g=3):
    """All 2^(2g) characteristics, epsilon-major order."""
    out = []
    for eps in itertools.product(range(2), repeat=g):
        for dl in itertools.product(range(2), repeat=g):
            out.append(ThetaCharacteristic(eps, dl))
    return out


def even_characteristics(g=3):
    return [c for c in characteristics(g) if c.even]


def _min_eigen(Y):
    ev = mpmath.eigsy(Y)[0]
    return min(ev[i] for i in range(len(ev)))


def _radius(lam, precision):
    """R^2 with sum over Q(m) > R^2 of exp(-pi Q(m)) <= 10^-(precision+5).

    For Q(m) > R^2: exp(-pi Q) <= exp(-pi R^2 / 2) exp(-pi Q / 2), and the
    full sum of exp(-pi Q(m) / 2) over a shifted lattice is at most
    S(lam/2)^3 with S(l) = 2 + 2/(1 - exp(-pi l)) bounding both the
    integral and half-integral one dimensional sums.
    """
    lam = float(lam)
    if lam <= 0:
        raise TailBoundFailure("Im tau is not positive definite")
    q = math.exp(-math.pi * lam / 2)
    if q >= 1 - 1e-12:
        raise TailBoundFailure("smallest eigenvalue of Im tau is too small")
    S = 2 + 2 / (1 - q)
    # exp(-pi R^2/2) * S^3 <= 10^-(p+5)
    R2 = 2 * ((precision + 5) * math.log(10) + 3 * math.log(S)) / math.pi
    return R2, S


def _shifted_points(Y, eps, R2):
    """All m in Z^3 + eps/2 with m^t Y m <= R2 (float enumeration, padded)."""
    Yf = [[float(Y[i, j]) for j in range(3)] for i in range(3)]
    # Cholesky-style decomposition Q(x) = sum_i q_ii (x_i + sum_{j>i} q_ij x_j)^2
    q = [[0.0] * 3 for _ in range(3)]
    A = [r[:] for r in Yf]
    for i in range(3):
        q[i][i] = A[i][i]
        for j in range(i + 1, 3):
            q[i][j] = A[i][j] / A[i][i]
        for j in range(i + 1, 3):
            for k in range(j, 3):
                A[j][k] -= q[i][j] * q[i][k] * q[i][i]
                A[k][j] = A[j][k]
    bound = R2 * (1 + 1e-9) + 1e-9
    sh = [e / 2 for e in eps]
    out = []

    def rec(i, x, rest):
        if i < 0:
            out.append(tuple(x))
            return
        c = sum(q[i][j] * x[j] for j in range(i + 1, 3))
        r = math.sqrt(max(rest, 0.0) / q[i][i])
        lo = math.ceil(-c - r - sh[i] - 1e-9)
        hi = math.floor(-c + r - sh[i] + 1e-9)
        for n in range(lo, hi + 1):
            xi = n + sh[i]
            t = q[i][i] * (xi + c) ** 2
            if t <= rest + 1e-9:
                x[i] = xi
                rec(i - 1, x, rest - t)
        x[i] = 0.0

    rec(2, [0.0, 0.0, 0.0], bound)
    return out


def _base_terms(tau, eps, R2, dps):
    """[(m, exp(pi i m^t tau m))] over the ellipsoid for one epsilon."""
    Y = mpmath.matrix([[tau[i, j].imag for j in range(3)] for i in range(3)])
    pts = _shifted_points(Y, eps, R2)
    out = []
    with mpmath.workdps(dps):
        for m in pts:
            mm = [mpmath.mpf(int(round(2 * v))) / 2 for v in m]
            s = mpmath.mpc(0)
            for i in range(3):
                for j in range(3):
                    s += mm[i] * tau[i, j] * mm[j]
            out.append((tuple(int(round(2 * v)) for v in m), mpmath.expjpi(s)))
    return out


def _sum_for_delta(terms, delta):
    """sum_m t_m exp(pi i m.delta), with 2m integral so the factor is i^k."""
    powers = (1, 1j, -1, -1j)
    acc = [mpmath.mpc(0)] * 4
    for m2, t in terms:
        k = sum(a * b for a, b in zip(m2, delta)) % 4
        acc[k] += t
    return acc[0] + 1j * acc[1] - acc[2] - 1j * acc[3]


def theta_constant(char: ThetaCharacteristic, tau, precision=100):
    """(value, error bound) of theta[eps, delta](0, tau)."""
    if not char.even:
        return mpmath.mpc(0), mpmath.mpf(0)
    vals = theta_constants(tau, precision, chars=[char])
    return vals[char]


def theta_constants(tau, precision=100, chars=None):
    """{char: (value, error bound)} for the requested even characteristics."""
    chars = chars if chars is not None else even_characteristics()
    dps = precision + 20
    with mpmath.workdps(dps):
        tau = mpmath.matrix(tau)
        Y = mpmath.matrix([[tau[i, j].imag for j in range(3)] for i in range(3)])
        lam = _min_eigen(Y)
        R2, _ = _radius(lam, precision)
        err = mpmath.mpf(10) ** (-(precision + 5))
        out = {}
        by_eps = {}
        for c in chars:
            by_eps.setdefault(c.epsilon, []).append(c)
        for eps, cs in sorted(by_eps.items()):
            terms = _base_terms(tau, eps, R2, dps)
            for c in cs:
                if not c.even:
                    out[c] = (mpmath.mpc(0), mpmath.mpf(0))
                else:
                    out[c] = (_sum_for_delta(terms, c.delta), err)
        return out


@dataclass
class ClassificationVerdict:
    count: int
    verdict: str
    threshold: str
    magnitudes: list
    labels: list

    def to_json(self):
        return {"count": self.count, "verdict": self.verdict, "threshold": self.threshold, "magnitudes": self.magnitudes}


def verdict_of_count(n):
    if n == 1:
        return HYPERELLIPTIC
    if n == 0:
        return PLANE_QUARTIC
    return DECOMPOSABLE


def vanishing_even_count(tau, precision=100, threshold=mpmath.mpf("1e-50"), threshold_text=None):
    """Count the even theta-nulls of magnitude <= threshold.

    A magnitude in (threshold, threshold * 10^10) is neither clearly zero
    nor clearly nonzero and raises Indeterminate.
    """
    threshold = mpmath.mpf(threshold)
    vals = theta_constants(tau, precision)
    chars = even_characteristics()
    mags, labels, count = [], [], 0
    with mpmath.workdps(precision + 20):
        hi = threshold * mpmath.mpf(10) ** INDETERMINATE_WINDOW
        for c in chars:
            v, _ = vals[c]
            a = abs(v)
            if a <= threshold:
                count += 1
            elif a < hi:
                raise Indeterminate(f"theta{c.label()} has magnitude {mpmath.nstr(a, 5)} near the threshold")
            mags.append(mpmath.nstr(a, 10, min_fixed=1, max_fixed=0))
            labels.append(c.label())
    text = threshold_text or mpmath.nstr(threshold, 3, min_fixed=1, max_fixed=0)
    return ClassificationVerdict(count, verdict_of_count(count), text, mags, labels)
