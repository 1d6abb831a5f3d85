"""Unit groups of K0 and K, sign maps, and certified principality tests.

Units of the totally real cubic K0 are found by weighted short-vector
searches and then saturated; the index bound comes from Cusick's regulator
lower bound R >= log(D/4)^2 / 16 for totally real cubic fields.  Units of
the CM field K are generated by the roots of unity, the units of K0 and,
when the Hasse unit index is 2, one extra unit eta.
"""
from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field as dfield
from fractions import Fraction

import mpmath

from . import linalg
from .errors import VerificationFailed
from .field import FieldElement, NumberField

# ---------------------------------------------------------------------------
# places and logarithms


def places(K: NumberField):
    """Embedding indices grouped by archimedean place."""
    out = []
    used = set()
    pairs = K.conj_pairs if K.n_real < K.degree else list(range(K.degree))
    for k in range(K.degree):
        if k in used:
            continue
        j = pairs[k]
        grp = (k,) if j == k else (k, j)
        used.update(grp)
        out.append(grp)
    return out


def log_vector(K, x, precision=40):
    """log|x| at each place (one embedding per place)."""
    x = K(x)
    vals = K.embed(x, precision)
    with mpmath.workdps(precision):
        return [mpmath.log(abs(vals[p[0]])) for p in places(K)]


def float_log_vector(K, x):
    vals = K.embed_float(K(x) if not isinstance(x, (list, tuple)) else x)
    return [math.log(abs(vals[p[0]])) for p in places(K)]


def signs(K, x, precision=40):
    """Signs (as bits, 1 for negative) at the real places of a real field."""
    x = K(x)
    v = K.embed_float(x)
    out = []
    for k in range(K.degree):
        r = v[k].real
        if abs(r) < 1e-6 * (1 + max(abs(t) for t in v)):
            hv = K.embed(x, max(precision, 60))
            with mpmath.workdps(max(precision, 60)):
                r = float(mpmath.sign(mpmath.re(hv[k])))
            if r == 0:
                raise ValueError("zero has no sign")
        out.append(1 if r < 0 else 0)
    return tuple(out)


def is_totally_positive(K, x):
    return not any(signs(K, x))


# ---------------------------------------------------------------------------
# weighted lattice searches


def weighted_gram(K, rows, logw):
    """Float Gram matrix of sum_k exp(-2 logw[place(k)]) |x_k|^2 on ``rows``
    (integral-basis coordinates, possibly Fractions)."""
    V = K.float_basis_values
    pl = places(K)
    wt = [0.0] * K.degree
    for w, p in zip(logw, pl):
        for k in p:
            wt[k] = math.exp(-2 * w)
    vals = []
    for r in rows:
        vals.append([sum(float(c) * V[k][i] for i, c in enumerate(r) if c) for k in range(K.degree)])
    n = len(rows)
    G = [[0.0] * n for _ in range(n)]
    for i in range(n):
        for j in range(i, n):
            s = sum(wt[k] * (vals[i][k] * vals[j][k].conjugate()).real for k in range(K.degree))
            G[i][j] = G[j][i] = s
    return G


def weighted_short(K, rows, logw, bound, limit=None):
    """Integer combinations x of ``rows`` with weighted T2 below ``bound``.

    The Gram matrix is floating point; the bound is padded by a relative
    1e-6 so no vector within the true bound is missed.
    """
    G = weighted_gram(K, rows, logw)
    Gf = [[Fraction(x) for x in r] for r in G]
    out = []
    for _, c in linalg.short_vectors(Gf, Fraction(bound) * Fraction(1000001, 1000000), limit=limit):
        out.append(linalg.vecmat(c, rows))
    return out


# ---------------------------------------------------------------------------
# units of a totally real cubic field


@dataclass
class UnitGroupData:
    """Units of a field: torsion generator of order ``w`` and fundamental units.

    ``fundamental`` are FieldElements; ``logs`` their log vectors by place.
    """

    field: NumberField
    torsion: FieldElement
    w: int
    fundamental: list
    logs: list = dfield(default_factory=list)

    def __post_init__(self):
        if not self.logs:
            self.logs = [log_vector(self.field, u) for u in self.fundamental]

    @property
    def regulator(self):
        with mpmath.workdps(40):
            r = len(self.fundamental)
            pl = places(self.field)
            M = mpmath.matrix([[len(pl[j]) * self.logs[i][j] for j in range(r)] for i in range(r)])
            return abs(mpmath.det(M))

    def covering_radius(self):
        """Half the sum of sup norms of the fundamental log vectors."""
        return 0.5 * sum(max(abs(float(x)) for x in l) for l in self.logs)

    def to_json(self):
        return {"fundamental": [u.to_json() for u in self.fundamental], "torsion": self.torsion.to_json()}


def _is_unit(K, zk):
    return abs(K.zk_norm([int(c) for c in zk])) == 1


def _reduce_unit_basis(K, units, precision=50):
    """Basis of the group generated by ``units`` modulo torsion.

    Start from the independent pair of smallest regulator and fold in the
    remaining units one at a time; each has rational coordinates on the
    current basis, and the enlarged lattice gets a new HNF basis.
    """
    r = len(places(K)) - 1
    logs = {}

    def lg(u):
        if u not in logs:
            logs[u] = [x for x in log_vector(K, u, precision)[:r]]
        return logs[u]

    with mpmath.workdps(precision):
        best = None
        for combo in itertools.combinations(units, r):
            d = abs(mpmath.det(mpmath.matrix([lg(u) for u in combo])))
            if d > mpmath.mpf(10) ** -10 and (best is None or d < best[0]):
                best = (d, list(combo))
        if best is None:
            raise VerificationFailed("units are dependent")
        basis = best[1]
        for u in units:
            M = mpmath.matrix([[lg(b)[j] for b in basis] for j in range(r)])
            c = mpmath.lu_solve(M, mpmath.matrix(lg(u)))
            fr = [Fraction(float(c[i])).limit_denominator(1000) for i in range(r)]
            if any(abs(mpmath.mpf(f.numerator) / f.denominator - c[i]) > mpmath.mpf(10) ** -20 for i, f in enumerate(fr)):
                raise VerificationFailed("unit logs are not commensurable")
            if all(f.denominator == 1 for f in fr):
                continue
            D = 1
            for f in fr:
                D = D * f.denominator // math.gcd(D, f.denominator)
            vecs = [[D * int(i == j) for j in range(r)] for i in range(r)] + [[int(f * D) for f in fr]]
            aug = [v + [int(i == j) for j in range(r + 1)] for i, v in enumerate(vecs)]
            H = linalg.hnf(aug, 2 * r + 1)
            gens = basis + [u]
            newb = []
            for row in H[:r]:
                x = K(1)
                for e, g in zip(row[r:], gens):
                    x = x * g**e
                newb.append(x)
            basis = newb
    return _lll_logs(K, basis, [lg(b) for b in basis])


def _lll_logs(K, basis, logs):
    """LLL-reduce a unit basis with respect to its log vectors."""
    r = len(basis)
    G = [[int(round(1e12 * sum(float(a) * float(b) for a, b in zip(logs[i], logs[j])))) for j in range(r)] for i in range(r)]
    T, _ = linalg.lll_gram(G)
    out = []
    for row in T:
        x = K(1)
        for e, g in zip(row, basis):
            if e:
                x = x * g**e
        out.append(x)
    return out


def _kth_root(K, x, k, precision=60):
    """An element y of K with y^k = x (real field, odd k or positive x), or None."""
    vals = K.embed(x, precision)
    cands = []
    with mpmath.workdps(precision + 10):
        reals = [mpmath.re(v) for v in vals]
        if k % 2:
            roots = [mpmath.sign(v) * abs(v) ** (mpmath.mpf(1) / k) for v in reals]
            cands.append(roots)
        else:
            if any(v <= 0 for v in reals):
                return None
            base = [v ** (mpmath.mpf(1) / k) for v in reals]
            for s in itertools.product([1, -1], repeat=len(base) - 1):
                cands.append([base[0]] + [si * b for si, b in zip(s, base[1:])])
    for c in cands:
        zk = K.lift(c, precision)
        if zk is None:
            continue
        y = FieldElement.from_zk(K, zk)
        if y**k == x:
            return y
    return None


def cusick_bound(D):
    return math.log(D / 4) ** 2 / 16


def real_cubic_units(k0: NumberField, search_radius=3.0, precision=60) -> UnitGroupData:
    """Fundamental units of a totally real cubic field, certified saturated."""
    K = k0
    if K.n_real != K.degree or K.degree != 3:
        raise ValueError("expected a totally real cubic field")
    basis = linalg.identity(3)
    found = {}
    step = 0.5
    grid = [i * step for i in range(-int(search_radius / step), int(search_radius / step) + 1)]
    for a in grid:
        for b in grid:
            w = [a, b, -a - b]
            for z in weighted_short(K, basis, w, 3 * math.exp(2 * step), limit=200):
                if _is_unit(K, z):
                    u = FieldElement.from_zk(K, z)
                    if u != K(1) and u != K(-1):
                        found[tuple(z)] = u
        if len(found) > 40:
            break
    units = sorted(found.values(), key=lambda u: (sum(abs(float(x)) for x in float_log_vector(K, u)), u.coords))[:12]
    if len(units) < 2:
        raise VerificationFailed("not enough independent units found")
    fund = _reduce_unit_basis(K, units, precision)
    data = UnitGroupData(K, K(-1), 2, fund)
    return saturate(data, precision)


def saturate(data: UnitGroupData, precision=60) -> UnitGroupData:
    """p-saturate the fundamental units for every p up to the index bound."""
    K = data.field
    while True:
        R = float(data.regulator)
        bound = R / cusick_bound(abs(K.disc))
        improved = False
        for p in _primes_upto(int(bound)):
            for ex in itertools.product(range(p), repeat=len(data.fundamental)):
                if not any(ex):
                    continue
                x = K(1)
                for e, u in zip(ex, data.fundamental):
                    x = x * u**e
                for sgn in ([1, -1] if p == 2 else [1]):
                    y = _kth_root(K, x * sgn, p, precision)
                    if y is not None:
                        # replace a unit with nonzero exponent by the root
                        i = next(i for i, e in enumerate(ex) if e % p)
                        new = list(data.fundamental)
                        new[i] = y
                        new = _reduce_unit_basis(K, new, precision)
                        data = UnitGroupData(K, data.torsion, data.w, new)
                        improved = True
                        break
                if improved:
                    break
            if improved:
                break
        if not improved:
            return data


def _primes_upto(n):
    return [p for p in range(2, n + 1) if all(p % q for q in range(2, int(p**0.5) + 1))]


def verify_units(data: UnitGroupData, precision=60):
    """Check the ingested units: integral of norm +-1, independent, saturated."""
    K = data.field
    for u in data.fundamental:
        if not u.is_integral() or abs(u.norm()) != 1:
            raise VerificationFailed("claimed unit is not a unit")
    if data.regulator < mpmath.mpf(10) ** -10:
        raise VerificationFailed("claimed units are dependent")
    sat = saturate(data, precision)
    if abs(sat.regulator - data.regulator) > mpmath.mpf(10) ** -8:
        raise VerificationFailed("claimed units are not fundamental")
    return True


# ---------------------------------------------------------------------------
# units of the CM field


@dataclass
class CMUnitData:
    """Z_K^* = <zeta> x <eta or nothing> x Z_K0^* (up to finite index 1 or 2).

    ``k0units`` are the units of K0, ``zeta`` generates the roots of unity
    of order ``w``, ``eta`` is a unit with eta^2 = zeta * eps for a unit eps
    of K0 when the Hasse index is 2 (else None).
    """

    K: NumberField
    sub: object
    k0units: UnitGroupData
    zeta: FieldElement
    w: int
    eta: FieldElement | None

    @property
    def hasse_index(self):
        return 2 if self.eta is not None else 1

    def fundamental_K(self):
        """Fundamental units of K as FieldElements (eta replaces one K0 unit)."""
        base = [self.sub.to_K(u) for u in self.k0units.fundamental]
        if self.eta is None:
            return base
        # eta^2 = zeta * eps ; eps = (-1)^a e1^b e2^c with b or c odd
        eps = self.sub.from_K(self.eta * self.K.conj(self.eta))
        ex = k0_exponents(self.k0units, eps)
        i = next(i for i, e in enumerate(ex[1:]) if e % 2)
        base[i] = self.eta
        return base

    def logs(self):
        return [log_vector(self.K, u) for u in self.fundamental_K()]


def roots_of_unity(K: NumberField):
    """Generator and order of the torsion of Z_K (T2 = n exactly)."""
    n = K.degree
    cands = []
    for t2, z in _short_zk(K, n):
        if t2 == n and abs(K.zk_norm(z)) == 1:
            cands.append(FieldElement.from_zk(K, z))
    cands += [-c for c in cands]
    best, order = K(-1), 2
    for c in cands:
        o = _element_order(c, 2 * n * n)
        if o > order:
            best, order = c, o
    return best, order


def _short_zk(K, bound):
    from .ideals import Ideal, short_elements

    return short_elements(Ideal.unit(K), bound)


def _element_order(x, cap):
    y = x
    for k in range(1, cap + 1):
        if y == x.field(1):
            return k
        y = y * x
    return 0


def k0_exponents(units: UnitGroupData, eps):
    """(a, b1, b2) with eps = (-1)^a prod u_i^b_i, for a unit eps of K0."""
    K = units.field
    r = len(units.fundamental)
    l = log_vector(K, eps, 50)
    with mpmath.workdps(50):
        M = mpmath.matrix([[units.logs[i][j] for i in range(r)] for j in range(r)])
        c = mpmath.lu_solve(M, mpmath.matrix(l[:r]))
        ex = [int(mpmath.nint(c[i])) for i in range(r)]
    x = K(1)
    for e, u in zip(ex, units.fundamental):
        x = x * u**e
    if x == eps:
        return (0, *ex)
    if -x == eps:
        return (1, *ex)
    raise VerificationFailed("element is not in the unit group")


def is_square(K, x, precision=60):
    """A square root of x in K or None (exact)."""
    vals = K.embed(x, precision)
    pl = places(K)
    with mpmath.workdps(precision + 10):
        base = [mpmath.sqrt(v) for v in vals]
    for s in itertools.product([1, -1], repeat=len(pl) - 1):
        sg = [1] + list(s)
        c = [None] * K.degree
        with mpmath.workdps(precision + 10):
            for si, p in zip(sg, pl):
                c[p[0]] = si * base[p[0]]
                if len(p) == 2:
                    c[p[1]] = mpmath.conj(c[p[0]])
        for den in (1, 2):
            zk = K.lift(c, precision, den=den)
            if zk is None:
                continue
            y = FieldElement.from_zk(K, [Fraction(z, den) for z in zk])
            if y * y == x:
                return y
    return None


def cm_units(K, sub, k0units: UnitGroupData) -> CMUnitData:
    zeta, w = roots_of_unity(K)
    eta = None
    for ex in itertools.product(range(2), repeat=1 + len(k0units.fundamental)):
        eps = sub.k0(-1) ** ex[0]
        for e, u in zip(ex[1:], k0units.fundamental):
            eps = eps * u**e
        y = is_square(K, zeta * sub.to_K(eps))
        if y is not None and _odd_power_of(y / K.conj(y), zeta, w):
            eta = y
            break
    return CMUnitData(K, sub, k0units, zeta, w, eta)


def _odd_power_of(q, zeta, w):
    """q = zeta^j with j odd (so q is not a square in the roots of unity)."""
    y = q.field(1)
    for j in range(w):
        if y == q:
            return j % 2 == 1
        y = y * zeta
    return False


# ---------------------------------------------------------------------------
# certified principality


def _log_center(K, N):
    return math.log(N) / K.degree


def principal_generator(a, unit_logs, rho=0.35, first_try=True):
    """Generator of the ideal ``a`` or None, decided rigorously.

    ``unit_logs`` are log vectors (by place) of units generating a subgroup
    of finite index.  Any generator can be moved by such units so that its
    log vector lies within the fundamental parallelotope around the balanced
    point; that region is covered by boxes of sup-radius ``rho`` and each box
    by a weighted ellipsoid, which is searched exhaustively.
    """
    from .ideals import Ideal, is_principal

    K = a.field
    if first_try:
        g = is_principal(a, max_steps=2)
        if g is not None:
            return g
    L = Ideal(K, a.hnf, 1, _canonical=True)
    N = int(L.norm)
    c0 = _log_center(K, N)
    pl = places(K)
    rows = L.hnf
    logs = [[float(x) for x in l] for l in unit_logs]
    r = len(logs)
    if r == 0:
        grid_pts = [[0.0] * len(pl)]
        m = 1
    else:
        sup = sum(max(abs(x) for x in l) for l in logs)
        m = max(1, math.ceil(sup / (2 * rho)))
        grid_pts = []
        for t in itertools.product(range(m), repeat=r):
            pt = [0.0] * len(pl)
            for ti, l in zip(t, logs):
                for j in range(len(pl)):
                    pt[j] += (ti + 0.5) / m * l[j]
            grid_pts.append(pt)
    # sup-distance from any point in a cell to its center
    cell = 0.5 / m * sum(max(abs(x) for x in l) for l in logs) if r else 0.0
    bound = K.degree * math.exp(2 * cell)
    for pt in grid_pts:
        w = [c0 + x for x in pt]
        for z in weighted_short(K, rows, w, bound):
            if abs(K.zk_norm(z)) == N:
                g = FieldElement.from_zk(K, z) / a.den
                if Ideal.principal(K, g) == a:
                    return g
    return None


# ---------------------------------------------------------------------------
# ingested unit blocks


def _element_from_doc(K, doc):
    return FieldElement(K, [Fraction(x) for x in doc])


def units_from_block(k0: NumberField, block, precision=60) -> UnitGroupData:
    """UnitGroupData for K0 from a {"fundamental", "torsion"} block, verified."""
    fund = [_element_from_doc(k0, u) for u in block.get("fundamental", [])]
    if len(fund) != k0.degree - 1:
        raise VerificationFailed("wrong number of fundamental units for K0")
    tors = _element_from_doc(k0, block["torsion"]) if "torsion" in block else k0(-1)
    if tors not in (k0(-1), k0(1)):
        raise VerificationFailed("K0 is totally real; its torsion is {+-1}")
    data = UnitGroupData(k0, k0(-1), 2, fund)
    verify_units(data, precision)
    return data


def check_cm_unit_block(cu: CMUnitData, block):
    """The ingested units of K generate the same group as the computed ones."""
    K = cu.K
    fund = [_element_from_doc(K, u) for u in block.get("fundamental", [])]
    if len(fund) != 2:
        raise VerificationFailed("a sextic CM field has unit rank 2")
    for u in fund:
        if not u.is_integral() or abs(u.norm()) != 1:
            raise VerificationFailed("claimed unit is not a unit")
    if "torsion" in block:
        z = _element_from_doc(K, block["torsion"])
        if _element_order(z, 4 * cu.w) != cu.w:
            raise VerificationFailed(f"claimed torsion generator does not have order {cu.w}")
    mine = [[float(x) for x in l] for l in cu.logs()]
    theirs = [[float(x) for x in log_vector(K, u)] for u in fund]

    def det2(a, b):
        return a[0] * b[1] - a[1] * b[0]

    r1 = abs(det2(*mine))
    r2 = abs(det2(*theirs))
    if r2 < 1e-9 or abs(r1 - r2) > 1e-6 * max(1.0, r1):
        raise VerificationFailed("claimed units of K do not match the computed unit group")
    return True
