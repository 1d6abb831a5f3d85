"""Class groups (ingested and verified, or enumerated from scratch), the
narrow class group of K0 and the unit quotients U1, U2, V, W."""
from __future__ import annotations

import itertools
import logging
import random
from dataclasses import dataclass, field as dfield
from fractions import Fraction

import sympy

from . import linalg
from .abgroup import FiniteAbelianGroup, smith_decompose
from .errors import BoundTooLarge, NotPrincipal, ValidationError, VerificationFailed
from .field import FieldElement
from .ideals import (
    Ideal,
    _power_cached,
    minimize_representative,
    primes_above,
    short_elements,
)
from .units import UnitGroupData, log_vector, principal_generator, signs

log = logging.getLogger(__name__)

DEFAULT_CEILING = 200
_BIG_PRIME = 2305843009213693951  # 2^61 - 1


@dataclass
class ClassGroupData:
    """Cl(F) as generated by ideals ``gens`` with orders ``orders``.

    ``group`` is the invariant-factor form of Z^k / diag(orders); elements
    are its normal-form tuples.  ``unit_logs`` (log vectors of a finite index
    unit subgroup) make principality tests rigorous.
    """

    field: object
    gens: list
    orders: list
    unit_logs: list
    fb: list | None = None
    fb_group: FiniteAbelianGroup | None = None
    mode: str = "ingest"
    _cache: dict = dfield(default_factory=dict, repr=False)

    def __post_init__(self):
        k = len(self.orders)
        self.group = smith_decompose([[o if i == j else 0 for j in range(k)] for i, o in enumerate(self.orders)], m=k)

    @property
    def order(self):
        return self.group.order

    @property
    def invariants(self):
        return self.group.invariants

    def generator(self, I, required=True):
        """A generator of the principal ideal I (None or NotPrincipal otherwise)."""
        g = principal_generator(I, self.unit_logs)
        if g is None and required:
            raise NotPrincipal("ideal is not principal")
        return g

    def raw_ideal(self, raw):
        out = Ideal.unit(self.field)
        for e, g in zip(raw, self.gens):
            if e:
                out = out * g**e
        return out

    def ideal(self, c):
        """A small integral ideal in the class with normal form c."""
        key = ("ideal", tuple(c))
        if key not in self._cache:
            self._cache[key] = minimize_representative(self.raw_ideal(self.group.lift(c)))
        return self._cache[key]

    def dlog(self, I):
        """Normal form of the class of the ideal I."""
        if self.group.is_trivial():
            return ()
        J = minimize_representative(I)
        key = ("dlog", J.key())
        if key in self._cache:
            return self._cache[key]
        res = None
        if self.fb_group is not None:
            v = factor_over(J, self.fb)
            if v is not None:
                res = self.group.dlog(self.fb_group.dlog(v))
        if res is None:
            res = self._dlog_brute(J)
        self._cache[key] = res
        return res

    def _dlog_brute(self, J):
        for c in self.group.elements():
            # minimising keeps the weighted Gram matrices well conditioned
            cand = minimize_representative(J * self.ideal(c).inverse())
            if principal_generator(cand, self.unit_logs) is not None:
                return c
        raise VerificationFailed("ideal class not reached by the claimed generators")

    def is_principal(self, I):
        return not any(self.dlog(I))

    def to_json(self):
        return {"generators": [g.to_json() for g in self.gens], "orders": list(self.orders)}


# ---------------------------------------------------------------------------
# factor base helpers


def factor_base(K, bound):
    fb = []
    for p in sympy.primerange(2, int(bound) + 1):
        for P in primes_above(K, p):
            if P.norm <= bound:
                fb.append(P)
    fb.sort(key=lambda P: (P.norm, P.p, P.key()))
    return fb


def element_valuation(x_zk, P):
    v = 0
    while _power_cached(P, v + 1).contains(list(x_zk)):
        v += 1
    return v


def smooth_vector(K, fb, index, x_zk):
    """Exponent vector of the integral element x over the factor base, or None."""
    N = abs(K.zk_norm(x_zk))
    v = [0] * len(fb)
    if N == 1:
        return v
    for p, e in sympy.factorint(N).items():
        tot = 0
        for P in primes_above(K, p):
            k = element_valuation(x_zk, P)
            if k:
                j = index.get(P.key())
                if j is None:
                    return None
                v[j] += k
                tot += k * P.f
        if tot != e:
            return None
    return v


def factor_over(I, fb):
    """Exponent vector of an ideal over the factor base, or None."""
    from .ideals import valuation

    N = I.norm
    num = N.numerator * N.denominator
    v = [0] * len(fb)
    index = {P.key(): j for j, P in enumerate(fb)}
    K = I.field
    rest = Fraction(1)
    if num > 1:
        for p in sympy.factorint(num):
            for P in primes_above(K, p):
                k = valuation(I, P)
                if k:
                    j = index.get(P.key())
                    if j is None:
                        return None
                    v[j] += k
                    rest *= Fraction(P.norm) ** k
    if rest != N:
        return None
    return v


def _independent_rows(rows, m):
    """Indices of a maximal independent subset (over F_q) of the rows."""
    q = _BIG_PRIME
    basis, piv, chosen = [], [], []
    for i, r in enumerate(rows):
        v = linalg.reduce_mod_space(r, basis, piv, q)
        if any(v):
            c = next(j for j in range(m) if v[j])
            inv = pow(v[c], -1, q)
            v = [(x * inv) % q for x in v]
            for k in range(len(basis)):
                if basis[k][c]:
                    f = basis[k][c]
                    basis[k] = [(a - f * b) % q for a, b in zip(basis[k], v)]
            basis.append(v)
            piv.append(c)
            chosen.append(i)
            if len(chosen) == m:
                break
    return chosen


def relation_hnf(rows, m):
    chosen = _independent_rows(rows, m)
    if len(chosen) < m:
        return None
    D = abs(linalg.det_bareiss([rows[i] for i in chosen]))
    return linalg.hnf(rows, m, modulus=D)


# ---------------------------------------------------------------------------
# enumerate mode


def enumerate_class_group(K, unit_logs, ceiling=DEFAULT_CEILING, seed=0, max_rounds=200) -> ClassGroupData:
    """Class group from the full factor base below the Minkowski bound."""
    M = K.minkowski_bound
    if M > ceiling:
        raise BoundTooLarge(f"Minkowski bound {M:.1f} exceeds the ceiling {ceiling}")
    fb = factor_base(K, M)
    m = len(fb)
    if m == 0:
        return ClassGroupData(K, [], [], unit_logs, fb, smith_decompose([], m=0), mode="enumerate")
    index = {P.key(): j for j, P in enumerate(fb)}
    rows = []
    # (p) = prod P^e whenever every prime above p is in the factor base
    for p in sorted({P.p for P in fb}):
        ps = primes_above(K, p)
        if all(P.key() in index for P in ps):
            r = [0] * m
            for P in ps:
                r[index[P.key()]] = P.e
            rows.append(r)
    rng = random.Random(seed)
    H = None
    targets = [(Ideal.unit(K), [0] * m)] + [(P, [int(i == j) for i in range(m)]) for j, P in enumerate(fb)]
    for rnd in range(max_rounds):
        for I, vec in targets:
            n = K.degree
            bound = Fraction(n) * Fraction(float(I.norm) ** (2 / n)).limit_denominator(1000) * (2 + rnd)
            cnt = 0
            for _, z in short_elements(I, bound, limit=60):
                # (z) = I * J, so the full factorisation of (z) is the relation
                v = smooth_vector(K, fb, index, z)
                if v is not None and any(v):
                    rows.append(v)
                    cnt += 1
                if cnt >= 3:
                    break
        H = relation_hnf(rows, m)
        if H is not None:
            break
        # random products for the next round
        targets = []
        for _ in range(m):
            vec = [0] * m
            I = Ideal.unit(K)
            for j in rng.sample(range(m), min(3, m)):
                e = rng.randint(1, 2)
                vec[j] += e
                I = I * fb[j] ** e
            targets.append((I, vec))
    if H is None:
        raise VerificationFailed("could not find a full-rank set of relations")
    # certify: every element of prime order must be non-principal
    while True:
        G = smith_decompose(H, m=m)
        gens = [minimize_representative(_fb_ideal(K, fb, g)) for g in G.gens]
        extra = _principal_torsion(G, gens, unit_logs)
        if extra is None:
            break
        H = linalg.hnf(H + [extra], m, modulus=_hnf_det(H))
    data = ClassGroupData(K, gens, list(G.invariants), unit_logs, fb, G, mode="enumerate")
    return data


def _hnf_det(H):
    d = 1
    for i in range(len(H)):
        d *= H[i][i]
    return d


def _fb_ideal(K, fb, vec):
    out = Ideal.unit(K)
    for e, P in zip(vec, fb):
        if e:
            out = out * P**e
    return out


def torsion_lines(G: FiniteAbelianGroup):
    """One nonzero element from each subgroup of prime order."""
    out = []
    for ell in sorted(sympy.factorint(G.order)) if G.order > 1 else []:
        comps = [(i, d // ell) for i, d in enumerate(G.invariants) if d % ell == 0]
        for coeffs in itertools.product(range(ell), repeat=len(comps)):
            nz = [c for c in coeffs if c]
            if not nz or nz[0] != 1:
                continue
            a = [0] * G.rank
            for c, (i, step) in zip(coeffs, comps):
                a[i] = c * step
            out.append(tuple(a))
    return out


def _principal_torsion(G, gens, unit_logs):
    """Lift of a principal element of prime order, or None if there is none."""
    for a in torsion_lines(G):
        I = Ideal.unit(gens[0].field) if gens else None
        for e, g in zip(a, gens):
            if e:
                I = I * g**e
        I = minimize_representative(I)
        if principal_generator(I, unit_logs) is not None:
            return G.lift(a)
    return None


# ---------------------------------------------------------------------------
# ingest mode


def ingest_class_group(K, block, unit_logs, ceiling=DEFAULT_CEILING, full_check=True) -> ClassGroupData:
    """Build class group data from an ingested block and verify it.

    Checks: each generator has exactly the claimed order, no element of
    prime order is principal, and (when the Minkowski bound allows)
    every factor-base prime lies in the claimed group.
    """
    gens = [Ideal.from_json(K, g) for g in block.get("generators", [])]
    orders = [int(o) for o in block.get("orders", [])]
    if len(gens) != len(orders):
        raise VerificationFailed("generators and orders differ in length")
    for g, d in zip(gens, orders):
        if d < 1:
            raise VerificationFailed("orders must be positive")
        if principal_generator(minimize_representative(g**d), unit_logs) is None:
            raise VerificationFailed(f"generator does not have order dividing {d}")
    data = ClassGroupData(K, gens, orders, unit_logs, mode="ingest")
    G = data.group
    reps = [data.ideal(tuple(int(i == j) for j in range(G.rank))) for i in range(G.rank)]
    if _principal_torsion(G, reps, unit_logs) is not None:
        raise VerificationFailed("claimed class group is too large (a claimed element is principal)")
    if full_check and K.minkowski_bound <= ceiling and not G.is_trivial():
        for P in factor_base(K, K.minkowski_bound):
            data.dlog(P)
    elif full_check and G.is_trivial() and K.minkowski_bound <= ceiling:
        for P in factor_base(K, K.minkowski_bound):
            if principal_generator(P, unit_logs) is None:
                raise VerificationFailed("a factor-base prime is not principal")
    return data


def acquire_class_group(K, ingested=None, mode="ingest", unit_logs=None, ceiling=DEFAULT_CEILING):
    if unit_logs is None:
        raise ValidationError("unit data is required")
    if mode == "enumerate" or ingested is None:
        return enumerate_class_group(K, unit_logs, ceiling=ceiling)
    if mode != "ingest":
        raise ValidationError(f"unknown mode {mode}")
    return ingest_class_group(K, ingested, unit_logs, ceiling=ceiling)


# ---------------------------------------------------------------------------
# narrow class group of K0


@dataclass
class NarrowClassGroup:
    """Cl+(K0) as an extension of Cl(K0) by the sign group modulo unit signs.

    Ambient generators are the generators of Cl(K0) followed by the three
    sign generators; ``group`` is the quotient by the relation lattice.
    """

    cl: ClassGroupData
    units: UnitGroupData
    group: FiniteAbelianGroup
    gen_elements: list

    def sign_map(self, x):
        return signs(self.cl.field, x)

    def raw(self, I):
        """Ambient coordinates of the narrow class of I."""
        c = self.cl.dlog(I)
        raw = self.cl.group.lift(c)
        J = I * self.cl.raw_ideal(raw).inverse()
        y = self.cl.generator(J)
        return list(raw) + list(self.sign_map(y))

    def dlog(self, I):
        return self.group.dlog(self.raw(I))

    def kernel_sign_order(self):
        """|S| = |{+-1}^3 / signs of units|."""
        return self.group.order // self.cl.order

    @property
    def order(self):
        return self.group.order


def narrow_class_group(cl0: ClassGroupData, units: UnitGroupData) -> NarrowClassGroup:
    K0 = cl0.field
    k = len(cl0.gens)
    r = K0.degree
    rels = []
    gen_el = []
    for i, (g, d) in enumerate(zip(cl0.gens, cl0.orders)):
        x = cl0.generator(g**d)
        gen_el.append(x)
        rels.append([d * int(i == j) for j in range(k)] + list(signs(K0, x)))
    for u in [K0(-1)] + list(units.fundamental):
        rels.append([0] * k + list(signs(K0, u)))
    for j in range(r):
        rels.append([0] * k + [2 * int(i == j) for i in range(r)])
    G = smith_decompose(rels, m=k + r)
    return NarrowClassGroup(cl0, units, G, gen_el)


# ---------------------------------------------------------------------------
# unit quotients


@dataclass
class UnitQuotients:
    """Units of K0 modulo squares in coordinates over (-1, e1, e2) mod 2.

    U1 = totally positive units, U2 = norms of units of K, W represents
    Z_K0^*/U1 and V represents U1/U2 (both lists of K0 units).
    """

    U1: list
    U2: list
    W: list
    V: list

    @property
    def index_plus(self):
        return len(self.V)


def _f2_span(vectors, n):
    R, piv = linalg.rref_mod(vectors, 2) if vectors else ([], [])
    return R, piv


def _f2_elements(basis):
    out = set()
    for coeffs in itertools.product(range(2), repeat=len(basis)):
        v = [0] * (len(basis[0]) if basis else 0)
        for c, b in zip(coeffs, basis):
            if c:
                v = [(x + y) % 2 for x, y in zip(v, b)]
        out.add(tuple(v))
    return sorted(out)


def unit_from_exponents(units: UnitGroupData, ex):
    K0 = units.field
    x = K0(-1) ** (ex[0] % 2)
    for e, u in zip(ex[1:], units.fundamental):
        if e:
            x = x * u**e
    return x


def _minimize_mod_squares(units: UnitGroupData, ex, extra=None):
    """The unit (-1)^a prod e_i^(b_i + 2 c_i) (times extra^k) of smallest logs."""
    r = len(units.fundamental)
    best = None
    for c in itertools.product(range(-2, 3), repeat=r):
        ex2 = [ex[0]] + [ex[1 + i] + 2 * c[i] for i in range(r)]
        x = unit_from_exponents(units, ex2)
        l = [abs(float(v)) for v in log_vector(units.field, x, 20)]
        key = (max(l), sum(l), x.coords)
        if best is None or key < best[0]:
            best = (key, x)
    return best[1]


def unit_quotients(cm_units, units: UnitGroupData = None) -> UnitQuotients:
    from .units import k0_exponents

    units = units or cm_units.k0units
    K0 = units.field
    gens = [K0(-1)] + list(units.fundamental)
    S = [list(signs(K0, g)) for g in gens]
    dim = len(gens)
    # U1 / squares: kernel of the sign map
    U1 = linalg.kernel_mod(S, 2)
    U1 = _f2_span(U1, dim)[0]
    U2 = []
    if cm_units.eta is not None:
        eps = cm_units.sub.from_K(cm_units.eta * cm_units.K.conj(cm_units.eta))
        U2 = [[e % 2 for e in k0_exponents(units, eps)]]
    U2 = _f2_span(U2, dim)[0] if U2 else []
    # V: coset representatives of U2 in U1
    u2set = set(_f2_elements(U2)) if U2 else {tuple([0] * dim)}
    reps_v = []
    seen = set()
    for v in _f2_elements(U1) if U1 else [tuple([0] * dim)]:
        cls = frozenset(tuple((a + b) % 2 for a, b in zip(v, w)) for w in u2set)
        if cls in seen:
            continue
        seen.add(cls)
        reps_v.append(min(cls))
    u1set = set(_f2_elements(U1)) if U1 else {tuple([0] * dim)}
    reps_w = []
    seen = set()
    for v in itertools.product(range(2), repeat=dim):
        cls = frozenset(tuple((a + b) % 2 for a, b in zip(v, w)) for w in u1set)
        if cls in seen:
            continue
        seen.add(cls)
        reps_w.append(min(cls))
    V = [_minimize_mod_squares(units, list(v)) for v in sorted(reps_v)]
    W = [_minimize_mod_squares(units, list(v)) for v in sorted(reps_w)]
    return UnitQuotients([list(r) for r in U1], [list(r) for r in U2], W, V)
