"""Fractional ideals as Hermite normal form lattices on the integral basis."""
from __future__ import annotations

import math
import warnings
from fractions import Fraction
from functools import reduce

import sympy

from . import linalg
from .errors import FieldMismatch, IndexDivisor, ValidationError, ZeroIdeal
from .field import DEFAULT_PRECISION, FieldElement, NumberField, _polyval_elem


def _lcm(a, b):
    return a * b // math.gcd(a, b)


class Ideal:
    """Fractional ideal ``(1/den) * L`` with L an integral lattice in HNF.

    The pair (hnf, den) is canonical: the gcd of den and all hnf entries is 1.
    """

    __slots__ = ("field", "hnf", "den", "_norm")

    def __init__(self, field: NumberField, hnf, den=1, _canonical=False):
        self.field = field
        if not _canonical:
            hnf, den = _canonicalize(hnf, den)
        self.hnf = hnf
        self.den = den
        self._norm = None

    # constructors ---------------------------------------------------------------
    @classmethod
    def unit(cls, field):
        return cls(field, linalg.identity(field.degree), 1, _canonical=True)

    @classmethod
    def from_lattice(cls, field, rows, modulus=None):
        """Ideal spanned over Z by ``rows`` (rational integral-basis coordinates).

        The caller guarantees the span is a Z_K-module.
        """
        rows = [[Fraction(x) for x in r] for r in rows]
        d = linalg.common_denominator(rows)
        ints = [[int(x * d) for x in r] for r in rows]
        h = linalg.hnf(ints, field.degree, modulus=modulus * d ** field.degree if modulus else None)
        if len(h) != field.degree:
            raise ZeroIdeal("lattice is not of full rank")
        return cls(field, h, d)

    @classmethod
    def from_generators(cls, field, gens):
        """Ideal generated over Z_K by the given elements."""
        zks = []
        for g in gens:
            g = field(g) if not isinstance(g, (list, tuple)) else FieldElement.from_zk(field, g)
            if g:
                zks.append([Fraction(c) for c in g.zk])
        if not zks:
            raise ZeroIdeal("no nonzero generator")
        d = linalg.common_denominator(zks)
        ints = [[int(c * d) for c in z] for z in zks]
        mod = min(abs(field.zk_norm(z)) for z in ints)
        rows = []
        for z in ints:
            rows.extend(field.zk_mul_matrix(z))
        h = linalg.hnf(rows, field.degree, modulus=mod)
        return cls(field, h, d)

    @classmethod
    def principal(cls, field, x):
        return cls.from_generators(field, [x])

    @classmethod
    def codifferent(cls, field):
        """The inverse different, dual of Z_K under the trace form."""
        return cls.unit(field).dual()

    # basic data ------------------------------------------------------------------
    @property
    def degree(self):
        return self.field.degree

    @property
    def norm(self) -> Fraction:
        if self._norm is None:
            d = 1
            for i in range(self.degree):
                d *= self.hnf[i][i]
            self._norm = Fraction(d, self.den**self.degree)
        return self._norm

    def is_integral(self):
        return self.den == 1

    def key(self):
        return (tuple(tuple(r) for r in self.hnf), self.den)

    def __eq__(self, other):
        if not isinstance(other, Ideal):
            return NotImplemented
        return self.field is other.field and self.key() == other.key()

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        return f"Ideal(norm={self.norm}, hnf={self.hnf}, den={self.den})"

    def basis_zk(self):
        """Z-basis in rational integral-basis coordinates."""
        return [[Fraction(x, self.den) for x in r] for r in self.hnf]

    def basis_elements(self):
        return [FieldElement.from_zk(self.field, r) for r in self.basis_zk()]

    def contains(self, x) -> bool:
        x = self.field(x) if not isinstance(x, (list, tuple)) else FieldElement.from_zk(self.field, x)
        v = [c * self.den for c in x.zk]
        if any(c.denominator != 1 for c in v):
            return False
        return linalg.lattice_contains(self.hnf, [int(c) for c in v])

    def contains_ideal(self, other) -> bool:
        """other is a subset of self."""
        return all(self.contains(r) for r in other.basis_zk())

    def to_json(self):
        return {"hnf": [list(r) for r in self.hnf], "den": self.den}

    @classmethod
    def from_json(cls, field, doc):
        rows = [[int(x) for x in r] for r in doc["hnf"]]
        den = int(doc.get("den", 1))
        out = cls.from_lattice(field, [[Fraction(x, den) for x in r] for r in rows])
        return out

    # arithmetic ------------------------------------------------------------------
    def _check(self, other):
        if not isinstance(other, Ideal) or other.field is not self.field:
            raise FieldMismatch("ideals of different fields")

    def __mul__(self, other):
        if isinstance(other, (FieldElement, int, Fraction)):
            return self * Ideal.principal(self.field, other)
        self._check(other)
        return multiply(self, other)

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self * other.inverse()

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        out = Ideal.unit(self.field)
        base = self
        while k:
            if k & 1:
                out = out * base
            base = base * base
            k >>= 1
        return out

    def __add__(self, other):
        self._check(other)
        return Ideal.from_lattice(self.field, self.basis_zk() + other.basis_zk())

    def inverse(self):
        return invert(self)

    def conjugate(self):
        return conjugate(self)

    def dual(self):
        """{x : Tr(x * self) in Z}."""
        B = self.basis_zk()
        T = self.field.trace_matrix
        BT = linalg.matmul(B, T)
        X = linalg.transpose(linalg.inverse_fraction(BT))
        return Ideal.from_lattice(self.field, X)

    def scale(self, q):
        """q * self for a nonzero rational q."""
        q = Fraction(q)
        if q == 0:
            raise ZeroIdeal("zero scaling")
        rows = [[Fraction(x, self.den) * q for x in r] for r in self.hnf]
        return Ideal.from_lattice(self.field, rows)


def _canonicalize(hnf, den):
    hnf = [list(map(int, r)) for r in hnf]
    g = den
    for r in hnf:
        for x in r:
            if x:
                g = math.gcd(g, x)
    if g > 1:
        hnf = [[x // g for x in r] for r in hnf]
        den //= g
    return hnf, den


def multiply(a: Ideal, b: Ideal) -> Ideal:
    if a.field is not b.field:
        raise FieldMismatch("ideals of different fields")
    K = a.field
    n = K.degree
    da = db = 1
    for i in range(n):
        da *= a.hnf[i][i]
        db *= b.hnf[i][i]
    rows = [K.zk_mul(x, y) for x in a.hnf for y in b.hnf]
    h = linalg.hnf(rows, n, modulus=da * db)
    return Ideal(K, h, a.den * b.den)


def invert(a: Ideal) -> Ideal:
    if not isinstance(a, Ideal):
        raise ZeroIdeal("not an ideal")
    K = a.field
    return multiply(a, codifferent(K)).dual()


def codifferent(K):
    c = getattr(K, "_codiff", None)
    if c is None:
        c = Ideal.codifferent(K)
        K._codiff = c
    return c


def conjugate(a: Ideal) -> Ideal:
    K = a.field
    R = K.conj_matrix
    rows = [linalg.vecmat(r, R) for r in a.hnf]
    n = K.degree
    d = 1
    for i in range(n):
        d *= a.hnf[i][i]
    return Ideal(K, linalg.hnf(rows, n, modulus=d), a.den)


def intersect_subfield(a: Ideal, sub) -> Ideal:
    """a intersected with K0, as an ideal of K0."""
    M = sub.zk_matrix
    rows = [list(r) for r in M] + [[-x for x in r] for r in a.hnf]
    ker = linalg.integer_kernel(rows)
    m = len(M)
    ys = [k[:m] for k in ker]
    return Ideal.from_lattice(sub.k0, [[Fraction(x, a.den) for x in y] for y in ys])


def extend_from_subfield(b: Ideal, sub) -> Ideal:
    """b * Z_K for an ideal b of K0."""
    K = sub.K
    gens = [FieldElement.from_zk(K, linalg.vecmat(r, sub.zk_matrix)) for r in b.basis_zk()]
    return Ideal.from_generators(K, gens)


def relative_norm(a: Ideal, sub) -> Ideal:
    """N_{K|K0}(a) as an ideal of K0."""
    return intersect_subfield(a * conjugate(a), sub)


# ---------------------------------------------------------------------------
# Prime ideals


class PrimeIdeal(Ideal):
    __slots__ = ("p", "e", "f")

    def __init__(self, ideal: Ideal, p: int, e: int, f: int):
        super().__init__(ideal.field, ideal.hnf, ideal.den, _canonical=True)
        self.p = p
        self.e = e
        self.f = f

    def __repr__(self):
        return f"PrimeIdeal(p={self.p}, e={self.e}, f={self.f})"


def _zk_pow_mod(K, x, k, p):
    out = list(K.one_zk)
    base = [c % p for c in x]
    while k:
        if k & 1:
            out = [c % p for c in K.zk_mul(out, base)]
        base = [c % p for c in K.zk_mul(base, base)]
        k >>= 1
    return out


def _span_mod(vectors, p):
    R, piv = linalg.rref_mod(vectors, p)
    return R, piv


def _ideal_span_mod(K, vectors, p):
    """F_p span of the Z_K-ideal generated by ``vectors`` modulo p."""
    n = K.degree
    rows = []
    for v in vectors:
        rows.extend([c % p for c in r] for r in K.zk_mul_matrix(v))
    return _span_mod(rows, p) if rows else ([], [])


def _split_mod_p(K, S, piv, p):
    """Maximal ideals of Z_K/p containing the subspace S (an ideal mod p
    containing the radical).  Returns a list of (rows, pivots)."""
    n = K.degree
    comp = [j for j in range(n) if j not in piv]
    d = len(comp)
    if d == 0:
        return []
    if d == 1:
        return [(S, piv)]
    # Frobenius minus identity on the quotient, restricted to complement coords
    mat = []
    for j in comp:
        e = [int(i == j) for i in range(n)]
        fe = _zk_pow_mod(K, e, p, p)
        r = linalg.reduce_mod_space([a - b for a, b in zip(fe, e)], S, piv, p)
        mat.append([r[c] for c in comp])
    ker = linalg.kernel_mod(mat, p)
    if len(ker) <= 1:
        return [(S, piv)]
    one = linalg.reduce_mod_space(K.one_zk, S, piv, p)
    for kv in ker:
        x = [0] * n
        for coef, j in zip(kv, comp):
            x[j] = coef % p
        # skip multiples of 1 modulo S
        test = list(x)
        if _is_scalar(test, one, comp, p):
            continue
        out = []
        for c in range(p):
            y = [(a - c * b) % p for a, b in zip(x, K.one_zk)]
            R, pv = _ideal_span_mod(K, [list(r) for r in S] + [y], p)
            if len(R) < n:
                out.extend(_split_mod_p(K, R, pv, p))
        if out:
            return out
    return [(S, piv)]


def _is_scalar(x, one, comp, p):
    c = None
    for j in comp:
        if one[j]:
            c = x[j] * pow(one[j], -1, p) % p
            break
    if c is None:
        return not any(x[j] for j in comp)
    return all((x[j] - c * one[j]) % p == 0 for j in comp)


def _ideal_from_mod(K, S, p):
    n = K.degree
    rows = [list(r) for r in S] + [[p * int(i == j) for j in range(n)] for i in range(n)]
    return Ideal(K, linalg.hnf(rows, n, modulus=p), 1)


def _factor_mod(coeffs, p):
    """Factorisation of a polynomial over F_p: list of (coeffs low first, e)."""
    t = sympy.Symbol("t")
    poly = sympy.Poly(list(reversed(coeffs)), t, modulus=p)
    with warnings.catch_warnings():
        warnings.simplefilter("ignore")
        _, facs = poly.factor_list()
    out = [([int(c) % p for c in reversed(g.all_coeffs())], e) for g, e in facs]
    out.sort()
    return out


def _valuation_of_p(P: Ideal, p: int) -> int:
    K = P.field
    pk = P
    e = 0
    while pk.contains(K(p)):
        e += 1
        pk = pk * P
        if e > K.degree:
            raise IndexDivisor("ramification index exceeds the degree")
    return e


def primes_above(K: NumberField, p: int, method=None):
    """Prime ideals above p with ramification and residue degrees.

    Kummer-Dedekind when p does not divide the index, otherwise the radical
    of pZ_K is split with the Frobenius-fixed subalgebra.
    """
    cache = K.__dict__.setdefault("_primes_cache", {})
    key = (p, method)
    if key in cache:
        return cache[key]
    if not sympy.isprime(p):
        raise ValidationError(f"{p} is not prime")
    if method is None:
        method = "dedekind" if K.index % p else "radical"
    out = []
    if method == "dedekind":
        if K.index % p == 0:
            raise IndexDivisor(f"{p} divides the index")
        for cs, e in _factor_mod(K.coeffs, p):
            elem = _polyval_elem(cs, K.gen)
            I = Ideal.from_generators(K, [K(p), elem])
            out.append(PrimeIdeal(I, p, e, len(cs) - 1))
    else:
        n = K.degree
        q = p
        while q < n:
            q *= p
        rows = [_zk_pow_mod(K, [int(i == j) for j in range(n)], q, p) for i in range(n)]
        rad = linalg.kernel_mod(rows, p)
        R, piv = _span_mod(rad, p) if rad else ([], [])
        for S, pv in _split_mod_p(K, R, piv, p):
            I = _ideal_from_mod(K, S, p)
            f = n - len(S)
            e = _valuation_of_p(I, p)
            out.append(PrimeIdeal(I, p, e, f))
    out.sort(key=lambda P: (P.f, P.e, P.key()))
    if sum(P.e * P.f for P in out) != K.degree:
        raise IndexDivisor(f"prime decomposition of {p} is inconsistent")
    cache[key] = out
    return out


def _power_cached(P, k):
    cache = P.field.__dict__.setdefault("_prime_powers", {})
    key = (P.key(), k)
    if key not in cache:
        cache[key] = P if k == 1 else _power_cached(P, k - 1) * P
    return cache[key]


def valuation(I: Ideal, P: PrimeIdeal) -> int:
    """v_P of an ideal (fractional allowed)."""
    K = I.field
    if I.den != 1:
        d = I.den
        base = Ideal(K, I.hnf, 1)
        return valuation(base, P) - valuation(Ideal.principal(K, d), P)
    v = 0
    while True:
        Pk = _power_cached(P, v + 1)
        if Pk.contains_ideal(I):
            v += 1
        else:
            return v


def factor(I: Ideal):
    """Prime factorisation as a list of (PrimeIdeal, exponent)."""
    K = I.field
    num = I.norm.numerator * I.norm.denominator
    ps = sorted(sympy.factorint(num)) if num > 1 else []
    out = []
    for p in ps:
        for P in primes_above(K, p):
            v = valuation(I, P)
            if v:
                out.append((P, v))
    return out


# ---------------------------------------------------------------------------
# Principality and minimisation


def _lattice_gram(I: Ideal):
    """Exact T2 Gram matrix of the integral lattice den*I on its HNF basis."""
    G = I.field.t2_gram
    H = I.hnf
    return linalg.matmul(linalg.matmul(H, G), linalg.transpose(H))


def _float_norm(K, zk):
    v = K.embed_float(zk)
    p = 1.0
    for z in v:
        p *= abs(z)
    return p


def short_elements(I: Ideal, bound, limit=None):
    """Elements x of den*I with T2(x) <= bound, as (t2, zk ints) sorted."""
    G = _lattice_gram(I)
    out = []
    for t2, c in linalg.short_vectors(G, bound, limit=limit):
        out.append((t2, linalg.vecmat(c, I.hnf)))
    return out


def is_principal(a: Ideal, precision=DEFAULT_PRECISION, bound=None, max_steps=12):
    """Generator of ``a`` if one is found by short-vector search, else None.

    The search bound starts at n * N^(2/n) (balanced generator) and doubles
    up to ``max_steps`` times, or uses ``bound`` directly when given.
    """
    K = a.field
    n = K.degree
    L = Ideal(K, a.hnf, 1, _canonical=True)
    N = int(L.norm)
    if N == 1 and a.den == 1:
        return K(1)
    base = n * N ** (2 / n)
    bounds = [bound] if bound is not None else [base * 1.5 * 2**k for k in range(max_steps)]
    seen = 0.0
    for B in bounds:
        B = Fraction(B).limit_denominator(10**6) + 1
        for t2, z in short_elements(L, B):
            if t2 <= seen:
                continue
            fn = _float_norm(K, z)
            if abs(fn - N) > 1e-6 * N + 1e-6:
                continue
            if abs(K.zk_norm(z)) == N:
                g = FieldElement.from_zk(K, z) / a.den
                if Ideal.principal(K, g) == a:
                    return g
        seen = B
    return None


def minimize_representative(a: Ideal, precision=DEFAULT_PRECISION, return_element=False):
    """An integral ideal x*a of small norm in the class of a.

    x is taken from the short vectors of a^-1.  The search radius grows
    until the norm is at most the Minkowski bound M; an element of L1 norm
    at most n (M N)^(1/n) exists, so T2 <= n^2 (M N)^(2/n) always suffices.
    Among the candidates seen, the one of smallest norm wins (ties broken
    by T2 and coordinates), which keeps the result deterministic.
    """
    K = a.field
    n = K.degree
    b = a.inverse()
    L = Ideal(K, b.hnf, 1, _canonical=True)
    NL = L.norm
    M = Fraction(K.minkowski_bound).limit_denominator(10**6)
    target = M * NL
    G = _lattice_gram(L)
    T, R = linalg.lll_gram(G)
    best = None
    for r in T:
        z = linalg.vecmat(r, L.hnf)
        nz = abs(K.zk_norm(z))
        cand = (nz, linalg.quadratic_form(K.t2_gram, z), z)
        if best is None or cand < best:
            best = cand
    if best[0] > target:
        bound = Fraction(n) * Fraction(float(target) ** (2 / n)).limit_denominator(10**6)
        cap = n * n * (float(target) ** (2 / n)) * 1.0001 + 1
        while True:
            for t2, z in short_elements(L, bound):
                nz = abs(K.zk_norm(z))
                cand = (nz, t2, z)
                if cand < best:
                    best = cand
            if best[0] <= target or bound > cap:
                break
            bound *= 2
    x = FieldElement.from_zk(K, best[2]) / b.den
    out = a * x
    if return_element:
        return out, x
    return out


def ideal_gcd_content(I: Ideal) -> int:
    """Largest integer m with I contained in m*Z_K (for integral I)."""
    return reduce(math.gcd, (x for r in I.hnf for x in r if x), 0)
