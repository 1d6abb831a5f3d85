"""Galois groups of sextic CM fields, CM types and their reflexes.

Groups are modelled abstractly by multiplication tables; the six cosets of
H are labelled i + 3j for the coset sigma^i rho^j H (0 <= i < 3, j < 2),
which for C6 and D6 is the usual shift notation sigma^k H -> k.
"""
from __future__ import annotations

import itertools
from collections import Counter
from dataclasses import dataclass, field as dfield

import mpmath
import sympy

from .errors import KindMismatch, NotSexticCM, PrecisionTooLow, UnrecognizedPattern

KINDS = ("C6", "D6", "C23xC3", "C23xS3")
TRANSITIVE_LABELS = {"6T1": "C6", "6T3": "D6", "6T6": "C23xC3", "6T11": "C23xS3"}
GROUP_ORDERS = {"C6": 6, "D6": 12, "C23xC3": 24, "C23xS3": 48}


# ---------------------------------------------------------------------------
# abstract group models


def _s3_compose(p, q):
    """(p q)(i) = p(q(i)) for permutations of (0, 1, 2)."""
    return tuple(p[q[i]] for i in range(3))


def _s3_act(p, v):
    """Permute the coordinates of v: (p.v)_{p(i)} = v_i."""
    out = [0, 0, 0]
    for i in range(3):
        out[p[i]] = v[i]
    return tuple(out)


def _wreath_mul(a, b):
    (v, p), (w, q) = a, b
    pw = _s3_act(p, w)
    return (tuple((x + y) % 2 for x, y in zip(v, pw)), _s3_compose(p, q))


def _dihedral_mul(a, b):
    (i, s), (j, t) = a, b
    return ((i + (-1) ** s * j) % 6, s ^ t)


@dataclass
class GaloisGroupModel:
    """Finite group by multiplication table with H and the central rho."""

    kind: str
    elements: list
    table: list
    H: frozenset
    rho: int
    sigma: int
    named: dict = dfield(default_factory=dict)

    def __post_init__(self):
        n = len(self.elements)
        self.identity = next(i for i in range(n) if all(self.table[i][j] == j for j in range(n)))
        self.inv = [next(j for j in range(n) if self.table[i][j] == self.identity) for i in range(n)]
        reps = []
        for lab in range(6):
            i, j = lab % 3, lab // 3
            g = self.power(self.sigma, i)
            if j:
                g = self.mul(g, self.rho)
            reps.append(g)
        self.coset_reps = reps
        self.label = [None] * n
        for lab, g in enumerate(reps):
            for h in self.H:
                self.label[self.mul(g, h)] = lab
        if any(x is None for x in self.label):
            raise AssertionError("coset labels do not cover the group")

    @property
    def order(self):
        return len(self.elements)

    def mul(self, a, b):
        return self.table[a][b]

    def power(self, a, k):
        out = self.identity
        for _ in range(k % self.element_order(a)):
            out = self.mul(out, a)
        return out

    def element_order(self, a):
        k, x = 1, a
        while x != self.identity:
            x = self.mul(x, a)
            k += 1
        return k

    def coset(self, g):
        return frozenset(self.mul(g, h) for h in self.H)

    def left_perm(self, g):
        """Permutation of coset labels induced by left multiplication."""
        return tuple(self.label[self.mul(g, self.coset_reps[k])] for k in range(6))

    def normalizer(self):
        return [g for g in range(self.order) if frozenset(self.mul(self.mul(g, h), self.inv[g]) for h in self.H) == self.H]

    def lift(self, labels):
        """Phi_L: all group elements whose coset lies in ``labels``."""
        labels = set(labels)
        return frozenset(g for g in range(self.order) if self.label[g] in labels)

    def subgroup(self, gens):
        S = {self.identity}
        frontier = list(S)
        while frontier:
            x = frontier.pop()
            for g in gens:
                y = self.mul(x, g)
                if y not in S:
                    S.add(y)
                    frontier.append(y)
        return frozenset(S)


def _from_elements(kind, elements, mul, H_gens, rho, sigma, named):
    idx = {e: i for i, e in enumerate(elements)}
    table = [[idx[mul(a, b)] for b in elements] for a in elements]
    n = len(elements)
    ident = next(i for i in range(n) if all(table[i][j] == j for j in range(n)))
    H = {ident}
    frontier = [ident]
    while frontier:
        x = frontier.pop()
        for g in H_gens:
            y = table[x][idx[g]]
            if y not in H:
                H.add(y)
                frontier.append(y)
    return GaloisGroupModel(kind, elements, table, frozenset(H), idx[rho], idx[sigma], {k: idx[v] for k, v in named.items()})


def group_model(kind: str) -> GaloisGroupModel:
    """The fixed presentation of one of the four Galois groups."""
    if kind in TRANSITIVE_LABELS:
        kind = TRANSITIVE_LABELS[kind]
    if kind == "C6":
        els = list(range(6))
        return _from_elements(kind, els, lambda a, b: (a + b) % 6, [], 3, 1, {"sigma": 1, "rho": 3})
    if kind == "D6":
        els = [(i, s) for s in range(2) for i in range(6)]
        return _from_elements(kind, els, _dihedral_mul, [(0, 1)], (3, 0), (1, 0), {"sigma": (1, 0), "tau": (0, 1), "rho": (3, 0)})
    if kind in ("C23xC3", "C23xS3"):
        e = (0, 1, 2)
        cyc = (1, 2, 0)  # the 3-cycle (1 2 3) on 0-based indices
        perms = [e, cyc, (2, 0, 1)] if kind == "C23xC3" else list(itertools.permutations(range(3)))
        vecs = list(itertools.product(range(2), repeat=3))
        els = [(v, p) for p in perms for v in vecs]
        z = (0, 0, 0)
        H_gens = [((1, 0, 0), e), ((0, 1, 0), e)]
        named = {
            "sigma": (z, cyc),
            "rho": ((1, 1, 1), e),
            "n1": ((1, 0, 0), e),
            "n2": ((0, 1, 0), e),
            "n0": ((0, 0, 1), e),
        }
        if kind == "C23xS3":
            tau = (z, (1, 0, 2))  # the transposition (1 2)
            H_gens.append(tau)
            named["tau"] = tau
        return _from_elements(kind, els, _wreath_mul, H_gens, ((1, 1, 1), e), (z, cyc), named)
    raise ValueError(f"unknown group kind {kind}")


# ---------------------------------------------------------------------------
# CM types


@dataclass(frozen=True)
class CMTypeModel:
    kind: str
    cosets: tuple
    primitive: bool = True

    def to_json(self):
        return {"kind": self.kind, "cosets": sorted(self.cosets)}


def is_cm_type(G: GaloisGroupModel, labels):
    labels = set(labels)
    conj = {G.label[G.mul(G.rho, G.coset_reps[k])] for k in labels}
    return len(labels) == 3 and not (labels & conj)


def right_stabilizer(G, labels):
    PhiL = G.lift(labels)
    return frozenset(g for g in range(G.order) if frozenset(G.mul(x, g) for x in PhiL) == PhiL)


def is_primitive(G, labels):
    return right_stabilizer(G, labels) == G.H


def _right_act(G, labels, n):
    return tuple(sorted(G.label[G.mul(G.coset_reps[k], n)] for k in labels))


def _left_act(G, labels, g):
    p = G.left_perm(g)
    return tuple(sorted(p[k] for k in labels))


@dataclass
class CMTypeEnumeration:
    types: list
    equivalence: list
    galois: list

    @property
    def n_equivalence_classes(self):
        return len(set(self.equivalence))

    @property
    def n_galois_classes(self):
        return len(set(self.galois))

    def primitive_classes(self):
        return len({c for c, t in zip(self.equivalence, self.types) if t.primitive})

    def representatives(self):
        seen, out = set(), []
        for c, t in zip(self.equivalence, self.types):
            if c not in seen:
                seen.add(c)
                out.append(t)
        return out


def enumerate_cm_types(G: GaloisGroupModel) -> CMTypeEnumeration:
    types = []
    for S in itertools.combinations(range(6), 3):
        if is_cm_type(G, S):
            types.append(CMTypeModel(G.kind, tuple(S), is_primitive(G, S)))
    N = G.normalizer()
    eq, gal = [], []
    for t in types:
        eq.append(min(_right_act(G, t.cosets, n) for n in N))
        gal.append(min(_left_act(G, t.cosets, g) for g in range(G.order)))
    return CMTypeEnumeration(types, eq, gal)


def distinguished_type(G: GaloisGroupModel) -> CMTypeModel:
    """{id, s, s^-1} restricted to K for an element s of order 6."""
    if G.kind not in ("C6", "D6"):
        raise KindMismatch(f"no distinguished type for {G.kind}")
    sets = set()
    for s in range(G.order):
        if G.element_order(s) == 6:
            sets.add(tuple(sorted({G.label[G.identity], G.label[s], G.label[G.inv[s]]})))
    if len(sets) != 1:
        raise AssertionError("distinguished type depends on the chosen element")
    S = sets.pop()
    return CMTypeModel(G.kind, S, is_primitive(G, S))


# ---------------------------------------------------------------------------
# reflex


@dataclass
class ReflexData:
    Hr: frozenset
    cosets: list  # left cosets g Hr making up Phi_L^-1
    degree: int
    polynomial: list | None = None

    @property
    def size(self):
        return len(self.cosets)


def reflex(G: GaloisGroupModel, phi) -> ReflexData:
    labels = phi.cosets if isinstance(phi, CMTypeModel) else tuple(phi)
    PhiL = G.lift(labels)
    Hr = frozenset(g for g in range(G.order) if frozenset(G.mul(g, x) for x in PhiL) == PhiL)
    inv = frozenset(G.inv[x] for x in PhiL)
    cosets = []
    seen = set()
    for x in sorted(inv):
        c = frozenset(G.mul(x, h) for h in Hr)
        if c not in seen:
            seen.add(c)
            cosets.append(c)
    return ReflexData(Hr, cosets, G.order // len(Hr))


def reflex_cosets_from(G, Hr, reps):
    return {frozenset(G.mul(g, h) for h in Hr) for g in reps}


def double_norm_counts(G: GaloisGroupModel, phi) -> list:
    """Coset multiplicities of sum_{psi in Phi^r} sum_{phi in Phi} psi phi H."""
    labels = phi.cosets if isinstance(phi, CMTypeModel) else tuple(phi)
    R = reflex(G, labels)
    counts = [0] * 6
    for c in R.cosets:
        psi = min(c)
        for k in labels:
            counts[G.label[G.mul(psi, G.coset_reps[k])]] += 1
    return counts


def double_norm_brute(G, phi) -> list:
    """Same multiset from the full group-algebra product Phi_L^-1 * Phi_L."""
    labels = phi.cosets if isinstance(phi, CMTypeModel) else tuple(phi)
    R = reflex(G, labels)
    PhiL = G.lift(labels)
    c = Counter()
    for psi in set().union(*R.cosets):
        for x in PhiL:
            c[G.label[G.mul(psi, x)]] += 1
    scale = len(R.Hr) * len(G.H)
    out = []
    for k in range(6):
        if c[k] % scale:
            raise AssertionError("group algebra product is not a multiple of the coset sums")
        out.append(c[k] // scale)
    return out


@dataclass
class DoubleNormCertificate:
    counts: list
    e: int
    psi: tuple | None

    def to_json(self):
        return {"counts": self.counts, "e": self.e, "psi": list(self.psi) if self.psi else None}


def double_norm_decomposition(G: GaloisGroupModel, phi) -> DoubleNormCertificate:
    """Split the double norm as a*(all) + a*(H - rho H) + (Psi cosets)."""
    labels = phi.cosets if isinstance(phi, CMTypeModel) else tuple(phi)
    if not is_primitive(G, labels):
        raise KindMismatch("double norm certificate needs a primitive type")
    counts = double_norm_counts(G, labels)
    if G.kind in ("C6", "D6"):
        rest = [c - 1 - (k == 0) + (k == 3) for k, c in enumerate(counts)]
        psi = tuple(k for k in range(6) if rest[k])
        if sorted(rest) != [0, 0, 0, 1, 1, 1] or not is_cm_type(G, psi):
            raise AssertionError(f"unexpected double norm {counts}")
        return DoubleNormCertificate(counts, 2, psi)
    rest = [c - 2 - 2 * (k == 0) + 2 * (k == 3) for k, c in enumerate(counts)]
    if any(rest):
        raise AssertionError(f"unexpected double norm {counts}")
    return DoubleNormCertificate(counts, 4, None)


def exponent_e(kind):
    return 2 if kind in ("C6", "D6") else 4


# ---------------------------------------------------------------------------
# numeric side: identify the group of a field, numeric CM types


def _galois_pattern(K):
    x, y = sympy.symbols("x y")
    f = sympy.Poly(list(reversed(K.coeffs)), y)
    fy = f.as_expr()
    for s in range(1, 12):
        g = fy.subs(y, x + s * y)
        R = sympy.Poly(sympy.resultant(fy, sympy.expand(g), y), x)
        if sympy.degree(sympy.gcd(R, R.diff(x)), x) == 0:
            _, facs = sympy.factor_list(R)
            return sorted(sympy.degree(p, x) // 6 for p, _ in facs for _ in range(_))
    raise UnrecognizedPattern("no squarefree shift found")


def identify_galois_group(K) -> GaloisGroupModel:
    """Decide the kind from the factorisation of f over K itself."""
    if K.degree != 6 or K.n_real != 0:
        raise NotSexticCM("field is not a sextic CM field")
    pat = _galois_pattern(K)
    if pat == [1] * 6:
        return group_model("C6")
    if pat == [1, 1, 4]:
        return group_model("C23xS3")
    if pat == [1, 1, 2, 2]:
        d0 = K.real_subfield.k0.disc
        if sympy.sqrt(abs(d0)).is_integer:
            return group_model("C23xC3")
        return group_model("D6")
    raise UnrecognizedPattern(f"unexpected splitting pattern {pat}")


def numeric_cm_types(K):
    """All 8 CM types as sorted triples of embedding indices.

    Embeddings come in adjacent conjugate pairs (2k, 2k+1)."""
    out = []
    for bits in itertools.product(range(2), repeat=3):
        out.append(tuple(2 * k + b for k, b in enumerate(bits)))
    return out


def imaginary_quadratic_generator(K, precision=60):
    """sqrt(-d) in K for the imaginary quadratic subfield, or None."""
    disc = abs(K.disc)
    ds = [d for d in sympy.divisors(disc) if d > 1 and sympy.factorint(d) and max(sympy.factorint(d).values()) == 1]
    ds = [1] + ds
    for d in ds:
        with mpmath.workdps(precision):
            r = mpmath.sqrt(d)
            for bits in itertools.product((1, -1), repeat=3):
                vals = []
                for b in bits:
                    vals += [mpmath.mpc(0, b * r), mpmath.mpc(0, -b * r)]
                for den in (1, 2):
                    c = K.lift(vals, precision, den=den)
                    if c is None:
                        continue
                    from .field import FieldElement

                    x = FieldElement.from_zk(K, [mpmath_frac(ci, den) for ci in c])
                    if x * x == K(-d):
                        return x, d
    return None


def mpmath_frac(c, den):
    from fractions import Fraction

    return Fraction(int(c), den)


def numeric_primitive(K, phi, sqrt_md=None, precision=60):
    """Decide primitivity of a numeric type from the quadratic subfield."""
    if sqrt_md is None:
        sqrt_md = imaginary_quadratic_generator(K, precision)
    if sqrt_md is None:
        return True
    x = sqrt_md[0]
    emb = x.embeddings(precision)
    sg = {mpmath.sign(emb[k].imag) for k in phi}
    return len(sg) > 1


def primitive_numeric_types(K, precision=60):
    q = imaginary_quadratic_generator(K, precision)
    return [t for t in numeric_cm_types(K) if numeric_primitive(K, t, q, precision)]


def type_trace_values(K, x, types, precision):
    emb = x.embeddings(precision)
    return [mpmath.fsum(emb[k] for k in t) for t in types]


def reflex_field_numeric(K, phi, precision=100, max_tries=20):
    """Defining polynomial (low degree first) of the reflex field.

    The reflex field is generated by type traces sum_{phi} phi(x); their
    conjugates are the traces along the Galois orbit of the type, which for
    a primitive type is the set of all primitive types.  The product of
    (X - trace) over that orbit is rounded to integers and must be stable
    under doubling the precision and squarefree.
    """
    prim = primitive_numeric_types(K, 60)
    if tuple(sorted(phi)) not in prim:
        raise KindMismatch("reflex field needs a primitive type")
    gen = K.gen
    for k in range(max_tries):
        x = gen + k if k % 2 == 0 else gen * gen + k * gen
        polys = []
        for prec in (precision, 2 * precision):
            with mpmath.workdps(prec):
                vals = type_trace_values(K, x, prim, prec)
                polys.append(_integral_poly(vals, prec))
        if polys[0] is None or polys[0] != polys[1]:
            continue
        P = sympy.Poly(list(reversed(polys[0])), sympy.Symbol("x"))
        if sympy.degree(sympy.gcd(P, P.diff()), P.gen) != 0:
            continue
        return polys[0]
    raise PrecisionTooLow("reflex field polynomial did not stabilise")


def _integral_poly(vals, prec):
    """Coefficients (low degree first) of prod (X - v), or None if not integral."""
    coeffs = [mpmath.mpc(1)]
    for v in vals:
        coeffs = [mpmath.mpc(0)] + coeffs
        for i in range(len(coeffs) - 1):
            coeffs[i] -= v * coeffs[i + 1]
    out = []
    for c in coeffs:
        r = int(mpmath.nint(c.real))
        if abs(c - r) > mpmath.mpf(10) ** (-prec // 3):
            return None
        out.append(r)
    return out


def reflex_real_subfield_numeric(K, precision=100, max_tries=20):
    """Defining polynomial of the totally real subfield of the reflex field.

    |sum_phi phi(x)|^2 is fixed by complex conjugation of the reflex field,
    so the product over conjugate pairs of primitive types of
    (X - |trace|^2) has rational coefficients; a squarefree result defines
    the real subfield.
    """
    prim = primitive_numeric_types(K, 60)
    pairs = [t for t in prim if t < tuple(sorted(k ^ 1 for k in t))]
    gen = K.gen
    for k in range(max_tries):
        x = gen + k if k % 2 == 0 else gen * gen + k * gen
        polys = []
        for prec in (precision, 2 * precision):
            with mpmath.workdps(prec):
                vals = type_trace_values(K, x, pairs, prec)
                polys.append(_integral_poly([abs(v) ** 2 for v in vals], prec))
        if polys[0] is None or polys[0] != polys[1]:
            continue
        P = sympy.Poly(list(reversed(polys[0])), sympy.Symbol("x"))
        if sympy.degree(sympy.gcd(P, P.diff()), P.gen) != 0:
            continue
        return polys[0]
    raise PrecisionTooLow("real reflex polynomial did not stabilise")
