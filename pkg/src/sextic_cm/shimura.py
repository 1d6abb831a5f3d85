"""Shimura class group data: G1, G2, Q = G2/eG2, representative sets and the
action of (b, beta) pairs on CM pairs."""
from __future__ import annotations

from dataclasses import dataclass

from . import linalg
from .abgroup import FiniteAbelianGroup, kernel_lattice, subgroup_quotient
from .classgroup import ClassGroupData, NarrowClassGroup, UnitQuotients
from .errors import FieldMismatch, NoRamifiedPrime, VerificationFailed
from .ideals import Ideal, relative_norm
from .units import signs


@dataclass
class ShimuraPair:
    """(b, beta) with beta in K0 and (beta) = b * conj(b)."""

    ideal: Ideal
    beta: object  # element of K0
    totally_positive: bool

    def beta_K(self, sub):
        return sub.to_K(self.beta)

    def __mul__(self, other):
        return ShimuraPair(self.ideal * other.ideal, self.beta * other.beta, self.totally_positive and other.totally_positive)


@dataclass
class G1G2:
    k: int  # rank of Cl(K) in invariant form
    relations: list  # relation lattice of Cl(K)
    L1: list
    L2: list
    G1: FiniteAbelianGroup
    G2: FiniteAbelianGroup


def norm_images(cl: ClassGroupData, cl0: ClassGroupData, narrow: NarrowClassGroup, sub):
    """Classes of N(g_i) in Cl(K0) and in Cl+(K0) for the generators of Cl(K)."""
    k = cl.group.rank
    im0, imp = [], []
    for i in range(k):
        e = tuple(int(i == j) for j in range(k))
        n = relative_norm(cl.ideal(e), sub)
        im0.append(cl0.dlog(n))
        imp.append(narrow.dlog(n))
    return im0, imp


def compute_G1_G2(cl: ClassGroupData, cl0: ClassGroupData, narrow: NarrowClassGroup, sub) -> G1G2:
    """G1 = ker(Cl(K) -> Cl(K0)), G2 = ker(Cl(K) -> Cl+(K0)) via a -> a conj(a)."""
    k = cl.group.rank
    rel = cl.group.relation_lattice()
    if k == 0:
        triv = FiniteAbelianGroup([], [], [], 0, 0)
        return G1G2(0, [], [], [], triv, triv)
    im0, imp = norm_images(cl, cl0, narrow, sub)
    L1 = kernel_lattice(im0, cl0.group, rel)
    L2 = kernel_lattice(imp, narrow.group, rel)
    G1 = subgroup_quotient(L1, rel, k)[0]
    G2 = subgroup_quotient(L2, rel, k)[0]
    return G1G2(k, rel, L1, L2, G1, G2)


def has_ramified_prime(K, sub):
    """A finite prime ramifies in K|K0 iff |disc K| > disc(K0)^2."""
    return abs(K.disc) != sub.k0.disc**2


def shimura_size(cl: ClassGroupData, narrow: NarrowClassGroup, unitq: UnitQuotients, K=None, sub=None) -> int:
    """|C_K| = h(K)/h+(K0) * |(Z_K0^*)^+ / N(Z_K^*)|."""
    if K is not None and sub is not None and not has_ramified_prime(K, sub):
        raise NoRamifiedPrime("no finite prime ramifies in K|K0; the norm map need not be onto")
    h, hp = cl.order, narrow.order
    if h % hp:
        raise VerificationFailed(f"h+(K0) = {hp} does not divide h(K) = {h}")
    return h // hp * len(unitq.V)


def _positive_generator(cl0: ClassGroupData, units, n):
    """A totally positive generator of the K0 ideal n, or None."""
    import itertools

    K0 = cl0.field
    y = cl0.generator(n)
    target = signs(K0, y)
    gens = [K0(-1)] + list(units.fundamental)
    for ex in itertools.product(range(2), repeat=len(gens)):
        u = K0(1)
        for e, g in zip(ex, gens):
            if e:
                u = u * g
        if signs(K0, u) == target:
            return y * u
    return None


def pair_for(ideal, cl0, units, sub, positive):
    n = relative_norm(ideal, sub)
    if positive:
        beta = _positive_generator(cl0, units, n)
        if beta is None:
            raise VerificationFailed("representative has no totally positive norm generator")
    else:
        beta = cl0.generator(n)
    tp = not any(signs(cl0.field, beta))
    pair = ShimuraPair(ideal, beta, tp)
    if ideal * ideal.conjugate() != Ideal.principal(sub.K, sub.to_K(beta)):
        raise VerificationFailed("b * conj(b) != (beta)")
    return pair


@dataclass
class RepresentativeSets:
    e: int
    G1: FiniteAbelianGroup
    G2: FiniteAbelianGroup
    Q: FiniteAbelianGroup
    B: list  # ShimuraPairs, totally positive
    C: list  # ShimuraPairs for G1/G2
    W: list
    V: list
    shimura_order: int | None = None

    def to_json(self):
        return {
            "e": self.e,
            "G1": list(self.G1.invariants),
            "G2": list(self.G2.invariants),
            "Q": list(self.Q.invariants),
            "B": [p.ideal.to_json() for p in self.B],
            "C": [p.ideal.to_json() for p in self.C],
            "shimura_order": self.shimura_order,
        }


def _coset_ideals(cl, big, small, k):
    """Minimised ideals representing L_big / L_small."""
    if k == 0:
        return [Ideal.unit(cl.field)]
    G, basis = subgroup_quotient(big, small, k)
    out = []
    for c in G.elements():
        v = linalg.vecmat(list(G.lift(c)), basis) if G.rank else [0] * k
        nf = tuple(int(x) % d for x, d in zip(v, cl.group.invariants))
        out.append(cl.ideal(nf) if any(nf) else Ideal.unit(cl.field))
    return out


def quotient_bound(g: G1G2, e: int) -> FiniteAbelianGroup:
    """Q = G2 / e G2."""
    if g.k == 0:
        return FiniteAbelianGroup([], [], [], 0, 0)
    small = [[e * x for x in r] for r in g.L2] + g.relations
    return subgroup_quotient(g.L2, small, g.k)[0]


def representative_sets(cl, cl0, narrow, units, unitq, g: G1G2, e, sub, K=None) -> RepresentativeSets:
    Q = quotient_bound(g, e)
    if g.k == 0:
        B_ids = [Ideal.unit(cl.field)]
        C_ids = [Ideal.unit(cl.field)]
    else:
        small = [[e * x for x in r] for r in g.L2] + g.relations
        B_ids = _coset_ideals(cl, g.L2, small, g.k)
        C_ids = _coset_ideals(cl, g.L1, g.L2, g.k)
    B = [pair_for(b, cl0, units, sub, True) for b in B_ids]
    C = [pair_for(c, cl0, units, sub, False) for c in C_ids]
    order = shimura_size(cl, narrow, unitq, K, sub) if K is not None else None
    return RepresentativeSets(e, g.G1, g.G2, Q, B, C, unitq.W, unitq.V, order)


def act(pair: ShimuraPair, cm_pair, sub):
    """(b, beta)(a, xi) = (b^-1 a, beta xi)."""
    a, xi = cm_pair
    if pair.ideal.field is not a.field or xi.field is not a.field:
        raise FieldMismatch("pair and CM pair live over different fields")
    return a * pair.ideal.inverse(), sub.to_K(pair.beta) * xi
