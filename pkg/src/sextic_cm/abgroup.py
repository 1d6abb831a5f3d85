"""Finite abelian groups presented as Z^m modulo a relation lattice."""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field

from . import linalg
from .errors import InfiniteQuotient


@dataclass
class FiniteAbelianGroup:
    """Z^m / L with L given by relation rows, put in invariant-factor form.

    ``invariants`` are the nontrivial elementary divisors d_1 | d_2 | ...;
    an element of Z^m has normal form ``dlog(x)``, a tuple with entries in
    [0, d_i).  ``gens[i]`` is a vector of Z^m mapping to the i-th standard
    generator.  ``labels`` optionally names the m ambient generators.
    """

    invariants: list
    gens: list
    _V: list
    _offset: int
    m: int
    labels: list | None = field(default=None, repr=False)

    @property
    def order(self) -> int:
        out = 1
        for d in self.invariants:
            out *= d
        return out

    @property
    def rank(self):
        return len(self.invariants)

    def dlog(self, x):
        """Normal form of the class of x in Z^m."""
        y = linalg.vecmat(list(x), self._V)
        return tuple(int(y[self._offset + i]) % d for i, d in enumerate(self.invariants))

    def lift(self, c):
        """A vector in Z^m with normal form c."""
        v = [0] * self.m
        for ci, g in zip(c, self.gens):
            if ci:
                v = [a + ci * b for a, b in zip(v, g)]
        return v

    def identity(self):
        return tuple(0 for _ in self.invariants)

    def add(self, a, b):
        return tuple((x + y) % d for x, y, d in zip(a, b, self.invariants))

    def neg(self, a):
        return tuple((-x) % d for x, d in zip(a, self.invariants))

    def mul(self, k, a):
        return tuple((k * x) % d for x, d in zip(a, self.invariants))

    def elements(self):
        return list(itertools.product(*[range(d) for d in self.invariants]))

    def element_order(self, a):
        from math import gcd

        o = 1
        for x, d in zip(a, self.invariants):
            k = d // gcd(d, x)
            o = o * k // gcd(o, k)
        return o

    def is_trivial(self):
        return not self.invariants

    def relation_lattice(self):
        """Rows of diag(invariants) in normal-form coordinates."""
        k = len(self.invariants)
        return [[d if i == j else 0 for j in range(k)] for i, d in enumerate(self.invariants)]

    def to_json(self):
        return list(self.invariants)


def smith_decompose(relations, generators=None, m=None) -> FiniteAbelianGroup:
    """Group Z^m / <relations>.  Raises InfiniteQuotient for infinite groups."""
    if m is None:
        if generators is not None:
            m = len(generators)
        elif relations:
            m = len(relations[0])
        else:
            m = 0
    rels = [list(map(int, r)) for r in relations if any(r)]
    if m == 0:
        return FiniteAbelianGroup([], [], [], 0, 0, list(generators or []))
    if not rels:
        raise InfiniteQuotient("no relations: quotient is infinite")
    d, U, V = linalg.smith(rels)
    d = list(d) + [0] * (m - len(d))
    if any(x == 0 for x in d):
        raise InfiniteQuotient("relations do not have full rank")
    Vinv = linalg.inverse_fraction(V)
    Vinv = [[int(x) for x in r] for r in Vinv]
    offset = sum(1 for x in d if x == 1)
    inv = d[offset:]
    gens = Vinv[offset:]
    return FiniteAbelianGroup(inv, gens, V, offset, m, list(generators) if generators is not None else None)


def subgroup_quotient(big, small, k):
    """(L_big / L_small) for lattices in Z^k given by rows, L_small in L_big.

    Returns (group, basis) where group generators are coordinates on the
    HNF basis of L_big, and ``basis`` are those HNF rows, so an element with
    coordinates c corresponds to the vector c * basis.
    """
    B = linalg.hnf(big, k)
    if len(B) != k:
        raise InfiniteQuotient("lattice not of full rank")
    coords = []
    for r in small:
        c = linalg.lattice_coordinates(B, r)
        if c is None:
            raise ValueError("small lattice is not contained in the big one")
        coords.append(c)
    G = smith_decompose(coords, m=k)
    return G, B


def kernel_lattice(images, target: FiniteAbelianGroup, source_rel):
    """Lattice in Z^k (k = len(images)) of vectors x with sum x_i images_i = 0
    in ``target``; ``source_rel`` rows are added (they lie in the kernel)."""
    k = len(images)
    t = target.rank
    if t == 0:
        return linalg.identity(k)
    rows = [list(im) for im in images] + target.relation_lattice()
    ker = linalg.integer_kernel(rows)
    lat = [r[:k] for r in ker] + [list(r) for r in source_rel]
    return linalg.hnf(lat, k)


def image_order(images, target: FiniteAbelianGroup):
    """Order of the subgroup of ``target`` generated by ``images``."""
    if target.rank == 0:
        return 1
    rows = [list(im) for im in images] + target.relation_lattice()
    H = linalg.hnf(rows, target.rank)
    det = 1
    for i in range(target.rank):
        det *= H[i][i]
    return target.order // det
