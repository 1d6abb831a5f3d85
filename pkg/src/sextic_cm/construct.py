"""CM pairs (a, xi) and triples (Phi, a, xi): an initial triple of the chosen
type and the full list obtained from the representative sets B and V."""
from __future__ import annotations

from dataclasses import dataclass

import mpmath

from .errors import NotFound, PrecisionExhausted, Unreachable, VerificationFailed
from .field import FieldElement
from .ideals import Ideal, codifferent, minimize_representative
from .units import principal_generator


@dataclass
class CMTriple:
    """A CM type (sorted embedding indices) with a pair (a, xi)."""

    phi: tuple
    a: Ideal
    xi: FieldElement
    kind: str = ""

    def to_json(self):
        return {
            "phi": {"kind": self.kind, "cosets": list(self.phi)},
            "a": self.a.to_json(),
            "xi": self.xi.to_json(),
        }


def target_ideal(a: Ideal) -> Ideal:
    """(a conj(a) D)^-1."""
    K = a.field
    return (a * a.conjugate()).inverse() * codifferent(K)


def check_pair(a, xi):
    K = a.field
    if K.conj(xi) != -xi:
        raise VerificationFailed("xi is not totally imaginary")
    if Ideal.principal(K, xi) != target_ideal(a):
        raise VerificationFailed("(xi) != (a conj(a) D)^-1")
    return True


def cm_type_of_pair(K, xi, precision=60, max_precision=None):
    """Embedding indices where Im(xi) > 0, one from each conjugate pair."""
    max_precision = max_precision or 4 * precision
    prec = precision
    while prec <= max_precision:
        emb = xi.embeddings(prec)
        tol = mpmath.mpf(10) ** (-(prec // 2))
        if all(abs(emb[k].imag) > tol for k in range(len(emb))):
            return tuple(k for k in range(len(emb)) if emb[k].imag > 0)
        prec *= 2
    raise PrecisionExhausted("imaginary parts of xi do not separate from 0")


def _imaginary_generator(T, cmunits):
    """A totally imaginary generator of T, or None."""
    K = T.field
    g = principal_generator(T, cmunits.logs())
    if g is None:
        return None
    q = -K.conj(g) / g  # need u with u / conj(u) = q
    zeta, w = cmunits.zeta, cmunits.w
    cands = [zeta**a for a in range(w)]
    if cmunits.eta is not None:
        cands += [c * cmunits.eta for c in cands]
    for u in cands:
        if u / K.conj(u) == q:
            return g * u
    return None


def initial_pair(K, cl, cmunits):
    """(a0, xi0) with a0 = Z_K if possible, else a class representative."""
    classes = [cl.group.identity()] + [c for c in cl.group.elements() if any(c)]
    for c in classes:
        a = Ideal.unit(K) if not any(c) else cl.ideal(c)
        T = target_ideal(a)
        xi = _imaginary_generator(T, cmunits)
        if xi is not None:
            check_pair(a, xi)
            return a, xi
    raise NotFound("no ideal class admits a totally imaginary generator")


def reduce_pair(a, xi):
    """Replace (a, xi) by the equivalent (x a, xi / (x conj(x))) with x a small."""
    K = a.field
    b, x = minimize_representative(a, return_element=True)
    return b, xi / (x * K.conj(x))


def initial_triple(K, phi, a0, xi0, reps, sub, kind="", precision=60):
    """A triple of type phi from (a0, xi0), scanning C x W if needed."""
    phi = tuple(sorted(phi))
    if cm_type_of_pair(K, xi0, precision) == phi:
        return CMTriple(phi, a0, xi0, kind)
    for c in reps.C:
        gamma = sub.to_K(c.beta)
        for w in reps.W:
            xi = sub.to_K(w) * xi0 / gamma
            if cm_type_of_pair(K, xi, precision) == phi:
                a = c.ideal * a0
                check_pair(a, xi)
                return CMTriple(phi, a, xi, kind)
    raise Unreachable("no combination of C and W reaches the requested CM type")


def all_triples(K, start: CMTriple, reps, sub, precision=60, reduce=True):
    """[(b a0, v beta^-1 xi0) for b in B, v in V], each checked."""
    out = []
    for b in reps.B:
        beta = sub.to_K(b.beta)
        for v in reps.V:
            a = b.ideal * start.a
            xi = sub.to_K(v) * start.xi / beta
            if reduce:
                a, xi = reduce_pair(a, xi)
            check_pair(a, xi)
            if cm_type_of_pair(K, xi, precision) != start.phi:
                raise VerificationFailed("triple left the CM type")
            out.append(CMTriple(start.phi, a, xi, start.kind))
    return out
