import random

import pytest

from sextic_cm.construct import (
    CMTriple,
    all_triples,
    check_pair,
    cm_type_of_pair,
    initial_pair,
    initial_triple,
    target_ideal,
)
from sextic_cm.cmtypes import primitive_numeric_types
from sextic_cm.errors import FieldMismatch, NoRamifiedPrime, VerificationFailed
from sextic_cm.field import FieldElement
from sextic_cm.ideals import Ideal
from sextic_cm.shimura import ShimuraPair, act, has_ramified_prime, shimura_size
from sextic_cm.units import is_totally_positive

from conftest import LABELS, MIXED, ZETA7

# |C_K| and the triple counts, computed once and frozen
SHIMURA_ORDER = {lab: 1 for lab in LABELS} | {MIXED: 2}


@pytest.mark.parametrize("label", LABELS)
def test_representative_sets(contexts, label):
    ctx = contexts[label]
    reps = ctx.reps
    assert reps.shimura_order == SHIMURA_ORDER[label]
    assert reps.e == (2 if ctx.group.kind in ("C6", "D6") else 4)
    assert len(reps.B) == reps.Q.order
    assert len(reps.C) == reps.G1.order // reps.G2.order
    for p in reps.B:
        assert p.totally_positive and is_totally_positive(ctx.sub.k0, p.beta)
    for p in reps.B + reps.C:
        assert p.ideal * p.ideal.conjugate() == Ideal.principal(ctx.K, ctx.sub.to_K(p.beta))


def test_mixed_quotient_is_z2(contexts):
    reps = contexts[MIXED].reps
    assert list(reps.G1.invariants) == [2, 2]
    assert list(reps.G2.invariants) == [2]
    assert list(reps.Q.invariants) == [2]


def test_every_field_has_a_ramified_prime(contexts):
    for ctx in contexts.values():
        assert has_ramified_prime(ctx.K, ctx.sub)


def test_shimura_size_needs_a_ramified_prime(contexts, monkeypatch):
    ctx = contexts[ZETA7]
    import sextic_cm.shimura as sh

    monkeypatch.setattr(sh, "has_ramified_prime", lambda K, sub: False)
    with pytest.raises(NoRamifiedPrime):
        shimura_size(ctx.cl, ctx.narrow, ctx.unitq, ctx.K, ctx.sub)


def _random_pair(ctx, rng):
    """(x) with beta = x conj(x), times a random element of B."""
    K, sub = ctx.K, ctx.sub
    x = FieldElement.from_zk(K, [rng.randint(-3, 3) for _ in range(6)])
    while not x:
        x = FieldElement.from_zk(K, [rng.randint(-3, 3) for _ in range(6)])
    p = ShimuraPair(Ideal.principal(K, x), sub.from_K(x * K.conj(x)), True)
    return p * rng.choice(ctx.reps.B)


def test_act_is_a_group_action(contexts):
    ctx = contexts[MIXED]
    K, sub = ctx.K, ctx.sub
    a0, xi0 = initial_pair(K, ctx.cl, ctx.cmunits)
    rng = random.Random(11)
    one = ShimuraPair(Ideal.unit(K), sub.k0(1), True)
    assert act(one, (a0, xi0), sub) == (a0, xi0)
    for _ in range(10):
        p, q = _random_pair(ctx, rng), _random_pair(ctx, rng)
        lhs = act(p, act(q, (a0, xi0), sub), sub)
        rhs = act(p * q, (a0, xi0), sub)
        assert lhs[0] == rhs[0] and lhs[1] == rhs[1]
        check_pair(*lhs)


def test_act_rejects_foreign_pairs(contexts):
    a = contexts[ZETA7]
    b = contexts[MIXED]
    p = ShimuraPair(Ideal.unit(b.K), b.sub.k0(1), True)
    a0, xi0 = initial_pair(a.K, a.cl, a.cmunits)
    with pytest.raises(FieldMismatch):
        act(p, (a0, xi0), b.sub)


@pytest.mark.parametrize("label", LABELS)
def test_triples(contexts, label):
    ctx = contexts[label]
    K = ctx.K
    phi = primitive_numeric_types(K)[0]
    a0, xi0 = initial_pair(K, ctx.cl, ctx.cmunits)
    check_pair(a0, xi0)
    start = initial_triple(K, phi, a0, xi0, ctx.reps, ctx.sub, ctx.group.kind)
    assert start.phi == tuple(sorted(phi))
    assert cm_type_of_pair(K, start.xi) == start.phi
    triples = all_triples(K, start, ctx.reps, ctx.sub)
    assert len(triples) == len(ctx.reps.B) * len(ctx.reps.V)
    for t in triples:
        assert isinstance(t, CMTriple)
        assert K.conj(t.xi) == -t.xi
        assert Ideal.principal(K, t.xi) == target_ideal(t.a)


def test_check_pair_rejects_bad_xi(contexts):
    ctx = contexts[ZETA7]
    a0, xi0 = initial_pair(ctx.K, ctx.cl, ctx.cmunits)
    with pytest.raises(VerificationFailed):
        check_pair(a0, xi0 + ctx.K(1))
    with pytest.raises(VerificationFailed):
        check_pair(a0, xi0 * 2)
