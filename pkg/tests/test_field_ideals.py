import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings, strategies as st

from sextic_cm.errors import DiscriminantMismatch, NotTotallyImaginary, ValidationError
from sextic_cm.field import FieldElement, load_field_record
from sextic_cm.ideals import Ideal, codifferent, extend_from_subfield, factor, minimize_representative, primes_above, relative_norm, valuation

from conftest import MIXED, ZETA7, bare

coords = st.lists(st.integers(-9, 9), min_size=6, max_size=6).filter(any)


@pytest.fixture(scope="module")
def K(fields):
    return fields[MIXED]


def test_discriminants(fields):
    for lab, K in fields.items():
        assert K.disc == -int(lab.split(".")[2])
        assert K.degree == 6 and K.n_real == 0


def test_real_subfield_degree(fields):
    for K in fields.values():
        sub = K.real_subfield
        assert sub.k0.degree == 3 and sub.k0.n_real == 3


def test_bad_records_are_rejected():
    rec = bare(ZETA7)
    with pytest.raises(DiscriminantMismatch):
        load_field_record(dict(rec, disc="-16808"))
    with pytest.raises(ValidationError):
        load_field_record(dict(rec, coeffs=[1, 0, 0, 1]))
    real = {"label": "x", "coeffs": [-1, 0, 0, 0, 0, 0, 1], "integral_basis": [[int(i == j) for j in range(6)] for i in range(6)], "disc": "0"}
    with pytest.raises((NotTotallyImaginary, ValidationError)):
        load_field_record(real)


@settings(max_examples=40, deadline=None)
@given(coords, coords)
def test_element_arithmetic(fields, x, y):
    K = fields[ZETA7]
    a, b = FieldElement.from_zk(K, x), FieldElement.from_zk(K, y)
    assert (a * b).norm() == a.norm() * b.norm()
    assert (a + b).trace() == a.trace() + b.trace()
    assert a * a.inverse() == K(1)
    assert K.conj(K.conj(a)) == a
    assert K.conj(a * b) == K.conj(a) * K.conj(b)


def test_conjugation_is_complex_conjugation(fields):
    K = fields[MIXED]
    x = FieldElement.from_zk(K, [1, 2, -1, 3, 0, 1])
    with mpmath.workdps(40):
        e, c = x.embeddings(40), K.conj(x).embeddings(40)
        assert all(abs(c[k] - e[k].conjugate()) < mpmath.mpf(10) ** -30 for k in range(6))


@settings(max_examples=30, deadline=None)
@given(coords, coords, coords)
def test_ideal_laws(fields, x, y, z):
    K = fields[MIXED]
    a = Ideal.from_generators(K, [x, y])
    b = Ideal.principal(K, FieldElement.from_zk(K, z))
    assert (a * b).norm == a.norm * b.norm
    assert a * b == b * a
    assert (a * a.inverse()) == Ideal.unit(K)
    assert a.conjugate().conjugate() == a
    assert a.conjugate().norm == a.norm


def test_codifferent_norm(fields):
    for K in fields.values():
        assert codifferent(K).norm == Fraction(1, abs(K.disc))


def test_two_factors_as_a4_b2(K):
    """(2) = a^4 b^2 with both primes of norm 2 in the mixed field."""
    P = primes_above(K, 2)
    assert sorted((p.e, p.f) for p in P) == [(2, 1), (4, 1)]
    fac = factor(Ideal.principal(K, K(2)))
    assert sorted(e for _, e in fac) == [2, 4]
    assert all(p.norm == 2 for p, _ in fac)


def test_prime_decomposition_degrees(fields):
    for K in fields.values():
        for p in (2, 3, 5, 7, 11, 13):
            assert sum(P.e * P.f for P in primes_above(K, p)) == 6
            for P in primes_above(K, p):
                assert valuation(Ideal.principal(K, K(p)), P) == P.e


def test_relative_norm_of_extended_ideal(K):
    sub = K.real_subfield
    P = primes_above(K, 3)[0]
    N = relative_norm(P, sub)
    assert N.norm == P.norm
    assert extend_from_subfield(N, sub) == P * P.conjugate()


def test_minimize_representative_stays_in_class(K):
    rng = random.Random(3)
    for _ in range(5):
        a = Ideal.from_generators(K, [[rng.randint(-30, 30) for _ in range(6)] for _ in range(2)])
        b, x = minimize_representative(a, return_element=True)
        assert b == a * Ideal.principal(K, x)
        assert b.is_integral()
        assert b.norm <= K.minkowski_bound


def test_json_roundtrip(K):
    a = primes_above(K, 2)[0]
    assert Ideal.from_json(K, a.to_json()) == a
