import mpmath
import pytest

from sextic_cm.classgroup import (
    enumerate_class_group,
    factor_base,
    ingest_class_group,
    narrow_class_group,
    unit_quotients,
)
from sextic_cm.errors import VerificationFailed
from sextic_cm.ideals import Ideal, primes_above
from sextic_cm.units import cm_units, is_totally_positive, real_cubic_units, units_from_block

from conftest import LABELS, MIXED, ZETA7, load

# (w, Hasse index, regulator of K0 to 10 digits), computed once and frozen
UNIT_DATA = {
    "6.0.16807.1": (14, 1, "0.5254546821"),
    "6.0.153664.1": (4, 1, "0.5254546821"),
    "6.0.309123.1": (6, 1, "2.56925968"),
    "6.0.400967.1": (2, 1, "0.5254546821"),
    "6.0.503792.1": (2, 1, "1.662336521"),
    "6.0.32993536.1": (2, 2, "12.70004568"),
}


@pytest.fixture(scope="module")
def unit_data(fields):
    out = {}
    for lab, K in fields.items():
        sub = K.real_subfield
        U = real_cubic_units(sub.k0)
        out[lab] = (K, sub, U, cm_units(K, sub, U))
    return out


@pytest.mark.parametrize("label", LABELS)
def test_unit_invariants(unit_data, label):
    K, sub, U, cu = unit_data[label]
    w, hasse, reg = UNIT_DATA[label]
    assert cu.w == w
    assert cu.hasse_index == hasse
    assert mpmath.nstr(U.regulator, len(reg.replace(".", "").lstrip("0"))) == reg
    assert cu.zeta ** w == K(1)
    for u in cu.fundamental_K():
        assert abs(u.norm()) == 1 and u.is_integral()


def test_ingested_units_match(unit_data, records):
    for lab, (K, sub, U, cu) in unit_data.items():
        V = units_from_block(sub.k0, records[lab]["units_K0"])
        assert abs(V.regulator - U.regulator) < 1e-8


def test_unit_block_rejects_non_units(unit_data, records):
    K, sub, U, cu = unit_data[ZETA7]
    block = dict(records[ZETA7]["units_K0"])
    block["fundamental"] = [["2", "0", "0"], block["fundamental"][1]]
    with pytest.raises(VerificationFailed):
        units_from_block(sub.k0, block)


def test_class_groups(unit_data, records):
    for lab, (K, sub, U, cu) in unit_data.items():
        cl = enumerate_class_group(K, cu.logs())
        expected = [2, 2] if lab == MIXED else []
        assert list(cl.invariants) == expected
        ing = ingest_class_group(K, records[lab]["class_group"], cu.logs())
        assert list(ing.invariants) == expected


def test_mixed_class_group_structure(unit_data):
    K, sub, U, cu = unit_data[MIXED]
    cl = enumerate_class_group(K, cu.logs())
    # every factor-base prime has a discrete log, and dlog respects products
    fb = factor_base(K, 20)
    for P in fb[:6]:
        for Q in fb[:6]:
            assert cl.dlog(P * Q) == cl.group.add(cl.dlog(P), cl.dlog(Q))
    # the primes above 2 generate nothing beyond Cl(K)[2]
    for P in primes_above(K, 2):
        c = cl.dlog(P)
        assert cl.group.mul(2, c) == cl.group.identity()
    assert cl.is_principal(Ideal.principal(K, K(7)))


def test_ingest_rejects_wrong_claims(unit_data, records):
    K, sub, U, cu = unit_data[MIXED]
    block = records[MIXED]["class_group"]
    with pytest.raises(VerificationFailed):
        ingest_class_group(K, {"generators": [], "orders": []}, cu.logs())
    with pytest.raises(VerificationFailed):
        ingest_class_group(K, {"generators": block["generators"][:1], "orders": [2]}, cu.logs())
    with pytest.raises(VerificationFailed):
        ingest_class_group(K, {"generators": [Ideal.unit(K).to_json()], "orders": [2]}, cu.logs())


def test_narrow_class_group_and_unit_quotients(unit_data):
    for lab, (K, sub, U, cu) in unit_data.items():
        cl0 = enumerate_class_group(sub.k0, U.logs)
        narrow = narrow_class_group(cl0, U)
        uq = unit_quotients(cu, U)
        expected = [2] if lab == MIXED else []
        assert list(narrow.group.invariants) == expected
        # |Cl+| = h0 * 8 / |signs of units|, and |W| counts unit sign classes
        assert narrow.group.order * len(uq.W) == cl0.order * 8
        assert all(is_totally_positive(sub.k0, v) for v in uq.V)
        assert len(uq.V) == 1
