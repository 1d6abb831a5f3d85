"""Invariant checks for one field, recorded as a deterministic ledger.

Each check is a name, a status ("pass" or "fail") and a short detail.  A
failure never stops the run; later checks that depend on a failed stage
are reported as "skip".
"""
from __future__ import annotations

import mpmath

from . import linalg
from .cmtypes import enumerate_cm_types, numeric_cm_types, numeric_primitive, primitive_numeric_types
from .construct import all_triples, check_pair, initial_pair, initial_triple
from .errors import CMError
from .ideals import Ideal
from .periods import (
    big_period_matrix,
    big_to_small,
    compose,
    frobenius_basis,
    is_symplectic,
    polarization_matrix,
    riemann_defect,
    siegel_reduce,
    standard_J,
)
from .pipeline import RunConfig, prepare_field
from .theta import _base_terms, _min_eigen, _radius, _sum_for_delta, characteristics
from .units import is_totally_positive, verify_units


class _Ledger:
    def __init__(self):
        self.checks = []

    def record(self, name, ok, detail=""):
        self.checks.append({"name": name, "status": "pass" if ok else "fail", "detail": detail})
        return ok

    def run(self, name, fn):
        """fn() returns (ok, detail); exceptions count as failures."""
        try:
            ok, detail = fn()
        except CMError as exc:
            ok, detail = False, f"{type(exc).__name__}: {exc}"
        return self.record(name, ok, detail)

    def skip(self, name, why):
        self.checks.append({"name": name, "status": "skip", "detail": why})


def _class_orders_ok(cl):
    for g, d in zip(cl.gens, cl.orders):
        if cl.generator(g**d, required=False) is None:
            return False, f"generator^{d} is not principal"
    return True, f"invariants {list(cl.invariants)}"


def _g2_in_g1(g12):
    if g12.k == 0:
        return True, "trivial"
    H = linalg.hnf(g12.L1 + g12.relations, g12.k)
    bad = [v for v in g12.L2 if not linalg.lattice_contains(H, v)]
    return not bad, f"|G1| = {g12.G1.order}, |G2| = {g12.G2.order}"


def _theta_parity(tau, precision):
    """Odd theta-nulls computed by the same sum vanish."""
    with mpmath.workdps(precision + 20):
        Y = mpmath.matrix([[tau[i, j].imag for j in range(3)] for i in range(3)])
        R2, _ = _radius(_min_eigen(Y), precision)
        worst = mpmath.mpf(0)
        for c in characteristics():
            if c.even:
                continue
            terms = _base_terms(tau, c.epsilon, R2, precision + 20)
            worst = max(worst, abs(_sum_for_delta(terms, c.delta)))
        tol = mpmath.mpf(10) ** (-(precision // 2))
        return worst < tol, f"max |odd theta| = {mpmath.nstr(worst, 3)}"


def verify_suite(record, config: RunConfig | None = None):
    """Run every invariant check for one field record; returns a JSON ledger."""
    config = config or RunConfig()
    L = _Ledger()
    prec = config.precision
    try:
        ctx = prepare_field(record, config)
    except CMError as exc:
        L.record("prepare_field", False, f"{type(exc).__name__}: {exc}")
        return {"label": record.get("label"), "checks": L.checks}
    K = ctx.K
    L.record("field.disc", K.disc == int(record["disc"]), f"disc {K.disc}")
    L.record("field.cm", all(K.conj(K.conj(b)) == b for b in K.basis_elements()), "conjugation is an involution")
    L.run("units.K0", lambda: (verify_units(ctx.k0units), f"regulator {mpmath.nstr(ctx.k0units.regulator, 8)}"))
    L.run("units.roots_of_unity", lambda: (ctx.cmunits.zeta ** ctx.cmunits.w == K(1), f"w = {ctx.cmunits.w}"))
    L.run("class_group.K", lambda: _class_orders_ok(ctx.cl))
    L.run("class_group.K0", lambda: _class_orders_ok(ctx.cl0))
    L.run(
        "narrow.order",
        lambda: (ctx.narrow.group.order % ctx.cl0.order == 0 and 8 % ctx.narrow.kernel_sign_order() == 0,
                 f"Cl+ invariants {list(ctx.narrow.group.invariants)}"),
    )
    enum = enumerate_cm_types(ctx.group)
    num = numeric_cm_types(K)
    L.record("cm_types.count", len(enum.types) == len(num) == 8, f"{len(num)} types")
    prim = primitive_numeric_types(K)
    L.record(
        "cm_types.primitive",
        len(prim) == sum(t.primitive for t in enum.types),
        f"{len(prim)} primitive numeric types",
    )
    L.run("cm_types.numeric_primitive", lambda: (all(numeric_primitive(K, t) for t in prim), "sign test"))
    L.run("shimura.G2_in_G1", lambda: _g2_in_g1(ctx.g12))
    L.run(
        "shimura.B_totally_positive",
        lambda: (all(is_totally_positive(ctx.sub.k0, b.beta) for b in ctx.reps.B), f"|B| = {len(ctx.reps.B)}"),
    )
    L.run(
        "shimura.pairs",
        lambda: (all(p.ideal * p.ideal.conjugate() == Ideal.principal(K, ctx.sub.to_K(p.beta)) for p in ctx.reps.B + ctx.reps.C), "b conj(b) = (beta)"),
    )
    try:
        a0, xi0 = initial_pair(K, ctx.cl, ctx.cmunits)
        start = initial_triple(K, prim[0], a0, xi0, ctx.reps, ctx.sub, ctx.group.kind)
        triples = all_triples(K, start, ctx.reps, ctx.sub)
        L.record("construct.triples", True, f"{len(triples)} triples")
    except CMError as exc:
        L.record("construct.triples", False, f"{type(exc).__name__}: {exc}")
        L.skip("periods", "no triples")
        return {"label": record.get("label"), "checks": L.checks}
    for i, tr in enumerate(triples):
        tag = f"triple[{i}]"
        if not L.run(f"{tag}.pair", lambda: (check_pair(tr.a, tr.xi), "xi totally imaginary, (xi) = (a conj(a) D)^-1")):
            continue
        try:
            E = polarization_matrix(tr.a, tr.xi)
            T = frobenius_basis(E)
        except CMError as exc:
            L.record(f"{tag}.polarization", False, f"{type(exc).__name__}: {exc}")
            continue
        L.record(f"{tag}.pfaffian", abs(linalg.det_bareiss(E)) == 1, "|det E| = 1")
        L.record(
            f"{tag}.frobenius",
            linalg.matmul(linalg.matmul(linalg.transpose(T), E), T) == standard_J(3) and abs(linalg.det_bareiss(T)) == 1,
            "T^t E T = J, T unimodular",
        )
        P = big_period_matrix(tr.a, T, tr.phi, prec)
        with mpmath.workdps(prec + 20):
            d = riemann_defect(P, prec)
            L.record(f"{tag}.riemann", d < mpmath.mpf(10) ** (-(prec // 2)), f"|P J^-1 P^t| = {mpmath.nstr(d, 3)}")
        try:
            tau, _ = big_to_small(P, prec)
            red = siegel_reduce(tau, prec, config.reduction_cap)
        except CMError as exc:
            L.record(f"{tag}.tau", False, f"{type(exc).__name__}: {exc}")
            continue
        with mpmath.workdps(prec + 20):
            t = red.tau
            asym = mpmath.mnorm(t - t.T, 1)
            L.record(f"{tag}.tau_symmetric", asym < mpmath.mpf(10) ** (-(prec // 2)), f"defect {mpmath.nstr(asym, 3)}")
        M = compose(red.certificate)
        L.record(f"{tag}.certificate", is_symplectic(M) and all(is_symplectic(N) for N in red.certificate), f"{len(red.certificate)} steps")
        L.run(f"{tag}.theta_parity", lambda: _theta_parity(red.tau, min(prec, 60)))
    return {"label": record.get("label"), "checks": L.checks}
