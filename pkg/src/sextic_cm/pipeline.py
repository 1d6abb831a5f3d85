"""End-to-end run: field record -> classification report."""
from __future__ import annotations

import json
import logging
import time
from dataclasses import dataclass

import mpmath

from . import __version__
from .classgroup import (
    ClassGroupData,
    acquire_class_group,
    narrow_class_group,
    unit_quotients,
)
from .cmtypes import (
    TRANSITIVE_LABELS,
    enumerate_cm_types,
    exponent_e,
    identify_galois_group,
    primitive_numeric_types,
)
from .construct import all_triples, initial_pair, initial_triple
from .errors import (
    CMError,
    NumericalError,
    PrecisionExhausted,
    ValidationError,
)
from .field import load_field_record
from .periods import period_matrix
from .shimura import compute_G1_G2, representative_sets
from .theta import HYPERELLIPTIC, PLANE_QUARTIC, vanishing_even_count
from .units import check_cm_unit_block, cm_units, is_square, real_cubic_units, units_from_block

log = logging.getLogger(__name__)

SCHEMA_VERSION = "1.0"
KIND_TO_T = {v: k for k, v in TRANSITIVE_LABELS.items()}


@dataclass
class RunConfig:
    precision: int = 100
    threshold: str = "1e-50"
    mode: str = "ingest"
    reduction_cap: int = 1000
    escalation_factor: int = 4
    class_group_ceiling: int = 200
    workers: int = 1
    out: str | None = None

    def __post_init__(self):
        if self.precision < 30:
            raise ValidationError("precision must be at least 30 digits")
        with mpmath.workdps(self.precision + 20):
            try:
                t = mpmath.mpf(self.threshold)
            except (ValueError, TypeError) as exc:
                raise ValidationError(f"bad threshold {self.threshold!r}") from exc
            # the defaults (100 digits, 1e-50) sit exactly on the bound
            if not (0 < t <= mpmath.mpf(10) ** (-self.precision / 2)):
                raise ValidationError("threshold must be positive and at most 10^(-precision/2)")
        if self.mode not in ("ingest", "enumerate"):
            raise ValidationError(f"unknown class group mode {self.mode!r}")

    def report_view(self):
        return {"precision": self.precision, "threshold": self.threshold, "mode": self.mode}


@dataclass
class FieldContext:
    """Everything computed about one field before the triples."""

    record: dict
    K: object
    sub: object
    k0units: object
    cmunits: object
    cl: ClassGroupData
    cl0: ClassGroupData
    narrow: object
    unitq: object
    group: object
    e: int
    g12: object
    reps: object


def contains_Qi(K):
    """True iff x^2 + 1 has a root in K."""
    return is_square(K, K(-1)) is not None


def _stage(name, report):
    class _Ctx:
        def __enter__(self):
            self.t = time.perf_counter()
            return self

        def __exit__(self, et, ev, tb):
            if isinstance(ev, CMError) and not hasattr(ev, "stage"):
                ev.stage = name
                ev.partial = report
            log.info("stage %s: %.2fs", name, time.perf_counter() - self.t)
            return False

    return _Ctx()


def prepare_field(record, config: RunConfig, report=None) -> FieldContext:
    report = report if report is not None else {}
    with _stage("field_core", report):
        K = load_field_record(record)
        sub = K.real_subfield
    with _stage("units", report):
        if config.mode == "ingest" and "units_K0" in record:
            U = units_from_block(sub.k0, record["units_K0"])
        else:
            U = real_cubic_units(sub.k0)
        cu = cm_units(K, sub, U)
        if config.mode == "ingest" and "units" in record:
            check_cm_unit_block(cu, record["units"])
    with _stage("abgroup", report):
        cl = acquire_class_group(K, record.get("class_group"), config.mode, cu.logs(), config.class_group_ceiling)
        cl0 = acquire_class_group(sub.k0, record.get("class_group_K0"), config.mode, U.logs, config.class_group_ceiling)
        narrow = narrow_class_group(cl0, U)
        claim = record.get("narrow_class_group_K0")
        if config.mode == "ingest" and claim is not None and list(claim.get("orders", [])) != list(narrow.group.invariants):
            from .errors import VerificationFailed

            raise VerificationFailed("ingested narrow class group of K0 disagrees with the computed one")
        uq = unit_quotients(cu, U)
    with _stage("cm_types", report):
        G = identify_galois_group(K)
        e = exponent_e(G.kind)
    with _stage("shimura", report):
        g12 = compute_G1_G2(cl, cl0, narrow, sub)
        reps = representative_sets(cl, cl0, narrow, U, uq, g12, e, sub, K)
    return FieldContext(record, K, sub, U, cu, cl, cl0, narrow, uq, G, e, g12, reps)


def classify_triple(triple, config: RunConfig):
    """(reduced tau, verdict, precision used), escalating precision."""
    prec = config.precision
    last = None
    while prec <= config.escalation_factor * config.precision:
        try:
            red = period_matrix(triple, prec)
            with mpmath.workdps(prec + 20):
                thr = mpmath.mpf(config.threshold)
            v = vanishing_even_count(red.tau, prec, thr, config.threshold)
            return red, v, prec
        except NumericalError as exc:
            last = exc
            log.info("escalating precision from %d after: %s", prec, exc)
            prec *= 2
    raise PrecisionExhausted(f"no decision up to {config.escalation_factor}x precision: {last}")


def field_flag(T_H, T_N, has_i):
    if T_H and T_N:
        return "mixed"
    if T_H:
        return "hyperelliptic" if has_i else "exceptional hyperelliptic"
    return "non-hyperelliptic"


def run_pipeline(record, config: RunConfig | None = None):
    """Classification report for one field record (a JSON-ready dict)."""
    config = config or RunConfig()
    report = {
        "schema_version": SCHEMA_VERSION,
        "tool_version": __version__,
        "field": {"label": record.get("label"), "coeffs": record.get("coeffs"), "disc": record.get("disc")},
        "config": config.report_view(),
    }
    ctx = prepare_field(record, config, report)
    K = ctx.K
    enum = enumerate_cm_types(ctx.group)
    report["galois"] = {"kind": ctx.group.kind, "transitive": KIND_TO_T[ctx.group.kind]}
    with _stage("cm_types", report):
        prim = primitive_numeric_types(K)
        phi = prim[0]
    report["cm_types"] = {
        "total": len(enum.types),
        "equivalence_classes": enum.n_equivalence_classes,
        "primitive_classes": enum.primitive_classes(),
        "galois_classes": enum.n_galois_classes,
        "primitive_numeric": [list(t) for t in prim],
        "chosen": {"kind": ctx.group.kind, "cosets": list(phi)},
    }
    report["class_groups"] = {
        "mode": ctx.cl.mode,
        "Cl_K": list(ctx.cl.invariants),
        "Cl_K0": list(ctx.cl0.invariants),
        "Cl_plus_K0": list(ctx.narrow.group.invariants),
    }
    report["units"] = {
        "w": ctx.cmunits.w,
        "hasse_index": ctx.cmunits.hasse_index,
        "W": [u.to_json() for u in ctx.unitq.W],
        "V": [u.to_json() for u in ctx.unitq.V],
    }
    report["shimura"] = ctx.reps.to_json()
    with _stage("cm_construct", report):
        a0, xi0 = initial_pair(K, ctx.cl, ctx.cmunits)
        start = initial_triple(K, phi, a0, xi0, ctx.reps, ctx.sub, ctx.group.kind)
        triples = all_triples(K, start, ctx.reps, ctx.sub)
    report["triples"] = []
    T_H, T_N = [], []
    for i, tr in enumerate(triples):
        entry = {"triple": tr.to_json()}
        report["triples"].append(entry)
        with _stage("periods+theta", report):
            red, v, prec = classify_triple(tr, config)
        entry["tau"] = red.to_json(config.precision)
        entry["reduction_steps"] = len(red.certificate)
        entry["precision_used"] = prec
        entry["verdict"] = v.to_json()
        if v.verdict == HYPERELLIPTIC:
            T_H.append(i)
        elif v.verdict == PLANE_QUARTIC:
            T_N.append(i)
    has_i = contains_Qi(K)
    report["classification"] = {
        "T_H": T_H,
        "T_N": T_N,
        "contains_Qi": has_i,
        "flag": field_flag(T_H, T_N, has_i),
    }
    return report


def dumps_report(report):
    """Deterministic serialisation (sorted keys, fixed separators)."""
    return json.dumps(report, sort_keys=True, indent=1, separators=(",", ": ")) + "\n"


def load_record(path):
    try:
        with open(path) as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise ValidationError(f"cannot read field record {path}: {exc}") from exc
