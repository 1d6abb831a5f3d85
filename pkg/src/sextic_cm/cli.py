"""Command line entry point.

    sextic-cm classify --field rec.json [--precision 100] [--threshold 1e-50]
                       [--mode ingest|enumerate] [--out report.json]
    sextic-cm cmtypes --kind 6T11
    sextic-cm verify --field rec.json
    sextic-cm batch --list DIR [--out OUTDIR]

Exit codes: 0 success, 2 bad input, 3 numerical indeterminacy,
4 internal invariant failure.
"""
from __future__ import annotations

import argparse
import json
import logging
import os
import sys

from .cmtypes import TRANSITIVE_LABELS, double_norm_decomposition, enumerate_cm_types, group_model, reflex
from .errors import CMError, ValidationError
from .pipeline import RunConfig, dumps_report, load_record, run_pipeline
from .verify import verify_suite

log = logging.getLogger("sextic_cm")


def _config(args):
    return RunConfig(
        precision=args.precision,
        threshold=args.threshold,
        mode=args.mode,
        out=getattr(args, "out", None),
    )


def _write(text, path):
    if path:
        d = os.path.dirname(path)
        if d:
            os.makedirs(d, exist_ok=True)
        with open(path, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _error_doc(exc):
    return {
        "error": {
            "type": type(exc).__name__,
            "stage": getattr(exc, "stage", None),
            "message": str(exc),
            "exit_code": exc.exit_code,
        }
    }


def cmd_classify(args):
    cfg = _config(args)
    rec = load_record(args.field)
    try:
        report = run_pipeline(rec, cfg)
    except CMError as exc:
        partial = dict(getattr(exc, "partial", {}) or {})
        partial.update(_error_doc(exc))
        _write(dumps_report(partial), args.out)
        raise
    _write(dumps_report(report), args.out)
    return 0


def cmtypes_table(kind):
    if kind not in TRANSITIVE_LABELS and kind not in TRANSITIVE_LABELS.values():
        raise ValidationError(f"unknown kind {kind}; use one of {', '.join(TRANSITIVE_LABELS)}")
    G = group_model(kind)
    E = enumerate_cm_types(G)
    rows = []
    for t, eq, gal in zip(E.types, E.equivalence, E.galois):
        row = {"cosets": list(t.cosets), "primitive": t.primitive, "equivalence_class": list(eq), "galois_class": list(gal)}
        if t.primitive:
            R = reflex(G, t)
            row["reflex_degree"] = R.degree
            row["reflex_size"] = R.size
            row["double_norm"] = double_norm_decomposition(G, t).to_json()
        rows.append(row)
    return {
        "kind": G.kind,
        "order": G.order,
        "equivalence_classes": E.n_equivalence_classes,
        "primitive_classes": E.primitive_classes(),
        "galois_classes": E.n_galois_classes,
        "types": rows,
    }


def cmd_cmtypes(args):
    sys.stdout.write(json.dumps(cmtypes_table(args.kind), sort_keys=True, indent=1) + "\n")
    return 0


def cmd_verify(args):
    cfg = _config(args)
    rec = load_record(args.field)
    ledger = verify_suite(rec, cfg)
    _write(json.dumps(ledger, sort_keys=True, indent=1) + "\n", getattr(args, "out", None))
    return 0 if all(e["status"] == "pass" for e in ledger["checks"]) else 4


def cmd_batch(args):
    cfg = _config(args)
    if not os.path.isdir(args.list):
        raise ValidationError(f"{args.list} is not a directory")
    outdir = args.out or os.path.join(args.list, "reports")
    os.makedirs(outdir, exist_ok=True)
    worst = 0
    for name in sorted(os.listdir(args.list)):
        if not name.endswith(".json"):
            continue
        path = os.path.join(args.list, name)
        target = os.path.join(outdir, name[:-5] + ".report.json")
        try:
            rep = run_pipeline(load_record(path), cfg)
        except CMError as exc:
            doc = dict(getattr(exc, "partial", {}) or {})
            doc.update(_error_doc(exc))
            _write(dumps_report(doc), target)
            log.warning("%s: %s", name, exc)
            worst = max(worst, exc.exit_code)
            continue
        _write(dumps_report(rep), target)
        log.info("%s: %s", name, rep["classification"]["flag"])
    return worst


def build_parser():
    p = argparse.ArgumentParser(prog="sextic-cm", description=__doc__.split("\n")[0])
    p.add_argument("-v", "--verbose", action="store_true")
    sp = p.add_subparsers(dest="cmd", required=True)

    def common(q, out=True):
        q.add_argument("--precision", type=int, default=100)
        q.add_argument("--threshold", default="1e-50")
        q.add_argument("--mode", choices=["ingest", "enumerate"], default="ingest")
        if out:
            q.add_argument("--out", default=None)

    q = sp.add_parser("classify", help="run the full pipeline on one field record")
    q.add_argument("--field", required=True)
    common(q)
    q.set_defaults(func=cmd_classify)

    q = sp.add_parser("cmtypes", help="print the CM type table of a Galois group")
    q.add_argument("--kind", required=True, help="6T1, 6T3, 6T6 or 6T11")
    q.set_defaults(func=cmd_cmtypes)

    q = sp.add_parser("verify", help="run the invariant checks on one field record")
    q.add_argument("--field", required=True)
    common(q)
    q.set_defaults(func=cmd_verify)

    q = sp.add_parser("batch", help="classify every record in a directory")
    q.add_argument("--list", required=True)
    common(q)
    q.set_defaults(func=cmd_batch)
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s %(message)s")
    try:
        return args.func(args)
    except CMError as exc:
        sys.stderr.write(f"error [{getattr(exc, 'stage', None) or type(exc).__name__}]: {exc}\n")
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
