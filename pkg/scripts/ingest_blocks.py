"""Attach class group and unit blocks to the field records in data/.

Runs the enumerate-mode computations once and stores the results as ingest
blocks, so later runs (mode "ingest") only have to verify them.

    python3 scripts/ingest_blocks.py [datadir] [--only LABEL]
"""
import argparse
import json
import time
from pathlib import Path

from sextic_cm.classgroup import enumerate_class_group, narrow_class_group
from sextic_cm.field import load_field_record
from sextic_cm.units import cm_units, real_cubic_units


def blocks(record):
    K = load_field_record(record)
    sub = K.real_subfield
    U = real_cubic_units(sub.k0)
    cu = cm_units(K, sub, U)
    cl = enumerate_class_group(K, cu.logs())
    cl0 = enumerate_class_group(sub.k0, U.logs)
    narrow = narrow_class_group(cl0, U)
    return {
        "class_group": cl.to_json(),
        "units": {"fundamental": [u.to_json() for u in cu.fundamental_K()], "torsion": cu.zeta.to_json()},
        "class_group_K0": cl0.to_json(),
        "units_K0": U.to_json(),
        "narrow_class_group_K0": {"orders": list(narrow.group.invariants)},
    }


def main():
    ap = argparse.ArgumentParser()
    ap.add_argument("datadir", nargs="?", default="data")
    ap.add_argument("--only", default=None)
    args = ap.parse_args()
    for path in sorted(Path(args.datadir).glob("*.json")):
        rec = json.loads(path.read_text())
        if args.only and rec.get("label") != args.only:
            continue
        t = time.perf_counter()
        rec.update(blocks(rec))
        path.write_text(json.dumps(rec, indent=1) + "\n")
        print(f"{rec['label']}: Cl(K) {rec['class_group']['orders']}, "
              f"Cl+(K0) {rec['narrow_class_group_K0']['orders']} ({time.perf_counter() - t:.1f}s)")


if __name__ == "__main__":
    main()
