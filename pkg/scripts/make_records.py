"""Write field records (polynomial, integral basis, discriminant) to data/.

The integral basis comes from sympy's Round 2 implementation, which is
independent of the validation code in sextic_cm.field.

    python3 scripts/make_records.py [outdir]
"""
import json
import sys
from fractions import Fraction
from pathlib import Path

from sympy import Poly, QQ, Symbol
from sympy.polys.numberfields.basis import round_two

FIELDS = {
    "6.0.16807.1": [1, -1, 1, -1, 1, -1, 1],
    "6.0.309123.1": [3, -12, 19, -15, 10, -3, 1],
    "6.0.400967.1": [8, -8, 10, -7, 5, -2, 1],
    "6.0.503792.1": [2, -8, 14, -13, 9, -3, 1],
    "6.0.32993536.1": [4, 0, 21, 0, 10, 0, 1],
    "6.0.153664.1": [1, 0, 6, 0, 5, 0, 1],
}


def record(label, coeffs):
    t = Symbol("t")
    T = Poly(list(reversed(coeffs)), t, domain=QQ)
    zk, dk = round_two(T)
    m = zk.QQ_matrix.to_Matrix().T
    basis = [[str(Fraction(int(x.p), int(x.q))) for x in m.row(i)] for i in range(m.rows)]
    return {"label": label, "coeffs": coeffs, "integral_basis": basis, "disc": str(int(dk))}


def main(out="data"):
    out = Path(out)
    out.mkdir(parents=True, exist_ok=True)
    for label, coeffs in FIELDS.items():
        path = out / f"{label}.json"
        doc = json.loads(path.read_text()) if path.exists() else {}
        doc.update(record(label, coeffs))
        path.write_text(json.dumps(doc, indent=1) + "\n")
        print(path, doc["disc"])


if __name__ == "__main__":
    main(*sys.argv[1:])
