"""Run the classification over the bundled field records and summarise.

    python3 scripts/run_experiments.py [--data data] [--out results]
                                       [--precision 100] [--threshold 1e-50]
                                       [--mode ingest|enumerate] [--verify]

Writes one report per field plus summary.json and summary.md to --out.
"""
import argparse
import json
import time
from dataclasses import asdict, dataclass
from pathlib import Path

from sextic_cm.errors import CMError
from sextic_cm.pipeline import RunConfig, dumps_report, run_pipeline
from sextic_cm.verify import verify_suite


@dataclass
class ExperimentConfig:
    data: str = "data"
    out: str = "results"
    precision: int = 100
    threshold: str = "1e-50"
    mode: str = "ingest"
    verify: bool = False


def run_one(path, cfg: ExperimentConfig, rc: RunConfig, out: Path):
    rec = json.loads(path.read_text())
    row = {"label": rec["label"]}
    t = time.perf_counter()
    try:
        rep = run_pipeline(rec, rc)
    except CMError as exc:
        row.update(status="error", error=f"{type(exc).__name__}: {exc}", seconds=round(time.perf_counter() - t, 1))
        return row
    row["seconds"] = round(time.perf_counter() - t, 1)
    (out / f"{rec['label']}.report.json").write_text(dumps_report(rep))
    row.update(
        status="ok",
        galois=rep["galois"]["kind"],
        Cl_K=rep["class_groups"]["Cl_K"],
        Cl_plus_K0=rep["class_groups"]["Cl_plus_K0"],
        shimura_order=rep["shimura"]["shimura_order"],
        Q=rep["shimura"]["Q"],
        triples=len(rep["triples"]),
        counts=[tr["verdict"]["count"] for tr in rep["triples"]],
        flag=rep["classification"]["flag"],
    )
    if cfg.verify:
        led = verify_suite(rec, rc)
        bad = [c["name"] for c in led["checks"] if c["status"] != "pass"]
        row["checks"] = f"{len(led['checks']) - len(bad)}/{len(led['checks'])}"
        (out / f"{rec['label']}.verify.json").write_text(json.dumps(led, indent=1, sort_keys=True) + "\n")
    return row


def markdown(rows):
    cols = ["label", "galois", "Cl_K", "Cl_plus_K0", "shimura_order", "Q", "triples", "counts", "flag", "seconds"]
    if any("checks" in r for r in rows):
        cols.append("checks")
    lines = ["| " + " | ".join(cols) + " |", "|" + "---|" * len(cols)]
    for r in rows:
        lines.append("| " + " | ".join(str(r.get(c, r.get("error", ""))) for c in cols) + " |")
    return "\n".join(lines) + "\n"


def main():
    ap = argparse.ArgumentParser(description=__doc__.split("\n")[0])
    d = ExperimentConfig()
    ap.add_argument("--data", default=d.data)
    ap.add_argument("--out", default=d.out)
    ap.add_argument("--precision", type=int, default=d.precision)
    ap.add_argument("--threshold", default=d.threshold)
    ap.add_argument("--mode", default=d.mode, choices=["ingest", "enumerate"])
    ap.add_argument("--verify", action="store_true")
    cfg = ExperimentConfig(**vars(ap.parse_args()))
    rc = RunConfig(precision=cfg.precision, threshold=cfg.threshold, mode=cfg.mode)
    out = Path(cfg.out)
    out.mkdir(parents=True, exist_ok=True)
    rows = []
    for path in sorted(Path(cfg.data).glob("*.json")):
        row = run_one(path, cfg, rc, out)
        print(json.dumps(row))
        rows.append(row)
    (out / "summary.json").write_text(json.dumps({"config": asdict(cfg), "rows": rows}, indent=1) + "\n")
    (out / "summary.md").write_text(markdown(rows))
    print(markdown(rows))


if __name__ == "__main__":
    main()
