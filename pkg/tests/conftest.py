import json
import time
from pathlib import Path

import pytest

from sextic_cm.field import load_field_record
from sextic_cm.pipeline import RunConfig, run_pipeline

DATA = Path(__file__).resolve().parent.parent / "data"

ZETA7 = "6.0.16807.1"
MIXED = "6.0.32993536.1"
LABELS = ["6.0.16807.1", "6.0.153664.1", "6.0.309123.1", "6.0.400967.1", "6.0.503792.1", "6.0.32993536.1"]


def load(label):
    return json.loads((DATA / f"{label}.json").read_text())


def bare(label):
    """The record without ingested blocks."""
    rec = load(label)
    return {k: rec[k] for k in ("label", "coeffs", "integral_basis", "disc")}


@pytest.fixture(scope="session")
def records():
    return {lab: load(lab) for lab in LABELS}


@pytest.fixture(scope="session")
def fields(records):
    return {lab: load_field_record(rec) for lab, rec in records.items()}


def _timed(record, cfg):
    t = time.perf_counter()
    rep = run_pipeline(record, cfg)
    return rep, time.perf_counter() - t


@pytest.fixture(scope="session")
def zeta7_run():
    """(report, seconds) for Q(zeta_7) with the class group enumerated."""
    return _timed(bare(ZETA7), RunConfig(mode="enumerate"))


@pytest.fixture(scope="session")
def mixed_run():
    """(report, seconds) for t^6 + 10t^4 + 21t^2 + 4 from ingested data."""
    return _timed(load(MIXED), RunConfig(mode="ingest"))


@pytest.fixture(scope="session")
def contexts(records):
    """prepare_field output for the six fields (ingest mode)."""
    from sextic_cm.pipeline import prepare_field

    return {lab: prepare_field(rec, RunConfig()) for lab, rec in records.items()}
