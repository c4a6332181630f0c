"""Report documents and the on-disk result store."""
from __future__ import annotations

import csv
import fcntl
import json
import os
from datetime import datetime, timezone
from pathlib import Path
from typing import Iterable, Optional

from . import __version__
from .bounds import BoundsReport
from .search import DavenportResult, Status
from .sequences import Sequence

RECORD_FIELDS = (
    "group_id", "n", "p", "d", "d_status", "D", "construction_length",
    "theorem_bound", "conjecture_bound", "ow_bound", "gryn_bound", "flags",
    "nodes_expanded", "elapsed_ms", "seed", "tool_version", "generated_at",
)

_INT_OR_NULL = {"type": ["integer", "null"]}

RECORD_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": list(RECORD_FIELDS),
    "properties": {
        "group_id": {"type": "string"},
        "n": {"type": "integer", "minimum": 1},
        "p": _INT_OR_NULL,
        "d": _INT_OR_NULL,
        "d_status": {"enum": ["exact", "lower_bound_only", None]},
        "D": _INT_OR_NULL,
        "construction_length": _INT_OR_NULL,
        "theorem_bound": _INT_OR_NULL,
        "conjecture_bound": _INT_OR_NULL,
        "ow_bound": _INT_OR_NULL,
        "gryn_bound": _INT_OR_NULL,
        "flags": {"type": "object", "additionalProperties": {
            "enum": ["pass", "fail", "n/a", "VIOLATION-REPORTED"]}},
        "nodes_expanded": {"type": "integer", "minimum": 0},
        "elapsed_ms": {"type": "number", "minimum": 0},
        "seed": _INT_OR_NULL,
        "tool_version": {"type": "string"},
        "generated_at": {"type": ["string", "null"]},
    },
}

LEMMA_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["lemma", "instances_run", "not_applicable", "violations", "seed", "elapsed_ms"],
    "properties": {
        "lemma": {"type": "string"},
        "instances_run": {"type": "integer"},
        "not_applicable": {"type": "integer"},
        "violations": {"type": "array", "items": {
            "type": "object", "additionalProperties": False,
            "required": ["group_id", "instance"],
            "properties": {"group_id": {"type": "string"}, "instance": {"type": "string"}}}},
        "seed": {"type": "integer"},
        "elapsed_ms": {"type": "number"},
    },
}

REPORT_SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["results"],
    "properties": {
        "results": {"type": "array", "items": RECORD_SCHEMA},
        "lemma_reports": {"type": "array", "items": LEMMA_SCHEMA},
    },
}


def now_stamp() -> str:
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def make_record(group_id: str, n: int, p: Optional[int],
                d: Optional[DavenportResult] = None,
                D: Optional[DavenportResult] = None,
                bounds: Optional[BoundsReport] = None,
                construction_length: Optional[int] = None,
                seed: Optional[int] = None,
                generated_at: Optional[str] = None) -> dict:
    results = [r for r in (d, D) if r is not None]
    rec = {
        "group_id": group_id,
        "n": n,
        "p": p,
        "d": d.value if d is not None else None,
        "d_status": d.status.value if d is not None else None,
        "D": D.value if D is not None and D.exact else None,
        "construction_length": construction_length,
        "theorem_bound": None,
        "conjecture_bound": None,
        "ow_bound": None,
        "gryn_bound": None,
        "flags": {},
        "nodes_expanded": sum(r.nodes_expanded for r in results),
        "elapsed_ms": round(sum(r.elapsed for r in results) * 1000, 3),
        "seed": seed,
        "tool_version": __version__,
        "generated_at": generated_at,
    }
    if bounds is not None:
        rec.update(
            construction_length=bounds.construction_length,
            theorem_bound=bounds.theorem_bound,
            conjecture_bound=bounds.conjecture_bound,
            ow_bound=bounds.ow_bound,
            gryn_bound=bounds.gryn_bound,
            flags=dict(bounds.flags),
        )
    return rec


def render_report(records: Iterable[dict], lemma_reports: Optional[list[dict]] = None) -> str:
    doc = {"results": list(records)}
    if lemma_reports:
        doc["lemma_reports"] = list(lemma_reports)
    return json.dumps(doc, indent=2, sort_keys=False) + "\n"


def emit_report(path: os.PathLike | str, records: Iterable[dict],
                lemma_reports: Optional[list[dict]] = None,
                csv_path: Optional[os.PathLike | str] = None) -> dict:
    records = list(records)
    text = render_report(records, lemma_reports)
    Path(path).write_text(text)
    if csv_path is not None:
        write_csv(csv_path, records)
    return json.loads(text)


def write_csv(path, records: list[dict]) -> None:
    flag_names = sorted({k for r in records for k in r["flags"]})
    cols = [f for f in RECORD_FIELDS if f != "flags"] + [f"flag_{k}" for k in flag_names]
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(cols)
        for r in records:
            row = [r[c] if c in r else r["flags"].get(c[5:], "") for c in cols]
            w.writerow(["" if v is None else v for v in row])


class StoreLocked(RuntimeError):
    pass


class ResultStore:
    """JSON-backed cache of search results keyed by (group, kind, config digest).

    Opening takes a non-blocking exclusive lock on a sidecar file so a second
    process fails fast instead of racing on the backing file.
    """

    def __init__(self, path: os.PathLike | str):
        self.path = Path(path)
        self._lock_fh = None
        self._data: dict[str, dict] = {}

    def __enter__(self):
        self.open()
        return self

    def __exit__(self, *exc):
        self.close()

    def open(self):
        lock_path = self.path.with_name(self.path.name + ".lock")
        fh = open(lock_path, "w")
        try:
            fcntl.flock(fh, fcntl.LOCK_EX | fcntl.LOCK_NB)
        except BlockingIOError:
            fh.close()
            raise StoreLocked(f"result store {self.path} is in use by another process") from None
        self._lock_fh = fh
        if self.path.exists():
            self._data = json.loads(self.path.read_text() or "{}")

    def close(self):
        if self._lock_fh is not None:
            fcntl.flock(self._lock_fh, fcntl.LOCK_UN)
            self._lock_fh.close()
            self._lock_fh = None

    @staticmethod
    def key(group_id: str, kind: str, digest: str) -> str:
        return f"{group_id}|{kind}|{digest}"

    def get(self, group_id: str, kind: str, digest: str, n: int) -> Optional[DavenportResult]:
        rec = self._data.get(self.key(group_id, kind, digest))
        if rec is None:
            return None
        return DavenportResult(
            value=rec["value"],
            witness=Sequence.from_terms(n, rec["witness"]),
            status=Status(rec["status"]),
            nodes_expanded=rec["nodes_expanded"],
            elapsed=rec["elapsed"],
            kind=kind,
        )

    def put(self, group_id: str, digest: str, result: DavenportResult) -> None:
        self._data[self.key(group_id, result.kind, digest)] = {
            "value": result.value,
            "witness": result.witness.terms(),
            "status": result.status.value,
            "nodes_expanded": result.nodes_expanded,
            "elapsed": result.elapsed,
        }
        self.path.write_text(json.dumps(self._data, indent=1, sort_keys=True) + "\n")

    def __len__(self):
        return len(self._data)
