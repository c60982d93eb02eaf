"""Line-delimited JSON outcome datasets.

One record per simulated mirror circuit::

    {"circuit_id": "kind1-0003", "kind": 1, "seed": 123, "target": "010", "n": 3,
     "mode": "exact", "distribution": [p_000, p_001, ...]}
    {"circuit_id": "kind2-0000", "kind": 2, "seed": 456, "target": "110", "n": 3,
     "mode": "shots", "counts": {"110": 97, "010": 3}}
"""

import json
from dataclasses import dataclass
from typing import Dict, List, Optional

import numpy as np

from .estimator import HammingHistogram, adjusted_success_probability, effective_polarization


class DatasetError(ValueError):
    def __init__(self, message, line=None):
        super().__init__(f"line {line}: {message}" if line is not None else message)
        self.line = line


@dataclass
class DatasetRecord:
    circuit_id: str
    kind: int
    seed: int
    target: str
    mode: str
    distribution: Optional[List[float]] = None
    counts: Optional[Dict[str, int]] = None

    @property
    def n(self):
        return len(self.target)

    def validate(self):
        if self.kind not in (1, 2, 3):
            raise ValueError(f"kind must be 1, 2 or 3, got {self.kind!r}")
        if not self.target or set(self.target) - {"0", "1"}:
            raise ValueError(f"malformed target {self.target!r}")
        if self.mode == "exact":
            if self.distribution is None or len(self.distribution) != 2**self.n:
                raise ValueError("exact record needs a distribution over 2**n outcomes")
            p = np.asarray(self.distribution, dtype=float)
            if not np.all(np.isfinite(p)) or p.min() < 0 or abs(p.sum() - 1) > 1e-9:
                raise ValueError("distribution must be nonnegative and sum to 1")
        elif self.mode == "shots":
            if not self.counts:
                raise ValueError("shots record needs nonempty counts")
            for bits, k in self.counts.items():
                if len(bits) != self.n or set(bits) - {"0", "1"}:
                    raise ValueError(f"malformed outcome {bits!r}")
                if not isinstance(k, int) or k < 0:
                    raise ValueError(f"count for {bits!r} must be a nonnegative integer")
            if sum(self.counts.values()) < 1:
                raise ValueError("shots record has no shots")
        else:
            raise ValueError(f"mode must be 'exact' or 'shots', got {self.mode!r}")
        return self

    def histogram(self):
        if self.mode == "exact":
            return HammingHistogram.from_probabilities(self.distribution, self.target)
        return HammingHistogram.from_counts(self.counts, self.target)

    def gamma(self):
        hist = self.histogram()
        return effective_polarization(adjusted_success_probability(hist), hist.n)

    def to_json(self):
        data = {"circuit_id": self.circuit_id, "kind": self.kind, "seed": self.seed,
                "target": self.target, "n": self.n, "mode": self.mode}
        if self.mode == "exact":
            data["distribution"] = [float(p) for p in self.distribution]
        else:
            data["counts"] = dict(sorted(self.counts.items()))
        return json.dumps(data, separators=(",", ":"))


_REQUIRED = ("circuit_id", "kind", "seed", "target", "mode")


def record_from_dict(data):
    if not isinstance(data, dict):
        raise ValueError("record must be a JSON object")
    missing = [k for k in _REQUIRED if k not in data]
    if missing:
        raise ValueError(f"missing field(s) {', '.join(missing)}")
    if "n" in data and data["n"] != len(data["target"]):
        raise ValueError("field n does not match target width")
    record = DatasetRecord(
        str(data["circuit_id"]), data["kind"], data["seed"], data["target"], data["mode"],
        data.get("distribution"), data.get("counts"),
    )
    return record.validate()


def write_records(path, records):
    with open(path, "w", encoding="utf-8") as fh:
        for record in records:
            fh.write(record.to_json() + "\n")


def parse_records(lines):
    records = []
    for lineno, line in enumerate(lines, start=1):
        if not line.strip():
            continue
        try:
            records.append(record_from_dict(json.loads(line)))
        except json.JSONDecodeError as exc:
            raise DatasetError(f"invalid JSON ({exc.msg})", lineno) from None
        except (ValueError, TypeError) as exc:
            raise DatasetError(str(exc), lineno) from None
    return records


def read_records(path):
    with open(path, encoding="utf-8") as fh:
        return parse_records(fh)


def gammas_by_kind(records):
    """Per-circuit polarizations grouped by mirror kind; raises if a kind is missing."""
    if not records:
        raise DatasetError("dataset is empty")
    widths = {r.n for r in records}
    if len(widths) != 1:
        raise DatasetError(f"dataset mixes widths {sorted(widths)}")
    groups = {1: [], 2: [], 3: []}
    for r in records:
        groups[r.kind].append(r.gamma())
    missing = [k for k, v in groups.items() if not v]
    if missing:
        names = ", ".join(f"kind {k}" for k in missing)
        raise DatasetError(f"dataset has no records for mirror ensemble(s): {names}")
    shots = {sum(r.counts.values()) for r in records if r.mode == "shots"}
    k = shots.pop() if len(shots) == 1 and all(r.mode == "shots" for r in records) else None
    return widths.pop(), [np.array(groups[i]) for i in (1, 2, 3)], k

