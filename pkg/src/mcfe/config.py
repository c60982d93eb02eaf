"""JSON run configuration with strict key checking.

Example::

    {
      "master_seed": 7,
      "circuit": {"qaoa": {"n": 3, "p": 1, "edge_probability": 0.5, "weight_range": [0, 1]}},
      "circuits_per_ensemble": 50,
      "family": "S",
      "mode": "exact",
      "shots": 100,
      "bootstrap_resamples": 1000,
      "validate": {"widths": [3, 4, 5], "depths": [1, 2, 5], "circuits_per_point": 10,
                   "families": ["S"], "circuits_per_ensemble": 300}
    }

``circuit`` may instead be ``{"file": "path/to/circuit.txt"}``. Every key is
optional; unknown keys are rejected with the offending path in the message.
"""

import json
from dataclasses import dataclass, field
from typing import Optional, Tuple

from .experiment import ExperimentConfig
from .noise import FAMILIES
from .simulator import DENSE_LIMIT


class ConfigError(ValueError):
    pass


@dataclass
class QaoaSource:
    n: int = 3
    p: int = 1
    edge_probability: float = 0.5
    weight_range: Tuple[float, float] = (0.0, 1.0)


@dataclass
class RunConfig:
    master_seed: int = 0
    qaoa: Optional[QaoaSource] = field(default_factory=QaoaSource)
    circuit_file: Optional[str] = None
    circuits_per_ensemble: Tuple[int, int, int] = (50, 50, 50)
    family: str = "S"
    mode: str = "exact"
    shots: int = 100
    bootstrap_resamples: int = 1000
    validate: ExperimentConfig = field(default_factory=ExperimentConfig)

    def to_dict(self):
        circuit = {"file": self.circuit_file} if self.circuit_file else {"qaoa": {
            "n": self.qaoa.n, "p": self.qaoa.p, "edge_probability": self.qaoa.edge_probability,
            "weight_range": list(self.qaoa.weight_range)}}
        v = self.validate.to_dict()
        v.pop("master_seed")
        return {
            "master_seed": self.master_seed,
            "circuit": circuit,
            "circuits_per_ensemble": list(self.circuits_per_ensemble),
            "family": self.family,
            "mode": self.mode,
            "shots": self.shots,
            "bootstrap_resamples": self.bootstrap_resamples,
            "validate": v,
        }


_TOP = {"master_seed", "circuit", "circuits_per_ensemble", "family", "mode", "shots",
        "bootstrap_resamples", "validate"}
_QAOA = {"n", "p", "edge_probability", "weight_range"}
_VALIDATE = {"widths", "depths", "circuits_per_point", "families", "circuits_per_ensemble", "shots",
             "edge_probability", "weight_range", "bootstrap_resamples"}


def _reject_unknown(data, allowed, where):
    if not isinstance(data, dict):
        raise ConfigError(f"{where}: expected an object")
    unknown = sorted(set(data) - allowed)
    if unknown:
        raise ConfigError(f"{where}: unknown key(s) {', '.join(unknown)}")


def _int(value, where, low=None, high=None):
    if isinstance(value, bool) or not isinstance(value, int):
        raise ConfigError(f"{where}: expected an integer, got {value!r}")
    if (low is not None and value < low) or (high is not None and value > high):
        bounds = f"[{low}, {high}]" if high is not None else f">= {low}"
        raise ConfigError(f"{where}: {value} out of range {bounds}")
    return value


def _counts(value, where):
    if isinstance(value, list):
        if len(value) != 3:
            raise ConfigError(f"{where}: need one count per mirror kind (3 values)")
        return tuple(_int(v, f"{where}[{i}]", 1) for i, v in enumerate(value))
    v = _int(value, where, 1)
    return (v, v, v)


def _range(value, where):
    if not (isinstance(value, list) and len(value) == 2 and all(isinstance(v, (int, float)) for v in value)):
        raise ConfigError(f"{where}: expected [low, high]")
    if value[0] > value[1]:
        raise ConfigError(f"{where}: low exceeds high")
    return (float(value[0]), float(value[1]))


def _family(value, where):
    if value not in FAMILIES:
        raise ConfigError(f"{where}: unknown family {value!r}; expected one of {list(FAMILIES)}")
    return value


def config_from_dict(data):
    _reject_unknown(data, _TOP, "config")
    cfg = RunConfig()
    if "master_seed" in data:
        cfg.master_seed = _int(data["master_seed"], "master_seed", 0, 2**63 - 1)
    if "circuit" in data:
        circuit = data["circuit"]
        _reject_unknown(circuit, {"qaoa", "file"}, "circuit")
        if len(circuit) != 1:
            raise ConfigError("circuit: give exactly one of 'qaoa' or 'file'")
        if "file" in circuit:
            if not isinstance(circuit["file"], str):
                raise ConfigError("circuit.file: expected a path string")
            cfg.circuit_file, cfg.qaoa = circuit["file"], None
        else:
            q = circuit["qaoa"]
            _reject_unknown(q, _QAOA, "circuit.qaoa")
            src = QaoaSource()
            if "n" in q:
                src.n = _int(q["n"], "circuit.qaoa.n", 2, DENSE_LIMIT)
            if "p" in q:
                src.p = _int(q["p"], "circuit.qaoa.p", 1)
            if "edge_probability" in q:
                ep = q["edge_probability"]
                if not isinstance(ep, (int, float)) or not 0 <= ep <= 1:
                    raise ConfigError("circuit.qaoa.edge_probability: expected a number in [0, 1]")
                src.edge_probability = float(ep)
            if "weight_range" in q:
                src.weight_range = _range(q["weight_range"], "circuit.qaoa.weight_range")
            cfg.qaoa = src
    if "circuits_per_ensemble" in data:
        cfg.circuits_per_ensemble = _counts(data["circuits_per_ensemble"], "circuits_per_ensemble")
    if "family" in data:
        cfg.family = _family(data["family"], "family")
    if "mode" in data:
        if data["mode"] not in ("exact", "shots"):
            raise ConfigError(f"mode: expected 'exact' or 'shots', got {data['mode']!r}")
        cfg.mode = data["mode"]
    if "shots" in data:
        cfg.shots = _int(data["shots"], "shots", 1)
    if "bootstrap_resamples" in data:
        cfg.bootstrap_resamples = _int(data["bootstrap_resamples"], "bootstrap_resamples", 100)
    v = data.get("validate", {})
    _reject_unknown(v, _VALIDATE, "validate")
    kwargs = {"master_seed": cfg.master_seed}
    for key in ("widths", "depths", "families"):
        if key in v:
            if not isinstance(v[key], list) or not v[key]:
                raise ConfigError(f"validate.{key}: expected a non-empty list")
            kwargs[key] = tuple(v[key])
    if "widths" in kwargs:
        kwargs["widths"] = tuple(_int(w, "validate.widths", 2, DENSE_LIMIT) for w in kwargs["widths"])
    if "depths" in kwargs:
        kwargs["depths"] = tuple(_int(p, "validate.depths", 1) for p in kwargs["depths"])
    if "families" in kwargs:
        kwargs["families"] = tuple(_family(f, "validate.families") for f in kwargs["families"])
    if "circuits_per_point" in v:
        kwargs["circuits_per_point"] = _int(v["circuits_per_point"], "validate.circuits_per_point", 1)
    if "circuits_per_ensemble" in v:
        kwargs["circuits_per_ensemble"] = _counts(v["circuits_per_ensemble"], "validate.circuits_per_ensemble")
    if "shots" in v:
        kwargs["shots"] = None if v["shots"] is None else _int(v["shots"], "validate.shots", 1)
    if "edge_probability" in v:
        kwargs["edge_probability"] = float(v["edge_probability"])
    if "weight_range" in v:
        kwargs["weight_range"] = _range(v["weight_range"], "validate.weight_range")
    if "bootstrap_resamples" in v:
        kwargs["bootstrap_resamples"] = _int(v["bootstrap_resamples"], "validate.bootstrap_resamples", 100)
    try:
        cfg.validate = ExperimentConfig(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"validate.{exc}") from None
    return cfg


def load_config(path):
    """Load a config file; a run manifest is accepted too (its config echo is used)."""
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON at line {exc.lineno}: {exc.msg}") from None
    if isinstance(data, dict) and "tool_version" in data and "config" in data:
        data = data["config"]
    return config_from_dict(data)
