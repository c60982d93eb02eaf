"""QAOA benchmark sweep: true fidelity versus the mirror-circuit estimate.

Each row is one benchmark circuit with a freshly sampled error model. Seeds:
the graph and angles of circuit ``j`` at ``(n, p)`` come from
``child_seed(master, SEED_CIRCUIT, n, p, j)`` (shared by all families), and
everything family-specific (error model, ensembles, shots, bootstrap) from
``child_seed(master, SEED_ROW, family_index, n, p, j)``.
"""

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from typing import List, Optional, Tuple

import numpy as np

from . import __version__
from .estimator import EstimateUndefinedError, estimate_fidelity, gammas_from_counts, gammas_from_probabilities
from .noise import FAMILIES, ErrorModel
from .qaoa import QaoaParams, qaoa_circuit, sample_er_graph
from .randomization import child_seed, sample_ensemble_batch
from .simulator import DENSE_LIMIT, batch_output_probabilities, circuit_fidelity_oracle

SEED_CIRCUIT = 1
SEED_ROW = 2

COLUMNS = (
    "family", "n", "p", "circuit", "edges", "fidelity", "chi_f", "ratio", "bootstrap_sd",
    "gamma1", "gamma2", "gamma3", "relative_error", "circuit_seed", "row_seed", "flag",
)


@dataclass
class ExperimentConfig:
    master_seed: int = 2024
    widths: Tuple[int, ...] = (3, 4, 5)
    depths: Tuple[int, ...] = (1, 2, 5)
    circuits_per_point: int = 10
    families: Tuple[str, ...] = ("S",)
    circuits_per_ensemble: Tuple[int, int, int] = (300, 300, 300)
    shots: Optional[int] = None  # None means exact outcome distributions
    edge_probability: float = 0.5
    weight_range: Tuple[float, float] = (0.0, 1.0)
    bootstrap_resamples: int = 200

    def __post_init__(self):
        self.widths = tuple(int(w) for w in self.widths)
        self.depths = tuple(int(p) for p in self.depths)
        self.families = tuple(self.families)
        if isinstance(self.circuits_per_ensemble, int):
            self.circuits_per_ensemble = (self.circuits_per_ensemble,) * 3
        self.circuits_per_ensemble = tuple(int(v) for v in self.circuits_per_ensemble)
        self.weight_range = tuple(float(v) for v in self.weight_range)
        self.validate()

    def validate(self):
        if not self.widths or any(not 2 <= w <= DENSE_LIMIT for w in self.widths):
            raise ValueError(f"widths: every width must lie in [2, {DENSE_LIMIT}]")
        if not self.depths or any(p < 1 for p in self.depths):
            raise ValueError("depths: every QAOA depth must be >= 1")
        if self.circuits_per_point < 1:
            raise ValueError("circuits_per_point: must be >= 1")
        if len(self.circuits_per_ensemble) != 3 or min(self.circuits_per_ensemble) < 1:
            raise ValueError("circuits_per_ensemble: need three positive counts")
        if self.shots is not None and self.shots < 1:
            raise ValueError("shots: must be >= 1 (or null for exact mode)")
        unknown = [f for f in self.families if f not in FAMILIES]
        if unknown or not self.families:
            raise ValueError(f"families: unknown {unknown}; expected a subset of {list(FAMILIES)}")
        if not 0 <= self.edge_probability <= 1:
            raise ValueError("edge_probability: must lie in [0, 1]")
        if self.weight_range[0] > self.weight_range[1]:
            raise ValueError("weight_range: low must not exceed high")
        if self.bootstrap_resamples < 100:
            raise ValueError("bootstrap_resamples: must be >= 100")

    def to_dict(self):
        data = asdict(self)
        return {k: list(v) if isinstance(v, tuple) else v for k, v in data.items()}


@dataclass
class ExperimentResult:
    config: ExperimentConfig
    rows: List[dict] = field(default_factory=list)

    def to_csv(self):
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=COLUMNS, lineterminator="\n")
        writer.writeheader()
        for row in self.rows:
            writer.writerow({k: _fmt_cell(row[k]) for k in COLUMNS})
        return buf.getvalue()

    def metadata(self):
        return {
            "tool_version": __version__,
            "config": self.config.to_dict(),
            "graph_model": {
                "kind": "erdos-renyi",
                "edge_probability": self.config.edge_probability,
                "weights": f"uniform on [{self.config.weight_range[0]}, {self.config.weight_range[1]}]",
            },
            "columns": list(COLUMNS),
            "rows": len(self.rows),
            "summary": summarize(self.rows),
        }


def _fmt_cell(value):
    if isinstance(value, float):
        return repr(value)
    return value


def _graph_and_params(cfg, n, p, j):
    seed = child_seed(cfg.master_seed, SEED_CIRCUIT, n, p, j)
    rng = np.random.default_rng(seed)
    low, high = cfg.weight_range
    graph = sample_er_graph(n, cfg.edge_probability, lambda r, size: r.uniform(low, high, size), rng)
    return seed, graph, QaoaParams.random(p, rng)


def _ensemble_values(kind, c, model, count, seed, shots, shot_rng):
    batch = sample_ensemble_batch(kind, c, c, count, seed)
    probs = batch_output_probabilities(batch.circuits, model)
    if shots is None:
        return gammas_from_probabilities(probs, batch.targets)
    probs = probs / probs.sum(axis=1, keepdims=True)
    counts = np.array([shot_rng.multinomial(shots, row) for row in probs])
    return gammas_from_counts(counts, batch.targets)


def run_row(cfg: ExperimentConfig, family, n, p, j):
    """Simulate one benchmark circuit; failures are recorded in the ``flag`` column."""
    circuit_seed, graph, params = _graph_and_params(cfg, n, p, j)
    row_seed = child_seed(cfg.master_seed, SEED_ROW, FAMILIES.index(family), n, p, j)
    row = dict(family=family, n=n, p=p, circuit=j, edges=len(graph.edges), fidelity=math.nan,
               chi_f=math.nan, ratio=math.nan, bootstrap_sd=math.nan, gamma1=math.nan,
               gamma2=math.nan, gamma3=math.nan, relative_error=math.nan,
               circuit_seed=circuit_seed, row_seed=row_seed, flag="")
    try:
        c = qaoa_circuit(graph, params)
        model = ErrorModel.sample(family, n, np.random.default_rng(child_seed(row_seed, 0)))
        row["fidelity"] = circuit_fidelity_oracle(c, model)
        shot_rng = np.random.default_rng(child_seed(row_seed, 2))
        values = [
            _ensemble_values(kind, c, model, cfg.circuits_per_ensemble[kind - 1],
                             child_seed(row_seed, 1, kind), cfg.shots, shot_rng)
            for kind in (1, 2, 3)
        ]
        row["gamma1"], row["gamma2"], row["gamma3"] = (float(v.mean()) for v in values)
        est = estimate_fidelity(values, n, cfg.shots, cfg.bootstrap_resamples,
                                np.random.default_rng(child_seed(row_seed, 3)))
    except EstimateUndefinedError as exc:
        row["flag"] = f"undefined: {exc}"
        return row
    except (ValueError, FloatingPointError, np.linalg.LinAlgError) as exc:
        row["flag"] = f"error: {exc}"
        return row
    row.update(chi_f=est.chi_f, ratio=est.ratio, bootstrap_sd=est.bootstrap_sd)
    row["relative_error"] = (est.chi_f - row["fidelity"]) / row["fidelity"] if row["fidelity"] else math.nan
    if est.out_of_range:
        row["flag"] = "out-of-range"
    return row


def row_keys(cfg):
    return [(f, n, p, j) for f in cfg.families for n in cfg.widths for p in cfg.depths
            for j in range(cfg.circuits_per_point)]


def _run_row_star(args):
    return run_row(*args)


def run_mcfe_experiment(cfg: ExperimentConfig, jobs=1, progress=None):
    """Run the sweep; rows come back in grid order whatever the job count."""
    keys = row_keys(cfg)
    tasks = [(cfg, *key) for key in keys]
    rows = []
    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            for row in pool.map(_run_row_star, tasks):
                rows.append(row)
                if progress:
                    progress(row)
    else:
        for task in tasks:
            rows.append(_run_row_star(task))
            if progress:
                progress(rows[-1])
    return ExperimentResult(cfg, rows)


# ---------------------------------------------------------------------------
# Summaries and threshold checks
# ---------------------------------------------------------------------------


def _abs_rel(rows, threshold):
    errs = [abs(r["relative_error"]) for r in rows if r["fidelity"] >= threshold]
    return (max(errs) if errs else 0.0), len(errs)


def envelope_fraction(rows, floor=0.05):
    """Fraction of rows with ``F >= floor`` whose estimate lies in ``(F/2, 2F)``."""
    eligible = [r for r in rows if r["fidelity"] >= floor]
    if not eligible:
        return 1.0, 0
    inside = sum(1 for r in eligible if 0.5 * r["fidelity"] < r["chi_f"] < 2 * r["fidelity"])
    return inside / len(eligible), len(eligible)


def summarize(rows):
    out = {}
    for family in sorted({r["family"] for r in rows}):
        fam = [r for r in rows if r["family"] == family]
        max75, n75 = _abs_rel(fam, 0.75)
        max50, n50 = _abs_rel(fam, 0.5)
        frac, eligible = envelope_fraction(fam)
        out[family] = {
            "rows": len(fam),
            "flagged": sum(1 for r in fam if r["flag"]),
            "max_rel_error_F_ge_0.75": max75, "rows_F_ge_0.75": n75,
            "max_rel_error_F_ge_0.5": max50, "rows_F_ge_0.5": n50,
            "envelope_fraction_F_ge_0.05": frac, "rows_F_ge_0.05": eligible,
        }
    return out


def threshold_checks(rows):
    """``(name, passed, detail)`` for the standard validation thresholds."""
    checks = []
    summary = summarize(rows)
    if "S" in summary:
        s = summary["S"]
        checks.append(("S family: relative error <= 1% for F >= 0.75",
                       s["max_rel_error_F_ge_0.75"] <= 0.01, f"max {s['max_rel_error_F_ge_0.75']:.4%} over {s['rows_F_ge_0.75']} rows"))
        checks.append(("S family: relative error <= 5% for F >= 0.5",
                       s["max_rel_error_F_ge_0.5"] <= 0.05, f"max {s['max_rel_error_F_ge_0.5']:.4%} over {s['rows_F_ge_0.5']} rows"))
    for family, s in summary.items():
        checks.append((f"{family} family: F/2 < chi_F < 2F for >= 99% of rows with F >= 0.05",
                       s["envelope_fraction_F_ge_0.05"] >= 0.99,
                       f"{s['envelope_fraction_F_ge_0.05']:.2%} of {s['rows_F_ge_0.05']} rows"))
    return checks


def write_result(result: ExperimentResult, table_path, metadata_path):
    with open(table_path, "w", encoding="utf-8") as fh:
        fh.write(result.to_csv())
    with open(metadata_path, "w", encoding="utf-8") as fh:
        json.dump(result.metadata(), fh, indent=2)
        fh.write("\n")
