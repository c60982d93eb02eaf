"""Command-line interface: ``mcfe generate | run | estimate | validate``.

Exit codes: 0 success, 1 usage error, 2 data error, 3 estimate undefined,
4 validation thresholds violated (with ``--check``). ``MCFE_JOBS`` sets the
default worker count for ``validate``.
"""

import argparse
import json
import os
import sys
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .batch import CircuitBatch
from .circuit import to_alternating_form
from .circuit_io import CircuitParseError, parse, parse_circuit, serialize
from .config import ConfigError, RunConfig, load_config
from .dataset import DatasetError, DatasetRecord, gammas_by_kind, read_records, write_records
from .estimator import EstimateUndefinedError, FidelityEstimate, estimate_fidelity
from .experiment import run_mcfe_experiment, threshold_checks, write_result
from .noise import ErrorModel
from .qaoa import QaoaParams, qaoa_circuit, sample_er_graph
from .randomization import child_seed, sample_ensemble_batch
from .simulator import DENSE_LIMIT, WidthLimitError, batch_output_probabilities

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_UNDEFINED, EXIT_CHECK = 0, 1, 2, 3, 4

# child-seed tags under the master seed
STAGE_CIRCUIT, STAGE_MODEL, STAGE_ENSEMBLE, STAGE_SHOTS, STAGE_BOOTSTRAP = 1, 2, 3, 4, 5


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _default_jobs():
    raw = os.environ.get("MCFE_JOBS", "1")
    try:
        return max(1, int(raw))
    except ValueError:
        raise UsageError(f"MCFE_JOBS must be an integer, got {raw!r}") from None


def _now():
    return datetime.now(timezone.utc).isoformat(timespec="seconds")


def _load(args):
    cfg = load_config(args.config) if args.config else RunConfig()
    if getattr(args, "seed", None) is not None:
        cfg.master_seed = args.seed
        cfg.validate.master_seed = args.seed
    if getattr(args, "mode", None):
        cfg.mode = args.mode
    if getattr(args, "shots", None) is not None:
        cfg.shots = args.shots
    return cfg


def stage_seeds(master):
    return {
        "circuit": child_seed(master, STAGE_CIRCUIT),
        "error_model": child_seed(master, STAGE_MODEL),
        "ensembles": child_seed(master, STAGE_ENSEMBLE),
        "shots": child_seed(master, STAGE_SHOTS),
        "bootstrap": child_seed(master, STAGE_BOOTSTRAP),
    }


def build_target(cfg: RunConfig, seeds):
    if cfg.circuit_file:
        try:
            text = Path(cfg.circuit_file).read_text(encoding="utf-8")
        except OSError as exc:
            raise DatasetError(f"cannot read circuit file: {exc}") from None
        return parse_circuit(text)
    q = cfg.qaoa
    rng = np.random.default_rng(seeds["circuit"])
    low, high = q.weight_range
    graph = sample_er_graph(q.n, q.edge_probability, lambda r, size: r.uniform(low, high, size), rng)
    return qaoa_circuit(graph, QaoaParams.random(q.p, rng))


def cmd_generate(args):
    cfg = _load(args)
    seeds = stage_seeds(cfg.master_seed)
    c = build_target(cfg, seeds)
    if c.n > DENSE_LIMIT:
        raise WidthLimitError(f"width {c.n} exceeds simulator dense limit {DENSE_LIMIT}")
    c_alt = to_alternating_form(c)
    model = ErrorModel.sample(cfg.family, c.n, np.random.default_rng(seeds["error_model"]))
    batches = {k: sample_ensemble_batch(k, c, c_alt, cfg.circuits_per_ensemble[k - 1], seeds["ensembles"])
               for k in (1, 2, 3)}

    out = Path(args.out)
    (out / "mirrors").mkdir(parents=True, exist_ok=True)
    (out / "target.txt").write_text(serialize(c, ["target circuit"]), encoding="utf-8")
    (out / "alternating.txt").write_text(serialize(c_alt, ["alternating form of the target"]), encoding="utf-8")
    (out / "error_model.json").write_text(model.to_text(), encoding="utf-8")
    files = []
    for kind, batch in batches.items():
        for j, sample in enumerate(batch.samples()):
            name = f"mirrors/kind{kind}-{j:04d}.txt"
            (out / name).write_text(serialize(sample.circuit, [sample.metadata_line()]), encoding="utf-8")
            files.append(name)
    manifest = {
        "tool_version": __version__,
        "master_seed": cfg.master_seed,
        "config": cfg.to_dict(),
        "child_seeds": seeds,
        "n": c.n,
        "mirror_files": files,
        "created": _now(),
    }
    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n", encoding="utf-8")
    print(f"wrote {len(files)} mirror circuits to {out}")
    return EXIT_OK


def _read_manifest(out):
    path = Path(out) / "manifest.json"
    try:
        return json.loads(path.read_text(encoding="utf-8"))
    except FileNotFoundError:
        raise DatasetError(f"{path} not found; run 'mcfe generate' first") from None
    except json.JSONDecodeError as exc:
        raise DatasetError(f"{path}: invalid JSON at line {exc.lineno}") from None


def cmd_run(args):
    out = Path(args.out)
    manifest = _read_manifest(out)
    cfg = load_config(args.config) if args.config else None
    mode = args.mode or (cfg.mode if cfg else manifest["config"]["mode"])
    shots = args.shots or (cfg.shots if cfg else manifest["config"]["shots"])
    model = ErrorModel.from_text((out / "error_model.json").read_text(encoding="utf-8"))
    rng = np.random.default_rng(manifest["child_seeds"]["shots"])
    records = []
    for name in manifest["mirror_files"]:
        path = out / name
        try:
            c, meta = parse(path.read_text(encoding="utf-8"))
        except FileNotFoundError:
            raise DatasetError(f"missing circuit file {path}") from None
        except CircuitParseError as exc:
            raise DatasetError(f"{path}: {exc}") from None
        if not meta:
            raise DatasetError(f"{path}: missing mirror metadata line")
        probs = batch_output_probabilities(CircuitBatch.from_circuit(c), model)[0]
        probs = probs / probs.sum()
        record = DatasetRecord(Path(name).stem, meta["kind"], meta["seed"], meta["target"], mode)
        if mode == "exact":
            record.distribution = probs.tolist()
        else:
            draws = rng.multinomial(shots, probs)
            record.counts = {format(i, f"0{c.n}b"): int(k) for i, k in enumerate(draws) if k}
        records.append(record)
    write_records(out / "dataset.jsonl", records)
    print(f"wrote {len(records)} records to {out / 'dataset.jsonl'}")
    return EXIT_OK


def cmd_estimate(args):
    out = Path(args.out)
    dataset = Path(args.dataset) if args.dataset else out / "dataset.jsonl"
    try:
        records = read_records(dataset)
    except FileNotFoundError:
        raise DatasetError(f"dataset {dataset} not found") from None
    n, values, shots = gammas_by_kind(records)
    seed = args.seed
    resamples = 1000
    if seed is None:
        try:
            manifest = _read_manifest(dataset.parent)
            seed = manifest["child_seeds"]["bootstrap"]
            resamples = manifest["config"]["bootstrap_resamples"]
        except DatasetError:
            seed = child_seed(0, STAGE_BOOTSTRAP)
    report_path = dataset.parent / "estimate.json"
    try:
        est = estimate_fidelity(values, n, shots, resamples, np.random.default_rng(seed),
                                seeds={"bootstrap": seed})
    except EstimateUndefinedError as exc:
        g = [float(v.mean()) for v in values]
        report = {"status": "undefined", "reason": str(exc), "n": n, "gamma_hats": g,
                  "counts": [len(v) for v in values]}
        report_path.write_text(json.dumps(report, indent=2) + "\n", encoding="utf-8")
        print(json.dumps(report, indent=2))
        return EXIT_UNDEFINED
    report_path.write_text(est.to_text(), encoding="utf-8")
    _print_estimate(est)
    return EXIT_OK


def _print_estimate(est: FidelityEstimate):
    g1, g2, g3 = est.gamma_hats
    print(f"chi_F          {est.chi_f:.6f}{'  (outside [0, 1])' if est.out_of_range else ''}")
    print(f"bootstrap sd   {est.bootstrap_sd:.6f} ({est.bootstrap_resamples} resamples)")
    print(f"gamma hats     {g1:.6f} {g2:.6f} {g3:.6f}")
    print(f"S1/sqrt(S2 S3) {est.ratio:.6f}")
    print(f"circuits       {est.counts[0]} {est.counts[1]} {est.counts[2]}")


def cmd_validate(args):
    cfg = _load(args)
    exp = cfg.validate
    if args.mode == "exact":
        exp.shots = None
    elif args.mode == "shots":
        exp.shots = args.shots or cfg.shots
    jobs = args.jobs or _default_jobs()
    out = Path(args.out)
    out.mkdir(parents=True, exist_ok=True)

    def progress(row):
        flag = f" [{row['flag']}]" if row["flag"] else ""
        print(f"{row['family']:>5} n={row['n']} p={row['p']} #{row['circuit']}: "
              f"F={row['fidelity']:.5f} chi_F={row['chi_f']:.5f}{flag}", file=sys.stderr)

    result = run_mcfe_experiment(exp, jobs=jobs, progress=None if args.quiet else progress)
    write_result(result, out / "results.csv", out / "results.json")
    status = EXIT_OK
    for name, passed, detail in threshold_checks(result.rows):
        print(f"{'PASS' if passed else 'FAIL'}  {name}: {detail}")
        if args.check and not passed:
            status = EXIT_CHECK
    return status


def build_parser():
    parser = _Parser(prog="mcfe", description="Mirror-circuit fidelity estimation")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def common(p, config=True):
        if config:
            p.add_argument("--config", help="JSON config file (a run manifest also works)")
        p.add_argument("--out", default="mcfe-out", help="output directory (default: mcfe-out)")
        p.add_argument("--seed", type=int, help="override the master seed")

    p = sub.add_parser("generate", help="write the target circuit and mirror circuits")
    common(p)
    p.set_defaults(func=cmd_generate)

    p = sub.add_parser("run", help="simulate generated mirror circuits into a dataset")
    common(p)
    p.add_argument("--mode", choices=("exact", "shots"))
    p.add_argument("--shots", type=int, help="shots per circuit in shots mode")
    p.set_defaults(func=cmd_run)

    p = sub.add_parser("estimate", help="estimate the fidelity from a dataset")
    common(p, config=False)
    p.add_argument("dataset", nargs="?", help="dataset path (default: OUT/dataset.jsonl)")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("validate", help="QAOA sweep comparing true and estimated fidelity")
    common(p)
    p.add_argument("--mode", choices=("exact", "shots"))
    p.add_argument("--shots", type=int)
    p.add_argument("--jobs", type=int, help="worker processes (default: $MCFE_JOBS or 1)")
    p.add_argument("--check", action="store_true", help="exit 4 when a validation threshold fails")
    p.add_argument("--quiet", action="store_true", help="no per-row progress")
    p.set_defaults(func=cmd_validate)
    return parser


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "shots", None) is not None and args.shots < 1:
        parser.error("--shots must be >= 1")
    if getattr(args, "jobs", None) is not None and args.jobs < 1:
        parser.error("--jobs must be >= 1")
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"mcfe: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except (ConfigError, DatasetError, CircuitParseError, WidthLimitError, OSError, KeyError) as exc:
        print(f"mcfe: error: {exc}", file=sys.stderr)
        return EXIT_DATA


if __name__ == "__main__":
    sys.exit(main())
