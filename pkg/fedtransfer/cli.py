"""
fedtransfer command-line interface.
Usage examples:
  fedtransfer-cli partition --config configs/scenario.json --out out/partition
  fedtransfer-cli run --config configs/scenario.json --out out/run --seeds 0,1,2 --workers 3
  fedtransfer-cli sweep --config configs/sweep_num_malicious.json --out out/sweep
  fedtransfer-cli verify-theory --out out/theory --override bias_variance_trials=500
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import asdict
from pathlib import Path
from typing import List, Optional

import numpy as np

from .attack.batch import craft_batch, save_adv_batch
from .data.io import save_partition
from .data.partition import distinct_classes_per_client, label_tv_distance
from .errors import FedTransferError
from .federated.centralized import train_centralized
from .harness.reports import envelope, write_metadata, write_report, write_sweep_csv
from .harness.runner import params_ref, run_scenario, train_target
from .harness.scenario import Scenario, apply_overrides, load_config, load_scenario, load_sweep
from .harness.sweep import run_sweep
from .harness.theory_check import TheoryCheckConfig, verify_theory
from .logging_utils import LOG_LEVELS, configure_logging
from .metrics.transfer import build_transfer_report
from .model.params import load_params


def _parse_seeds(arg: str) -> List[int]:
    # Accept "0,1,2" or an inclusive range "0-4"
    try:
        if "-" in arg and "," not in arg:
            lo, hi = arg.split("-", 1)
            return list(range(int(lo), int(hi) + 1))
        return [int(s) for s in arg.split(",") if s.strip()]
    except ValueError as e:
        raise argparse.ArgumentTypeError(f"Invalid seed list '{arg}': {e}")


def _first_seed(args, scenario: Scenario) -> int:
    return args.seeds[0] if args.seeds else scenario.seeds[0]


def _finish(args, report) -> int:
    out = Path(args.out)
    path = write_report(out, report)
    write_metadata(out, args.argv)
    print(f"Wrote {path}")
    return 0


def cmd_partition(args):
    scenario = load_scenario(args.config, args.override)
    seed = _first_seed(args, scenario)
    train, _ = scenario.dataset.build(seed)
    partition = scenario.heterogeneity.partition(train, scenario.num_clients, seed)
    out = Path(args.out)
    save_partition(partition, out / "partition.json")
    write_metadata(out, args.argv)
    sizes = partition.sizes
    classes = distinct_classes_per_client(train.labels, partition)
    print(f"Clients: {partition.num_clients}  samples: {partition.n_total}")
    print(f"Client sizes: min={int(sizes.min())} max={int(sizes.max())}")
    print(f"Distinct classes per client: mean={float(np.mean(classes)):.2f}")
    print(f"Label TV distance: {label_tv_distance(train.labels, partition, train.num_classes):.4f}")
    return 0


def cmd_train(args):
    scenario = load_scenario(args.config, args.override)
    seed = _first_seed(args, scenario)
    train, eval_set = scenario.dataset.build(seed)
    out = Path(args.out)
    if args.mode == "federated":
        partition = scenario.heterogeneity.partition(train, scenario.num_clients, seed)
        params, history = train_target(scenario, train, eval_set, partition, seed)
    else:
        cfg = scenario.surrogate
        params, history = train_centralized(
            scenario.model,
            train,
            np.arange(train.n),
            cfg.epochs,
            lr=cfg.lr,
            batch_size=cfg.batch_size,
            momentum=cfg.momentum,
            weight_decay=cfg.weight_decay,
            early_stop_acc=cfg.early_stop_acc,
            eval_set=eval_set,
            seed=seed,
        )
    history.save_csv(out / "history.csv")
    report = envelope(
        "train",
        mode=args.mode,
        seed=seed,
        params=params_ref(params, out, "model"),
        history=history.to_dict(),
        accuracy=history.last_accuracy,
    )
    return _finish(args, report)


def cmd_attack(args):
    scenario = load_scenario(args.config, args.override)
    seed = _first_seed(args, scenario)
    _, eval_set = scenario.dataset.build(seed)
    target = load_params(args.target)
    source = load_params(args.source)
    source_spec = scenario.surrogate.model or scenario.model
    indices = np.arange(eval_set.n)
    transfer_batch = craft_batch(source_spec, source, eval_set, indices, scenario.attack)
    whitebox_batch = craft_batch(scenario.model, target, eval_set, indices, scenario.attack)
    transfer = build_transfer_report(
        source_spec, source, scenario.model, target, eval_set, transfer_batch, whitebox_batch
    )
    out = Path(args.out)
    save_adv_batch(transfer_batch, out / "adv_batch")
    report = envelope(
        "attack",
        seed=seed,
        transfer=transfer.to_dict(),
        attack={"config": scenario.attack.to_dict(), "stats": asdict(transfer_batch.stats())},
    )
    return _finish(args, report)


def cmd_run(args):
    scenario = load_scenario(args.config, args.override)
    out = Path(args.out)
    report = run_scenario(scenario, seeds=args.seeds, out_dir=out, workers=args.workers)
    summary = report["summary"]
    print(f"Seeds completed: {summary['completed']}  failed: {summary['failed']}")
    print(f"Mean T.Rate: {summary['mean_t_rate']}  mean T.Acc: {summary['mean_t_acc']}")
    return _finish(args, report)


def cmd_sweep(args):
    sweep = load_sweep(args.config, args.override)
    out = Path(args.out)
    report = run_sweep(sweep, seeds=args.seeds, out_dir=out, workers=args.workers)
    write_sweep_csv(out / "sweep.csv", report["cells"])
    corr = report["correlation"]
    if corr["status"] == "ok":
        print(f"Spearman rho={corr['spearman']['rho']:.4f} p={corr['spearman']['p_value']:.4g} (n={corr['n']})")
    else:
        print(f"Correlation: {corr['status']} (n={corr['n']})")
    return _finish(args, report)


def cmd_verify_theory(args):
    raw = load_config(args.config, args.override) if args.config else apply_overrides({}, args.override)
    config = TheoryCheckConfig.from_dict(raw)
    if args.seeds:
        config.seed = args.seeds[0]
    report = verify_theory(config)
    for name, section in report["sections"].items():
        print(f"{name}: {section['status']}")
    _finish(args, report)
    return 0 if report["passed"] else 1


def build_parser():
    p = argparse.ArgumentParser(prog="fedtransfer-cli", description="fedtransfer CLI")
    sub = p.add_subparsers(dest="cmd", required=True)

    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--out", required=True, help="Output directory")
    common.add_argument(
        "--seeds", type=_parse_seeds, default=None, help="Seed list '0,1,2' or range '0-4'"
    )
    common.add_argument(
        "--override",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="Edit a config entry, e.g. fed.rounds=20 (repeatable)",
    )
    common.add_argument(
        "--log-level", type=str.upper, choices=LOG_LEVELS, default="INFO", help="Logging level"
    )

    config_parent = argparse.ArgumentParser(add_help=False)
    config_parent.add_argument("--config", required=True, help="Scenario or sweep JSON file")

    workers_parent = argparse.ArgumentParser(add_help=False)
    workers_parent.add_argument("--workers", type=int, default=1, help="Parallel seeds/cells")

    sub_partition = sub.add_parser(
        "partition", parents=[common, config_parent], help="Emit the scenario's Partition JSON"
    )
    sub_partition.set_defaults(func=cmd_partition)

    sub_train = sub.add_parser("train", parents=[common, config_parent], help="Train one model")
    sub_train.add_argument("--mode", choices=["federated", "centralized"], default="federated")
    sub_train.set_defaults(func=cmd_train)

    sub_attack = sub.add_parser(
        "attack", parents=[common, config_parent], help="Craft on a source model and score a target"
    )
    sub_attack.add_argument("--source", required=True, help="Source params path (without extension)")
    sub_attack.add_argument("--target", required=True, help="Target params path (without extension)")
    sub_attack.set_defaults(func=cmd_attack)

    sub_run = sub.add_parser(
        "run", parents=[common, config_parent, workers_parent], help="Run a full scenario"
    )
    sub_run.set_defaults(func=cmd_run)

    sub_sweep = sub.add_parser(
        "sweep", parents=[common, config_parent, workers_parent], help="Run a sweep and correlate"
    )
    sub_sweep.set_defaults(func=cmd_sweep)

    sub_theory = sub.add_parser("verify-theory", parents=[common], help="Run the theory checks")
    sub_theory.add_argument("--config", default=None, help="Optional theory-check JSON file")
    sub_theory.set_defaults(func=cmd_verify_theory)

    return p


def main(argv: Optional[List[str]] = None):
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    args = parser.parse_args(argv)
    args.argv = argv
    configure_logging(args.log_level)
    try:
        return args.func(args)
    except (FedTransferError, KeyError, FileNotFoundError, json.JSONDecodeError) as e:
        print(f"Error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
