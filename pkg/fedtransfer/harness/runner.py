"""End-to-end attack pipeline: federated target, coalition surrogate, transfer attack, scoring."""

from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from pathlib import Path
from typing import Any, Dict, List, Optional, Tuple, Union

import numpy as np

from ..attack.batch import craft_batch
from ..data.dataset import Dataset
from ..data.partition import Partition, label_tv_distance
from ..federated.centralized import train_centralized
from ..federated.config import FedConfig
from ..federated.history import TrainHistory
from ..federated.server import train_federated
from ..logging_utils import get_logger
from ..metrics.transfer import build_transfer_report
from ..model.params import ParamVector, params_digest, save_params
from ..model.spec import ModelSpec
from ..rng import derive_seed
from .reports import envelope
from .scenario import Scenario, SurrogateMode, SurrogatePartition

logger = get_logger(__name__)


def params_ref(params: ParamVector, out_dir: Optional[Path], name: str) -> Dict[str, Any]:
    path = None
    if out_dir is not None:
        save_params(params, out_dir / "params" / name)
        path = f"params/{name}"
    return {"path": path, "sha256": params_digest(params)}


def _save_history(history: TrainHistory, out_dir: Optional[Path], name: str) -> None:
    if out_dir is not None:
        history.save_csv(out_dir / "history" / f"{name}.csv")


def _coalition_fed_config(fed: FedConfig, coalition_size: int) -> FedConfig:
    k = fed.clients_per_round
    if k is not None and k > coalition_size:
        k = coalition_size
    return replace(fed, clients_per_round=k, checkpoint_rounds=())


def train_target(
    scenario: Scenario, train: Dataset, eval_set: Dataset, partition: Partition, seed: int
) -> Tuple[ParamVector, TrainHistory]:
    """Federated target over all clients; the configured checkpoint replaces the final model."""
    fed = scenario.fed
    if scenario.checkpoint_round is not None:
        fed = replace(fed, checkpoint_rounds=tuple(fed.checkpoint_rounds) + (scenario.checkpoint_round,))
    params, history = train_federated(scenario.model, train, partition, fed, eval_set, seed)
    if scenario.checkpoint_round is not None:
        if scenario.checkpoint_round in history.checkpoints:
            params = history.checkpoints[scenario.checkpoint_round]
        else:
            logger.warning(
                "Training stopped at round %d before checkpoint round %d; attacking the final model",
                history.stop_round,
                scenario.checkpoint_round,
            )
    return params, history


def train_surrogate(
    scenario: Scenario,
    train: Dataset,
    eval_set: Dataset,
    partition: Partition,
    coalition: List[int],
    seed: int,
) -> Tuple[ModelSpec, ParamVector, TrainHistory]:
    """Train the attacker's model on the pooled data of ``coalition``."""
    cfg = scenario.surrogate
    spec = cfg.model or scenario.model
    if cfg.mode is SurrogateMode.CENTRALIZED:
        pooled = np.sort(np.concatenate([partition.assignments[c] for c in coalition]))
        params, history = train_centralized(
            spec,
            train,
            pooled,
            cfg.epochs,
            lr=cfg.lr,
            batch_size=cfg.batch_size,
            momentum=cfg.momentum,
            weight_decay=cfg.weight_decay,
            early_stop_acc=cfg.early_stop_acc,
            eval_set=eval_set,
            seed=seed,
        )
        return spec, params, history

    fed = _coalition_fed_config(cfg.fed or scenario.fed, len(coalition))
    if cfg.partition is SurrogatePartition.SAME:
        sub_partition = partition.select(coalition)
        data = train
    else:
        pooled = np.sort(np.concatenate([partition.assignments[c] for c in coalition]))
        data = train.subset(pooled)
        sub_partition = scenario.heterogeneity.partition(
            data, len(coalition), derive_seed(seed, "surrogate", "partition")
        )
    params, history = train_federated(spec, data, sub_partition, fed, eval_set, seed)
    return spec, params, history


def run_seed(
    scenario: Scenario, seed: int, out_dir: Optional[Union[str, Path]] = None
) -> Dict[str, Any]:
    """Run the whole pipeline for one seed.

    Any exception is caught and recorded as a failed seed entry.
    """
    out = Path(out_dir) if out_dir is not None else None
    try:
        train, eval_set = scenario.dataset.build(seed)
        partition = scenario.heterogeneity.partition(train, scenario.num_clients, seed)
        coalition = scenario.malicious_ids(seed)

        target, target_history = train_target(scenario, train, eval_set, partition, seed)
        source_spec, source, source_history = train_surrogate(
            scenario, train, eval_set, partition, coalition, seed
        )

        indices = np.arange(eval_set.n)
        transfer_batch = craft_batch(source_spec, source, eval_set, indices, scenario.attack)
        whitebox_batch = craft_batch(scenario.model, target, eval_set, indices, scenario.attack)
        transfer = build_transfer_report(
            source_spec, source, scenario.model, target, eval_set, transfer_batch, whitebox_batch
        )

        _save_history(target_history, out, f"seed{seed}_target")
        _save_history(source_history, out, f"seed{seed}_surrogate")
        logger.info(
            "Seed %d: acc=%.4f t_acc=%.4f t_rate=%s",
            seed,
            transfer.acc_target,
            transfer.t_acc,
            "undefined" if transfer.t_rate is None else f"{transfer.t_rate:.4f}",
        )
        return {
            "seed": seed,
            "status": "ok",
            "transfer": transfer.to_dict(),
            "malicious_clients": coalition,
            "target": params_ref(target, out, f"seed{seed}_target"),
            "surrogate": params_ref(source, out, f"seed{seed}_surrogate"),
            "target_history": target_history.to_dict(),
            "surrogate_history": source_history.to_dict(),
            "partition": {
                "sizes": [int(s) for s in partition.sizes],
                "label_tv_distance": label_tv_distance(train.labels, partition, train.num_classes),
            },
        }
    except Exception as exc:
        logger.warning("Seed %d of '%s' failed: %s: %s", seed, scenario.name, type(exc).__name__, exc)
        return {
            "seed": seed,
            "status": "failed",
            "error": {"error_type": type(exc).__name__, "message": str(exc)},
        }


def _seed_job(args: Tuple[Dict[str, Any], int, Optional[str]]) -> Dict[str, Any]:
    scenario_dict, seed, out_dir = args
    return run_seed(Scenario.from_dict(scenario_dict), seed, out_dir)


def summarize(results: List[Dict[str, Any]]) -> Dict[str, Any]:
    """Completed/failed counts and the mean T.Rate (undefined values skipped) and T.Acc."""
    ok = [r for r in results if r["status"] == "ok"]
    rates = [r["transfer"]["t_rate"] for r in ok if r["transfer"]["t_rate"] is not None]
    return {
        "completed": len(ok),
        "failed": len(results) - len(ok),
        "mean_t_rate": float(np.mean(rates)) if rates else None,
        "mean_t_acc": float(np.mean([r["transfer"]["t_acc"] for r in ok])) if ok else None,
    }


def run_scenario(
    scenario: Scenario,
    seeds: Optional[List[int]] = None,
    out_dir: Optional[Union[str, Path]] = None,
    workers: int = 1,
) -> Dict[str, Any]:
    """Run every seed (``scenario.seeds`` when None) and assemble the run report.

    Seeds are independent; with ``workers > 1`` they run in a process pool and
    results are collected in seed-list order.
    """
    seed_list = list(seeds) if seeds is not None else list(scenario.seeds)
    out = None if out_dir is None else str(out_dir)
    if workers > 1 and len(seed_list) > 1:
        jobs = [(scenario.to_dict(), s, out) for s in seed_list]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_seed_job, jobs))
    else:
        results = [run_seed(scenario, s, out) for s in seed_list]
    return envelope("run", scenario=scenario.to_dict(), seeds=results, summary=summarize(results))
