"""Sweeps: one scenario axis varied over values and seeds, then correlated with T.Rate."""

from concurrent.futures import ProcessPoolExecutor
from pathlib import Path
from typing import Any, Callable, Dict, Optional, Sequence, Union

import numpy as np

from ..analysis.regression import linfit
from ..analysis.spearman import MIN_POINTS, spearman
from ..errors import DegenerateInputError
from ..logging_utils import get_logger
from .reports import envelope
from .runner import run_seed
from .scenario import Scenario, SweepSpec, axis_values_numeric

logger = get_logger(__name__)

CellRunner = Callable[[Scenario, int, Optional[Union[str, Path]]], Dict[str, Any]]


def _cell_job(args) -> Dict[str, Any]:
    runner, scenario_dict, seed, out_dir = args
    return runner(Scenario.from_dict(scenario_dict), seed, out_dir)


def correlate(xs: Sequence[float], ys: Sequence[Optional[float]], seed: int = 0) -> Dict[str, Any]:
    """Spearman and a line fit of ``ys`` on ``xs``, missing ``ys`` dropped.

    Fewer than four complete points give status ``insufficient``; constant
    inputs give ``insufficient variation``.
    """
    pairs = [(x, y) for x, y in zip(xs, ys) if y is not None]
    if len(pairs) < MIN_POINTS:
        return {"status": "insufficient", "n": len(pairs)}
    x = [p[0] for p in pairs]
    y = [p[1] for p in pairs]
    try:
        rho = spearman(x, y, seed=seed)
    except DegenerateInputError:
        return {"status": "insufficient variation", "n": len(pairs)}
    return {"status": "ok", "n": len(pairs), "spearman": rho.to_dict(), "linfit": linfit(x, y).to_dict()}


def run_sweep(
    sweep: SweepSpec,
    seeds: Optional[Sequence[int]] = None,
    out_dir: Optional[Union[str, Path]] = None,
    workers: int = 1,
    runner: CellRunner = run_seed,
) -> Dict[str, Any]:
    """Run every (axis value, seed) cell and correlate the axis with T.Rate.

    ``runner`` computes one cell (the full pipeline by default); it must be a
    module-level function when ``workers > 1``. Cells run in a process pool
    and are collected in grid order, so results do not depend on ``workers``.
    Each cell writes its files under ``<out_dir>/cells/<value index>``.
    """
    seed_list = list(seeds) if seeds is not None else list(sweep.base.seeds)
    grid = [(i, value, seed) for i, value in enumerate(sweep.values) for seed in seed_list]
    scenarios = [sweep.apply(value) for value in sweep.values]

    def cell_dir(i: int) -> Optional[str]:
        return None if out_dir is None else str(Path(out_dir) / "cells" / str(i))

    if workers > 1 and len(grid) > 1:
        jobs = [(runner, scenarios[i].to_dict(), seed, cell_dir(i)) for i, _, seed in grid]
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_cell_job, jobs))
    else:
        results = [runner(scenarios[i], seed, cell_dir(i)) for i, _, seed in grid]

    cells = [
        {"axis_value": value, "seed": seed, "result": result}
        for (_, value, seed), result in zip(grid, results)
    ]
    for cell in cells:
        if cell["result"]["status"] != "ok":
            logger.warning("Cell %s=%r seed %d failed", sweep.axis.value, cell["axis_value"], cell["seed"])

    axis_means = []
    for value in sweep.values:
        rates = [
            c["result"]["transfer"]["t_rate"]
            for c in cells
            if c["axis_value"] == value
            and c["result"]["status"] == "ok"
            and c["result"]["transfer"]["t_rate"] is not None
        ]
        completed = sum(1 for c in cells if c["axis_value"] == value and c["result"]["status"] == "ok")
        axis_means.append(
            {
                "axis_value": value,
                "mean_t_rate": float(np.mean(rates)) if rates else None,
                "completed": completed,
            }
        )

    numeric = axis_values_numeric(sweep.values)
    if numeric is None:
        correlation = {"status": "categorical axis", "n": len(sweep.values)}
        per_seed = {"status": "categorical axis", "n": len(cells)}
    else:
        correlation = correlate(numeric, [m["mean_t_rate"] for m in axis_means], seed=seed_list[0])
        point_x = [float(c["axis_value"]) for c in cells if c["result"]["status"] == "ok"]
        point_y = [c["result"]["transfer"]["t_rate"] for c in cells if c["result"]["status"] == "ok"]
        per_seed = correlate(point_x, point_y, seed=seed_list[0])
    logger.info("Sweep over %s finished: correlation status %s", sweep.axis.value, correlation["status"])
    return envelope(
        "sweep",
        sweep=sweep.to_dict(),
        cells=cells,
        axis_means=axis_means,
        correlation=correlation,
        per_seed_correlation=per_seed,
    )
