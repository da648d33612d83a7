"""Scenario runner, sweeps, theory verification and report writers."""

from .reports import envelope, write_json, write_metadata, write_report, write_sweep_csv
from .runner import run_scenario, run_seed, summarize, train_surrogate, train_target
from .scenario import (
    DatasetSpec,
    Scenario,
    SurrogateConfig,
    SurrogateMode,
    SurrogatePartition,
    SweepAxis,
    SweepSpec,
    apply_overrides,
    load_config,
    load_scenario,
    load_sweep,
    parse_override,
)
from .schemas import SCHEMA_VERSION, SCHEMAS, validate_report, validation_errors, write_schemas
from .sweep import correlate, run_sweep
from .theory_check import TheoryCheckConfig, verify_theory

__all__ = [
    "DatasetSpec",
    "Scenario",
    "SurrogateConfig",
    "SurrogateMode",
    "SurrogatePartition",
    "SweepAxis",
    "SweepSpec",
    "parse_override",
    "apply_overrides",
    "load_config",
    "load_scenario",
    "load_sweep",
    "run_seed",
    "run_scenario",
    "summarize",
    "train_target",
    "train_surrogate",
    "run_sweep",
    "correlate",
    "TheoryCheckConfig",
    "verify_theory",
    "SCHEMA_VERSION",
    "SCHEMAS",
    "validate_report",
    "validation_errors",
    "write_schemas",
    "envelope",
    "write_json",
    "write_report",
    "write_metadata",
    "write_sweep_csv",
]
