"""Published JSON schemas of the harness outputs and a validator for the subset they use.

The schemas are plain JSON Schema documents (type, required, properties,
items, enum, minimum, maximum, additionalProperties) and are written next
to every output so external tools can validate the files themselves.
"""

import json
from pathlib import Path
from typing import Any, Dict, List, Union

from ..errors import ReportSchemaError

SCHEMA_VERSION = "1.0"

_NUMBER = {"type": "number"}
_PROB = {"type": "number", "minimum": 0.0, "maximum": 1.0}
_OPT_PROB = {"type": ["number", "null"], "minimum": 0.0, "maximum": 1.0}
_COUNT = {"type": "integer", "minimum": 0}

_ENVELOPE = {
    "schema_version": {"type": "string", "enum": [SCHEMA_VERSION]},
    "kind": {"type": "string"},
}

TRANSFER_REPORT_SCHEMA: Dict[str, Any] = {
    "type": "object",
    "required": ["acc_target", "adv_acc_target", "t_acc", "t_rate", "t_rate_defined", "counts"],
    "properties": {
        "acc_target": _PROB,
        "adv_acc_target": _OPT_PROB,
        "t_acc": _PROB,
        "t_rate": _OPT_PROB,
        "t_rate_defined": {"type": "boolean"},
        "counts": {
            "type": "object",
            "required": ["n_total", "s1", "s2", "s3", "s4", "s1_s2", "s1_s2_s3", "s1_s2_s3_s4"],
            "properties": {
                key: _COUNT
                for key in ("n_total", "s1", "s2", "s3", "s4", "s1_s2", "s1_s2_s3", "s1_s2_s3_s4")
            },
        },
    },
}

_HISTORY = {
    "type": "object",
    "required": ["records", "stop_round", "stopped_early"],
    "properties": {
        "records": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["round", "accuracy", "mean_loss"],
                "properties": {"round": _COUNT, "accuracy": _PROB, "mean_loss": {"type": ["number", "null"]}},
            },
        },
        "stop_round": _COUNT,
        "stopped_early": {"type": "boolean"},
    },
}

_PARAMS_REF = {
    "type": ["object", "null"],
    "required": ["sha256"],
    "properties": {"path": {"type": ["string", "null"]}, "sha256": {"type": "string"}},
}

_FAILURE = {
    "type": "object",
    "required": ["error_type", "message"],
    "properties": {"error_type": {"type": "string"}, "message": {"type": "string"}},
}

SEED_RESULT_SCHEMA: Dict[str, Any] = {
    "type": "object",
    "required": ["seed", "status"],
    "properties": {
        "seed": {"type": "integer"},
        "status": {"type": "string", "enum": ["ok", "failed"]},
        "transfer": TRANSFER_REPORT_SCHEMA,
        "malicious_clients": {"type": "array", "items": {"type": "integer", "minimum": 0}},
        "target": _PARAMS_REF,
        "surrogate": _PARAMS_REF,
        "target_history": _HISTORY,
        "surrogate_history": _HISTORY,
        "partition": {
            "type": "object",
            "required": ["sizes", "label_tv_distance"],
            "properties": {
                "sizes": {"type": "array", "items": _COUNT},
                "label_tv_distance": _PROB,
            },
        },
        "error": _FAILURE,
    },
}

RUN_REPORT_SCHEMA: Dict[str, Any] = {
    "type": "object",
    "required": ["schema_version", "kind", "scenario", "seeds", "summary"],
    "properties": {
        **_ENVELOPE,
        "scenario": {"type": "object"},
        "seeds": {"type": "array", "items": SEED_RESULT_SCHEMA},
        "summary": {
            "type": "object",
            "required": ["completed", "failed", "mean_t_rate", "mean_t_acc"],
            "properties": {
                "completed": _COUNT,
                "failed": _COUNT,
                "mean_t_rate": _OPT_PROB,
                "mean_t_acc": _OPT_PROB,
            },
        },
    },
}

_CORRELATION = {
    "type": "object",
    "required": ["status"],
    "properties": {
        "status": {"type": "string", "enum": ["ok", "insufficient", "insufficient variation", "categorical axis"]},
        "n": _COUNT,
        "spearman": {
            "type": "object",
            "required": ["rho", "p_value", "n", "method"],
            "properties": {
                "rho": {"type": "number", "minimum": -1.0, "maximum": 1.0},
                "p_value": _PROB,
                "n": _COUNT,
                "method": {"type": "string", "enum": ["t_approx", "permutation"]},
            },
        },
        "linfit": {
            "type": ["object", "null"],
            "required": ["slope", "intercept", "r_squared"],
            "properties": {"slope": _NUMBER, "intercept": _NUMBER, "r_squared": _PROB},
        },
    },
}

SWEEP_REPORT_SCHEMA: Dict[str, Any] = {
    "type": "object",
    "required": ["schema_version", "kind", "sweep", "cells", "axis_means", "correlation", "per_seed_correlation"],
    "properties": {
        **_ENVELOPE,
        "sweep": {"type": "object"},
        "cells": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["axis_value", "seed", "result"],
                "properties": {"seed": {"type": "integer"}, "result": SEED_RESULT_SCHEMA},
            },
        },
        "axis_means": {
            "type": "array",
            "items": {
                "type": "object",
                "required": ["axis_value", "mean_t_rate", "completed"],
                "properties": {"mean_t_rate": _OPT_PROB, "completed": _COUNT},
            },
        },
        "correlation": _CORRELATION,
        "per_seed_correlation": _CORRELATION,
    },
}

THEORY_REPORT_SCHEMA: Dict[str, Any] = {
    "type": "object",
    "required": ["schema_version", "kind", "config", "sections", "passed", "failures"],
    "properties": {
        **_ENVELOPE,
        "config": {"type": "object"},
        "sections": {
            "type": "object",
            "required": ["alignment", "bound_check", "bias_variance", "bounds"],
            "properties": {
                name: {
                    "type": "object",
                    "required": ["status"],
                    "properties": {"status": {"type": "string", "enum": ["passed", "failed", "error"]}},
                }
                for name in ("alignment", "bound_check", "bias_variance", "bounds")
            },
        },
        "passed": {"type": "boolean"},
        "failures": {"type": "array", "items": {"type": "string"}},
    },
}

TRAIN_REPORT_SCHEMA: Dict[str, Any] = {
    "type": "object",
    "required": ["schema_version", "kind", "mode", "params", "history", "accuracy"],
    "properties": {
        **_ENVELOPE,
        "mode": {"type": "string", "enum": ["federated", "centralized"]},
        "params": _PARAMS_REF,
        "history": _HISTORY,
        "accuracy": _PROB,
    },
}

ATTACK_REPORT_SCHEMA: Dict[str, Any] = {
    "type": "object",
    "required": ["schema_version", "kind", "transfer", "attack"],
    "properties": {**_ENVELOPE, "transfer": TRANSFER_REPORT_SCHEMA, "attack": {"type": "object"}},
}

SCHEMAS: Dict[str, Dict[str, Any]] = {
    "run": RUN_REPORT_SCHEMA,
    "sweep": SWEEP_REPORT_SCHEMA,
    "theory": THEORY_REPORT_SCHEMA,
    "train": TRAIN_REPORT_SCHEMA,
    "attack": ATTACK_REPORT_SCHEMA,
}

_TYPE_CHECKS = {
    "object": lambda v: isinstance(v, dict),
    "array": lambda v: isinstance(v, list),
    "string": lambda v: isinstance(v, str),
    "boolean": lambda v: isinstance(v, bool),
    "null": lambda v: v is None,
    "integer": lambda v: isinstance(v, int) and not isinstance(v, bool),
    "number": lambda v: isinstance(v, (int, float)) and not isinstance(v, bool),
}


def _errors(doc: Any, schema: Dict[str, Any], path: str, out: List[str]) -> None:
    types = schema.get("type")
    if types is not None:
        allowed = [types] if isinstance(types, str) else list(types)
        if not any(_TYPE_CHECKS[t](doc) for t in allowed):
            out.append(f"{path}: expected {'/'.join(allowed)}, got {type(doc).__name__}")
            return
    if "enum" in schema and doc not in schema["enum"]:
        out.append(f"{path}: {doc!r} not in {schema['enum']}")
    if _TYPE_CHECKS["number"](doc):
        if "minimum" in schema and doc < schema["minimum"]:
            out.append(f"{path}: {doc} < minimum {schema['minimum']}")
        if "maximum" in schema and doc > schema["maximum"]:
            out.append(f"{path}: {doc} > maximum {schema['maximum']}")
    if isinstance(doc, dict):
        for key in schema.get("required", []):
            if key not in doc:
                out.append(f"{path}: missing required key '{key}'")
        properties = schema.get("properties", {})
        for key, value in doc.items():
            if key in properties:
                _errors(value, properties[key], f"{path}.{key}", out)
            elif schema.get("additionalProperties") is False:
                out.append(f"{path}: unexpected key '{key}'")
    if isinstance(doc, list) and "items" in schema:
        for i, item in enumerate(doc):
            _errors(item, schema["items"], f"{path}[{i}]", out)


def validation_errors(doc: Any, schema: Dict[str, Any]) -> List[str]:
    """Every violation of ``schema`` in ``doc`` as ``path: reason`` strings."""
    out: List[str] = []
    _errors(doc, schema, "$", out)
    return out


def validate_report(doc: Dict[str, Any], kind: str) -> None:
    """Validate a report against the published schema of its kind.

    Raises:
        KeyError: For an unknown kind.
        ReportSchemaError: Listing every violation.
    """
    if kind not in SCHEMAS:
        raise KeyError(f"Unknown report kind '{kind}'. Available: {', '.join(sorted(SCHEMAS))}")
    errors = validation_errors(doc, SCHEMAS[kind])
    if errors:
        raise ReportSchemaError(f"{kind} report violates its schema: " + "; ".join(errors))


def write_schemas(out_dir: Union[str, Path]) -> List[Path]:
    """Write every published schema as ``<out_dir>/<kind>.schema.json``."""
    directory = Path(out_dir)
    directory.mkdir(parents=True, exist_ok=True)
    paths = []
    for kind, schema in sorted(SCHEMAS.items()):
        path = directory / f"{kind}.schema.json"
        document = {"$schema": "https://json-schema.org/draft/2020-12/schema", "title": f"{kind} report", **schema}
        with open(path, "w", encoding="utf-8") as f:
            json.dump(document, f, indent=2, sort_keys=True)
        paths.append(path)
    return paths
