"""Writers for the harness output files."""

import json
import sys
from datetime import datetime, timezone
from pathlib import Path
from typing import Any, Dict, List, Optional, Sequence, Union

import pandas as pd

from .schemas import SCHEMA_VERSION, validate_report, write_schemas

SWEEP_COLUMNS = ["axis_value", "seed", "status", "t_rate", "t_acc", "acc", "adv_acc"]


def envelope(kind: str, **body: Any) -> Dict[str, Any]:
    """A report dict tagged with the schema version and its kind."""
    return {"schema_version": SCHEMA_VERSION, "kind": kind, **body}


def write_json(path: Union[str, Path], document: Any) -> Path:
    """Write ``document`` with sorted keys so identical inputs give identical bytes."""
    path_obj = Path(path)
    path_obj.parent.mkdir(parents=True, exist_ok=True)
    with open(path_obj, "w", encoding="utf-8") as f:
        json.dump(document, f, indent=2, sort_keys=True)
        f.write("\n")
    return path_obj


def write_report(out_dir: Union[str, Path], report: Dict[str, Any]) -> Path:
    """Validate ``report`` against its kind's schema, write ``report.json`` and the schemas.

    Raises:
        ReportSchemaError: If the report does not validate.
    """
    validate_report(report, report["kind"])
    directory = Path(out_dir)
    write_schemas(directory / "schemas")
    return write_json(directory / "report.json", report)


def write_metadata(out_dir: Union[str, Path], argv: Optional[Sequence[str]] = None) -> Path:
    """``metadata.json``: the only output that changes between identical runs."""
    from .. import __version__

    return write_json(
        Path(out_dir) / "metadata.json",
        {
            "created_utc": datetime.now(timezone.utc).isoformat(),
            "fedtransfer_version": __version__,
            "python": sys.version.split()[0],
            "argv": list(argv) if argv is not None else list(sys.argv),
        },
    )


def sweep_rows(cells: List[Dict[str, Any]]) -> pd.DataFrame:
    """One row per (axis value, seed) cell; failed cells keep empty metrics."""
    rows = []
    for cell in cells:
        transfer = cell["result"].get("transfer") or {}
        rows.append(
            {
                "axis_value": json.dumps(cell["axis_value"], sort_keys=True)
                if isinstance(cell["axis_value"], (dict, list))
                else cell["axis_value"],
                "seed": cell["seed"],
                "status": cell["result"]["status"],
                "t_rate": transfer.get("t_rate"),
                "t_acc": transfer.get("t_acc"),
                "acc": transfer.get("acc_target"),
                "adv_acc": transfer.get("adv_acc_target"),
            }
        )
    return pd.DataFrame(rows, columns=SWEEP_COLUMNS)


def write_sweep_csv(path: Union[str, Path], cells: List[Dict[str, Any]]) -> Path:
    path_obj = Path(path)
    path_obj.parent.mkdir(parents=True, exist_ok=True)
    sweep_rows(cells).to_csv(path_obj, index=False, float_format="%.17g")
    return path_obj
