"""Training histories."""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Any, Dict, List, Union

import pandas as pd

from ..model.params import ParamVector

HISTORY_COLUMNS = ["round", "accuracy", "mean_loss"]


@dataclass
class HistoryRecord:
    """One evaluation point."""

    round: int
    accuracy: float
    mean_loss: float


@dataclass
class TrainHistory:
    """Evaluation records in round (or epoch) order plus stopping information."""

    records: List[HistoryRecord] = field(default_factory=list)
    stop_round: int = 0
    stopped_early: bool = False
    checkpoints: Dict[int, ParamVector] = field(default_factory=dict)

    def add(self, round_: int, accuracy: float, mean_loss: float) -> None:
        self.records.append(HistoryRecord(int(round_), float(accuracy), float(mean_loss)))

    @property
    def last_accuracy(self) -> float:
        return self.records[-1].accuracy if self.records else float("nan")

    def to_frame(self) -> pd.DataFrame:
        return pd.DataFrame(
            [[r.round, r.accuracy, r.mean_loss] for r in self.records], columns=HISTORY_COLUMNS
        )

    def save_csv(self, path: Union[str, Path]) -> None:
        """Write the records as ``round,accuracy,mean_loss`` CSV."""
        path_obj = Path(path)
        path_obj.parent.mkdir(parents=True, exist_ok=True)
        self.to_frame().to_csv(path_obj, index=False, float_format="%.17g")

    def to_dict(self) -> Dict[str, Any]:
        return {
            "records": [
                {"round": r.round, "accuracy": r.accuracy, "mean_loss": r.mean_loss}
                for r in self.records
            ],
            "stop_round": self.stop_round,
            "stopped_early": self.stopped_early,
            "checkpoint_rounds": sorted(self.checkpoints),
        }
