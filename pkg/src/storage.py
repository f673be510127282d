"""
Result files for benchmark runs
"""

import json
import logging
from pathlib import Path
from typing import Optional, List, Dict

import pandas as pd

from .exceptions import OutputError
from .fem.garteur import PARAMETER_NAMES
from .models import BenchmarkSummary
from .optimizers.core import RunRecord

logger = logging.getLogger(__name__)

TRACE_COLUMNS = ["algorithm", "seed", "iteration", "best_cost", "mean_cost"]


def trace_frame(records: List[RunRecord]) -> pd.DataFrame:
    """One row per (algorithm, seed, iteration), in record order"""
    frames = [
        pd.DataFrame({
            "algorithm": record.algorithm,
            "seed": record.seed,
            "iteration": range(record.max_iter),
            "best_cost": record.best_cost,
            "mean_cost": record.mean_cost,
        })
        for record in records
    ]
    if not frames:
        return pd.DataFrame(columns=TRACE_COLUMNS)
    return pd.concat(frames, ignore_index=True)[TRACE_COLUMNS]


def params_frame(summary: BenchmarkSummary) -> pd.DataFrame:
    """Initial (and truth) vectors followed by each algorithm's mean updated vector"""
    rows: List[Dict[str, object]] = [
        {"label": "initial", **summary.problem.initial_vector.to_dict(), "mean_final_cost": None}
    ]
    if summary.problem.truth_vector is not None:
        rows.append({"label": "truth", **summary.problem.truth_vector.to_dict(), "mean_final_cost": 0.0})
    for name, stats in summary.algorithms.items():
        rows.append({"label": name, **stats.mean_parameters, "mean_final_cost": stats.mean_final_cost})
    return pd.DataFrame(rows, columns=["label", *PARAMETER_NAMES, "mean_final_cost"])


class ResultStore:
    """Writes benchmark outputs below one directory"""

    def __init__(self, out_dir: Path):
        self.out_dir = Path(out_dir)

    def ensure_directory(self) -> None:
        try:
            self.out_dir.mkdir(parents=True, exist_ok=True)
        except OSError as e:
            logger.error(f"Cannot create output directory {self.out_dir}: {e}")
            raise OutputError(
                "Output directory could not be created",
                details={"path": str(self.out_dir), "error": str(e)}
            )

    def _write(self, name: str, writer) -> Path:
        path = self.out_dir / name
        try:
            writer(path)
        except OSError as e:
            logger.error(f"Failed to write {path}: {e}")
            raise OutputError(
                f"Failed to write {name}",
                details={"path": str(path), "error": str(e)}
            )
        logger.info(f"Wrote {path}")
        return path

    def write_trace(self, records: List[RunRecord], name: str = "trace.csv", from_iteration: int = 0) -> Path:
        frame = trace_frame(records)
        if from_iteration:
            frame = frame[frame["iteration"] >= from_iteration]
        return self._write(name, lambda path: frame.to_csv(path, index=False))

    def write_summary(self, summary: BenchmarkSummary) -> Path:
        def dump(path: Path) -> None:
            with path.open("w") as fh:
                json.dump(summary.to_dict(), fh, indent=2)
                fh.write("\n")
        return self._write("summary.json", dump)

    def write_params(self, summary: BenchmarkSummary) -> Path:
        frame = params_frame(summary)
        return self._write("params.csv", lambda path: frame.to_csv(path, index=False))


def emit_outputs(
    summary: BenchmarkSummary,
    records: List[RunRecord],
    out_dir: Path,
    zoom_from: Optional[int] = None
) -> List[Path]:
    """Write trace.csv, summary.json, params.csv and optionally trace_zoom.csv"""
    store = ResultStore(out_dir)
    store.ensure_directory()
    written = [
        store.write_trace(records),
        store.write_summary(summary),
        store.write_params(summary),
    ]
    if zoom_from is not None:
        written.append(store.write_trace(records, name="trace_zoom.csv", from_iteration=zoom_from))
    return written
