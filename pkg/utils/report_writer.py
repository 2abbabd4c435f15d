"""
Report Writer

Persists suite outputs: CSV tables, JSON summaries and (x, y) plot series.
Every file is written to a temporary sibling first and moved into place, so
an interrupted run never leaves a truncated report behind.
"""

import json
import logging
import os
import tempfile
from pathlib import Path
from typing import Any, Dict, Iterable, List, Optional

import numpy as np
import pandas as pd

FLOAT_FORMAT = "%.17g"


def _to_builtin(value: Any) -> Any:
    """JSON-serializable form of numpy scalars, arrays and complex numbers"""
    if isinstance(value, dict):
        return {str(k): _to_builtin(v) for k, v in value.items()}
    if isinstance(value, (list, tuple)):
        return [_to_builtin(v) for v in value]
    if isinstance(value, np.ndarray):
        return _to_builtin(value.tolist())
    if isinstance(value, (np.integer,)):
        return int(value)
    if isinstance(value, (np.floating,)):
        return float(value)
    if isinstance(value, (complex, np.complexfloating)):
        return [float(value.real), float(value.imag)]
    if isinstance(value, np.bool_):
        return bool(value)
    if isinstance(value, Path):
        return str(value)
    return value


class ReportWriter:
    """Writes the report files of one run into its output directory"""

    def __init__(self, out_dir, emit_plot_data: bool = False):
        """
        Initialize report writer

        Args:
            out_dir: Output directory (created if missing)
            emit_plot_data: Also write the (x, y) series requested by write_series
        """
        self.out_dir = Path(out_dir)
        self.out_dir.mkdir(parents=True, exist_ok=True)
        self.emit_plot_data = emit_plot_data
        self.logger = logging.getLogger(__name__)
        self.written: List[Path] = []

    def _atomic_write(self, name: str, text: str) -> Path:
        target = self.out_dir / name
        target.parent.mkdir(parents=True, exist_ok=True)
        handle, temp_path = tempfile.mkstemp(dir=target.parent, prefix=f".{target.name}.", suffix=".tmp")
        try:
            with os.fdopen(handle, 'w', encoding='utf-8', newline='') as f:
                f.write(text)
            os.replace(temp_path, target)
        except Exception:
            if os.path.exists(temp_path):
                os.remove(temp_path)
            raise
        self.written.append(target)
        self.logger.debug(f"Wrote {target}")
        return target

    def write_csv(self, name: str, frame: pd.DataFrame) -> Path:
        """
        Write a table

        Args:
            name: File name relative to the output directory
            frame: Table; written without index, fixed float format

        Returns:
            Path of the written file
        """
        text = frame.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator="\n")
        return self._atomic_write(name, text)

    def write_records(self, name: str, records: Iterable[Dict[str, Any]],
                      columns: Optional[List[str]] = None) -> Path:
        return self.write_csv(name, pd.DataFrame(list(records), columns=columns))

    def write_json(self, name: str, payload: Dict[str, Any]) -> Path:
        text = json.dumps(_to_builtin(payload), indent=2, sort_keys=True, allow_nan=True) + "\n"
        return self._atomic_write(name, text)

    def write_series(self, name: str, x: Iterable[float], y: Iterable[float]) -> Optional[Path]:
        """(x, y) plot series under plot_data/, only when plot data was requested"""
        if not self.emit_plot_data:
            return None
        frame = pd.DataFrame({"x": np.asarray(list(x), dtype=float), "y": np.asarray(list(y), dtype=float)})
        return self.write_csv(f"plot_data/{name}.csv", frame)
