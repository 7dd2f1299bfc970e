"""
Artifact Loader
===============
Write CSV tables, JSON documents and declarative plot specifications to
an output directory. Every file is written to a temporary sibling and
renamed into place.
"""

import json
import logging
import math
import os
import tempfile
from dataclasses import asdict, dataclass
from enum import Enum
from pathlib import Path
from typing import Any, List, Optional, Union

import numpy as np
import pandas as pd

FLOAT_FORMAT = '%.10g'

FILENAMES = {
    'ple_scans': 'ple_scans.csv',
    'stark_data': 'stark_data.csv',
    'odmr_spectra': 'odmr_spectra.csv',
    'cv_curve': 'cv_curve.csv',
    'time_series': 'time_series.csv',
    'truth': 'truth.json',
    'report': 'pipeline_report.json',
}


@dataclass
class PlotSpec:
    """Data-only description of a figure over one CSV"""
    x: str
    y: List[str]
    x_label: str
    y_label: str
    title: str
    group_by: Optional[str] = None
    kind: str = 'line'
    data: str = ''


def to_jsonable(obj: Any) -> Any:
    """Recursively convert numpy, Enum and Path values; non-finite floats become null"""
    if isinstance(obj, dict):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, Enum):
        return obj.value
    if isinstance(obj, Path):
        return str(obj)
    if isinstance(obj, (np.bool_, bool)):
        return bool(obj)
    if isinstance(obj, (np.integer, int)):
        return int(obj)
    if isinstance(obj, (np.floating, float)):
        value = float(obj)
        return value if math.isfinite(value) else None
    return obj


class ArtifactLoader:
    """Atomic writer for one output directory"""

    def __init__(self, out_dir: Union[str, Path], logger: Optional[logging.Logger] = None):
        self.out_dir = Path(out_dir)
        self.logger = logger or logging.getLogger(__name__)
        self.written: List[str] = []

    def _atomic_write(self, name: str, content: str) -> Path:
        self.out_dir.mkdir(parents=True, exist_ok=True)
        target = self.out_dir / name
        fd, tmp = tempfile.mkstemp(prefix=f".{name}.", suffix='.tmp', dir=self.out_dir)
        try:
            with os.fdopen(fd, 'w', encoding='utf-8', newline='') as handle:
                handle.write(content)
            os.replace(tmp, target)
        except OSError as e:
            self.logger.error(f"✗ Failed to write {target}: {str(e)}")
            if os.path.exists(tmp):
                os.unlink(tmp)
            raise
        self.written.append(name)
        return target

    def write_csv(self, df: pd.DataFrame, name: str, plot: Optional[PlotSpec] = None) -> Path:
        """
        Write a frame as CSV with a header row and no index.

        Args:
            df: Table to write
            name: File name inside the output directory
            plot: Optional plot specification written next to it

        Returns:
            Path of the CSV file
        """
        content = df.to_csv(index=False, float_format=FLOAT_FORMAT, lineterminator='\n')
        path = self._atomic_write(name, content)
        self.logger.info(f"✓ Wrote {len(df):,} rows to {name}")
        if plot is not None:
            plot.data = name
            self.write_plot_spec(plot, Path(name).stem + '.plot.json')
        return path

    def write_json(self, data: Any, name: str) -> Path:
        content = json.dumps(to_jsonable(data), indent=2, sort_keys=True) + '\n'
        path = self._atomic_write(name, content)
        self.logger.info(f"✓ Wrote {name}")
        return path

    def write_plot_spec(self, spec: PlotSpec, name: str) -> Path:
        return self.write_json(asdict(spec), name)
