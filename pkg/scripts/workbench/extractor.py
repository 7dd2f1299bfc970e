"""
Dataset Extractor
=================
Read measured or synthetic datasets from CSV into validated frames and
inversion inputs.
"""

import json
import logging
from pathlib import Path
from typing import Any, Dict, Optional, Union

import numpy as np
import pandas as pd

from ..exceptions import IngestionError
from ..inversion.results import CountTimeSeries, CvCurve
from .validator import (
    CV_CURVE,
    ODMR_SPECTRA,
    PLE_SCANS,
    STARK_DATA,
    TIME_SERIES,
    DatasetValidator,
    Schema,
)

PathLike = Union[str, Path]


class DatasetExtractor:
    """Extract datasets from a directory of CSV files"""

    def __init__(self, logger: Optional[logging.Logger] = None, validator: Optional[DatasetValidator] = None):
        self.logger = logger or logging.getLogger(__name__)
        self.validator = validator or DatasetValidator(self.logger)
        self.reports = []

    def extract_table(self, path: PathLike, schema: Schema) -> pd.DataFrame:
        """
        Read one CSV and validate it against a schema.

        Args:
            path: CSV file
            schema: Expected layout

        Returns:
            Validated DataFrame
        """
        path = Path(path)
        self.logger.info(f"Extracting {schema.name} from {path}")
        if not path.is_file():
            self.logger.error(f"✗ Missing dataset: {path}")
            raise IngestionError("file not found", path=str(path))
        try:
            raw = pd.read_csv(path)
        except (pd.errors.ParserError, pd.errors.EmptyDataError, UnicodeDecodeError) as e:
            self.logger.error(f"✗ Failed to parse {path}: {str(e)}")
            raise IngestionError(f"unreadable CSV: {e}", path=str(path)) from None

        frame = self.validator.validate(raw, schema, path=str(path))
        self.reports.append(self.validator.report(frame, schema))
        self.logger.info(f"✓ Extracted {len(frame):,} rows from {path.name}")
        return frame

    def read_ple_scans(self, path: PathLike) -> pd.DataFrame:
        return self.extract_table(path, PLE_SCANS)

    def read_stark_data(self, path: PathLike) -> pd.DataFrame:
        return self.extract_table(path, STARK_DATA)

    def read_odmr_spectra(self, path: PathLike) -> pd.DataFrame:
        return self.extract_table(path, ODMR_SPECTRA)

    def read_cv_curve(self, path: PathLike, contact_area_cm2: float) -> CvCurve:
        frame = self.extract_table(path, CV_CURVE)
        if len(frame) < 5:
            raise IngestionError("CV curve needs at least 5 samples", path=str(path))
        return CvCurve(
            voltages_v=frame['voltage_v'].to_numpy(),
            capacitance_f=frame['capacitance_f'].to_numpy(),
            contact_area_cm2=contact_area_cm2,
        )

    def read_time_series(self, path: PathLike) -> CountTimeSeries:
        """
        Count time series with the sample rate inferred from t_s.

        Raises:
            IngestionError: Fewer than 2 samples or non-uniform timestamps
        """
        frame = self.extract_table(path, TIME_SERIES)
        t = frame['t_s'].to_numpy()
        if t.size < 2:
            raise IngestionError("time series needs at least 2 samples", path=str(path), column='t_s')
        steps = np.diff(t)
        dt = float(np.median(steps))
        irregular = np.abs(steps - dt) > 1e-6 * dt if dt > 0 else np.ones_like(steps, dtype=bool)
        if irregular.any():
            row = int(irregular.nonzero()[0][0]) + 2
            raise IngestionError("timestamps are not uniformly spaced", path=str(path), column='t_s', row=row)
        return CountTimeSeries(
            counts=frame['counts'].to_numpy(),
            sample_rate_hz=1.0 / dt,
            duration_s=t.size * dt,
        )

    def read_truth(self, path: PathLike) -> Optional[Dict[str, Any]]:
        """Truth sidecar, or None when absent"""
        path = Path(path)
        if not path.is_file():
            self.logger.info("No truth sidecar found; truth comparison skipped")
            return None
        return self.read_json(path)

    def read_json(self, path: PathLike) -> Dict[str, Any]:
        path = Path(path)
        try:
            return json.loads(path.read_text(encoding='utf-8'))
        except json.JSONDecodeError as e:
            raise IngestionError(f"invalid JSON: {e.msg}", path=str(path), row=e.lineno) from None
