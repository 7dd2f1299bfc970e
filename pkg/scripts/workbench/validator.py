"""
Dataset Validator
=================
Schema checks for ingested CSV datasets. The first hard violation raises
IngestionError naming the file, column and 1-based data row; soft
findings (duplicate rows) are collected in a DatasetReport.
"""

import logging
from dataclasses import dataclass, field
from typing import Dict, List, Optional, Sequence, Tuple

import pandas as pd

from ..exceptions import IngestionError


@dataclass(frozen=True)
class Schema:
    """Expected layout of one dataset family"""
    name: str
    required: Tuple[str, ...]
    numeric: Tuple[str, ...] = ()
    nonnegative: Tuple[str, ...] = ()
    positive: Tuple[str, ...] = ()
    one_of: Tuple[str, ...] = ()


PLE_SCANS = Schema(
    name='ple_scans',
    required=('emitter', 'voltage_v', 'frequency_ghz', 'counts'),
    numeric=('voltage_v', 'frequency_ghz', 'counts'),
    nonnegative=('counts',),
)
STARK_DATA = Schema(
    name='stark_data',
    required=('emitter', 'delta_f_ghz'),
    numeric=('voltage_v', 'e_local_mv_per_m', 'delta_f_ghz'),
    one_of=('voltage_v', 'e_local_mv_per_m'),
)
CV_CURVE = Schema(
    name='cv_curve',
    required=('voltage_v', 'capacitance_f'),
    numeric=('voltage_v', 'capacitance_f'),
    positive=('capacitance_f',),
)
TIME_SERIES = Schema(
    name='time_series',
    required=('t_s', 'counts'),
    numeric=('t_s', 'counts'),
    nonnegative=('t_s', 'counts'),
)
ODMR_SPECTRA = Schema(
    name='odmr_spectra',
    required=('voltage_v', 'frequency_mhz', 'population'),
    numeric=('voltage_v', 'frequency_mhz', 'population'),
    nonnegative=('population',),
)


@dataclass
class DatasetReport:
    """Validation outcome of one dataset"""
    dataset: str
    total_rows: int
    duplicate_count: int = 0
    issues: List[str] = field(default_factory=list)

    @property
    def validation_passed(self) -> bool:
        return not self.issues

    def add_issue(self, issue: str):
        self.issues.append(issue)


class DatasetValidator:
    """Enforce dataset schemas before inversion"""

    def __init__(self, logger: Optional[logging.Logger] = None):
        self.logger = logger or logging.getLogger(__name__)

    def validate(self, df: pd.DataFrame, schema: Schema, path: Optional[str] = None) -> pd.DataFrame:
        """
        Check columns, numeric types and sign constraints.

        Args:
            df: Raw frame from the CSV reader
            schema: Expected layout
            path: Source file for diagnostics

        Returns:
            Frame with numeric columns converted to float

        Raises:
            IngestionError: First violated constraint, with column and row
        """
        missing = [col for col in schema.required if col not in df.columns]
        if missing:
            self.logger.error(f"✗ {schema.name}: missing column '{missing[0]}'")
            raise IngestionError("missing required column", path=path, column=missing[0])
        if schema.one_of and not any(col in df.columns for col in schema.one_of):
            raise IngestionError(
                f"needs one of the columns {', '.join(schema.one_of)}",
                path=path, column=schema.one_of[0],
            )
        if df.empty:
            raise IngestionError("dataset has no rows", path=path)

        frame = df.copy()
        for col in schema.numeric:
            if col not in frame.columns:
                continue
            converted = pd.to_numeric(frame[col], errors='coerce')
            bad = converted.isna()
            if bad.any():
                row = int(bad.to_numpy().nonzero()[0][0])
                self.logger.error(f"✗ {schema.name}: non-numeric value in '{col}' at row {row + 1}")
                raise IngestionError(
                    f"non-numeric or missing value {frame[col].iloc[row]!r}",
                    path=path, column=col, row=row + 1,
                )
            frame[col] = converted.astype(float)

        self._check_sign(frame, schema.nonnegative, lambda s: s < 0, "negative value", path)
        self._check_sign(frame, schema.positive, lambda s: s <= 0, "value must be > 0", path)
        return frame

    @staticmethod
    def _check_sign(frame, columns: Sequence[str], violates, message: str, path: Optional[str]):
        for col in columns:
            bad = violates(frame[col])
            if bad.any():
                row = int(bad.to_numpy().nonzero()[0][0])
                raise IngestionError(message, path=path, column=col, row=row + 1)

    def report(self, df: pd.DataFrame, schema: Schema) -> DatasetReport:
        """Soft checks on an already validated frame"""
        report = DatasetReport(dataset=schema.name, total_rows=len(df))
        report.duplicate_count = int(df.duplicated().sum())
        if report.duplicate_count:
            report.add_issue(f"{report.duplicate_count} duplicate rows")
            self.logger.warning(f"⚠ {schema.name}: {report.duplicate_count} duplicate rows")
        if report.validation_passed:
            self.logger.info(f"✓ {schema.name}: {report.total_rows:,} rows validated")
        return report

    @staticmethod
    def summary(reports: List[DatasetReport]) -> Dict[str, Dict]:
        return {
            r.dataset: {
                'total_rows': r.total_rows,
                'duplicates': r.duplicate_count,
                'validation_passed': r.validation_passed,
                'issues': list(r.issues),
            }
            for r in reports
        }
