"""
Workbench CLI
=============
``vsi simulate|synth|invert|odmr|sensitivity --config <path> --out <dir> [--seed N]``

Exit codes: 0 success, 1 unexpected error, 2 configuration error,
3 ingestion error, 4 numerical failure.
"""

import logging
import sys
from pathlib import Path
from typing import List, Optional, Sequence

from pydantic import BaseModel, Field, ValidationError
from pydantic_settings import BaseSettings, CliApp, CliSubCommand, SettingsConfigDict, SettingsError

from ..exceptions import ConfigError, IngestionError, NumericalError
from ..orquestration.pipeline import WorkbenchPipeline, setup_logging
from .config import load_config

EXIT_OK = 0
EXIT_UNEXPECTED = 1
EXIT_CONFIG = 2
EXIT_INGESTION = 3
EXIT_NUMERICAL = 4


class _Command(BaseModel):
    config: Path = Field(description="Workbench YAML configuration")
    out: Path = Field(description="Output directory")
    seed: Optional[int] = Field(default=None, description="Seed override (wins over VSI_SEED)")

    def pipeline(self) -> WorkbenchPipeline:
        config = load_config(self.config, seed=self.seed)
        logger = setup_logging(config.workbench.log_level, config.workbench.log_file)
        return WorkbenchPipeline(config, logger)


class SimulateCLI(_Command):
    """Field, band and carrier profiles per voltage."""

    def cli_cmd(self) -> None:
        self.pipeline().run_simulate(self.out)


class SynthCLI(_Command):
    """Synthetic PLE, ODMR, CV and time-series datasets with a truth sidecar."""

    def cli_cmd(self) -> None:
        self.pipeline().run_synth(self.out)


class InvertCLI(_Command):
    """Invert a dataset directory into pipeline_report.json."""

    data: Optional[Path] = Field(default=None, description="Dataset directory (defaults to --out)")

    def cli_cmd(self) -> None:
        self.pipeline().run_invert(self.data or self.out, self.out)


class OdmrCLI(_Command):
    """ODMR spectra and peak table over the configured bias sweep."""

    def cli_cmd(self) -> None:
        self.pipeline().run_odmr(self.out)


class SensitivityCLI(_Command):
    """Field sensitivity from a working-point count time series."""

    data: Optional[Path] = Field(default=None, description="time_series.csv or its directory (defaults to --out)")

    def cli_cmd(self) -> None:
        self.pipeline().run_sensitivity(self.data or self.out, self.out)


class VsiCli(BaseSettings):
    """Simulate a V_Si sensing device and invert its measurements."""

    model_config = SettingsConfigDict(cli_prog_name='vsi')

    simulate: CliSubCommand[SimulateCLI]
    synth: CliSubCommand[SynthCLI]
    invert: CliSubCommand[InvertCLI]
    odmr: CliSubCommand[OdmrCLI]
    sensitivity: CliSubCommand[SensitivityCLI]

    def cli_cmd(self) -> None:
        CliApp.run_subcommand(self)


def main(argv: Optional[Sequence[str]] = None) -> int:
    """Run the CLI and map failures onto exit codes"""
    args: List[str] = list(sys.argv[1:] if argv is None else argv)
    logger = logging.getLogger('VSI_Workbench')
    try:
        CliApp.run(VsiCli, cli_args=args)
    except ConfigError as e:
        logger.error(f"✗ Configuration error: {str(e)}")
        print(f"config error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except (ValidationError, SettingsError) as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_CONFIG
    except IngestionError as e:
        print(f"ingestion error: {e}", file=sys.stderr)
        return EXIT_INGESTION
    except NumericalError as e:
        print(f"numerical failure: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_NUMERICAL
    except SystemExit as e:
        # argparse exits on --help (0) and on malformed arguments (2)
        return e.code if isinstance(e.code, int) else EXIT_CONFIG
    except Exception as e:  # pylint: disable=broad-except
        logger.exception(f"✗ Unexpected error: {str(e)}")
        print(f"unexpected error: {e}", file=sys.stderr)
        return EXIT_UNEXPECTED
    return EXIT_OK
