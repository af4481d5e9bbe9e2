"""Configuration, experiment drivers and command-line entry point."""

from .config import ConfigError, DEFAULT_SNR_GRID, ExperimentConfig, parse_snr_range
from .experiments import (ResultRecord, ScatterData, cmd_capacity, cmd_outage,
                          cmd_scatter, cmd_sweep_corr, cmd_sweep_csit,
                          cmd_sweep_eve, peak_secrecy, positive_band,
                          records_to_csv, scatter_statistics, write_record)
from .oracle import OracleReport, run_oracle_checks
