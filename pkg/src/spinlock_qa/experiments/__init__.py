"""Experiment drivers, configuration and result export."""

from spinlock_qa.experiments.config import ExperimentConfig, apply_overrides, load_config
from spinlock_qa.experiments.runs import (
    run_custom,
    run_experiment,
    run_fig1,
    run_fig2,
    run_fig3,
    run_gap_scan,
)
from spinlock_qa.experiments.table import ResultTable, export, read_table
