"""Experiment configuration: JSON documents validated against a bundled JSON schema."""

from __future__ import annotations

import copy
import json
import math
from dataclasses import asdict, dataclass, field, fields
from importlib import resources
from pathlib import Path
from typing import Any

import jsonschema

from spinlock_qa.model import SystemSpec

EXPERIMENTS = ("fig1", "fig2", "fig3", "gap_scan", "custom")
SCHEMA_FILE = "config.schema.json"

# per-experiment chain parameters before user overrides
EXPERIMENT_DEFAULTS = {
    "fig1": {"L": 4, "omega_ghz": 2.4},
    "fig2": {"L": 4, "omega_ghz": 4.8},
    "fig3": {"L": 2, "omega_ghz": 2.4},
    "gap_scan": {"L": 2, "omega_ghz": 2.4},
    "custom": {"L": 4, "omega_ghz": 2.4},
}

CHAIN_DEFAULTS = {
    "detuning_step_ghz": 1.9,
    "h_ghz": 0.03,
    "J_ghz": 0.05,
    "lambda_ghz": 1.0,
    "gamma_per_ns": 0.01,
    "t_end_ns": 500.0,
}


def load_schema() -> dict:
    text = resources.files("spinlock_qa.experiments").joinpath(SCHEMA_FILE).read_text()
    return json.loads(text)


@dataclass
class ExperimentConfig:
    experiment: str = "fig1"
    spec: dict = field(default_factory=dict)
    omega_list_ghz: list = field(default_factory=lambda: [2.4, 3.6, 4.8])
    L_range: list = field(default_factory=lambda: [2, 7])
    frame: str = "lab"
    dt_ns: float | None = None
    sample_every_ns: float = 1.0
    max_steps: int = 50_000_000
    gamma_convention: str = "per_ns"
    fig3_grid_ns: float = 5.0
    fig3_quadrature: bool = True
    gap_scan_points: int = 501
    output: str | None = None
    format: str = "csv"
    workers: int = 1

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        jsonschema.validate(data, load_schema())
        cfg = cls(**copy.deepcopy(data))
        cfg.validate()
        return cfg

    def to_dict(self) -> dict:
        return asdict(self)

    def validate(self) -> None:
        jsonschema.validate(self.to_dict(), load_schema())
        lo, hi = self.L_range
        if lo > hi:
            raise ValueError(f"L_range {self.L_range} is empty")
        if self.dt_ns is not None and self.dt_ns > self.sample_every_ns:
            raise ValueError("dt_ns must not exceed sample_every_ns")
        # fail before any run if the parameters are physically invalid
        self.build_spec()

    def chain_params(self, **overrides) -> dict:
        params = dict(CHAIN_DEFAULTS)
        params.update(EXPERIMENT_DEFAULTS[self.experiment])
        params.update(self.spec)
        params.update(overrides)
        return params

    def build_spec(self, **overrides) -> SystemSpec:
        """Resolve defaults, config overrides and per-run overrides into a spec."""
        p = self.chain_params(**overrides)
        gamma = p["gamma_per_ns"]
        if self.gamma_convention == "two_pi_per_ns":
            gamma *= 2 * math.pi
        L = int(p["L"])
        base = SystemSpec.chain(
            L,
            p["omega_ghz"],
            detuning_step_ghz=p["detuning_step_ghz"],
            h_ghz=p["h_ghz"] if not isinstance(p["h_ghz"], list) else 0.0,
            J_ghz=p["J_ghz"],
            lambda_ghz=p["lambda_ghz"],
            gamma_per_ns=gamma,
            t_end_ns=p["t_end_ns"],
        )
        changes = {}
        if isinstance(p["h_ghz"], list):
            changes["h_ghz"] = tuple(p["h_ghz"])
        if "delta_ghz" in p:
            changes["delta_ghz"] = tuple(p["delta_ghz"])
        if "coupling_ghz" in p:
            changes["coupling_ghz"] = tuple(map(tuple, p["coupling_ghz"]))
        return base.with_(**changes) if changes else base


def _parse_value(text: str) -> Any:
    try:
        return json.loads(text)
    except json.JSONDecodeError:
        return text


def apply_overrides(data: dict, assignments: list[str]) -> dict:
    """Apply ``key=value`` overrides; dotted keys reach into ``spec``.

    Values are parsed as JSON when possible, so ``spec.L=3`` sets an integer
    and ``omega_list_ghz=[2.4,4.8]`` a list.
    """
    data = copy.deepcopy(data)
    for item in assignments:
        if "=" not in item:
            raise ValueError(f"override {item!r} is not of the form key=value")
        key, text = item.split("=", 1)
        target = data
        parts = key.strip().split(".")
        for part in parts[:-1]:
            target = target.setdefault(part, {})
            if not isinstance(target, dict):
                raise ValueError(f"cannot set {key!r}: {part!r} is not an object")
        target[parts[-1]] = _parse_value(text)
    return data


def load_config(path: str | Path | None = None, overrides: list[str] = (), **cli) -> ExperimentConfig:
    """Read a JSON config file (or start from defaults) and apply overrides."""
    data = {}
    if path is not None:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        if not isinstance(data, dict):
            raise ValueError("config file must contain a JSON object")
    for key, value in cli.items():
        if value is not None:
            data[key] = value
    data = apply_overrides(data, list(overrides))
    return ExperimentConfig.from_dict(data)


CONFIG_FIELDS = tuple(f.name for f in fields(ExperimentConfig))
