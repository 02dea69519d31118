"""
Configuration loading: YAML defaults, flat key-value parameter files, and the
frozen run record embedded into every report.
"""
from __future__ import annotations

import copy
import logging
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Union

import yaml

from .errors import ConfigError

LOGGER = logging.getLogger(__name__)

DEFAULT_CONFIG_PATH = Path(__file__).resolve().parent.parent / "config.yaml"

DEFAULTS: Dict[str, Any] = {
    "models": {
        "logistic": {"mu": 4.5},
        "logistic2": {"mu": 3.88},
        "olg2d": {"mu": 80.0, "b": 2.0, "beta": 1.3, "K": 6.0},
        "duopoly": {"a": 10.0, "b": 0.5, "c1": 3.0, "c2": 5.0, "alpha": 1.05, "nu": 0.5},
        "counterexample": {"a": 0.3, "b": 0.6, "c": 0.2, "d": 0.8},
        "li_yorke": {"a": 0.0, "b": 0.5, "c": 1.0},
        "twist1": {"r": 3.0, "p1": 3.3, "p2": 6.0, "q1": 3.3, "q2": 6.0,
                   "c1": -1.5, "d1": 3.3, "c2": 0.0, "d2": 0.9},
        "twist2": {"p1": 3.0, "p2": 5.0, "q1": -1.0, "q2": 2.0,
                   "c1": 0.4 * math.pi, "d1": 3.0 * math.pi, "c2": 1.0, "d2": 8.6},
        "volterra": {"a": 1.0, "b": 1.0, "c": 1.0, "d": 1.0, "mu": 0.5,
                     "m1": 2, "m2": 1, "l_offsets": [0.12, 0.5], "h_offsets": [0.15, 0.5]},
        "duffing": {"k": 10.0, "q": 4.0, "s": 0.5, "eq_levels": [2.0, 2.5],
                    "es_levels": [0.1, 1.9], "rq_grid": [150.0, 200.0, 250.0, 300.0],
                    "rs_grid": [1.2, 1.6, 2.0]},
    },
    "paths": {"n_paths": 200, "n_samples": 512, "seed": 0},
    "tolerances": {
        "stretch": None,
        "membership": 1e-12,
        "itinerary_band": 1e-9,
        "newton": 1e-9,
        "covering": 1e-12,
        "flow_rtol": 1e-10,
        "flow_atol": 1e-12,
        "flow_orbit": 1e-6,
    },
    "orbits": {"grid_density": 64, "max_period": 6, "damping": [1.0, 0.5, 0.25],
               "max_seeds": 16, "fd_step": 1e-7, "subdivision": 8, "pool": 4096},
    "output": {"directory": "out", "plots": True},
}


def _fill_defaults(config: Dict[str, Any], defaults: Mapping[str, Any]) -> Dict[str, Any]:
    for key, value in defaults.items():
        if isinstance(value, Mapping):
            section = config.setdefault(key, {})
            if not isinstance(section, dict):
                raise ConfigError(f"config section {key!r} must be a mapping")
            _fill_defaults(section, value)
        else:
            config.setdefault(key, copy.deepcopy(value))
    return config


def load_config(config_path: Optional[Union[str, Path]] = None) -> Dict[str, Any]:
    """Load the YAML configuration and fill every missing key with its default."""
    path = Path(config_path) if config_path else DEFAULT_CONFIG_PATH
    if not path.exists():
        LOGGER.warning("Config file %s not found, using defaults", path)
        return copy.deepcopy(DEFAULTS)
    try:
        with open(path, "r", encoding="utf-8") as f:
            config = yaml.safe_load(f)
    except yaml.YAMLError as exc:
        raise ConfigError(f"cannot parse {path}: {exc}") from exc
    if config is None:
        config = {}
    if not isinstance(config, dict):
        raise ConfigError(f"{path} must contain a mapping at the top level")
    return _fill_defaults(config, DEFAULTS)


def parse_params_text(text: str) -> Dict[str, Dict[str, float]]:
    """Parse the flat parameter format.

    Example::

        # OLG reference configuration
        model olg2d
        mu = 80
        b = 2
    """
    models: Dict[str, Dict[str, float]] = {}
    current: Optional[str] = None
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if line.startswith("model"):
            parts = line.split()
            if len(parts) != 2 or parts[0] != "model":
                raise ConfigError(f"line {lineno}: expected 'model <name>'")
            current = parts[1]
            models.setdefault(current, {})
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected '<name> = <value>'")
        if current is None:
            raise ConfigError(f"line {lineno}: parameter before any 'model' line")
        key, value = (part.strip() for part in line.split("=", 1))
        try:
            models[current][key] = float(value)
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: {value!r} is not a number") from exc
    return models


def load_params_file(path: Union[str, Path]) -> Dict[str, Dict[str, float]]:
    path = Path(path)
    try:
        return parse_params_text(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc


@dataclass(frozen=True)
class RunConfig:
    """Everything a command needs, merged from config file and flags."""

    command: str
    model: str = ""
    params: Dict[str, Any] = field(default_factory=dict)
    n_paths: int = 200
    n_samples: int = 512
    seed: int = 0
    tolerances: Dict[str, Any] = field(default_factory=dict)
    orbits: Dict[str, Any] = field(default_factory=dict)
    output_dir: str = "out"

    @classmethod
    def build(cls, config: Mapping[str, Any], command: str, model: str = "",
              overrides: Optional[Mapping[str, Any]] = None, **settings: Any) -> "RunConfig":
        """Merge model parameters from *config* with flag *overrides*.

        Keyword *settings* override path, output and tolerance settings; ``None``
        values are ignored so unset flags never clobber the file.
        """
        params = copy.deepcopy(dict(config.get("models", {}).get(model, {})))
        for key, value in (overrides or {}).items():
            if value is not None:
                params[key] = value
        paths = config.get("paths", {})
        output = config.get("output", {})
        tolerances = dict(config.get("tolerances", {}))
        if settings.get("tol") is not None:
            tolerances["stretch"] = settings["tol"]

        def pick(name, section, key, default):
            value = settings.get(name)
            return section.get(key, default) if value is None else value

        return cls(
            command=command,
            model=model,
            params=params,
            n_paths=int(pick("n_paths", paths, "n_paths", 200)),
            n_samples=int(pick("n_samples", paths, "n_samples", 512)),
            seed=int(pick("seed", paths, "seed", 0)),
            tolerances=tolerances,
            orbits=copy.deepcopy(dict(config.get("orbits", {}))),
            output_dir=str(pick("output_dir", output, "directory", "out")),
        )

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)
