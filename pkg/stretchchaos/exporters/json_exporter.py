"""
Versioned JSON reports.

Keys are sorted, floats are written with their round-trip ``repr`` (17
significant digits at most, exact) and non-finite floats become strings, so
identical runs produce byte-identical files.
"""
import dataclasses
import json
import logging
import math
from pathlib import Path
from typing import Any, Dict, Mapping, Optional

import numpy as np

from .base import BaseExporter

logger = logging.getLogger(__name__)


def to_jsonable(obj: Any) -> Any:
    """Plain JSON types from reports, numpy scalars/arrays, tuples and dataclasses."""
    if hasattr(obj, "to_dict"):
        return to_jsonable(obj.to_dict())
    if dataclasses.is_dataclass(obj) and not isinstance(obj, type):
        return to_jsonable(dataclasses.asdict(obj))
    if isinstance(obj, Mapping):
        return {str(k): to_jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [to_jsonable(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [to_jsonable(v) for v in obj.tolist()]
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    if isinstance(obj, (float, np.floating)):
        value = float(obj)
        if math.isfinite(value):
            return value
        return "nan" if math.isnan(value) else ("inf" if value > 0 else "-inf")
    if obj is None or isinstance(obj, str):
        return obj
    return str(obj)


def dumps(payload: Any) -> str:
    return json.dumps(to_jsonable(payload), sort_keys=True, indent=2, allow_nan=False) + "\n"


class JSONExporter(BaseExporter):
    """Write one command's report wrapped in the schema envelope."""

    suffix = ".json"

    def __init__(self, payload: Mapping[str, Any], output_path: Optional[Path] = None,
                 name: str = "report", command: str = "", config: Optional[Mapping[str, Any]] = None):
        super().__init__(payload, output_path, name)
        self.command = command
        self.config = dict(config or {})

    def validate(self) -> bool:
        if not isinstance(self.payload, Mapping):
            logger.error("%s: report must be a mapping, got %s", self, type(self.payload).__name__)
            return False
        return True

    def envelope(self) -> Dict[str, Any]:
        out = dict(self.metadata)
        out.update({
            "command": self.command,
            "config": self.config,
            "seed": self.config.get("seed"),
            "tolerances": self.config.get("tolerances", {}),
        })
        out.update(self.payload)
        return out

    def render(self) -> str:
        return dumps(self.envelope())
