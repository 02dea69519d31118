"""
Base class for report exporters.

All exporters inherit from BaseExporter and implement ``export()``.
"""
from abc import ABC, abstractmethod
from pathlib import Path
from typing import Any, Dict, Optional
import logging

from .. import __version__

logger = logging.getLogger(__name__)

SCHEMA = "sc-report/1"


class BaseExporter(ABC):
    """Abstract base class for writers of reports and plot data."""

    #: file suffix used when ``output_path`` is a directory
    suffix = ""

    def __init__(self, payload: Any, output_path: Optional[Path] = None, name: str = "report"):
        """
        Initialize the exporter.

        Args:
            payload: Data to write (mapping, rows or script fragments)
            output_path: Target file, or a directory to place ``<name><suffix>`` into
            name: Stem used when ``output_path`` is a directory
        """
        self.payload = payload
        self.output_path = Path(output_path) if output_path is not None else None
        self.name = name
        self.metadata = self._extract_metadata()

    def _extract_metadata(self) -> Dict[str, Any]:
        return {"schema": SCHEMA, "version": __version__}

    @abstractmethod
    def render(self) -> str:
        """
        Render the payload to text.

        Raises:
            NotImplementedError: If not implemented by subclass
        """
        raise NotImplementedError("Subclasses must implement render()")

    def validate(self) -> bool:
        """Check the payload before writing; logs and returns False when unusable."""
        if self.payload is None:
            logger.error("%s: nothing to export", self)
            return False
        return True

    def target(self) -> Path:
        if self.output_path is None:
            raise ValueError(f"{self} has no output path")
        if self.output_path.is_dir() or not self.output_path.suffix:
            return self.output_path / f"{self.name}{self.suffix}"
        return self.output_path

    def export(self) -> Path:
        """
        Write the rendered payload.

        Returns:
            Path to the generated file
        """
        if not self.validate():
            raise ValueError(f"{self}: invalid payload")
        path = self.target()
        path.parent.mkdir(parents=True, exist_ok=True)
        path.write_text(self.render(), encoding="utf-8")
        logger.info("Wrote %s", path)
        return path

    def __str__(self) -> str:
        return f"{self.__class__.__name__}({self.name})"

    def __repr__(self) -> str:
        return f"{self.__class__.__name__}(name={self.name!r}, output={self.output_path})"
