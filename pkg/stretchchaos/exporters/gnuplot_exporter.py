"""
gnuplot script text for the CSV plot data; nothing is rendered here.
"""
import logging
from pathlib import Path
from typing import List, Optional, Sequence, Tuple

from .base import BaseExporter

logger = logging.getLogger(__name__)


class GnuplotExporter(BaseExporter):
    """Script plotting ``(file, columns, title, style)`` layers of CSV data."""

    suffix = ".gp"

    def __init__(self, layers: Sequence[Tuple[str, str, str, str]], output_path: Optional[Path] = None,
                 name: str = "plot", title: str = "", terminal: str = "pngcairo size 1000,800"):
        super().__init__(list(layers), output_path, name)
        self.title = title
        self.terminal = terminal

    def validate(self) -> bool:
        if not self.payload:
            logger.error("%s: no layers to plot", self)
            return False
        return True

    def render(self) -> str:
        lines: List[str] = [
            f"set terminal {self.terminal}",
            f"set output '{self.name}.png'",
            "set datafile separator ','",
            "set key outside right",
            "set size ratio -1",
        ]
        if self.title:
            lines.append(f"set title \"{self.title}\"")
        plots = [f"'{path}' every ::1 using {cols} with {style} title \"{label}\""
                 for path, cols, label, style in self.payload]
        lines.append("plot " + ", \\\n     ".join(plots))
        return "\n".join(lines) + "\n"
