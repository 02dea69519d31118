"""
Shared helpers: logging setup, thread caps, progress bars, ordered parallel map.

Usage:
    from stretchchaos.utils import log, setup_logging, max_workers, progress, parallel_map
"""
from __future__ import annotations

import logging
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Callable, Iterable, List, Optional, Sequence, TypeVar

from tqdm import tqdm

T = TypeVar("T")
R = TypeVar("R")

# --------------------------------------------------------------------------- #
# Logging
# --------------------------------------------------------------------------- #
LOGLEVEL = os.getenv("STRETCH_CHAOS_LOGLEVEL", "INFO").upper()
LOG_FORMAT = "%(asctime)s | %(levelname)-8s | %(name)s | %(message)s"
DATE_FORMAT = "%Y-%m-%d %H:%M:%S"

log = logging.getLogger("stretchchaos")


def setup_logging(level: Optional[str] = None, log_file: Optional[str] = None) -> None:
    """Install stderr (and optional file) handlers on the root logger.

    Only command-line entry points call this; library modules just log.
    """
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stderr)]
    if log_file:
        handlers.append(logging.FileHandler(log_file))
    logging.basicConfig(
        level=(level or LOGLEVEL).upper(),
        format=LOG_FORMAT,
        datefmt=DATE_FORMAT,
        handlers=handlers,
        force=True,
    )


# --------------------------------------------------------------------------- #
# Parallelism
# --------------------------------------------------------------------------- #
def max_workers() -> int:
    """Worker cap from STRETCH_CHAOS_THREADS, defaulting to min(4, cpu count)."""
    raw = os.getenv("STRETCH_CHAOS_THREADS")
    if raw:
        try:
            return max(1, int(raw))
        except ValueError:
            log.warning("Ignoring non-integer STRETCH_CHAOS_THREADS=%r", raw)
    return max(1, min(4, os.cpu_count() or 1))


def parallel_map(
    fn: Callable[[T], R],
    items: Sequence[T],
    workers: Optional[int] = None,
    desc: Optional[str] = None,
    show_progress: bool = False,
) -> List[R]:
    """Apply *fn* to *items* and return results in input order."""
    workers = max_workers() if workers is None else max(1, workers)
    if workers == 1 or len(items) <= 1:
        return [fn(item) for item in progress(items, desc=desc, enabled=show_progress)]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(progress(pool.map(fn, items), desc=desc, total=len(items), enabled=show_progress))


# --------------------------------------------------------------------------- #
# Progress bars
# --------------------------------------------------------------------------- #
def progress(
    iterable: Iterable[T],
    desc: Optional[str] = None,
    total: Optional[int] = None,
    enabled: bool = True,
) -> Iterable[T]:
    """tqdm wrapper that stays silent unless *enabled* and logging is at INFO or below."""
    disable = not enabled or not log.isEnabledFor(logging.INFO)
    return tqdm(iterable, desc=desc, total=total, disable=disable, leave=False, file=sys.stderr)
