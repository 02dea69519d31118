"""
Switching-time scans for the piecewise-forced Duffing equation.

The interval of admissible times for each phase is not known in closed
form, so a grid of ``(rq, rs)`` pairs is tested instead: a pair is accepted
when the ``Eq`` phase takes every sampled path of ``R1`` at least *m* times
across ``R2`` and the ``Es`` phase takes every sampled path of ``R2`` across
``R1``. The two counts depend on one duration each, so they are computed
per axis and combined.
"""
from __future__ import annotations

import logging
from typing import Any, Dict, List, Optional, Sequence

from ..geometry import sample_test_paths
from ..stretching import DEFAULT_MEMBERSHIP, crossing_counts
from ..utils import progress
from .integrate import ATOL, RTOL, PhaseMap
from .setups import DuffingSetup, duffing_setup
from .systems import DuffingParams, DuffingPhase

logger = logging.getLogger(__name__)

DEFAULT_RQ = (150.0, 200.0, 250.0, 300.0)
DEFAULT_RS = (1.2, 1.6, 2.0)


def _axis_counts(phase: DuffingPhase, times: Sequence[float], rect_b, paths, tol,
                 rel_tol: float, abs_tol: float, membership: float, desc: str) -> Dict[float, List[int]]:
    counts = {}
    for t in progress(list(times), desc=desc):
        phase_map = PhaseMap(phase, t, rel_tol, abs_tol, map_id=f"{phase.name}(t={t:g})")
        counts[float(t)] = crossing_counts(phase_map, rect_b, paths, tol, membership)
        logger.debug("%s: t=%g crossings %s", phase.name, t, counts[float(t)])
    return counts


def duffing_scan(
    params: Optional[DuffingParams] = None,
    rq_values: Sequence[float] = DEFAULT_RQ,
    rs_values: Sequence[float] = DEFAULT_RS,
    m: int = 2,
    n_paths: int = 8,
    n_samples: int = 256,
    seed: int = 0,
    tol: Optional[float] = None,
    setup: Optional[DuffingSetup] = None,
    rel_tol: float = RTOL,
    abs_tol: float = ATOL,
    membership: float = DEFAULT_MEMBERSHIP,
) -> Dict[str, Any]:
    """Grid of crossing counts over ``rq_values x rs_values``.

    Returns a JSON-ready mapping with one cell per pair (minimum crossing
    counts of both phases and the acceptance flag) and the list of accepted
    pairs.
    """
    setup = setup or duffing_setup(params, rel_tol=rel_tol, abs_tol=abs_tol)
    params = setup.params
    paths1 = sample_test_paths(setup.rect1, n_paths, n_samples, seed)
    paths2 = sample_test_paths(setup.rect2, n_paths, n_samples, seed + 1)
    q_counts = _axis_counts(DuffingPhase(params, "q"), rq_values, setup.rect2, paths1, tol,
                            rel_tol, abs_tol, membership, "scan rq")
    s_counts = _axis_counts(DuffingPhase(params, "s"), rs_values, setup.rect1, paths2, tol,
                            rel_tol, abs_tol, membership, "scan rs")

    cells = []
    accepted = []
    for rq, counts_q in q_counts.items():
        for rs, counts_s in s_counts.items():
            min_q, min_s = min(counts_q), min(counts_s)
            ok = min_q >= m and min_s >= 1
            cells.append({"rq": rq, "rs": rs, "min_crossings_q": min_q, "min_crossings_s": min_s,
                          "accepted": ok})
            if ok:
                accepted.append([rq, rs])
    logger.info("Duffing scan: %d of %d (rq, rs) pairs certify %d-fold stretching",
                len(accepted), len(cells), m)
    return {
        "params": {"k": params.k, "q": params.q, "s": params.s},
        "m": m,
        "n_paths": n_paths,
        "n_samples": n_samples,
        "seed": seed,
        "rq": [float(v) for v in rq_values],
        "rs": [float(v) for v in rs_values],
        "cells": cells,
        "accepted": accepted,
        "setup": setup.to_dict(),
    }
