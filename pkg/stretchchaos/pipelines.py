"""
Model pipelines behind ``verify``: conditions, geometry, stretching,
certificate and plot data for each supported model.

Each pipeline takes the merged ``RunConfig`` and returns a ``VerifyOutcome``;
the command line only writes files and turns the outcome into an exit code.
"""
from __future__ import annotations

import logging
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

from .config import RunConfig
from .errors import ConditionError, ConfigError, CoveringError, IntegrationError, OrbitNotFound
from .exporters import (
    BOUNDARY_HEADER,
    ITERATE_HEADER,
    PATH_HEADER,
    POINTS_HEADER,
    TRAJECTORY_HEADER,
    boundary_rows,
    iterate_rows,
    region_rows,
)
from .flows import (
    DuffingParams,
    SwitchingSystem,
    VolterraParams,
    duffing_scan,
    duffing_setup,
    integrate,
    poincare_orbit,
    volterra_setup,
)
from .geometry import OrientedRectangle, RegionPredicate, sample_test_paths
from .models import (
    ComposedMap,
    ConditionReport,
    CounterexampleParams,
    DuopolyParams,
    IntervalMap,
    LiYorkeParams,
    LogisticParams,
    OlgParams,
    PlanarMap,
    Twist1Params,
    Twist2Params,
    counterexample_geometry,
    counterexample_map,
    duopoly_conditions,
    duopoly_geometry,
    duopoly_map,
    li_yorke_intervals,
    li_yorke_map,
    logistic_geometry,
    logistic_intervals,
    logistic_map,
    logistic_second_iterate,
    olg2d_map,
    olg_conditions,
    olg_geometry,
    second_iterate_geometry,
    twist1_setup,
    twist2_setup,
)
from .models.domains import strip_region
from .orbits import (
    ChaosCertificate,
    NewtonSettings,
    chaos_certificate,
    covering_periodic_point_1d,
    flag_duplicates,
    newton_periodic_point_2d,
    primitive_itineraries,
)
from .stretching import (
    DEFAULT_MEMBERSHIP,
    StretchReport,
    check_composition,
    check_stretch,
    composite_regions,
)
from .symdyn import ItineraryResult, SymbolSequence, itinerary

logger = logging.getLogger(__name__)

EXIT_PASS = 0
EXIT_FAIL = 1
EXIT_BOUNDARY = 2
EXIT_INCONCLUSIVE = 3

PlotTable = Tuple[Tuple[str, ...], List[tuple]]
Interval = Tuple[float, float]


@dataclass
class VerifyOutcome:
    """Everything one ``verify`` run produced."""

    model: str
    conditions: Optional[ConditionReport] = None
    stretch: Optional[StretchReport] = None
    certificate: Optional[ChaosCertificate] = None
    details: Dict[str, Any] = field(default_factory=dict)
    plots: Dict[str, PlotTable] = field(default_factory=dict)

    @property
    def status(self) -> str:
        if self.conditions is not None and self.conditions.overall == "fails":
            return "fail"
        if self.conditions is not None and self.conditions.overall == "boundary":
            return "boundary"
        if self.certificate is not None:
            return self.certificate.status
        if self.stretch is not None:
            return self.stretch.status
        return "fail"

    @property
    def exit_code(self) -> int:
        return {"pass": EXIT_PASS, "boundary": EXIT_BOUNDARY,
                "inconclusive": EXIT_INCONCLUSIVE}.get(self.status, EXIT_FAIL)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "model": self.model,
            "status": self.status,
            "exit_code": self.exit_code,
            "conditions": None if self.conditions is None else self.conditions.to_dict(),
            "stretch": None if self.stretch is None else self.stretch.to_dict(),
            "certificate": None if self.certificate is None else self.certificate.to_dict(),
            "details": dict(self.details),
        }


# --------------------------------------------------------------------------- #
# Helpers
# --------------------------------------------------------------------------- #
def _params(cls, run: RunConfig):
    known = {k: v for k, v in run.params.items() if k in cls.__dataclass_fields__}
    try:
        return cls.from_mapping(known)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{run.model}: invalid parameters {known}: {exc}") from exc


def _max_period(run: RunConfig) -> int:
    return int(run.params.get("max_period", run.orbits.get("max_period", 6)))


def _paths(rect: OrientedRectangle, run: RunConfig, n_paths: Optional[int] = None):
    return sample_test_paths(rect, n_paths or run.n_paths, run.n_samples, run.seed)


def _plots(rects: Sequence[OrientedRectangle], regions: Sequence[RegionPredicate],
           mapping: Optional[PlanarMap], paths, n_images: int = 4) -> Dict[str, PlotTable]:
    plots: Dict[str, PlotTable] = {}
    for rect in rects:
        plots[f"boundary_{rect.name}"] = (BOUNDARY_HEADER, boundary_rows(rect))
    if regions:
        plots["regions"] = (POINTS_HEADER, region_rows(rects[0], regions))
    if paths:
        plots["test_path"] = (PATH_HEADER, paths[0].to_rows())
    if mapping is not None and paths:
        rows = []
        for i, path in enumerate(paths[:n_images]):
            images = mapping.evaluate(path.points)
            rows.extend((i, float(x), float(y)) for x, y in images if np.isfinite(x) and np.isfinite(y))
        plots["path_images"] = (POINTS_HEADER, rows)
    return plots


def _flow_plots(system: SwitchingSystem, certificate: Optional[ChaosCertificate], rect: OrientedRectangle,
                run: RunConfig, rel_tol: float, abs_tol: float) -> Dict[str, PlotTable]:
    """One period of trajectory and a run of Poincare iterates from a periodic point (or the chart centre)."""
    verified = [o for o in (certificate.orbits if certificate else []) if o.itinerary_verified]
    start = np.asarray(verified[0].point if verified else rect.param(0.5, 0.5)[0], dtype=float)
    plots: Dict[str, PlotTable] = {}
    try:
        trajectory = integrate(system, start, (0.0, system.period), rel_tol, abs_tol)
        plots["trajectory"] = (TRAJECTORY_HEADER, trajectory.to_rows())
    except IntegrationError as exc:
        logger.warning("no trajectory plot from %s: %s", tuple(start), exc)
    iterates = poincare_orbit(system, start, int(run.params.get("n_iterates", 20)), rel_tol, abs_tol)
    plots["poincare_iterates"] = (ITERATE_HEADER, iterate_rows(iterates[np.isfinite(iterates).all(axis=1)]))
    return plots


def grid_setting(params: Dict[str, Any], key: str, default: Sequence[float]) -> Tuple[float, ...]:
    """A list-valued model setting; a single number from the command line becomes a one-point grid."""
    value = params.get(key, default)
    if isinstance(value, (int, float)):
        return (float(value),)
    try:
        return tuple(float(v) for v in value)
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"{key} must be a number or a list of numbers, got {value!r}") from exc


def _tol(run: RunConfig) -> Optional[float]:
    value = run.tolerances.get("stretch")
    return None if value is None else float(value)


def _orbit_tol(run: RunConfig, key: str) -> float:
    return float(run.params.get("orbit_tol", run.tolerances.get(key, 1e-9)))


def membership_setting(run: RunConfig) -> float:
    return float(run.tolerances.get("membership", DEFAULT_MEMBERSHIP))


def _newton(run: RunConfig) -> NewtonSettings:
    """``orbits:`` settings, with ``grid_density`` also accepted as a model flag."""
    values = dict(run.orbits)
    if "grid_density" in run.params:
        values["grid_density"] = run.params["grid_density"]
    return NewtonSettings.from_mapping(values)


# --------------------------------------------------------------------------- #
# Interval maps
# --------------------------------------------------------------------------- #
def verify_logistic(run: RunConfig) -> VerifyOutcome:
    params = _params(LogisticParams, run)
    f = logistic_map(params)
    rect, regions = logistic_geometry(params)
    mapping = f.embedded()
    paths = _paths(rect, run)
    certificate = chaos_certificate(mapping, rect, regions, _max_period(run), paths, _tol(run),
                                    interval_map=f, intervals=list(logistic_intervals(params.mu)),
                                    orbit_tol=_orbit_tol(run, "covering"), membership=membership_setting(run),
                                    seed=run.seed)
    return VerifyOutcome("logistic", stretch=certificate.stretch, certificate=certificate,
                         details={"intervals": [list(i) for i in logistic_intervals(params.mu)]},
                         plots=_plots([rect], regions, mapping, paths))


def verify_logistic2(run: RunConfig) -> VerifyOutcome:
    params = _params(LogisticParams, run)
    rect, regions, info = second_iterate_geometry(params)
    f2 = logistic_map(params).power(2)
    mapping = f2.embedded()
    paths = _paths(rect, run)
    certificate = chaos_certificate(mapping, rect, regions, _max_period(run), paths, _tol(run),
                                    interval_map=f2, intervals=[info.J0, info.J1],
                                    orbit_tol=_orbit_tol(run, "covering"), iterate_power=2,
                                    membership=membership_setting(run), seed=run.seed)
    return VerifyOutcome("logistic2", stretch=certificate.stretch, certificate=certificate,
                         details={"second_iterate": info.to_dict(),
                                  "entropy_bound_F": info.entropy_bound},
                         plots=_plots([rect], regions, mapping, paths))


def verify_counterexample(run: RunConfig) -> VerifyOutcome:
    """Negative control: the disconnected region must fail while the interval passes."""
    params = _params(CounterexampleParams, run)
    rect, k0, k1 = counterexample_geometry(params)
    mapping = counterexample_map(params).embedded()
    paths = _paths(rect, run)
    report = check_stretch(mapping, rect, rect, [k0, k1], paths, _tol(run), seed=run.seed,
                           membership=membership_setting(run))
    details = {"per_region": {r.name: r.status for r in report.regions},
               "control_as_expected": report.region(0).passed and report.region(1).status == "fail"}
    return VerifyOutcome("counterexample", stretch=report, details=details,
                         plots=_plots([rect], [k0, k1], mapping, paths))


# --------------------------------------------------------------------------- #
# Planar maps
# --------------------------------------------------------------------------- #
def _with_conditions(model: str, conditions: ConditionReport,
                     build: Callable[[str], VerifyOutcome]) -> VerifyOutcome:
    """Run *build* unless a condition fails; boundary cases use the non-strict construction."""
    if conditions.overall == "fails":
        logger.info("%s: conditions fail (%s)", model, conditions.failing())
        return VerifyOutcome(model, conditions=conditions)
    mode = "strict" if conditions.overall == "holds_strict" else "non-strict"
    try:
        outcome = build(mode)
    except ConditionError as exc:
        logger.info("%s: construction refused: %s", model, exc)
        return VerifyOutcome(model, conditions=conditions, details={"refused": exc.condition})
    outcome.conditions = conditions
    return outcome


def verify_olg2d(run: RunConfig) -> VerifyOutcome:
    params = _params(OlgParams, run)

    def build(mode: str) -> VerifyOutcome:
        rect, regions = olg_geometry(params, mode=mode)
        mapping = olg2d_map(params)
        paths = _paths(rect, run)
        certificate = chaos_certificate(mapping, rect, regions, _max_period(run), paths, _tol(run),
                                        orbit_tol=_orbit_tol(run, "newton"),
                                        newton=_newton(run), membership=membership_setting(run), seed=run.seed)
        return VerifyOutcome("olg2d", stretch=certificate.stretch, certificate=certificate,
                             plots=_plots([rect], regions, mapping, paths))

    return _with_conditions("olg2d", olg_conditions(params), build)


def verify_duopoly(run: RunConfig) -> VerifyOutcome:
    params = _params(DuopolyParams, run)

    def build(mode: str) -> VerifyOutcome:
        rect, regions, segment = duopoly_geometry(params, mode=mode)
        mapping = duopoly_map(params)
        paths = _paths(rect, run)
        certificate = chaos_certificate(mapping, rect, regions, _max_period(run), paths, _tol(run),
                                        orbit_tol=_orbit_tol(run, "newton"),
                                        newton=_newton(run), membership=membership_setting(run), seed=run.seed)
        plots = _plots([rect], regions, mapping, paths)
        plots["segment_S"] = (POINTS_HEADER, [(0, float(x), float(y)) for x, y in segment])
        return VerifyOutcome("duopoly", stretch=certificate.stretch, certificate=certificate,
                             details={"P": params.P, "Q": params.Q}, plots=plots)

    return _with_conditions("duopoly", duopoly_conditions(params), build)


def _linked_twist(model: str, run: RunConfig, setup) -> VerifyOutcome:
    rect_a, rect_b = setup.geometry.rect_a, setup.geometry.rect_b
    regions_h = setup.h_regions.regions
    regions_k = setup.k_regions.regions if setup.k_regions is not None else [rect_b.region(0, "B")]
    paths = _paths(rect_a, run)
    tol = _tol(run)
    membership = membership_setting(run)
    first = check_stretch(setup.phi, rect_a, rect_b, regions_h, paths, tol, seed=run.seed,
                          membership=membership)
    second = check_stretch(setup.psi, rect_b, rect_a, regions_k, _paths(rect_b, run), tol,
                           seed=run.seed, membership=membership)
    report = check_composition(setup.phi, setup.psi, rect_a, rect_b, rect_a, regions_h, regions_k,
                               paths, tol, seed=run.seed, membership=membership)
    composed = ComposedMap([setup.phi, setup.psi])
    regions, _ = composite_regions(setup.phi, regions_h, regions_k)
    certificate = chaos_certificate(composed, rect_a, regions, _max_period(run), paths, tol,
                                    report=report, orbit_tol=_orbit_tol(run, "newton"),
                                    newton=_newton(run), membership=membership_setting(run), seed=run.seed)
    details = {
        "crossing_phi": first.crossing_number,
        "crossing_psi": second.crossing_number,
        "phi": first.to_dict(),
        "psi": second.to_dict(),
        "windings_h": list(setup.h_regions.windings),
        "annuli": setup.geometry.annuli,
    }
    return VerifyOutcome(model, stretch=report, certificate=certificate, details=details,
                         plots=_plots([rect_a, rect_b], regions_h, setup.phi, paths))


def verify_twist1(run: RunConfig) -> VerifyOutcome:
    params = _params(Twist1Params, run)
    return _linked_twist("twist1", run, twist1_setup(params, double=bool(run.params.get("double", False))))


def verify_twist2(run: RunConfig) -> VerifyOutcome:
    return _linked_twist("twist2", run, twist2_setup(_params(Twist2Params, run)))


# --------------------------------------------------------------------------- #
# Switched systems
# --------------------------------------------------------------------------- #
def verify_volterra(run: RunConfig) -> VerifyOutcome:
    params = _params(VolterraParams, run)
    p = run.params
    setup = volterra_setup(
        params,
        m1=int(p.get("m1", 2)),
        m2=int(p.get("m2", 1)),
        l_offsets=grid_setting(p, "l_offsets", (0.12, 0.5)),
        h_offsets=grid_setting(p, "h_offsets", (0.15, 0.5)),
        auto_times=bool(p.get("auto_times", True)),
        empirical=bool(p.get("empirical", False)),
        rel_tol=float(run.tolerances.get("flow_rtol", 1e-10)),
        abs_tol=float(run.tolerances.get("flow_atol", 1e-12)),
    )
    rect1, rect2 = setup.rect1, setup.rect2
    paths = _paths(rect1, run)
    tol = _tol(run)
    regions_h, regions_k = setup.windows_h.regions, setup.windows_k.regions
    report = check_composition(setup.psi0, setup.psi_mu, rect1, rect2, rect1, regions_h, regions_k,
                               paths, tol, seed=run.seed, membership=membership_setting(run))
    composed = ComposedMap([setup.psi0, setup.psi_mu], f"Psi[volterra](T={setup.params.period:.6g})")
    regions, _ = composite_regions(setup.psi0, regions_h, regions_k)
    certificate = chaos_certificate(composed, rect1, regions, _max_period(run), paths, tol,
                                    report=report, orbit_tol=_orbit_tol(run, "flow_orbit"),
                                    newton=_newton(run), membership=membership_setting(run), seed=run.seed)
    plots = _plots([rect1, rect2], regions_h, setup.psi0, paths)
    plots.update(_flow_plots(setup.system, certificate, rect1, run, setup.psi0.rel_tol, setup.psi0.abs_tol))
    return VerifyOutcome("volterra", stretch=report, certificate=certificate, details=setup.to_dict(),
                         plots=plots)


def verify_duffing(run: RunConfig) -> VerifyOutcome:
    params = _params(DuffingParams, run)
    p = run.params
    rel_tol = float(run.tolerances.get("flow_rtol", 1e-10))
    abs_tol = float(run.tolerances.get("flow_atol", 1e-12))
    m = int(p.get("m", 2))
    setup = duffing_setup(params, grid_setting(p, "eq_levels", (2.0, 2.5)),
                          grid_setting(p, "es_levels", (0.1, 1.9)), rel_tol, abs_tol)
    scan = duffing_scan(setup=setup, rq_values=grid_setting(p, "rq_grid", (150.0, 200.0, 250.0, 300.0)),
                        rs_values=grid_setting(p, "rs_grid", (1.2, 1.6, 2.0)), m=m,
                        n_paths=int(p.get("scan_paths", 8)), n_samples=run.n_samples, seed=run.seed,
                        tol=_tol(run), rel_tol=rel_tol, abs_tol=abs_tol, membership=membership_setting(run))
    plots = _plots([setup.rect1, setup.rect2], [], None, [])
    if not scan["accepted"]:
        logger.info("duffing: no (rq, rs) pair on the grid certifies %d-fold stretching", m)
        return VerifyOutcome("duffing", details={"scan": scan, "setup": setup.to_dict()}, plots=plots)

    rq, rs = scan["accepted"][0]
    chosen = setup.with_times(rq, rs, rel_tol, abs_tol)
    windows = chosen.windows()
    paths = _paths(chosen.rect1, run)
    report = check_composition(chosen.psi_q, chosen.psi_s, chosen.rect1, chosen.rect2, chosen.rect1,
                               windows.regions, [chosen.rect2.region(0, "R2")], paths, _tol(run),
                               seed=run.seed, membership=membership_setting(run))
    composed = ComposedMap([chosen.psi_q, chosen.psi_s], f"Psi[duffing](rq={rq:g},rs={rs:g})")
    regions, _ = composite_regions(chosen.psi_q, windows.regions, [chosen.rect2.region(0, "R2")])
    certificate = chaos_certificate(composed, chosen.rect1, regions, _max_period(run), paths, _tol(run),
                                    report=report, orbit_tol=_orbit_tol(run, "flow_orbit"),
                                    newton=_newton(run), membership=membership_setting(run), seed=run.seed)
    details = {"scan": scan, "chosen": {"rq": rq, "rs": rs}, "windings": list(windows.windings),
               "setup": chosen.to_dict()}
    plots.update(_plots([chosen.rect1], windows.regions, chosen.psi_q, paths))
    plots.update(_flow_plots(chosen.system, certificate, chosen.rect1, run, rel_tol, abs_tol))
    return VerifyOutcome("duffing", stretch=report, certificate=certificate, details=details, plots=plots)


PIPELINES: Dict[str, Callable[[RunConfig], VerifyOutcome]] = {
    "logistic": verify_logistic,
    "logistic2": verify_logistic2,
    "olg2d": verify_olg2d,
    "duopoly": verify_duopoly,
    "counterexample": verify_counterexample,
    "twist1": verify_twist1,
    "twist2": verify_twist2,
    "volterra": verify_volterra,
    "duffing": verify_duffing,
}


def run_pipeline(run: RunConfig) -> VerifyOutcome:
    try:
        pipeline = PIPELINES[run.model]
    except KeyError:
        raise ConfigError(f"unknown model {run.model!r}; choose from {sorted(PIPELINES)}") from None
    logger.info("verify %s with %s", run.model, run.params)
    outcome = pipeline(run)
    logger.info("verify %s: %s (exit %d)", run.model, outcome.status, outcome.exit_code)
    return outcome


# --------------------------------------------------------------------------- #
# Orbit and itinerary commands
# --------------------------------------------------------------------------- #
def _planar_geometry(run: RunConfig) -> Tuple[PlanarMap, List[RegionPredicate]]:
    if run.model == "olg2d":
        params = _params(OlgParams, run)
        mode = "strict" if olg_conditions(params).overall == "holds_strict" else "non-strict"
        return olg2d_map(params), olg_geometry(params, mode=mode)[1]
    if run.model == "duopoly":
        params = _params(DuopolyParams, run)
        mode = "strict" if duopoly_conditions(params).overall == "holds_strict" else "non-strict"
        return duopoly_map(params), duopoly_geometry(params, mode=mode)[1]
    raise ConfigError(f"no planar geometry for model {run.model!r}")


def _interval_problem(run: RunConfig) -> Tuple[IntervalMap, List[Interval]]:
    if run.model == "logistic":
        params = _params(LogisticParams, run)
        return logistic_map(params), list(logistic_intervals(params.mu))
    if run.model == "logistic2":
        info = logistic_second_iterate(_params(LogisticParams, run))
        return logistic_map(LogisticParams(info.mu)).power(2), [info.J0, info.J1]
    if run.model == "li_yorke":
        params = _params(LiYorkeParams, run)
        return li_yorke_map(params), li_yorke_intervals(params)
    raise ConfigError(f"no covering intervals for model {run.model!r}")


ORBIT_MODELS = ("logistic", "logistic2", "li_yorke", "olg2d", "duopoly")


def orbit_search(run: RunConfig, word_text: Optional[str] = None) -> Dict[str, Any]:
    """Periodic points for one itinerary, or every primitive one up to ``max_period``."""
    if run.model not in ORBIT_MODELS:
        raise ConfigError(f"orbit supports {list(ORBIT_MODELS)}, not {run.model!r}")
    if run.model in ("olg2d", "duopoly"):
        mapping, regions = _planar_geometry(run)
        m, tol = len(regions), _orbit_tol(run, "newton")

        def find(word):
            return newton_periodic_point_2d(mapping, regions, word, _newton(run), tol)
    else:
        f, intervals = _interval_problem(run)
        m, tol = len(intervals), _orbit_tol(run, "covering")

        def find(word):
            return covering_periodic_point_1d(f, intervals, word, tol)

    words = ([SymbolSequence.parse(word_text, m=max(m, 2))] if word_text
             else primitive_itineraries(m, _max_period(run)))
    orbits, failures = [], []
    for word in words:
        try:
            orbits.append(find(word))
        except (CoveringError, OrbitNotFound) as exc:
            failure = {"itinerary": str(word), "error": type(exc).__name__, "message": str(exc)}
            if isinstance(exc, CoveringError):
                failure["pair"] = list(exc.pair)
            failures.append(failure)
    flag_duplicates(orbits, tol)
    return {"model": run.model, "orbits": orbits, "failures": failures, "orbit_tol": tol,
            "all_verified": not failures and all(o.itinerary_verified for o in orbits)}


def itinerary_run(run: RunConfig, z0: Sequence[float], n: int) -> ItineraryResult:
    """Symbols of the first *n* iterates of *z0*; interval maps act on ``(x, y)`` through ``x``."""
    if run.model in ("olg2d", "duopoly"):
        mapping, regions = _planar_geometry(run)
    elif run.model in ("logistic", "logistic2", "li_yorke"):
        f, intervals = _interval_problem(run)
        mapping = f.embedded()
        regions = [strip_region(lo, hi, i, f"I{i}") for i, (lo, hi) in enumerate(intervals)]
    else:
        raise ConfigError(f"itinerary supports {list(ORBIT_MODELS)}, not {run.model!r}")
    band = float(run.tolerances.get("itinerary_band", 1e-9))
    result = itinerary(mapping, regions, z0, n, band)
    logger.info("itinerary of %s under %s: %s", list(z0), run.model, result)
    return result
