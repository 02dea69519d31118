import pytest

from stretchchaos.config import DEFAULTS, RunConfig
from stretchchaos.errors import ConfigError
from stretchchaos.pipelines import (
    EXIT_BOUNDARY,
    EXIT_FAIL,
    EXIT_PASS,
    grid_setting,
    itinerary_run,
    orbit_search,
    run_pipeline,
)


def run_config(model, command="verify", **overrides):
    return RunConfig.build(DEFAULTS, command, model, overrides, n_paths=10, n_samples=128, seed=3)


def test_logistic_passes_with_a_certificate():
    outcome = run_pipeline(run_config("logistic", max_period=3))
    assert outcome.status == "pass"
    assert outcome.exit_code == EXIT_PASS
    assert outcome.stretch.crossing_number == 2
    assert [o.word for o in outcome.certificate.orbits] == ["0", "1", "01", "001", "011"]
    assert {"boundary_I^2", "regions", "test_path", "path_images"} <= set(outcome.plots)
    assert outcome.to_dict()["status"] == "pass"


def test_counterexample_is_a_negative_control():
    outcome = run_pipeline(run_config("counterexample"))
    assert outcome.status == "fail"
    assert outcome.exit_code == EXIT_FAIL
    assert outcome.details["per_region"] == {"K0": "pass", "K1": "fail"}
    assert outcome.details["control_as_expected"]


def test_duopoly_at_the_threshold_is_a_boundary_case():
    outcome = run_pipeline(run_config("duopoly", alpha=26.0 / 27.0, max_period=1))
    assert outcome.conditions.overall == "boundary"
    assert outcome.status == "boundary"
    assert outcome.exit_code == EXIT_BOUNDARY


def test_olg_with_a_small_capital_bound_fails_its_conditions():
    outcome = run_pipeline(run_config("olg2d", K=7.0))
    assert outcome.status == "fail"
    assert outcome.stretch is None
    assert "K < M*(1-1/b)" in outcome.conditions.failing()


def test_olg_stretches_across_two_regions():
    outcome = run_pipeline(run_config("olg2d", max_period=1))
    assert outcome.conditions.overall == "holds_strict"
    assert outcome.stretch.passed
    assert outcome.stretch.crossing_number == 2
    assert outcome.status == "pass"
    orbits = {o.word: o for o in outcome.certificate.orbits}
    assert set(orbits) == {"0", "1"}
    assert all(o.itinerary_verified and o.residual < 1e-9 for o in orbits.values())


def test_reports_carry_the_membership_tolerance():
    config = dict(DEFAULTS, tolerances=dict(DEFAULTS["tolerances"], membership=1e-10))
    outcome = run_pipeline(RunConfig.build(config, "verify", "counterexample", n_paths=10, n_samples=128, seed=3))
    assert outcome.stretch.tolerances["membership"] == 1e-10
    assert outcome.details["control_as_expected"]


def test_linked_twist_pipeline():
    outcome = run_pipeline(run_config("twist1", max_period=1))
    assert outcome.details["crossing_phi"] == 2
    assert outcome.details["crossing_psi"] == 1
    assert outcome.stretch.passed
    assert outcome.stretch.crossing_number == 2


@pytest.mark.slow
def test_duopoly_passes_with_orbits_up_to_period_four():
    outcome = run_pipeline(run_config("duopoly", max_period=4))
    assert outcome.conditions.overall == "holds_strict"
    assert outcome.status == "pass"
    assert len(outcome.certificate.orbits) == 8
    assert max(o.residual for o in outcome.certificate.orbits) < 1e-9


def test_unknown_model():
    with pytest.raises(ConfigError):
        run_pipeline(run_config("henon"))


def test_invalid_parameters_are_config_errors():
    with pytest.raises(ConfigError):
        run_pipeline(run_config("logistic", mu="high"))


def test_orbit_search_over_primitive_words():
    result = orbit_search(run_config("li_yorke", command="orbit", max_period=3))
    assert [o.word for o in result["orbits"]] == ["1", "01", "011"]
    assert [f["itinerary"] for f in result["failures"]] == ["0", "001"]
    assert not result["all_verified"]


def test_orbit_search_rejects_flows():
    with pytest.raises(ConfigError):
        orbit_search(run_config("volterra", command="orbit"))


def test_itinerary_of_an_interval_map():
    result = itinerary_run(run_config("logistic", command="itinerary"), (1.0, 0.5), 4)
    assert str(result) == "1000"


@pytest.mark.slow
def test_volterra_pipeline():
    outcome = run_pipeline(run_config("volterra", max_period=1))
    assert outcome.stretch.passed
    assert outcome.stretch.crossing_number == 2
    assert outcome.details["windows_H"] and outcome.details["windows_K"]
    assert outcome.details["empirical_twist_times"] == {}
    assert outcome.details["alpha"] > 0
    assert {"trajectory", "poincare_iterates"} <= set(outcome.plots)
    assert outcome.plots["trajectory"][0] == ("t", "x", "y", "phase", "energy")


@pytest.mark.slow
def test_duffing_pipeline_reports_its_scan():
    outcome = run_pipeline(run_config("duffing", max_period=1, rq_grid=[150.0], rs_grid=[1.6],
                                      scan_paths=4))
    scan = outcome.details["scan"]
    assert len(scan["cells"]) == 1
    if scan["accepted"]:
        assert outcome.details["chosen"] == {"rq": 150.0, "rs": 1.6}
        assert outcome.stretch is not None
        assert outcome.status in ("pass", "inconclusive")
    else:
        assert outcome.stretch is None
        assert outcome.status == "fail"
        assert outcome.exit_code == EXIT_FAIL


def test_grid_settings_accept_single_numbers():
    assert grid_setting({"rq_grid": 150.0}, "rq_grid", (1.0,)) == (150.0,)
    assert grid_setting({}, "rs_grid", [1.2, 1.6]) == (1.2, 1.6)
    with pytest.raises(ConfigError):
        grid_setting({"rs_grid": "fast"}, "rs_grid", ())
