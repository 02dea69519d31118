import math

import numpy as np
import pytest

from stretchchaos.errors import ConfigError, CoveringError, OrbitNotFound
from stretchchaos.geometry import sample_test_paths
from stretchchaos.models import (
    CounterexampleParams,
    DuopolyParams,
    LiYorkeParams,
    LogisticParams,
    OlgParams,
    counterexample_geometry,
    counterexample_map,
    duopoly_geometry,
    duopoly_map,
    li_yorke_intervals,
    li_yorke_map,
    logistic_geometry,
    logistic_intervals,
    logistic_map,
    olg2d_map,
    olg_geometry,
    translation_example,
)
from stretchchaos.orbits import (
    NewtonSettings,
    PeriodicOrbitResult,
    chaos_certificate,
    covering_periodic_point_1d,
    feasible_seeds,
    flag_duplicates,
    follows,
    newton_periodic_point_2d,
    primitive_itineraries,
)
from stretchchaos.symdyn import SymbolSequence


@pytest.fixture
def logistic():
    params = LogisticParams(mu=4.5)
    return logistic_map(params), logistic_intervals(params.mu)


def test_period_three_point_of_the_logistic_map(logistic):
    f, intervals = logistic
    result = covering_periodic_point_1d(f, intervals, "011")
    assert result.itinerary_verified
    assert result.residual < 1e-12
    assert result.method == "covering_1d"
    x0, x1, x2 = (p[0] for p in result.orbit)
    assert x0 <= intervals[0][1]
    assert x1 >= intervals[1][0] and x2 >= intervals[1][0]
    assert f.iterate(np.array([x0]), 3)[0] == pytest.approx(x0, abs=1e-12)


def test_fixed_points_follow_their_intervals(logistic):
    f, intervals = logistic
    zero = covering_periodic_point_1d(f, intervals, "0")
    assert zero.point == (0.0,)
    one = covering_periodic_point_1d(f, intervals, "1")
    assert one.point[0] == pytest.approx(1 - 1 / 4.5, abs=1e-14)


def test_li_yorke_orbit_is_found_exactly():
    params = LiYorkeParams()
    result = covering_periodic_point_1d(li_yorke_map(params), li_yorke_intervals(params), "011")
    assert result.itinerary_verified
    assert result.residual == 0.0
    assert [p[0] for p in result.orbit] == [0.0, 0.5, 1.0]


def test_missing_covering_names_the_pair():
    params = LiYorkeParams()
    with pytest.raises(CoveringError) as info:
        covering_periodic_point_1d(li_yorke_map(params), li_yorke_intervals(params), "001")
    assert info.value.pair == (0, 1)


def test_primitive_itineraries():
    words = [str(w) for w in primitive_itineraries(2, 4)]
    assert words == ["0", "1", "01", "001", "011", "0001", "0011", "0111"]
    assert len(primitive_itineraries(2, 6)) == 23
    assert all(w.periodic for w in primitive_itineraries(3, 2))


def test_duplicate_orbits_are_flagged():
    a = PeriodicOrbitResult(SymbolSequence.parse("01"), (0.2,), 0.0, True, "covering_1d",
                            orbit=[(0.2,), (0.7,)])
    b = PeriodicOrbitResult(SymbolSequence.parse("10"), (0.7,), 0.0, True, "covering_1d",
                            orbit=[(0.7,), (0.2,)])
    c = PeriodicOrbitResult(SymbolSequence.parse("011"), (0.7,), 0.0, True, "covering_1d",
                            orbit=[(0.7,), (0.2,), (0.5,)])
    assert flag_duplicates([a, b, c], 1e-12) == 1
    assert b.duplicate_of == "01"
    assert c.duplicate_of is None


def test_newton_finds_the_interior_olg_fixed_point():
    params = OlgParams()
    _, regions = olg_geometry(params)
    result = newton_periodic_point_2d(olg2d_map(params), regions, "1")
    assert result.itinerary_verified
    assert result.residual < 1e-9
    x, y = result.point
    # fixed points satisfy y = g(x) and x = y (1 - 1/b)
    assert y == pytest.approx(2 * x, rel=1e-8)
    assert float(params.g(x)) == pytest.approx(2 * x, rel=1e-8)
    assert 1.0 < x < params.K


def test_corner_fixed_point_of_the_olg_map():
    params = OlgParams()
    _, regions = olg_geometry(params)
    result = newton_periodic_point_2d(olg2d_map(params), regions, "0")
    assert result.itinerary_verified
    assert result.residual < 1e-9
    assert result.point == pytest.approx((0.0, 0.0), abs=1e-9)


@pytest.fixture
def duopoly():
    params = DuopolyParams(alpha=1.05)
    _, regions, _ = duopoly_geometry(params)
    return duopoly_map(params), regions


def test_seeds_survive_every_prefix_of_a_long_itinerary(duopoly):
    mapping, regions = duopoly
    seeds = feasible_seeds(mapping, regions, SymbolSequence.parse("0111"))
    assert 0 < len(seeds) <= NewtonSettings().pool
    assert regions[0].near(seeds, 1e-3 * regions[0].bbox.diameter).all()


@pytest.mark.slow
def test_duopoly_periodic_points_up_to_period_four(duopoly):
    mapping, regions = duopoly
    for word in primitive_itineraries(2, 4):
        result = newton_periodic_point_2d(mapping, regions, word)
        assert result.itinerary_verified, str(word)
        assert result.residual < 1e-9
        on_word, orbit = follows(mapping, regions, word, np.array(result.point), eps=1e-9)
        assert on_word
        assert len(orbit) == len(word)


@pytest.mark.parametrize("values", [
    {"grid_density": 1},
    {"subdivision": 1},
    {"damping": []},
    {"damping": [1.0, 1.5]},
    {"fd_step": 0.0},
    {"pool": 10},
])
def test_newton_settings_are_validated(values):
    with pytest.raises(ConfigError):
        NewtonSettings.from_mapping(values)


def test_newton_settings_ignore_unrelated_keys():
    settings = NewtonSettings.from_mapping({"damping": [0.5], "fd_step": 1e-6, "max_period": 4})
    assert settings.damping == (0.5,)
    assert settings.to_dict()["fd_step"] == 1e-6
    assert settings.to_dict()["damping"] == [0.5]


def test_stretching_alone_does_not_give_a_fixed_point():
    example = translation_example()
    with pytest.raises(OrbitNotFound):
        newton_periodic_point_2d(example.map, [example.region], "0")


def test_logistic_certificate(logistic):
    f, intervals = logistic
    rect, regions = logistic_geometry(LogisticParams(mu=4.5))
    paths = sample_test_paths(rect, n_paths=8, n_samples=200)
    cert = chaos_certificate(f.embedded(), rect, regions, 4, paths, interval_map=f,
                             intervals=intervals)
    assert cert.status == "pass"
    assert [o.word for o in cert.orbits] == ["0", "1", "01", "001", "011", "0001", "0011", "0111"]
    assert not cert.failures and not cert.duplicates
    assert cert.entropy == pytest.approx(math.log(2))
    summary = cert.to_dict()
    assert summary["chaos_claim"] is True
    assert summary["settings"]["finder"] == "covering_1d"


def test_certificate_skips_orbits_when_stretching_fails():
    params = CounterexampleParams()
    rect, k0, k1 = counterexample_geometry(params)
    paths = sample_test_paths(rect, n_paths=8, n_samples=256)
    cert = chaos_certificate(counterexample_map(params).embedded(), rect, [k0, k1], 3, paths)
    assert cert.status == "fail"
    assert cert.orbits == []
    assert cert.to_dict()["chaos_claim"] is False
