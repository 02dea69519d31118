import numpy as np
import pytest

from stretchchaos.errors import RegionOverlapError, StretchError
from stretchchaos.geometry import Path, RegionPredicate, sample_test_paths
from stretchchaos.models import (
    CounterexampleParams,
    FunctionMap,
    LogisticParams,
    Twist1Params,
    Twist2Params,
    counterexample_geometry,
    counterexample_map,
    double_twist_params,
    logistic_geometry,
    logistic_map,
    translation_example,
    twist1_setup,
    twist2_setup,
)
from stretchchaos.stretching import (
    check_composition,
    check_stretch,
    composite_regions,
    crossing_count,
    crossing_counts,
    replay_witness,
)


@pytest.fixture
def logistic():
    rect, regions = logistic_geometry(LogisticParams(mu=4.5))
    mapping = logistic_map(LogisticParams(mu=4.5)).embedded()
    paths = sample_test_paths(rect, n_paths=16, n_samples=200, seed=1)
    return mapping, rect, regions, paths


def test_logistic_stretches_both_intervals(logistic):
    mapping, rect, regions, paths = logistic
    report = check_stretch(mapping, rect, rect, regions, paths, seed=1)
    assert report.status == "pass"
    assert report.crossing_number == 2
    assert report.n_paths == 16
    assert report.min_region_distance == pytest.approx(1 / 3, abs=0.05)
    k0 = report.region(0)
    assert k0.witnessed == 16
    assert {(w.entry, w.exit) for w in k0.witnesses} == {("left", "right")}
    assert {(w.entry, w.exit) for w in report.region(1).witnesses} == {("right", "left")}


def test_witnesses_replay_to_the_same_sides(logistic):
    mapping, rect, regions, paths = logistic
    report = check_stretch(mapping, rect, rect, regions, paths)
    tol = report.tolerances["tol"]
    for witness in report.region(1).witnesses[:4]:
        assert replay_witness(mapping, rect, paths[witness.path], witness, tol) == (witness.entry, witness.exit)


def test_default_tolerance_scales_with_the_target(logistic):
    mapping, rect, regions, paths = logistic
    report = check_stretch(mapping, rect, rect, regions, paths[:3])
    assert report.tolerances["tol"] == pytest.approx(1e-6 * np.sqrt(2))
    assert report.tolerances["side_band"] == pytest.approx(20 * report.tolerances["tol"])


def test_disconnected_region_is_a_negative_control():
    params = CounterexampleParams()
    rect, k0, k1 = counterexample_geometry(params)
    mapping = counterexample_map(params).embedded()
    paths = sample_test_paths(rect, n_paths=12, n_samples=256, seed=0)
    report = check_stretch(mapping, rect, rect, [k0, k1], paths)
    assert report.region(0).status == "pass"
    assert report.region(1).status == "fail"
    assert report.region(1).failed_paths == list(range(12))
    assert report.status == "fail"
    assert report.crossing_number == 1


def test_reoriented_target_is_stretched_onto():
    example = translation_example()
    paths = sample_test_paths(example.rect, n_paths=8, n_samples=256)
    report = check_stretch(example.map, example.rect, example.target, [example.region], paths)
    assert report.status == "pass"
    assert report.orientation.startswith("reoriented")


def test_regions_and_paths_are_required(logistic):
    mapping, rect, regions, paths = logistic
    with pytest.raises(StretchError):
        check_stretch(mapping, rect, rect, [], paths)
    with pytest.raises(StretchError):
        check_stretch(mapping, rect, rect, regions, [])
    with pytest.raises(StretchError):
        check_stretch(mapping, rect, rect, regions, paths, tol=0.0)


def test_overlapping_regions_are_rejected(logistic):
    mapping, rect, _, paths = logistic
    left = RegionPredicate.box(0.0, 0.6, 0.0, 1.0, 0, "L")
    right = RegionPredicate.box(0.4, 1.0, 0.0, 1.0, 1, "R")
    with pytest.raises(RegionOverlapError) as info:
        check_stretch(mapping, rect, rect, [left, right], paths)
    assert info.value.labels == (0, 1)


def test_crossing_count_of_a_zigzag(square):
    right = Path.segment([0.0, 0.2], [1.0, 0.4], n_samples=64, name="a")
    back = Path.segment([1.0, 0.4], [0.0, 0.6], n_samples=64, name="b")
    again = Path.segment([0.0, 0.6], [1.0, 0.8], n_samples=64, name="c")
    zigzag = right.glue(back).glue(again)
    assert crossing_count(None, square, right) == 1
    assert crossing_count(None, square, zigzag) == 3
    assert crossing_counts(None, square, [right, zigzag]) == [1, 3]


def test_logistic_image_of_a_fiber_crosses_twice(logistic):
    mapping, rect, _, paths = logistic
    assert crossing_count(mapping, rect, paths[0]) == 2


def test_composite_region_labels(logistic):
    mapping, rect, regions, _ = logistic
    composite, pairs = composite_regions(mapping, regions, regions)
    assert [r.label for r in composite] == [0, 1, 2, 3]
    assert pairs == {0: (0, 0), 1: (0, 1), 2: (1, 0), 3: (1, 1)}
    # f(0.05) = 0.21375 lies in K0; f(0.3) = 0.945 lies in K1
    assert composite[0].contains([0.05, 0.5])
    assert composite[1].contains([0.3, 0.5])
    assert not composite[0].contains([0.3, 0.5])


def test_composition_multiplies_crossings(logistic):
    mapping, rect, regions, paths = logistic
    report = check_composition(mapping, mapping, rect, rect, rect, regions, regions, paths[:8])
    assert report.status == "pass"
    assert report.crossing_number == 4
    assert report.to_dict()["pairs"] == {"0": [0, 0], "1": [0, 1], "2": [1, 0], "3": [1, 1]}


def test_interval_region_is_witnessed_on_curved_paths_too():
    params = CounterexampleParams()
    rect, k0, _ = counterexample_geometry(params)
    mapping = counterexample_map(params).embedded()
    paths = sample_test_paths(rect, n_paths=12, n_samples=128, seed=0)
    assert any(p.name.startswith("bezier") for p in paths)
    report = check_stretch(mapping, rect, rect, [k0], paths)
    assert report.status == "pass"
    assert sorted(w.path for w in report.region(0).witnesses) == list(range(12))
    for witness in report.region(0).witnesses:
        assert {witness.entry, witness.exit} == {"left", "right"}


def test_enlarging_a_stretched_region_keeps_it_stretched(logistic):
    mapping, rect, regions, paths = logistic
    larger = RegionPredicate.union_of([regions[0], RegionPredicate.box(0.0, 0.5, 0.0, 1.0)], label=0, name="K0+")
    small = check_stretch(mapping, rect, rect, regions[:1], paths)
    big = check_stretch(mapping, rect, rect, [larger], paths)
    assert small.status == "pass"
    assert big.status == "pass"


def test_fast_winding_image_is_resolved_between_samples(square):
    # every sample of the path maps outside the square, alternately left and right of it
    swing = FunctionMap(lambda p: np.column_stack([0.5 - 0.8 * np.cos(10 * np.pi * p[:, 0]), p[:, 1]]), "swing")
    path = Path.segment([0.0, 0.5], [1.0, 0.5], n_samples=11)
    images = swing.evaluate(path.points)
    assert not square.contains(images).any()
    assert crossing_count(swing, square, path) == 10


@pytest.mark.parametrize("build", [lambda: twist1_setup(Twist1Params()), lambda: twist2_setup(Twist2Params())],
                         ids=["twist1", "twist2"])
def test_linked_twist_crossings(build):
    setup = build()
    rect_a, rect_b = setup.geometry.rect_a, setup.geometry.rect_b
    paths_a = sample_test_paths(rect_a, n_paths=8, n_samples=256, seed=2)
    paths_b = sample_test_paths(rect_b, n_paths=8, n_samples=256, seed=2)
    whole_b = [rect_b.region(0, "B")]
    phi = check_stretch(setup.phi, rect_a, rect_b, setup.h_regions.regions, paths_a)
    psi = check_stretch(setup.psi, rect_b, rect_a, whole_b, paths_b)
    assert phi.status == "pass" and phi.crossing_number == 2
    assert psi.status == "pass" and psi.crossing_number == 1
    # boundary fibers map onto boundary arcs and still count as inside
    assert {0, 2} <= {w.path for w in psi.region(0).witnesses}
    both = check_composition(setup.phi, setup.psi, rect_a, rect_b, rect_a, setup.h_regions.regions,
                             whole_b, paths_a)
    assert both.status == "pass"
    assert both.crossing_number == 2
    assert len(both.regions) == 2


def test_double_twist_composes_to_four_regions():
    setup = twist1_setup(double_twist_params(), double=True)
    assert len(setup.h_regions.regions) == 2 and len(setup.k_regions.regions) == 2
    rect_a, rect_b = setup.geometry.rect_a, setup.geometry.rect_b
    paths = sample_test_paths(rect_a, n_paths=8, n_samples=256, seed=2)
    report = check_composition(setup.phi, setup.psi, rect_a, rect_b, rect_a, setup.h_regions.regions,
                               setup.k_regions.regions, paths)
    assert report.status == "pass"
    assert report.crossing_number == 4
    assert report.pairs == {0: (0, 0), 1: (0, 1), 2: (1, 0), 3: (1, 1)}
