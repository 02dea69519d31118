import math

import numpy as np
import pytest

from stretchchaos.errors import ConditionError, ConfigError, DomainError, GeometryError
from stretchchaos.models import (
    DuopolyParams,
    LiYorkeParams,
    LogisticParams,
    OlgAltParams,
    OlgParams,
    Twist1Params,
    Twist2Params,
    build_model,
    covering_matrix,
    duopoly_conditions,
    duopoly_geometry,
    eval_model,
    li_yorke_intervals,
    li_yorke_map,
    logistic_intervals,
    logistic_second_iterate,
    olg_alt_geometry,
    olg_conditions,
    olg_geometry,
    twist_geometry,
)


def test_olg_hump_maximum():
    params = OlgParams()
    assert params.M == pytest.approx(13.48474370, abs=1e-7)
    assert float(params.g(1.0)) == pytest.approx(params.M, rel=1e-14)


def test_olg_default_conditions_hold_strictly():
    report = olg_conditions(OlgParams())
    assert report.overall == "holds_strict"
    assert report.values["K"] == 6.0
    assert report["b*g(K) <= K"].margin > 0


def test_olg_condition_failure_is_named():
    params = OlgParams(K=7.0)
    report = olg_conditions(params)
    assert report.overall == "fails"
    assert report.failing() == ["K < M*(1-1/b)"]
    with pytest.raises(ConditionError) as info:
        olg_geometry(params)
    assert info.value.condition == "K < M*(1-1/b)"


def test_duopoly_first_condition_is_a_boundary_case():
    report = duopoly_conditions(DuopolyParams(alpha=26 / 27))
    first = report["a-2c1+c2 > 26/(3alpha)"]
    assert first.left == pytest.approx(9.0)
    assert first.right == pytest.approx(9.0)
    assert first.boundary and not first.holds
    assert report.overall == "boundary"
    assert report.failing("strict") == ["a-2c1+c2 > 26/(3alpha)"]
    assert report.failing("non-strict") == []


def test_duopoly_default_conditions():
    params = DuopolyParams()
    report = duopoly_conditions(params)
    assert report.overall == "holds_strict"
    assert params.P == pytest.approx((13 - 10 - 1 / 1.05) / 1.5)
    assert params.Q == pytest.approx(5.0)
    rect, regions, segment = duopoly_geometry(params)
    assert [r.label for r in regions] == [0, 1]
    assert segment[:, 1].min() == pytest.approx(params.P)
    assert rect.contains(segment).all()


def test_logistic_intervals_are_preimages_of_one():
    (a0, a1), (b0, b1) = logistic_intervals(4.5)
    root = math.sqrt(1 - 4 / 4.5)
    assert (a0, b1) == (0.0, 1.0)
    assert a1 == pytest.approx((1 - root) / 2)
    assert b0 == pytest.approx((1 + root) / 2)
    assert 4.5 * a1 * (1 - a1) == pytest.approx(1.0)
    with pytest.raises(ConditionError):
        logistic_intervals(4.0)


def test_logistic_second_iterate_covers_at_3_88():
    info = logistic_second_iterate(LogisticParams(mu=3.88))
    assert info.covers
    assert info.f2_half <= info.x_minus
    assert info.f2_crit >= info.x_plus
    assert info.entropy_bound == pytest.approx(math.log(2) / 2)
    assert not logistic_second_iterate(LogisticParams(mu=3.2)).covers


def test_li_yorke_covering_matrix():
    params = LiYorkeParams()
    f = li_yorke_map(params)
    assert f(np.array([0.0, 0.5, 1.0])).tolist() == [0.5, 1.0, 0.0]
    matrix = covering_matrix(f, li_yorke_intervals(params))
    assert matrix.entries.tolist() == [[0, 1], [1, 1]]


def test_li_yorke_rejects_unordered_points():
    with pytest.raises(ConfigError):
        LiYorkeParams(a=0.0, b=1.0, c=0.5)


def test_scalar_evaluation_outside_the_domain():
    with pytest.raises(DomainError):
        eval_model("logistic", {"mu": 4.5}, 1.5)
    with pytest.raises(DomainError):
        eval_model("olg2d", {}, [-1.0, 2.0])
    assert eval_model("logistic", {"mu": 4.0}, 0.5) == pytest.approx(1.0)


def test_batched_evaluation_marks_undefined_rows_with_nan():
    f = build_model("duopoly", {})
    out = f.evaluate(np.array([[1.0, 2.0], [-1.0, 2.0]]))
    assert np.isfinite(out[0]).all()
    assert np.isnan(out[1]).all()


def test_parameter_mappings():
    assert OlgParams.from_mapping({"mu": "70"}).mu == 70.0
    with pytest.raises(ConfigError):
        OlgParams.from_mapping({"gamma": 1})
    with pytest.raises(ConfigError):
        build_model("henon", {})
    with pytest.raises(ConfigError):
        OlgParams(b=1.0)


def test_olg1d_peaks_at_one():
    assert eval_model("olg1d", {"mu": 20.0}, 1.0) == pytest.approx(20.0 / math.e, rel=1e-14)
    with pytest.raises(DomainError):
        eval_model("olg1d", {}, -0.5)


def test_alternative_olg_region_is_bounded_by_the_graph_of_bg():
    params = OlgAltParams()
    rect = olg_alt_geometry(params)
    bg = params.base().g
    for side in ("left", "right"):
        pts = rect.side_samples(side)
        expected = params.b * bg(np.clip(pts[:, 0], 0.0, None))
        np.testing.assert_allclose(pts[:, 1], expected, rtol=1e-12, atol=1e-12)
    up = rect.side_samples("up")
    np.testing.assert_allclose(up[:, 1], params.nu * up[:, 0] + params.d, rtol=1e-12)
    down = rect.side_samples("down")
    np.testing.assert_allclose(down[:, 0], down[:, 1], atol=1e-12)
    assert rect.contains(rect.param(0.5, 0.5)).all()


def test_twist1_lenses_have_sides_on_the_left_annulus():
    params = Twist1Params()
    geo = twist_geometry(1, params)
    assert (geo.rect_a.name, geo.rect_b.name) == ("A", "B")
    assert len(geo.annuli) == 2
    centre = np.array([-params.r, 0.0])
    left = np.linalg.norm(geo.rect_a.side_samples("left") - centre, axis=1)
    right = np.linalg.norm(geo.rect_a.side_samples("right") - centre, axis=1)
    np.testing.assert_allclose(left, params.p1, rtol=1e-9)
    np.testing.assert_allclose(right, params.p2, rtol=1e-9)
    assert geo.rect_a.contains(geo.rect_a.param(0.5, 0.5)).all()
    assert geo.rect_b.contains(geo.rect_b.param(0.5, 0.5)).all()


def test_twist2_geometry_and_unknown_example():
    geo = twist_geometry(2, Twist2Params())
    assert (geo.rect_a.name, geo.rect_b.name) == ("A", "B")
    with pytest.raises(ValueError):
        twist_geometry(3, Twist1Params())


def test_twist1_rejects_disjoint_annuli():
    with pytest.raises(GeometryError):
        twist_geometry(1, Twist1Params(r=7.0))
