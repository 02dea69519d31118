import math

import numpy as np
import pytest

from stretchchaos.errors import ConfigError, DomainError, FlowError, GeometryError, IntegrationError
from stretchchaos.flows import (
    DuffingParams,
    DuffingPhase,
    PhaseMap,
    PoincareMap,
    SwitchingSystem,
    VolterraParams,
    VolterraPhase,
    duffing_linked_rects,
    duffing_setup,
    duffing_system,
    energy_drift,
    first_integral,
    integrate,
    linked_annuli,
    orbit_period,
    poincare,
    poincare_orbit,
    reference_point,
    rotation_number,
    switching_thresholds,
    volterra_system,
)
from stretchchaos.flows.annuli import LINK_ORDER
from stretchchaos.models import ComposedMap


@pytest.fixture
def e0():
    return VolterraPhase(VolterraParams(), harvested=False)


@pytest.fixture
def emu():
    return VolterraPhase(VolterraParams(), harvested=True)


# --------------------------------------------------------------------------- #
# Phases
# --------------------------------------------------------------------------- #
def test_volterra_minima(e0, emu):
    assert e0.center == (1.0, 1.0)
    assert e0.chi == pytest.approx(2.0, abs=1e-15)
    assert emu.center == (1.5, 0.5)
    assert emu.chi == pytest.approx(1.5 - 1.5 * math.log(1.5) + 0.5 - 0.5 * math.log(0.5))


def test_first_integral_domain(e0):
    assert first_integral(e0, (1.0, 1.0)) == pytest.approx(2.0)
    with pytest.raises(DomainError):
        first_integral(e0, (-1.0, 1.0))


def test_volterra_harvesting_must_stay_below_a():
    with pytest.raises(ConfigError):
        VolterraParams(mu=1.0)
    assert VolterraParams(mu=0.0).a_mu == 1.0


def test_duffing_centers():
    params = DuffingParams()
    assert DuffingPhase(params, "q").center == (0.4, 0.0)
    assert DuffingPhase(params, "s").center is None
    with pytest.raises(ValueError):
        DuffingPhase(params, "x")


def test_switching_schedule_stops_at_switch_times(e0, emu):
    system = SwitchingSystem(((e0, 1.0), (emu, 2.0)))
    pieces = [(p.name, a, b) for p, a, b in system.schedule(0.0, 4.0)]
    assert pieces == [("E0", 0.0, 1.0), ("Emu", 1.0, 3.0), ("E0", 3.0, 4.0)]
    back = system.reversed()
    assert [p.name for p, _ in back.phases] == ["Emu", "E0"]
    assert all(p.reverse for p, _ in back.phases)
    with pytest.raises(FlowError):
        SwitchingSystem(((e0, 0.0),))


def test_switching_thresholds():
    alpha, beta = switching_thresholds(2, 1, 6.3, 6.5, 7.0, 7.4)
    assert alpha == pytest.approx(5.5 * 6.3 * 6.5 / 0.2)
    assert beta == pytest.approx(4.5 * 7.0 * 7.4 / 0.4)
    with pytest.raises(FlowError):
        switching_thresholds(2, 1, 6.5, 6.5, 7.0, 7.4)
    with pytest.raises(FlowError):
        switching_thresholds(0, 1, 6.3, 6.5, 7.0, 7.4)


def test_duffing_rectangle_corners_lie_on_their_levels():
    params = DuffingParams()
    rect1, rect2 = duffing_linked_rects(params, (2.0, 2.5), (0.1, 1.9))
    q, s = DuffingPhase(params, "q"), DuffingPhase(params, "s")
    corners = rect1.param(np.array([0.0, 1.0, 0.0, 1.0]), np.array([0.0, 0.0, 1.0, 1.0]))
    assert q.energy(corners) == pytest.approx([2.0, 2.5, 2.0, 2.5])
    assert s.energy(corners) == pytest.approx([0.1, 0.1, 1.9, 1.9])
    assert (corners[:, 0] <= 0).all() and (corners[:, 1] <= 0).all()
    mirrored = rect2.param(np.array([0.5]), np.array([0.5]))
    assert mirrored[0, 1] > 0
    assert s.energy(rect2.side_left) == pytest.approx(np.full(len(rect2.side_left), 0.1))


def test_duffing_levels_must_meet_left_of_the_axis():
    with pytest.raises(GeometryError):
        duffing_linked_rects(DuffingParams(), (2.0, 2.5), (0.1, 2.1))


def test_integration_rejects_states_outside_the_quadrant(e0):
    with pytest.raises(IntegrationError):
        integrate(e0, (0.0, 1.0), (0.0, 1.0))


# --------------------------------------------------------------------------- #
# Integration
# --------------------------------------------------------------------------- #
@pytest.mark.slow
def test_small_orbits_have_the_linear_period(e0):
    assert orbit_period(e0, e0.chi + 1e-6) == pytest.approx(2 * math.pi, rel=1e-4)


@pytest.mark.slow
def test_period_grows_with_the_level(e0):
    assert orbit_period(e0, e0.chi + 0.5) > orbit_period(e0, e0.chi + 0.12)


@pytest.mark.slow
def test_energy_is_conserved(e0, emu):
    assert energy_drift(e0, (1.5, 1.0), 30.0) < 1e-8
    assert energy_drift(emu, (2.0, 0.5), 30.0) < 1e-8


@pytest.mark.slow
@pytest.mark.parametrize("name, level", [("q", 2.0), ("q", 2.5)])
def test_duffing_energy_is_conserved_over_one_period(name, level):
    phase = DuffingPhase(DuffingParams(), name)
    tau = orbit_period(phase, level)
    z = reference_point(phase, level)
    assert energy_drift(phase, z, tau) < 1e-8


@pytest.mark.slow
def test_one_period_is_one_turn(e0):
    level = e0.chi + 0.3
    tau = orbit_period(e0, level)
    z = reference_point(e0, level)
    assert first_integral(e0, z) == pytest.approx(level, abs=1e-12)
    assert rotation_number(e0, z, tau) == pytest.approx(1.0, abs=1e-6)
    assert rotation_number(e0, z, 0.0) == 0.0


@pytest.mark.slow
def test_trajectories_switch_phase_on_schedule():
    system = volterra_system(VolterraParams(r0=1.0, rmu=0.5))
    trajectory = integrate(system, (1.2, 0.9), (0.0, 3.0))
    assert trajectory.t[-1] == pytest.approx(3.0)
    assert [p.name for p in trajectory.phases] == ["E0", "Emu"]
    assert set(trajectory.phase_ids.tolist()) == {0, 1}
    rows = trajectory.to_rows()
    assert rows[0][:3] == (0.0, 1.2, 0.9)


@pytest.mark.slow
def test_poincare_inverse_undoes_the_period_map():
    forward = PoincareMap(volterra_system(VolterraParams(r0=1.0, rmu=1.0)))
    start = np.array([[1.2, 0.9], [0.8, 1.3]])
    back = forward.inverse().evaluate(forward.evaluate(start))
    assert back == pytest.approx(start, abs=1e-7)


@pytest.mark.slow
def test_poincare_point_matches_the_vectorized_map():
    system = volterra_system(VolterraParams(r0=1.0, rmu=1.0))
    image = poincare(system, (1.2, 0.9))
    assert image == pytest.approx(PoincareMap(system).evaluate(np.array([[1.2, 0.9]]))[0], abs=1e-6)
    orbit = poincare_orbit(system, (1.2, 0.9), 2)
    assert orbit[1] == pytest.approx(image, abs=1e-12)
    assert np.isfinite(orbit).all()


@pytest.mark.slow
def test_default_annuli_are_linked(e0, emu):
    params = VolterraParams()
    result = linked_annuli(params, e0.chi + 0.12, e0.chi + 0.5, emu.chi + 0.15, emu.chi + 0.5)
    assert result.linked
    values = [result.points[name] for name in LINK_ORDER]
    assert values == sorted(values)
    assert result.rect1 is not None and result.rect2 is not None
    # lens R1 lies below the line through both centres
    mid = result.rect1.param(np.array([0.5]), np.array([0.5]))[0]
    assert params.d * mid[0] + params.b * mid[1] < params.a + params.c


def test_nested_annuli_are_not_linked(e0, emu):
    result = linked_annuli(VolterraParams(), e0.chi + 2.0, e0.chi + 3.0, emu.chi + 0.01, emu.chi + 0.02)
    assert not result.linked
    assert result.rect1 is None
    assert result.to_dict()["rect1"] is None


@pytest.mark.slow
def test_documented_levels_are_linked(e0, emu):
    result = linked_annuli(VolterraParams(), e0.chi + 0.15, e0.chi + 0.35, emu.chi + 0.15, emu.chi + 0.35)
    assert result.linked
    assert result.points["P1-"] == pytest.approx(1 - math.sqrt(1 - math.exp(-0.15)), abs=1e-9)


def test_concentric_annuli_are_not_linked():
    params = VolterraParams(mu=0.0)
    e0 = VolterraPhase(params, harvested=False)
    result = linked_annuli(params, e0.chi + 0.15, e0.chi + 0.35, e0.chi + 0.15, e0.chi + 0.35)
    assert not result.linked
    assert result.points["Q2-"] == pytest.approx(result.points["P2-"])


# --------------------------------------------------------------------------- #
# Duffing setup
# --------------------------------------------------------------------------- #
def test_duffing_setup_without_times_has_rectangles_only():
    setup = duffing_setup(DuffingParams())
    assert not setup.timed
    assert setup.psi_q is None and setup.psi_s is None
    assert setup.to_dict()["levels_Eq"] == [2.0, 2.5]
    with pytest.raises(FlowError):
        setup.windows()
    with pytest.raises(FlowError):
        setup.poincare


def test_duffing_setup_with_times_keeps_the_rectangles():
    setup = duffing_setup(DuffingParams())
    chosen = setup.with_times(150.0, 1.6)
    assert chosen.timed
    assert chosen.rect1 is setup.rect1 and chosen.rect2 is setup.rect2
    assert (chosen.psi_q.t, chosen.psi_s.t) == (150.0, 1.6)
    assert chosen.system.period == pytest.approx(151.6)
    assert chosen.params.rq == 150.0 and setup.params.rq == 0.0


@pytest.mark.slow
def test_period_map_is_the_composition_of_the_phase_maps():
    params = DuffingParams(rq=1.0, rs=0.5)
    rtol, atol = 1e-12, 1e-14
    composed = ComposedMap([PhaseMap(DuffingPhase(params, "q"), 1.0, rtol, atol),
                            PhaseMap(DuffingPhase(params, "s"), 0.5, rtol, atol)])
    for z0 in [(-0.5, -1.5), (0.3, 0.8), (-1.2, 0.4)]:
        direct = poincare(duffing_system(params), z0, rtol, atol)
        assert composed.evaluate(np.array([z0]))[0] == pytest.approx(direct, abs=1e-10)
