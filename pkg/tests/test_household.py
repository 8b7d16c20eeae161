"""House thermal model, HVAC hysteresis, unresponsive loads and PV."""

import math

import numpy as np
import pytest

from petgrid.household import (HouseThermalState, PvArray, UnresponsiveProfile,
                               build_houses, hvac_demand, pv_potential,
                               setpoint, step_thermal, unresponsive_curve)
from petgrid.runner import ScenarioConfig
from petgrid.weather import DAY_S, SyntheticWeather

H = 3600.0


def make_state(**kw):
    defaults = dict(t_air=25.0, t_setpoint=24.0, hvac_on=False,
                    r=1.0 / 650.0, c=2.0 * H * 650.0, q_internal=0.0,
                    q_cool=12000.0)
    defaults.update(kw)
    return HouseThermalState(**defaults)


def test_equilibrium_temperature_unchanged():
    state = make_state(t_air=30.0, q_internal=0.0)
    out = step_thermal(state, temp_out=30.0, dt=600.0)
    assert out.t_air == pytest.approx(30.0, abs=1e-12)


def test_exponential_relaxation_worked_example():
    # Closed-form oracle: RC = 2 h, start 25 degC, outdoor 35 degC, no
    # gains, 1 h horizon: 35 - 10*exp(-0.5) = 28.9347 degC.
    state = make_state(t_air=25.0, r=1.0 / 500.0, c=2 * H * 500.0)
    out = step_thermal(state, temp_out=35.0, dt=H)
    assert out.t_air == pytest.approx(35.0 - 10.0 * math.exp(-0.5), abs=1e-3)


def test_cooling_decreases_temperature_at_equal_outdoor():
    state = make_state(t_air=30.0, hvac_on=True, q_cool=12000.0)
    out = step_thermal(state, temp_out=30.0, dt=60.0)
    assert out.t_air < 30.0


def test_subdivided_steps_match_single_step():
    state = make_state(t_air=25.0, q_internal=800.0, hvac_on=True)
    single = step_thermal(state, temp_out=35.0, dt=H)
    stepped = state
    for _ in range(60):
        stepped = step_thermal(stepped, temp_out=35.0, dt=60.0)
    assert stepped.t_air == pytest.approx(single.t_air, abs=1e-9)


def test_invalid_parameters_rejected():
    with pytest.raises(ValueError):
        make_state(r=0.0)
    with pytest.raises(ValueError):
        step_thermal(make_state(), temp_out=30.0, dt=0.0)


def test_setpoint_schedule_oracle():
    # DERIVED: evaluating the documented schedule directly.
    assert setpoint(13 * H) == 26.0
    assert setpoint(19 * H) == 23.0
    assert setpoint(3 * H) == 22.0
    assert setpoint(8 * H) == 24.0       # midpoint of the 07:00-09:00 ramp
    assert setpoint(23.75 * H) == 22.0


def test_setpoint_jitter_and_offset_bounds():
    values = [setpoint(t, offset_c, jitter_s)
              for t in np.arange(0, DAY_S, 300.0)
              for offset_c in (-1.0, 0.0, 1.0)
              for jitter_s in (-1800.0, 0.0, 1800.0)]
    assert min(values) >= 21.0
    assert max(values) <= 27.0


def test_hvac_demand_above_setpoint():
    assert hvac_demand(27.0, 24.0, hvac_on=False) == 4000.0


def test_hvac_demand_below_setpoint():
    assert hvac_demand(23.0, 24.0, hvac_on=False) == 0.0


def test_hvac_hysteresis_keeps_running_until_lower_band():
    assert hvac_demand(23.8, 24.0, hvac_on=True, deadband_c=1.0) == 4000.0
    assert hvac_demand(23.4, 24.0, hvac_on=True, deadband_c=1.0) == 0.0
    # off unit does not start inside the deadband
    assert hvac_demand(24.4, 24.0, hvac_on=False, deadband_c=1.0) == 0.0


def test_unresponsive_curve_mean_and_shape():
    ts = np.arange(0, DAY_S, 60.0)
    values = np.array([unresponsive_curve(t, mean_w=1150.0) for t in ts])
    assert values.mean() == pytest.approx(1150.0, rel=0.01)
    assert unresponsive_curve(6 * H) < unresponsive_curve(20 * H)
    assert np.all(values >= 0.0)
    assert unresponsive_curve(5 * H) == pytest.approx(
        unresponsive_curve(5 * H + DAY_S))


def test_trough_is_daily_minimum_peak_at_evening():
    hours = np.arange(0, 24, 0.25)
    vals = [unresponsive_curve(h * H) for h in hours]
    assert hours[int(np.argmin(vals))] == 6.0
    assert hours[int(np.argmax(vals))] == 20.0


def test_unresponsive_profile_noise_bounded_and_deterministic():
    p1 = UnresponsiveProfile(1150.0, np.random.default_rng(3), 0.10)
    p2 = UnresponsiveProfile(1150.0, np.random.default_rng(3), 0.10)
    base = UnresponsiveProfile(1150.0, None, 0.0)
    for i in range(0, 2000, 37):
        v1, v2, v0 = (p.value_for_round(i) for p in (p1, p2, base))
        assert v1 == v2
        assert abs(v1 - v0) <= 0.10 * v0 + 1e-9
        assert v1 >= 0.0


def test_fleet_daily_mean_close_to_target():
    rng = np.random.default_rng(11)
    profiles = [UnresponsiveProfile(1150.0, rng, 0.10) for _ in range(30)]
    rounds = int(DAY_S / 300.0)
    fleet = np.mean([[p.value_for_round(i) for i in range(rounds)]
                     for p in profiles]) * 30
    assert fleet == pytest.approx(34500.0, rel=0.10)


def test_pv_potential_examples():
    assert pv_potential(PvArray(10), 1.0) == 4800.0
    assert pv_potential(PvArray(17), 0.0) == 0.0
    assert pv_potential(PvArray(8), 0.5) == 1920.0
    assert pv_potential(PvArray(20), 0.5) == 4800.0


def test_pv_array_validation():
    with pytest.raises(ValueError):
        PvArray(0)


def _cfg(**kw):
    cfg = ScenarioConfig(days=5, **kw)
    cfg.validate()
    return cfg


def test_build_houses_respects_pv_count_and_panel_range():
    cfg = _cfg(n_houses=12, n_pv=5)
    profile = SyntheticWeather()
    houses = build_houses(cfg, np.random.default_rng(1), profile,
                          pv_rng=np.random.default_rng(2))
    assert sum(1 for h in houses if h.pv is not None) == 5
    for h in houses:
        if h.pv is not None:
            assert 8 <= h.pv.n_panels <= 20
            assert h.pv.panel_rating_w == 480.0


def test_pv_sizing_does_not_perturb_thermal_fleet():
    """Scenarios with and without PV must share identical houses."""
    profile = SyntheticWeather()
    with_pv = build_houses(_cfg(n_houses=10, n_pv=10),
                           np.random.default_rng(5), profile,
                           pv_rng=np.random.default_rng(6))
    without = build_houses(_cfg(n_houses=10, n_pv=0),
                           np.random.default_rng(5), profile,
                           pv_rng=np.random.default_rng(6))
    for a, b in zip(with_pv, without):
        assert a.state.r == b.state.r
        assert a.state.c == b.state.c
        assert a.setpoint_offset_c == b.setpoint_offset_c
        assert a.setpoint_jitter_s == b.setpoint_jitter_s
        assert a.unresponsive.value_for_round(100) == \
            b.unresponsive.value_for_round(100)
