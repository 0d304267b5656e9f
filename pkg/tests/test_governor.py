import math

import numpy as np
import pytest

from socdvfs.governor import (CalibrationEntry, CalibrationError, Decision,
                              InfeasibleTdpError, PowerToFreqMap, ThresholdSet,
                              calibrate_thresholds, predict, project_perf_boost,
                              redistribute_budget, select_compute_pstate,
                              static_threshold_from_ladder, thresholds_from_dict)
from socdvfs.power import ActivitySample, core_power_w, gfx_power_w
from socdvfs.telemetry import PerfCounterSample
from socdvfs.workload import TraceSlice, WorkloadTrace

THR = ThresholdSet(static_bw_thr=15.0, gfx_thr=10.0, core_thr=20.0,
                   lat_thr=5.0, io_thr=2.0)


def _entry(values, degradation):
    s = TraceSlice(duration_ms=1.0, frac_compute=1.0, frac_mem_latency=0.0,
                   frac_mem_bandwidth=0.0)
    trace = WorkloadTrace("t", (s,))
    return CalibrationEntry(trace=trace, counters=PerfCounterSample(*values),
                            degradation=degradation)


def test_threshold_is_mean_plus_population_sigma():
    entries = [_entry((v, v, v, v), 0.001) for v in (10.0, 12.0, 14.0)]
    thr = calibrate_thresholds(entries, bound=0.01, static_bw_thr=1.0)
    expected = 12.0 + math.sqrt(8.0 / 3.0)
    for got in (thr.gfx_thr, thr.core_thr, thr.lat_thr, thr.io_thr):
        assert got == pytest.approx(expected, abs=1e-12)


def test_single_eligible_run_gives_zero_sigma():
    entries = [_entry((7.0, 7.0, 7.0, 7.0), 0.0),
               _entry((99.0, 99.0, 99.0, 99.0), 0.5)]
    thr = calibrate_thresholds(entries, bound=0.01, static_bw_thr=1.0)
    assert thr.lat_thr == 7.0


def test_calibration_needs_an_eligible_run():
    entries = [_entry((5.0, 5.0, 5.0, 5.0), 0.2)]
    with pytest.raises(CalibrationError, match="gfx_llc_misses"):
        calibrate_thresholds(entries, bound=0.01, static_bw_thr=1.0)


def test_sample_sigma_option():
    entries = [_entry((v, v, v, v), 0.001) for v in (10.0, 12.0, 14.0)]
    pop = calibrate_thresholds(entries, 0.01, 1.0, sigma="population")
    samp = calibrate_thresholds(entries, 0.01, 1.0, sigma="sample")
    assert pop.lat_thr == pytest.approx(12.0 + math.sqrt(8.0 / 3.0))
    assert samp.lat_thr == pytest.approx(12.0 + math.sqrt(4.0))
    with pytest.raises(ValueError):
        calibrate_thresholds(entries, 0.01, 1.0, sigma="bogus")


def test_class_filter_restricts_the_fit():
    a = CalibrationEntry(_entry((1, 1, 1, 1), 0.0).trace,
                         PerfCounterSample(1, 1, 1, 1), 0.0, wl_class="cpu")
    b = CalibrationEntry(_entry((9, 9, 9, 9), 0.0).trace,
                         PerfCounterSample(9, 9, 9, 9), 0.0, wl_class="graphics")
    thr = calibrate_thresholds([a, b], 0.01, 1.0, class_filter="cpu")
    assert thr.gfx_thr == 1.0


def test_static_threshold_guards_the_low_point_peak(cfg):
    assert static_threshold_from_ladder(cfg) == pytest.approx(
        cfg.peak_bandwidth(1.06) * 0.9)


def test_all_quiet_steps_down():
    d = predict(PerfCounterSample(), static_bw=0.0, thr=THR, current_level=1)
    assert d.target_level == 0
    assert d.triggering_conditions == frozenset()


def test_single_io_crossing_steps_up():
    d = predict(PerfCounterSample(io_rpq=THR.io_thr + 1e-9), 0.0, THR,
                current_level=0)
    assert d.target_level == 1
    assert d.triggering_conditions == {"io"}


def test_tie_does_not_trigger():
    d = predict(PerfCounterSample(io_rpq=THR.io_thr, llc_stalls=THR.lat_thr),
                static_bw=THR.static_bw_thr, thr=THR, current_level=1)
    assert d.target_level == 0
    assert d.triggering_conditions == frozenset()


def test_static_demand_condition():
    d = predict(PerfCounterSample(), static_bw=THR.static_bw_thr + 0.1, thr=THR,
                current_level=0)
    assert d.triggering_conditions == {"static"}


def test_clamping_at_ladder_ends():
    up = predict(PerfCounterSample(io_rpq=99.0), 0.0, THR, current_level=1)
    assert up.target_level == 1
    down = predict(PerfCounterSample(), 0.0, THR, current_level=0)
    assert down.target_level == 0


def test_adjacent_step_rule():
    rng = np.random.default_rng(3)
    for _ in range(500):
        sample = PerfCounterSample(*rng.uniform(0, 40, 4))
        lvl = int(rng.integers(0, 3))
        d = predict(sample, float(rng.uniform(0, 30)), THR, lvl, n_levels=3)
        assert abs(d.target_level - lvl) <= 1


def test_decision_scale_invariance():
    rng = np.random.default_rng(11)
    for _ in range(300):
        vals = rng.uniform(0, 30, 4)
        static = float(rng.uniform(0, 30))
        k = float(rng.uniform(0.1, 50))
        d1 = predict(PerfCounterSample(*vals), static, THR, 1)
        d2 = predict(PerfCounterSample(*(vals * k)), static * k, THR.scaled(k), 1)
        assert d1 == d2


def test_saving_flows_to_compute_budget():
    high = redistribute_budget(4.5, 1.0, 0.6, Decision(target_level=1))
    low = redistribute_budget(4.5, 1.0, 0.6, Decision(target_level=0))
    assert low.compute_w - high.compute_w == pytest.approx(0.4, rel=1e-12)


def test_zero_saving_changes_nothing():
    a = redistribute_budget(4.5, 0.8, 0.8, Decision(target_level=1))
    b = redistribute_budget(4.5, 0.8, 0.8, Decision(target_level=0))
    assert a == b


def test_budget_conservation_over_random_sweep():
    rng = np.random.default_rng(17)
    for _ in range(10_000):
        tdp = float(rng.uniform(1.0, 20.0))
        hi = float(rng.uniform(0.0, tdp * 0.8))
        lo = float(rng.uniform(0.0, hi)) if hi > 0 else 0.0
        b = redistribute_budget(tdp, hi, lo,
                                Decision(target_level=int(rng.integers(0, 2))))
        assert b.compute_w == tdp - b.io_w - b.memory_w
        assert b.compute_w >= 0 and b.io_w >= 0 and b.memory_w >= 0
        assert b.io_w + b.memory_w <= tdp


def test_infeasible_tdp_raises():
    with pytest.raises(InfeasibleTdpError):
        redistribute_budget(0.5, 2.0, 1.8, Decision(target_level=0))


BUSY = ActivitySample(core_utilization=1.0, gfx_utilization=1.0)


def _select(cfg, budget, act=BUSY, wl_class="cpu"):
    return select_compute_pstate(budget, act, cfg.power_coefficients,
                                 cfg.vf_curves["V_CORE"], cfg.vf_curves["V_GFX"],
                                 cfg.core_max_freq, cfg.gfx_max_freq,
                                 workload_class=wl_class,
                                 graphics_core_share=cfg.graphics_core_share)


def test_extra_100mw_buys_100mhz(cfg):
    # On the flat-voltage stretch of the bundled curve, the power-to-frequency
    # map is 1 mW per MHz at full utilization.
    a = _select(cfg, 3.0)
    b = _select(cfg, 3.1)
    assert a.duty_cycle == 1.0 and b.duty_cycle == 1.0
    assert b.core_freq - a.core_freq == pytest.approx(0.1, rel=1e-6)


def test_chosen_pstate_respects_budget(cfg):
    coef = cfg.power_coefficients
    for budget in (0.5, 1.0, 2.0, 3.0, 4.0, 6.0):
        c = _select(cfg, budget)
        core = core_power_w(c.core_freq, cfg.vf_curves["V_CORE"].volts(c.core_freq),
                            1.0, coef)
        gfx = gfx_power_w(c.gfx_freq, cfg.vf_curves["V_GFX"].volts(c.gfx_freq),
                          1.0, coef)
        assert (core + gfx) * c.duty_cycle <= budget + 1e-9


def test_duty_cycle_boundary_and_half(cfg):
    coef = cfg.power_coefficients
    core_pn = cfg.vf_curves["V_CORE"].max_freq_at_floor()
    gfx_pn = cfg.vf_curves["V_GFX"].max_freq_at_floor()
    floor = core_power_w(core_pn, cfg.vf_curves["V_CORE"].volts(core_pn), 1.0, coef) + \
        gfx_power_w(gfx_pn, cfg.vf_curves["V_GFX"].volts(gfx_pn), 1.0, coef)
    exact = _select(cfg, floor)
    assert exact.duty_cycle == 1.0
    assert exact.core_freq == pytest.approx(core_pn)
    half = _select(cfg, floor / 2)
    assert half.duty_cycle == pytest.approx(0.5, rel=1e-12)
    assert half.effective_core_freq == pytest.approx(0.5 * core_pn, rel=1e-12)


def test_graphics_class_pins_cores_and_spends_on_gfx(cfg):
    c = _select(cfg, 3.0, wl_class="graphics")
    assert c.core_freq == pytest.approx(cfg.vf_curves["V_CORE"].max_freq_at_floor())
    richer = _select(cfg, 3.5, wl_class="graphics")
    assert richer.gfx_freq > c.gfx_freq


def test_projection_model():
    pmap = PowerToFreqMap(ghz_per_watt=1.0, f_base_ghz=1.0)
    assert project_perf_boost(0.5, pmap, 0.0) == 0.0
    assert project_perf_boost(0.1, pmap, 0.5) == pytest.approx(0.05)
    with pytest.raises(ValueError):
        project_perf_boost(0.1, pmap, 1.5)


def test_threshold_serialization_round_trip(tmp_path):
    assert thresholds_from_dict(THR.to_dict()) == THR
