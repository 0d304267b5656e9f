"""Acceptance suite: the exit criteria for the primary component.

Each test exercises one criterion end to end at its stated tolerance and
prints a single PASS line (visible under `pytest -s` or on failure).
Session fixtures provide the bundled config, the 500-trace calibration
corpus, its fitted thresholds, and the scenario-calibrated coefficients.
"""

import math
import time

import numpy as np
import pytest

from socdvfs import corpus
from socdvfs.governor import (CalibrationEntry, calibrate_thresholds, predict)
from socdvfs.sim import (bundled_trace, compare_policies, oracle_decide,
                         simulate, tdp_sweep)
from socdvfs.soc import operating_point
from socdvfs.telemetry import PerfCounterSample
from socdvfs.transition import check_plan_safety, plan_transition
from socdvfs.workload import TraceSlice, WorkloadTrace


def _ok(n, text):
    print(f"ACCEPTANCE {n:02d} PASS: {text}")


def test_01_threshold_formula_exact():
    start = time.perf_counter()
    values = (10.0, 12.0, 14.0)
    slice_ = TraceSlice(duration_ms=1.0, frac_compute=1.0, frac_mem_latency=0.0,
                        frac_mem_bandwidth=0.0)
    entries = [CalibrationEntry(WorkloadTrace("t", (slice_,)),
                                PerfCounterSample(v, v, v, v), 0.001)
               for v in values]
    thr = calibrate_thresholds(entries, bound=0.01, static_bw_thr=1.0)
    mu = sum(values) / 3
    sigma = math.sqrt(sum((v - mu) ** 2 for v in values) / 3)
    expected = mu + sigma  # 13.63299316...
    for got in (thr.gfx_thr, thr.core_thr, thr.lat_thr, thr.io_thr):
        assert abs(got - expected) <= 1e-9
    elapsed = time.perf_counter() - start
    assert elapsed < 1.0
    _ok(1, f"mean+sigma thresholds reproduce {expected:.6f} to 1e-9 "
           f"({elapsed * 1e3:.0f} ms)")


def test_02_no_false_positives_on_calibration_corpus(cfg, calibration_traces,
                                                     thresholds, high_point,
                                                     low_point):
    start = time.perf_counter()
    entries = corpus.calibration_entries(calibration_traces, cfg)
    false_positives = 0
    downs = 0
    for e in entries:
        decision = predict(e.counters, 0.0, thresholds, current_level=1)
        if decision.target_level == 0:
            downs += 1
            oracle = oracle_decide(e.trace.slices[0], high_point, low_point,
                                   thresholds.degradation_bound, cfg)
            if oracle != 0:
                false_positives += 1
    elapsed = time.perf_counter() - start
    assert downs > 0
    assert false_positives == 0
    assert elapsed < 30.0
    _ok(2, f"0 false positives across {downs} step-downs on 500 traces "
           f"({elapsed:.2f} s)")


def test_03_heldout_accuracy(cfg, thresholds, high_point, low_point):
    start = time.perf_counter()
    entries = corpus.calibration_entries(corpus.heldout_corpus(500), cfg)
    agree = 0
    for e in entries:
        decision = predict(e.counters, 0.0, thresholds, current_level=1)
        oracle = oracle_decide(e.trace.slices[0], high_point, low_point,
                               thresholds.degradation_bound, cfg)
        agree += decision.target_level == oracle
    accuracy = agree / len(entries)
    elapsed = time.perf_counter() - start
    assert accuracy >= 0.90
    assert elapsed < 30.0
    _ok(3, f"held-out accuracy {accuracy:.1%} >= 90% ({elapsed:.2f} s)")


def test_04_transition_latency_arithmetic(cfg, high_point, low_point):
    rails = {r.name: r for r in cfg.rails}
    for src, dst in ((high_point, low_point), (low_point, high_point)):
        plan = plan_transition(src, dst, cfg.mrc_bank, rails)
        assert plan.total_latency_us < 10.0
        ramp_kind = "lower_voltage" if src is high_point else "raise_voltage"
        ramp_us = sum(s.latency_us for s in plan.steps if s.kind == ramp_kind)
        slowest_mv = max(abs(dst.rail_voltages[r] - src.rail_voltages[r]) * 1000.0
                         for r in ("V_SA", "V_IO"))
        assert ramp_us == slowest_mv / 50.0           # tolerance 0
        assert ramp_us == pytest.approx(2.0, rel=1e-9)  # the 100 mV swing
        bounds = {"block_and_drain": 1.0, "exit_self_refresh": 5.0,
                  "load_mrc": 1.0, "relock_plls": 1.0}
        for kind, bound in bounds.items():
            assert sum(s.latency_us for s in plan.steps if s.kind == kind) <= bound
    _ok(4, "both ladder transitions < 10 us with exact 2 us regulator ramps")


def test_05_ordering_and_safety_properties(cfg):
    import dataclasses

    from socdvfs.soc import LevelSpec, with_compute
    from socdvfs.transition import STEP_ORDER

    start = time.perf_counter()
    c3 = cfg.replace(levels=(
        LevelSpec(dram_freq=0.8, io_interconnect_freq=0.3),
        LevelSpec(dram_freq=1.06, io_interconnect_freq=0.4),
        LevelSpec(dram_freq=1.6, io_interconnect_freq=0.8)))
    rails = {r.name: r for r in c3.rails}
    order = {k: i for i, k in enumerate(STEP_ORDER)}
    rng = np.random.default_rng(2024)
    for _ in range(10_000):
        i, j = rng.choice(3, size=2, replace=False)
        a, b = operating_point(c3, int(i)), operating_point(c3, int(j))
        volts = dict(a.rail_voltages)
        volts["V_SA"] += float(rng.uniform(0, 0.02))
        a = dataclasses.replace(a, rail_voltages=volts)
        a = with_compute(c3, a, float(rng.uniform(0.4, 3.1)),
                         float(rng.uniform(0.3, 1.1)))
        plan = plan_transition(a, b, c3.mrc_bank, rails)
        kinds = [s.kind for s in plan.steps]
        ranks = [order[k] for k in kinds]
        assert ranks == sorted(ranks)
        relock = kinds.index("relock_plls")
        assert all(k != "raise_voltage" for k in kinds[relock:])
        assert all(k != "lower_voltage" for k in kinds[:relock])
        check_plan_safety(plan, c3)
    elapsed = time.perf_counter() - start
    assert elapsed < 10.0
    _ok(5, f"10^4 random plans hold ordering and never undervolt ({elapsed:.2f} s)")


def test_06_register_penalty_propagation(cfg):
    lbm = bundled_trace("lbm-like")
    stripped = cfg.replace(mrc_bank=cfg.mrc_bank.without(1.06))
    optimized = simulate(lbm, "md-dvfs", cfg)
    unoptimized = simulate(lbm, "md-dvfs", stripped)
    power_ratio = unoptimized.avg_power_w["memory_subsystem"] / \
        optimized.avg_power_w["memory_subsystem"]
    perf_ratio = unoptimized.performance_ratio / optimized.performance_ratio
    assert power_ratio == pytest.approx(1.22, rel=1e-3)
    assert perf_ratio == pytest.approx(0.90, rel=1e-3)
    _ok(6, f"deleting the low-point register set scales memory power x{power_ratio:.4f} "
           f"and memory-bound perf x{perf_ratio:.4f}")


def test_07_calibrated_scenario_regression(cfg, calibrated_cfg):
    start = time.perf_counter()
    light = bundled_trace("perlbench-like")
    base = simulate(light, "baseline", calibrated_cfg)
    scaled = simulate(light, "md-dvfs", calibrated_cfg)
    reduction = 1.0 - scaled.avg_power_w["soc"] / base.avg_power_w["soc"]
    assert 0.09 <= reduction <= 0.12
    assert scaled.performance_ratio >= 0.99
    latency_bound = simulate(bundled_trace("cactusadm-like"), "md-dvfs",
                             calibrated_cfg)
    loss = 1.0 - latency_bound.performance_ratio
    assert loss > 0.10
    elapsed = time.perf_counter() - start
    assert elapsed < 10.0
    _ok(7, f"memory-light: -{reduction:.1%} power at {scaled.performance_ratio:.3f} "
           f"perf; latency-bound loses {loss:.1%} ({elapsed:.2f} s)")


def test_08_redistribution_benefit(cfg, thresholds):
    trace = bundled_trace("compute-bound-like")
    assert trace.slices[0].cpu_scalability == 0.8
    reports = compare_policies(trace, cfg, thresholds,
                               ["sysscale", "memscale-redist", "coscale-redist"])
    gain = reports["sysscale"].performance_ratio - 1.0
    mem_gain = reports["memscale-redist"].performance_ratio - 1.0
    co_gain = reports["coscale-redist"].performance_ratio - 1.0
    assert gain >= 0.05
    assert gain >= mem_gain and gain >= co_gain
    assert gain >= 1.5 * mem_gain
    _ok(8, f"coordinated scaling gains {gain:.1%} vs projected "
           f"{mem_gain:.1%}/{co_gain:.1%}")


def test_09_graphics_projection_equality(cfg, thresholds):
    trace = bundled_trace("graphics-like")
    reports = compare_policies(trace, cfg, thresholds,
                               ["memscale-redist", "coscale-redist"])
    a = reports["memscale-redist"].projected_gain
    b = reports["coscale-redist"].projected_gain
    assert a > 0.0
    assert abs(a - b) <= 1e-9
    _ok(9, f"graphics-class projected gains identical at {a:.4%}")


def test_10_tdp_monotonicity(cfg, thresholds):
    start = time.perf_counter()
    rows = tdp_sweep(corpus.compute_bound_corpus(), cfg, [3.5, 4.5, 7.0],
                     thresholds)
    gains = [r["mean_gain"] for r in rows]
    assert gains[0] > gains[1] >= gains[2] or gains[0] > gains[1] > gains[2]
    assert gains[0] == max(gains)
    assert all(a >= b for a, b in zip(gains, gains[1:]))
    elapsed = time.perf_counter() - start
    assert elapsed < 60.0
    _ok(10, "mean gain falls with TDP: " +
        ", ".join(f"{r['tdp_watts']}W {r['mean_gain']:+.1%}" for r in rows) +
        f" ({elapsed:.2f} s)")


def test_11_battery_life_gating(cfg, thresholds):
    trace = bundled_trace("video-playback-like")
    r = simulate(trace, "sysscale", cfg, thresholds)
    assert r.c_state_residencies == pytest.approx(
        {"C0": 0.10, "C2": 0.05, "C8": 0.85})
    assert r.transitions_count > 0
    for row in r.intervals:
        if row["transitioned"]:
            assert row["power_state"] in ("C0", "C2")
    idle_rows = [row for row in r.intervals if row["active_ms"] == 0.0]
    assert idle_rows
    p_refresh = cfg.power_coefficients.p_refresh
    for row in idle_rows:
        assert row["memory_subsystem_w"] == pytest.approx(p_refresh, rel=1e-9)
    _ok(11, f"{r.transitions_count} transitions all in C0/C2; "
            f"{len(idle_rows)} idle intervals at refresh-only DRAM power")


def test_12_conservation_and_determinism(cfg, thresholds):
    trace = bundled_trace("astar-like")
    a = simulate(trace, "sysscale", cfg, thresholds, seed=42)
    b = simulate(trace, "sysscale", cfg, thresholds, seed=42)
    assert a.to_json() == b.to_json()
    for row in a.intervals:
        budgets = row["budgets"]
        assert budgets["compute_w"] == cfg.tdp_watts - budgets["io_w"] - budgets["memory_w"]
        assert min(budgets.values()) >= 0.0
    interval_sum = sum(row["energy_j"] for row in a.intervals)
    assert abs(interval_sum - a.total_energy_j) <= 1e-9 * a.total_energy_j
    _ok(12, "budgets close to the TDP, energy ledgers agree to 1e-9, "
            "reports byte-identical")
