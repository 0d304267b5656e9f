import dataclasses

import pytest

from socdvfs.sim import bundled_trace
from socdvfs.workload import (PeripheralConfig, PhaseSpec, SynthesisProfile,
                              TraceFormatError, TraceSlice, load_trace,
                              relative_performance, save_trace, static_demand,
                              synthesize)


def test_bundled_bandwidth_microbenchmark_shape():
    trace = bundled_trace("lbm-like")
    assert len({(s.frac_compute, s.frac_mem_bandwidth) for s in trace.slices}) == 1
    s = trace.slices[0]
    assert s.frac_mem_bandwidth > max(s.frac_compute, s.frac_mem_latency)
    assert s.core_bw_demand >= 20.0


def test_empty_csv_is_a_zero_length_trace(tmp_path):
    p = tmp_path / "empty.trace"
    p.write_text("duration_ms,frac_compute,frac_lat,frac_bw,core_bw,gfx_bw,io_bw,scalability,cstate\n")
    trace = load_trace(p)
    assert trace.slices == ()
    assert trace.duration_ms == 0.0


def test_bad_fraction_sum_names_the_slice(tmp_path):
    p = tmp_path / "bad.trace"
    p.write_text(
        "duration_ms,frac_compute,frac_lat,frac_bw,core_bw,gfx_bw,io_bw,scalability,cstate\n"
        "30.0,0.9,0.05,0.05,1,0,0,0.5,C0\n"
        "30.0,1.0,0.1,0.1,1,0,0,0.5,C0\n")
    with pytest.raises(TraceFormatError, match="slice 1"):
        load_trace(p)


def test_header_mismatch_rejected(tmp_path):
    p = tmp_path / "bad.trace"
    p.write_text("a,b,c\n1,2,3\n")
    with pytest.raises(TraceFormatError, match="header"):
        load_trace(p)


def test_save_load_round_trip(tmp_path):
    trace = bundled_trace("video-playback-like")
    save_trace(trace, tmp_path / "copy.trace")
    back = load_trace(tmp_path / "copy.trace")
    assert back.wl_class == trace.wl_class
    assert back.slices == trace.slices


def _phase(duration, frac, demand, jitter=0.0):
    fc, fl, fb = frac
    return PhaseSpec(duration_ms=duration, slice_ms=30.0, frac_compute=fc,
                     frac_lat=fl, frac_bw=fb, core_bw=demand,
                     demand_jitter=jitter, frac_jitter=jitter)


def test_synthesize_alternating_phases():
    profile = SynthesisProfile(
        name="alt", repeats=3,
        phases=(_phase(120, (0.9, 0.05, 0.05), 1.0, jitter=0.1),
                _phase(120, (0.3, 0.25, 0.45), 10.0, jitter=0.1)))
    trace = synthesize(profile, seed=5)
    demands = [s.core_bw_demand for s in trace.slices]
    lows, highs = demands[:4], demands[4:8]
    assert all(0.5 < d < 2.0 for d in lows)
    assert all(6.0 < d < 15.0 for d in highs)


def test_synthesize_zero_variance_is_exact():
    profile = SynthesisProfile(
        name="flat", phases=(_phase(90, (0.6, 0.3, 0.1), 4.0),))
    trace = synthesize(profile, seed=123)
    for s in trace.slices:
        assert (s.frac_compute, s.frac_mem_latency, s.frac_mem_bandwidth) == (0.6, 0.3, 0.1)
        assert s.core_bw_demand == 4.0


def test_synthesize_deterministic(tmp_path):
    profile = SynthesisProfile(
        name="det", phases=(_phase(300, (0.5, 0.2, 0.3), 6.0, jitter=0.2),))
    a, b = synthesize(profile, seed=9), synthesize(profile, seed=9)
    assert a == b
    save_trace(a, tmp_path / "a.trace")
    save_trace(b, tmp_path / "b.trace")
    assert (tmp_path / "a.trace").read_bytes() == (tmp_path / "b.trace").read_bytes()


def test_bad_profile_rejected():
    profile = SynthesisProfile(
        name="bad", phases=(_phase(90, (0.9, 0.2, 0.1), 1.0),))
    with pytest.raises(ValueError, match="sum to 1"):
        synthesize(profile, seed=0)


def test_static_demand_display_table(cfg):
    table = cfg.static_demand_table
    one_hd = static_demand(PeripheralConfig(displays=(("HD", 60.0),)), table)
    assert one_hd == pytest.approx(0.17 * 25.6, rel=1e-3)
    three = static_demand(PeripheralConfig(displays=(("HD", 60.0),) * 3), table)
    assert three == pytest.approx(3 * one_hd, rel=1e-12)
    assert static_demand(PeripheralConfig(), table) == 0.0


def test_static_demand_scales_with_rate_and_is_order_independent(cfg):
    table = cfg.static_demand_table
    p1 = PeripheralConfig(displays=(("HD", 30.0), ("4K", 60.0)),
                          cameras=(("FHD30", 30.0),))
    p2 = PeripheralConfig(displays=(("4K", 60.0), ("HD", 30.0)),
                          cameras=(("FHD30", 30.0),))
    assert static_demand(p1, table) == pytest.approx(static_demand(p2, table))
    assert static_demand(PeripheralConfig(displays=(("HD", 30.0),)), table) == \
        pytest.approx(0.5 * 0.17 * 25.6, rel=1e-3)


def test_static_demand_unknown_class(cfg):
    with pytest.raises(LookupError, match="8K"):
        static_demand(PeripheralConfig(displays=(("8K", 60.0),)),
                      cfg.static_demand_table)


def test_display_count_cap():
    with pytest.raises(TraceFormatError):
        PeripheralConfig(displays=(("HD", 60.0),) * 4)


def _slice(fc, fl, fb, demand):
    return TraceSlice(duration_ms=30.0, frac_compute=fc, frac_mem_latency=fl,
                      frac_mem_bandwidth=fb, core_bw_demand=demand)


def test_compute_bound_slice_ignores_memory_downscale(cfg, high_point, low_point):
    s = _slice(1.0, 0.0, 0.0, 0.5)
    assert relative_performance(s, low_point, high_point, model=cfg.perf_model) == 1.0


def test_bandwidth_bound_at_peak_scales_with_dram_freq(cfg, high_point, low_point):
    s = _slice(0.0, 0.0, 1.0, cfg.peak_bandwidth(1.6))
    ratio = relative_performance(s, low_point, high_point, model=cfg.perf_model)
    assert ratio == pytest.approx(1.06 / 1.6, rel=1e-12)


def test_latency_bound_slice_loses_over_ten_percent(cfg, high_point, low_point):
    trace = bundled_trace("cactusadm-like")
    ratio = relative_performance(trace.slices[0], low_point, high_point,
                                 model=cfg.perf_model)
    assert ratio < 0.90


def test_identity_and_monotonicity(cfg, high_point, low_point):
    s = _slice(0.4, 0.3, 0.3, 12.0)
    assert relative_performance(s, high_point, high_point, model=cfg.perf_model) == 1.0
    base = relative_performance(s, low_point, high_point, model=cfg.perf_model)
    assert base <= 1.0
    for field, delta in (("dram_freq", 0.2), ("mc_freq", 0.1), ("core_freq", 0.3)):
        faster = dataclasses.replace(low_point,
                                     **{field: getattr(low_point, field) + delta})
        assert relative_performance(s, faster, high_point,
                                    model=cfg.perf_model) >= base


def test_unoptimized_registers_scale_memory_bound_perf(cfg, high_point, low_point):
    s = _slice(0.0, 0.4, 0.6, 20.0)
    good = relative_performance(s, low_point, high_point, model=cfg.perf_model)
    bad = relative_performance(s, low_point, high_point, mrc_optimized=False,
                               model=cfg.perf_model)
    assert bad == pytest.approx(0.90 * good, rel=1e-12)
