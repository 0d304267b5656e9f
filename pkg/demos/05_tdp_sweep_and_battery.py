"""TDP sensitivity and battery-life gating.

Sweeps the power envelope over the compute-bound corpus (the benefit of
redistribution shrinks as power becomes ample) and runs the frame-paced
playback trace, where scaling decisions are confined to the power states
in which DRAM is actually clocked.
"""

from socdvfs import corpus
from socdvfs.sim import bundled_trace, fit_thresholds, simulate, tdp_sweep
from socdvfs.soc import default_config

cfg = default_config()
thr = fit_thresholds(corpus.calibration_corpus(500), cfg)

print("mean gain over baseline on the compute-bound corpus:")
for row in tdp_sweep(corpus.compute_bound_corpus(), cfg, [3.5, 4.5, 7.0], thr):
    print(f"  TDP {row['tdp_watts']:>4} W -> {row['mean_gain']:+6.1%}")
print("(a tighter envelope leaves more performance on the table to reclaim)\n")

video = bundled_trace("video-playback-like")
report = simulate(video, "sysscale", cfg, thr)
res = ", ".join(f"{k} {v:.0%}" for k, v in report.c_state_residencies.items())
print(f"video playback residencies: {res}")
print(f"transitions: {report.transitions_count}, all in DRAM-active states:",
      all(r["power_state"] in ("C0", "C2")
          for r in report.intervals if r["transitioned"]))
idle = [r for r in report.intervals if r["active_ms"] == 0.0]
print(f"fully idle intervals: {len(idle)}, DRAM power there = "
      f"{idle[0]['memory_subsystem_w']:.3f} W (refresh floor "
      f"{cfg.power_coefficients.p_refresh} W)")
print(f"average SoC power: {report.avg_power_w['soc']:.3f} W")
