"""Walk the operating-point ladder and read the power model.

Shows how the two bundled points resolve (clocks, rail voltages, installed
register set), what each domain draws at a moderate load, and why the
memory-controller dynamic term collapses nearly cubically one bin down.
"""

from socdvfs import default_config, operating_point, soc_power, validate_config
from socdvfs.power import mc_power
from socdvfs.sim import build_activity
from socdvfs.workload import TraceSlice

cfg = default_config()
print("config valid:", validate_config(cfg).ok)
print(f"TDP {cfg.tdp_watts} W, ladder of {cfg.n_levels} operating points\n")

for level in range(cfg.n_levels):
    op = operating_point(cfg, level)
    volts = ", ".join(f"{k}={v:.2f}V" for k, v in sorted(op.rail_voltages.items()))
    print(f"level {level}: DRAM {op.dram_freq} GHz | MC {op.mc_freq:.2f} GHz | "
          f"interconnect {op.io_interconnect_freq} GHz | registers {op.mrc_set}")
    print(f"         {volts}")

# A moderately loaded slice: 6 GB/s of traffic, mixed bottlenecks.
slice_ = TraceSlice(duration_ms=30.0, frac_compute=0.6, frac_mem_latency=0.2,
                    frac_mem_bandwidth=0.2, core_bw_demand=4.0,
                    gfx_bw_demand=1.5, io_bw_demand=0.5)

print("\nper-domain watts at this load:")
hi, lo = operating_point(cfg, 1), operating_point(cfg, 0)
for name, op in (("high", hi), ("low", lo)):
    bd = soc_power(op, build_activity(slice_, op, cfg), cfg.power_coefficients)
    print(f"  {name:5s} memory {bd.memory_domain:.3f}  io {bd.io_domain:.3f}  "
          f"compute {bd.compute_domain:.3f}  total {bd.total:.3f}")

static_hi = cfg.power_coefficients.k_mc_static * hi.rail_voltages["V_SA"]
static_lo = cfg.power_coefficients.k_mc_static * lo.rail_voltages["V_SA"]
dyn_hi = mc_power(hi, cfg.power_coefficients) - static_hi
dyn_lo = mc_power(lo, cfg.power_coefficients) - static_lo
print(f"\nmemory-controller dynamic power scale one bin down: "
      f"{dyn_lo / dyn_hi:.3f} (V^2*f => 0.8^2 * 1.06/1.6 = 0.424)")
