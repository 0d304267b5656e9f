"""Run the scaling policies side by side on the bundled traces.

The phased trace shows the governor following demand up and down; the
compute-bound trace shows the budget-redistribution payoff; the graphics
trace shows why the two projected comparison policies tie (cores already
sit at their most efficient frequency, so coordinating them adds nothing).
"""

from socdvfs import corpus
from socdvfs.sim import bundled_trace, compare_policies, comparison_table, fit_thresholds
from socdvfs.soc import default_config

cfg = default_config()
thr = fit_thresholds(corpus.calibration_corpus(500), cfg)
policies = ["baseline", "sysscale", "memscale-redist", "coscale-redist"]

for name in ("astar-like", "compute-bound-like", "graphics-like"):
    trace = bundled_trace(name)
    reports = compare_policies(trace, cfg, thr, policies)
    print(f"== {name} ({trace.wl_class}, {trace.duration_ms:.0f} ms)")
    print(comparison_table(reports))
    mem, co = reports["memscale-redist"], reports["coscale-redist"]
    if trace.wl_class == "graphics":
        print(f"projected gains: memory-only {mem.projected_gain:.4%} vs "
              f"coordinated {co.projected_gain:.4%} (identical savings)")
    print()
