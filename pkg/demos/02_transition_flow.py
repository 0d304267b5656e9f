"""Plan and execute transitions between the two operating points.

Prints the ordered step log for each direction (voltages rise before the
relock, fall after it), executes a round trip, and shows what happens when
the SRAM bank is missing the register set for the target frequency.
"""

from socdvfs import default_config, operating_point
from socdvfs.transition import SocState, check_plan_safety, execute_transition, plan_transition

cfg = default_config()
rails = {r.name: r for r in cfg.rails}
hi, lo = operating_point(cfg, 1), operating_point(cfg, 0)

down = plan_transition(hi, lo, cfg.mrc_bank, rails)
print("high -> low (voltages drop AFTER the relock):")
print(down.step_log())
check_plan_safety(down, cfg)
print("safety walk: no rail ever below its V/f requirement\n")

up = plan_transition(lo, hi, cfg.mrc_bank, rails)
print("low -> high (voltages rise BEFORE the relock):")
print(up.step_log())

state = SocState(point=hi, level=1)
state, stall = execute_transition(down, state)
print(f"\nexecuted downscale: level {state.level}, stall {stall:.1f} us, "
      f"registers {state.point.mrc_set}, optimized={state.mrc_optimized}")
state, stall = execute_transition(plan_transition(state.point, hi, cfg.mrc_bank, rails), state)
print(f"executed upscale:   level {state.level}, stall {stall:.1f} us, "
      f"registers {state.point.mrc_set}")

stripped = cfg.mrc_bank.without(1.06)
degraded = plan_transition(hi, lo, stripped, rails)
print(f"\nwithout a 1.06 GHz register set: installs {degraded.mrc_set}, "
      f"optimized={degraded.mrc_optimized}")
print("downstream, that flag costs 22% memory power and 10% memory-bound performance")
