"""The DVFS transition flow between two operating points.

A transition is planned as an ordered step list: rails that must rise do so
before the PLL/DLL relock, rails that fall do so after; in between, the IO
interconnect is blocked and drained, DRAM drops into self-refresh, the
register set tuned for the target DRAM frequency is loaded from SRAM, and
the clocks relock. No memory transaction is served between the block and
the unblock, so the whole window is charged as stall time.

Voltage steps take |delta mV| / slew-rate microseconds; the remaining step
latencies are firmware-level bounds, configurable but defaulting inside
their documented ceilings so a two-rail 100 mV swing stays under 10 us.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import Dict, Mapping, Optional, Tuple

from .soc import (RAIL_CLOCKS, MrcBank, OperatingPoint, SocConfig, VoltageRail,
                  mrc_lookup, mrc_nearest, required_rail_voltages)

# Rails the flow never touches: their clocks belong to the compute domain,
# whose DVFS runs independently and meets this flow only through budgets.
_COMPUTE_RAILS = frozenset(
    name for name, clocks in RAIL_CLOCKS.items()
    if set(clocks) <= {"core", "gfx"})

STEP_ORDER = ("raise_voltage", "block_and_drain", "enter_self_refresh",
              "load_mrc", "relock_plls", "lower_voltage", "exit_self_refresh",
              "unblock")


class TransitionError(Exception):
    pass


@dataclass(frozen=True)
class StepLatencies:
    """Fixed latencies of the non-voltage steps, in microseconds.

    Each default sits inside its firmware bound: drain < 1us, self-refresh
    exit < 5us, register load < 1us, relock and other overhead < 1us.
    Self-refresh entry is folded into the drain barrier.
    """

    drain_us: float = 0.8
    self_refresh_exit_us: float = 4.0
    mrc_load_us: float = 0.8
    relock_us: float = 0.8


@dataclass(frozen=True)
class Step:
    kind: str
    latency_us: float
    rail: Optional[str] = None      # set for raise_voltage / lower_voltage

    def __str__(self) -> str:
        tag = f"{self.kind}[{self.rail}]" if self.rail else self.kind
        return f"{tag:28s} {self.latency_us:7.3f} us"


@dataclass(frozen=True)
class TransitionPlan:
    from_point: OperatingPoint
    to_point: OperatingPoint
    steps: Tuple[Step, ...]
    mrc_optimized: bool             # target entry was present in the bank
    mrc_set: Optional[str]

    @property
    def total_latency_us(self) -> float:
        return sum(s.latency_us for s in self.steps)

    @property
    def blocked_window_us(self) -> float:
        """Latency between block_and_drain and unblock: the memory-service gap."""
        kinds = [s.kind for s in self.steps]
        i = kinds.index("block_and_drain")
        j = kinds.index("unblock")
        return sum(s.latency_us for s in self.steps[i:j + 1])

    def step_log(self) -> str:
        lines = [str(s) for s in self.steps]
        lines.append(f"{'total':28s} {self.total_latency_us:7.3f} us")
        return "\n".join(lines)


@dataclass(frozen=True)
class SocState:
    """The single mutable-by-replacement runtime state the PMU owns."""

    point: OperatingPoint
    level: int
    mrc_optimized: bool = True


def _voltage_steps(kind: str, from_v: Mapping[str, float], to_v: Mapping[str, float],
                   rails: Mapping[str, VoltageRail]) -> list[Step]:
    """Per-rail ramp steps for one direction.

    The regulators slew concurrently: rails settle in ramp-time order and
    the group is charged once, at the slowest ramp (|delta mV| / slew rate),
    carried by that rail's step so the plan's latency sum stays exact.
    """
    ramps = []
    for name in sorted(from_v):
        dv_mv = (to_v[name] - from_v[name]) * 1000.0
        if kind == "raise_voltage" and dv_mv > 1e-9:
            pass
        elif kind == "lower_voltage" and dv_mv < -1e-9:
            pass
        else:
            continue
        ramps.append((abs(dv_mv) / rails[name].slew_rate_mv_per_us, name))
    ramps.sort()
    return [Step(kind=kind, rail=name,
                 latency_us=ramp_us if i == len(ramps) - 1 else 0.0)
            for i, (ramp_us, name) in enumerate(ramps)]


def plan_transition(from_point: OperatingPoint, to_point: OperatingPoint,
                    bank: MrcBank, rails: Mapping[str, VoltageRail],
                    latencies: StepLatencies = StepLatencies(),
                    reoptimize_mrc: bool = True) -> TransitionPlan:
    """Build the ordered step list for one frequency/voltage switch.

    With `reoptimize_mrc` off (the behavior of the comparison policies), or
    when the bank holds no entry for the target DRAM frequency, the nearest
    available register set is kept and the plan is flagged unoptimized.
    """
    # The flow owns only the IO/memory side; compute clocks and rails ride
    # through unchanged.
    volts = dict(to_point.rail_voltages)
    for rail_name in _COMPUTE_RAILS & set(from_point.rail_voltages):
        volts[rail_name] = from_point.rail_voltages[rail_name]
    to_point = dataclasses.replace(to_point, rail_voltages=volts,
                                   core_freq=from_point.core_freq,
                                   gfx_freq=from_point.gfx_freq)

    if from_point.level == to_point.level and \
            from_point.rail_voltages == to_point.rail_voltages and \
            from_point.clocks() == to_point.clocks():
        raise TransitionError("no-op transition: source equals target")

    raise_steps = _voltage_steps("raise_voltage", from_point.rail_voltages,
                                 to_point.rail_voltages, rails)
    lower_steps = _voltage_steps("lower_voltage", from_point.rail_voltages,
                                 to_point.rail_voltages, rails)

    mrc_optimized = True
    mrc_set = from_point.mrc_set
    if reoptimize_mrc:
        entry = mrc_lookup(bank, to_point.dram_freq)
        if entry is not None:
            mrc_set = entry.ident
        else:
            nearest = mrc_nearest(bank, to_point.dram_freq)
            mrc_set = nearest.ident if nearest else from_point.mrc_set
            mrc_optimized = False
    else:
        mrc_optimized = False

    steps: list[Step] = []
    steps.extend(raise_steps)
    steps.append(Step("block_and_drain", latencies.drain_us))
    steps.append(Step("enter_self_refresh", 0.0))  # folded into the drain barrier
    steps.append(Step("load_mrc", latencies.mrc_load_us))
    steps.append(Step("relock_plls", latencies.relock_us))
    steps.extend(lower_steps)
    steps.append(Step("exit_self_refresh", latencies.self_refresh_exit_us))
    steps.append(Step("unblock", 0.0))

    return TransitionPlan(from_point=from_point, to_point=to_point,
                          steps=tuple(steps), mrc_optimized=mrc_optimized,
                          mrc_set=mrc_set)


def check_plan_safety(plan: TransitionPlan, cfg: SocConfig,
                      tol: float = 1e-9) -> None:
    """Walk the plan and assert no rail ever drops below the V/f requirement
    of the fastest clock it feeds at that moment. Raises on violation."""
    volts: Dict[str, float] = dict(plan.from_point.rail_voltages)
    clocks = dict(plan.from_point.clocks())
    order = {k: i for i, k in enumerate(STEP_ORDER)}
    last = -1
    for step in plan.steps:
        if step.kind not in order:
            raise TransitionError(f"unknown step kind {step.kind}")
        if order[step.kind] < last:
            raise TransitionError(
                f"step {step.kind} out of order in plan")
        last = order[step.kind]
        if step.kind in ("raise_voltage", "lower_voltage"):
            volts[step.rail] = plan.to_point.rail_voltages[step.rail]
        elif step.kind == "relock_plls":
            clocks = dict(plan.to_point.clocks())
        required = required_rail_voltages(cfg, clocks)
        for rail_name, need in required.items():
            if rail_name in volts and volts[rail_name] < need - tol:
                raise TransitionError(
                    f"after {step.kind}: rail {rail_name} at {volts[rail_name]:.4f} V "
                    f"is below the {need:.4f} V requirement")


def execute_transition(plan: TransitionPlan, state: SocState,
                       now_ms: float = 0.0) -> Tuple[SocState, float]:
    """Apply a plan to the current state; returns (new state, stall in us).

    The plan must have been built from the installed point; anything else is
    a stale plan. The stall is the plan's total latency, charged against the
    current slice's useful time by the simulation loop.
    """
    if plan.from_point != state.point:
        raise TransitionError(
            f"stale plan: built from level {plan.from_point.level}, "
            f"state is at level {state.point.level}")
    new_point = dataclasses.replace(plan.to_point, mrc_set=plan.mrc_set)
    new_state = SocState(point=new_point, level=plan.to_point.level,
                         mrc_optimized=plan.mrc_optimized)
    return new_state, plan.total_latency_us
