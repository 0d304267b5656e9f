"""The decision core: threshold calibration, the five-condition operating
point policy, cross-domain budget redistribution and compute P-state/duty
selection.

The governor steps the IO and memory domains UP one level if any of five
conditions holds (static peripheral demand, graphics bandwidth, core
bandwidth, memory latency, IO pressure — each against its own threshold)
and DOWN one level if none does. Thresholds come from an offline pass over
a labeled corpus: mean plus one standard deviation of each counter over the
runs whose measured degradation stayed below the bound.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Mapping, Optional, Sequence

from .power import ActivitySample, PowerCoefficients, core_power_w, gfx_power_w
from .soc import SocConfig, VfCurve
from .telemetry import PerfCounterSample
from .workload import WorkloadTrace

CONDITIONS = ("static", "gfx", "core", "latency", "io")


class CalibrationError(Exception):
    pass


class InfeasibleTdpError(Exception):
    """TDP cannot cover the IO/memory floor; no compute budget remains."""


@dataclass(frozen=True)
class ThresholdSet:
    static_bw_thr: float            # GB/s
    gfx_thr: float
    core_thr: float
    lat_thr: float
    io_thr: float
    degradation_bound: float = 0.01

    def __post_init__(self):
        for name in ("static_bw_thr", "gfx_thr", "core_thr", "lat_thr", "io_thr"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be >= 0")
        if not 0.0 < self.degradation_bound < 1.0:
            raise ValueError("degradation_bound must be in (0, 1)")

    def scaled(self, factor: float) -> "ThresholdSet":
        return ThresholdSet(self.static_bw_thr * factor, self.gfx_thr * factor,
                            self.core_thr * factor, self.lat_thr * factor,
                            self.io_thr * factor, self.degradation_bound)

    def to_dict(self) -> dict:
        return {"static_bw_thr": self.static_bw_thr, "gfx_thr": self.gfx_thr,
                "core_thr": self.core_thr, "lat_thr": self.lat_thr,
                "io_thr": self.io_thr, "degradation_bound": self.degradation_bound}


def thresholds_from_dict(data: Mapping) -> ThresholdSet:
    return ThresholdSet(**data)


def load_thresholds(path) -> ThresholdSet:
    return thresholds_from_dict(json.loads(Path(path).read_text()))


def save_thresholds(thr: ThresholdSet, path) -> None:
    Path(path).write_text(json.dumps(thr.to_dict(), indent=2, sort_keys=True) + "\n")


@dataclass(frozen=True)
class Decision:
    target_level: int
    triggering_conditions: frozenset = frozenset()


@dataclass(frozen=True)
class DomainBudgets:
    compute_w: float
    io_w: float
    memory_w: float


@dataclass(frozen=True)
class CalibrationEntry:
    """One labeled corpus run: counters at the fast point, measured
    degradation at the slow point."""

    trace: WorkloadTrace
    counters: PerfCounterSample
    degradation: float
    wl_class: str = "cpu"


def _mu_plus_sigma(values: Sequence[float], ddof: int) -> float:
    n = len(values)
    mu = sum(values) / n
    if n - ddof <= 0:
        return mu  # single eligible run: zero spread by convention
    var = sum((v - mu) ** 2 for v in values) / (n - ddof)
    return mu + math.sqrt(var)


def calibrate_thresholds(corpus: Iterable[CalibrationEntry], bound: float,
                         static_bw_thr: float,
                         class_filter: Optional[str] = None,
                         sigma: str = "population") -> ThresholdSet:
    """Fit per-counter thresholds as mean + one standard deviation over the
    runs whose degradation stayed below `bound`.

    The deviation is the population form by default (`sigma="sample"` for
    the n-1 estimator). `static_bw_thr` is not fitted here; it comes from
    the peripheral table / operating ladder (see
    `static_threshold_from_ladder`). `class_filter` restricts the fit to one
    workload class.
    """
    if sigma not in ("population", "sample"):
        raise ValueError("sigma must be 'population' or 'sample'")
    ddof = 0 if sigma == "population" else 1
    entries = [e for e in corpus
               if class_filter is None or e.wl_class == class_filter]
    if not entries:
        raise CalibrationError("empty calibration corpus")
    eligible = [e for e in entries if e.degradation < bound]
    counter_map = {"gfx": "gfx_llc_misses", "core": "llc_occupancy_tracer",
                   "lat": "llc_stalls", "io": "io_rpq"}
    fitted = {}
    for short, fname in counter_map.items():
        values = [getattr(e.counters, fname) for e in eligible]
        if not values:
            raise CalibrationError(
                f"counter {fname}: no corpus run below the {bound:.2%} bound")
        fitted[short] = _mu_plus_sigma(values, ddof)
    return ThresholdSet(static_bw_thr=static_bw_thr, gfx_thr=fitted["gfx"],
                        core_thr=fitted["core"], lat_thr=fitted["lat"],
                        io_thr=fitted["io"], degradation_bound=bound)


def static_threshold_from_ladder(cfg: SocConfig) -> float:
    """Static-demand threshold: the low point's peak bandwidth minus a guard
    band. Demand above it cannot be served one level down."""
    low_peak = cfg.peak_bandwidth(cfg.levels[0].dram_freq)
    return low_peak * (1.0 - cfg.static_bw_guard)


def predict(avg: PerfCounterSample, static_bw: float, thr: ThresholdSet,
            current_level: int, n_levels: int = 2) -> Decision:
    """Decide the next operating level from averaged counters.

    Any strict threshold crossing steps one level up; none steps one level
    down; either way the target clamps to the ladder ends. Ties (counter ==
    threshold) do not trigger.
    """
    hits = set()
    if static_bw > thr.static_bw_thr:
        hits.add("static")
    if avg.gfx_llc_misses > thr.gfx_thr:
        hits.add("gfx")
    if avg.llc_occupancy_tracer > thr.core_thr:
        hits.add("core")
    if avg.llc_stalls > thr.lat_thr:
        hits.add("latency")
    if avg.io_rpq > thr.io_thr:
        hits.add("io")
    if hits:
        target = min(current_level + 1, n_levels - 1)
    else:
        target = max(current_level - 1, 0)
    return Decision(target_level=target, triggering_conditions=frozenset(hits))


def redistribute_budget(tdp: float, io_mem_power_high: float,
                        io_mem_power_low: float, decision: Decision,
                        io_w: Optional[float] = None,
                        memory_w: Optional[float] = None) -> DomainBudgets:
    """Split the TDP between the compute domain and the IO+memory pair.

    At the low level the saving (high - low) flows straight into the compute
    budget. `io_w`/`memory_w` give the exact split of the selected IO+memory
    allocation; by default a fixed fraction is attributed to IO. Conservation
    holds by construction: compute_w = tdp - io_w - memory_w.
    """
    if io_mem_power_high < 0 or io_mem_power_low < 0:
        raise ValueError("domain powers must be >= 0")
    if io_mem_power_low > io_mem_power_high + 1e-12:
        raise ValueError("low-point power must not exceed high-point power")
    selected = io_mem_power_low if decision.target_level == 0 else io_mem_power_high
    if io_w is None:
        io_w = 0.35 * selected
    if memory_w is None:
        memory_w = selected - io_w
    compute = tdp - io_w - memory_w
    if compute < 0:
        raise InfeasibleTdpError(
            f"TDP {tdp} W cannot cover IO+memory power {io_w + memory_w:.3f} W")
    return DomainBudgets(compute_w=compute, io_w=io_w, memory_w=memory_w)


@dataclass(frozen=True)
class PstateChoice:
    """Compute clocks plus a duty factor.

    For CPU/battery work the duty gates the whole compute domain (the deep
    power-limit fallback below the floor frequencies). For graphics work it
    gates only the CPU cores, which live on a capped share of the budget
    while the graphics engine runs un-gated within the remainder.
    """

    core_freq: float                # GHz (pre-duty)
    gfx_freq: float
    duty_cycle: float = 1.0         # effective freq = duty * freq

    @property
    def effective_core_freq(self) -> float:
        return self.duty_cycle * self.core_freq


def _max_freq_within(budget: float, curve: VfCurve, f_min: float, f_max: float,
                     utilization: float, power_fn, tol: float = 1e-12) -> Optional[float]:
    """Highest frequency on the curve whose power fits the budget, or None
    if even f_min does not fit. Bisection; the result never overshoots."""
    if power_fn(f_min, curve.volts(f_min), utilization) > budget:
        return None
    if power_fn(f_max, curve.volts(f_max), utilization) <= budget:
        return f_max
    lo, hi = f_min, f_max
    while hi - lo > tol:
        mid = 0.5 * (lo + hi)
        if power_fn(mid, curve.volts(mid), utilization) <= budget:
            lo = mid
        else:
            hi = mid
    return lo


def select_compute_pstate(budget: float, act: ActivitySample,
                          coef: PowerCoefficients,
                          core_curve: VfCurve, gfx_curve: VfCurve,
                          core_max: float, gfx_max: float,
                          workload_class: str = "cpu",
                          graphics_core_share: float = 0.15) -> PstateChoice:
    """Pick the highest compute frequencies that fit the budget.

    CPU-class work parks the graphics engine at its floor and gives the
    cores the rest. Graphics-class work pins the cores at their most
    efficient frequency (the top of the v_min region) on a fixed share of
    the budget and spends the remainder on the graphics engine. If even the
    floor configuration exceeds the budget, the domain duty-cycles:
    d = budget / floor power, effective frequency = d * floor frequency.
    """
    if budget < 0:
        raise ValueError("budget must be >= 0")
    core_pn = core_curve.max_freq_at_floor()
    gfx_pn = gfx_curve.max_freq_at_floor()

    def core_p(f, v, u):
        return core_power_w(f, v, u, coef)

    def gfx_p(f, v, u):
        return gfx_power_w(f, v, u, coef)

    if workload_class == "graphics":
        # Cores are pinned at their most efficient frequency on a capped
        # share of the budget (duty-cycled below it at very low budgets);
        # the graphics engine spends the rest.
        core_budget = graphics_core_share * budget
        gfx_budget = budget - core_budget
        core_pn_power = core_p(core_pn, core_curve.volts(core_pn),
                               act.core_utilization)
        gfx_f = _max_freq_within(gfx_budget, gfx_curve, gfx_pn, gfx_max,
                                 act.gfx_utilization, gfx_p)
        if gfx_f is None:
            floor = core_pn_power + gfx_p(gfx_pn, gfx_curve.volts(gfx_pn),
                                          act.gfx_utilization)
            return PstateChoice(core_pn, gfx_pn, min(1.0, budget / floor))
        duty = 1.0 if core_pn_power <= core_budget or core_pn_power == 0 \
            else core_budget / core_pn_power
        return PstateChoice(core_pn, gfx_f, duty)

    # CPU / battery-life: graphics parked at its floor, cores take the rest.
    gfx_f = gfx_pn
    gfx_power = gfx_p(gfx_f, gfx_curve.volts(gfx_f), act.gfx_utilization)
    floor_power = core_p(core_pn, core_curve.volts(core_pn), act.core_utilization) \
        + gfx_power
    core_f = _max_freq_within(budget - gfx_power, core_curve, core_pn, core_max,
                              act.core_utilization, core_p)
    if core_f is None:
        duty = min(1.0, budget / floor_power)
        return PstateChoice(core_pn, gfx_f, duty)
    return PstateChoice(core_f, gfx_f, 1.0)


@dataclass(frozen=True)
class PowerToFreqMap:
    """First-order mapping from a compute-budget change to a clock change."""

    ghz_per_watt: float
    f_base_ghz: float

    def delta_freq(self, delta_power_w: float) -> float:
        return self.ghz_per_watt * delta_power_w


def project_perf_boost(power_saving_w: float, power_to_freq: PowerToFreqMap,
                       scalability: float) -> float:
    """Projected performance gain from handing a power saving to compute.

    gain = scalability * delta_f / f_base. Used for the comparison policies
    that only estimate (never execute) cross-domain redistribution.
    """
    if not 0.0 <= scalability <= 1.0:
        raise ValueError("scalability must be in [0, 1]")
    delta_f = power_to_freq.delta_freq(max(0.0, power_saving_w))
    return scalability * delta_f / power_to_freq.f_base_ghz
