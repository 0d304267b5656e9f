"""Per-domain power math for the SoC model.

Every function here is pure: it maps an operating point plus an activity
snapshot to watts. Aggregation helpers (`energy`, `edp`) integrate those
watts over time. Nothing in this module mutates its inputs, so all of it
is safe to call from parallel sweeps.

Conventions: frequencies in GHz, voltages in V, power in W, bandwidth in
GB/s, energy in J.
"""

from __future__ import annotations

import dataclasses
from dataclasses import dataclass
from typing import TYPE_CHECKING, Iterable, Mapping, Tuple

if TYPE_CHECKING:  # avoids a circular import; soc.py imports this module
    from .soc import OperatingPoint

# Power states in which DRAM is clocked and serving transactions. In the
# deeper idle states the device sits in self-refresh.
DRAM_ACTIVE_STATES = frozenset({"C0", "C2"})
POWER_STATES = ("C0", "C2", "C6", "C7", "C8")


@dataclass(frozen=True)
class PowerCoefficients:
    """Fitted constants of the power model.

    The defaults approximate a 4.5W-class mobile part and are what the
    bundled config ships; `calibrate_coefficients` rescales the IO/memory
    group against scenario targets.
    """

    k_bg: float = 0.08            # W/GHz, DRAM background (freq-proportional)
    p_refresh: float = 0.02       # W, refresh floor (survives self-refresh)
    e_array_j: float = 1.6e-9     # J per DRAM access
    access_bytes: int = 64        # bytes moved per access
    k_term: float = 0.30          # W at interface_utilization = 1
    k_io_ddr: float = 0.16        # W/GHz, DDRIO clocked part incl. the
                                  # interface register/PLL clock trees
    k_mc_dyn: float = 0.80        # W/(V^2*GHz), memory controller dynamic
    k_mc_static: float = 0.30     # W/V at reference temperature
    k_ic_dyn: float = 0.88        # W/(V^2*GHz), IO interconnect
    k_core_dyn: float = 1.00      # W/(V^2*GHz)
    k_gfx_dyn: float = 2.00       # W/(V^2*GHz)
    k_core_leak: float = 0.60     # W/V
    k_gfx_leak: float = 0.50      # W/V
    temperature_factor: float = 1.0   # multiplier on MC static power
    v_io_nominal: float = 0.60    # reference for the DDRIO voltage ratio
    mrc_power_penalty: float = 1.22   # memory power multiplier, unoptimized registers
    mrc_perf_penalty: float = 0.90    # memory-bound perf multiplier, unoptimized

    def scaled_io_memory(self, scale: float) -> "PowerCoefficients":
        """Return a copy with every IO/memory-domain coefficient scaled."""
        return dataclasses.replace(
            self,
            k_bg=self.k_bg * scale,
            p_refresh=self.p_refresh * scale,
            e_array_j=self.e_array_j * scale,
            k_term=self.k_term * scale,
            k_io_ddr=self.k_io_ddr * scale,
            k_mc_dyn=self.k_mc_dyn * scale,
            k_mc_static=self.k_mc_static * scale,
            k_ic_dyn=self.k_ic_dyn * scale,
        )


@dataclass(frozen=True)
class ActivitySample:
    """Activity factors for one power-evaluation step."""

    dram_read_write_bw: float = 0.0      # GB/s actually served
    interface_utilization: float = 0.0   # served BW / peak BW at current freq
    core_utilization: float = 0.0
    gfx_utilization: float = 0.0
    io_engine_activity: float = 0.0
    power_state: str = "C0"

    def __post_init__(self):
        for name in ("interface_utilization", "core_utilization",
                     "gfx_utilization", "io_engine_activity"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValueError(f"{name}={v} outside [0, 1]")
        if self.power_state not in POWER_STATES:
            raise ValueError(f"unknown power state {self.power_state!r}")
        if self.power_state not in DRAM_ACTIVE_STATES and self.dram_read_write_bw != 0.0:
            raise ValueError(
                f"dram bandwidth must be 0 in {self.power_state} (DRAM is in self-refresh)")
        if self.dram_read_write_bw < 0.0:
            raise ValueError("dram bandwidth must be >= 0")


@dataclass(frozen=True)
class MemoryPowerBreakdown:
    background: float
    array: float
    termination: float
    ddrio: float

    @property
    def total(self) -> float:
        return self.background + self.array + self.termination + self.ddrio


@dataclass(frozen=True)
class PowerBreakdown:
    """Watts by component, with domain and rail rollups."""

    dram_background: float
    dram_array: float
    termination: float
    ddrio: float
    mc: float
    io_interconnect: float
    core: float
    gfx: float

    @property
    def memory_subsystem(self) -> float:
        """DRAM device plus its interface; the scope of the register penalty."""
        return self.dram_background + self.dram_array + self.termination + self.ddrio

    @property
    def memory_domain(self) -> float:
        return self.memory_subsystem + self.mc

    @property
    def io_domain(self) -> float:
        return self.io_interconnect

    @property
    def compute_domain(self) -> float:
        return self.core + self.gfx

    @property
    def total(self) -> float:
        return self.memory_domain + self.io_domain + self.compute_domain

    def per_rail(self) -> Mapping[str, float]:
        return {
            "V_SA": self.mc + self.io_interconnect,
            "VDDQ": self.dram_background + self.dram_array + self.termination,
            "V_IO": self.ddrio,
            "V_CORE": self.core,
            "V_GFX": self.gfx,
        }

    def to_dict(self) -> dict:
        d = {f.name: getattr(self, f.name) for f in dataclasses.fields(self)}
        d.update(
            memory_subsystem=self.memory_subsystem,
            memory_domain=self.memory_domain,
            io_domain=self.io_domain,
            compute_domain=self.compute_domain,
            total=self.total,
        )
        return d


def memory_power(op: "OperatingPoint", act: ActivitySample, coef: PowerCoefficients,
                 mrc_optimized: bool = True) -> MemoryPowerBreakdown:
    """DRAM device + interface power (background, array, termination, DDRIO).

    In self-refresh states only the refresh floor remains. With unoptimized
    interface registers the whole subsystem total is multiplied by
    `coef.mrc_power_penalty`.
    """
    if act.power_state not in DRAM_ACTIVE_STATES:
        return MemoryPowerBreakdown(coef.p_refresh, 0.0, 0.0, 0.0)
    background = coef.k_bg * op.dram_freq + coef.p_refresh
    access_rate = act.dram_read_write_bw * 1e9 / coef.access_bytes  # accesses/s
    array = coef.e_array_j * access_rate
    termination = coef.k_term * act.interface_utilization
    v_io = op.rail_voltages["V_IO"]
    ddrio = coef.k_io_ddr * op.dram_freq * (v_io / coef.v_io_nominal) ** 2
    factor = 1.0 if mrc_optimized else coef.mrc_power_penalty
    return MemoryPowerBreakdown(background * factor, array * factor,
                                termination * factor, ddrio * factor)


def mc_power(op: "OperatingPoint", coef: PowerCoefficients) -> float:
    """Memory controller: static term linear in V_SA, dynamic in V_SA^2 * f."""
    v_sa = op.rail_voltages["V_SA"]
    static = coef.k_mc_static * v_sa * coef.temperature_factor
    dynamic = coef.k_mc_dyn * v_sa ** 2 * op.mc_freq
    return static + dynamic


def io_domain_power(op: "OperatingPoint", act: ActivitySample,
                    coef: PowerCoefficients) -> float:
    v_sa = op.rail_voltages["V_SA"]
    return coef.k_ic_dyn * v_sa ** 2 * op.io_interconnect_freq


def core_power_w(freq: float, volts: float, utilization: float,
                 coef: PowerCoefficients) -> float:
    return coef.k_core_dyn * utilization * volts ** 2 * freq + coef.k_core_leak * volts


def gfx_power_w(freq: float, volts: float, utilization: float,
                coef: PowerCoefficients) -> float:
    return coef.k_gfx_dyn * utilization * volts ** 2 * freq + coef.k_gfx_leak * volts


def compute_power(op: "OperatingPoint", act: ActivitySample,
                  coef: PowerCoefficients) -> float:
    core = core_power_w(op.core_freq, op.rail_voltages["V_CORE"],
                        act.core_utilization, coef)
    gfx = gfx_power_w(op.gfx_freq, op.rail_voltages["V_GFX"],
                      act.gfx_utilization, coef)
    return core + gfx


def soc_power(op: "OperatingPoint", act: ActivitySample, coef: PowerCoefficients,
              mrc_optimized: bool = True) -> PowerBreakdown:
    """Full per-component breakdown for one step.

    Gating by power state: C0 is fully active; C2 clock-gates the compute
    domain (leakage only); C6/C7/C8 power-gate compute, IO and the memory
    controller and leave DRAM in self-refresh.
    """
    mem = memory_power(op, act, coef, mrc_optimized)
    if act.power_state not in DRAM_ACTIVE_STATES:
        return PowerBreakdown(mem.background, 0.0, 0.0, 0.0,
                              mc=0.0, io_interconnect=0.0, core=0.0, gfx=0.0)
    if act.power_state == "C2":
        # Compute clocks are gated; only leakage on the compute rails.
        core = coef.k_core_leak * op.rail_voltages["V_CORE"]
        gfx = coef.k_gfx_leak * op.rail_voltages["V_GFX"]
    else:
        core = core_power_w(op.core_freq, op.rail_voltages["V_CORE"],
                            act.core_utilization, coef)
        gfx = gfx_power_w(op.gfx_freq, op.rail_voltages["V_GFX"],
                          act.gfx_utilization, coef)
    return PowerBreakdown(
        dram_background=mem.background,
        dram_array=mem.array,
        termination=mem.termination,
        ddrio=mem.ddrio,
        mc=mc_power(op, coef),
        io_interconnect=io_domain_power(op, act, coef),
        core=core,
        gfx=gfx,
    )


def energy(series: Iterable[Tuple[float, float]]) -> float:
    """Integrate (power W, dt s) slices into joules. Rejects negative dt."""
    total = 0.0
    for watts, dt in series:
        if dt < 0:
            raise ValueError(f"negative duration {dt}")
        total += watts * dt
    return total


def edp(energy_j: float, delay_s: float) -> float:
    """Energy-delay product in J*s; lower is more efficient."""
    return energy_j * delay_s


def mrc_penalty(base_power: float, base_perf: float,
                power_factor: float = 1.22,
                perf_factor: float = 0.90) -> Tuple[float, float]:
    """Apply the unoptimized-register penalty to a (power, perf) pair."""
    return base_power * power_factor, base_perf * perf_factor
