"""SoC topology: voltage rails, V/f curves, operating-point ladder, and the
register bank for the DRAM interface.

The config is deliberately data-only (frozen dataclasses); everything a run
needs — frequencies, curves, coefficients, counter gains, the static demand
table — lives in one `SocConfig` that round-trips through JSON.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path
from typing import Dict, Mapping, Optional, Tuple

from .power import PowerCoefficients


class ConfigError(Exception):
    """Raised when a config file cannot be parsed into a SocConfig."""


@dataclass(frozen=True)
class VoltageRail:
    name: str
    v_min: float                    # V
    v_nominal: float                # V
    slew_rate_mv_per_us: float = 50.0

    def __post_init__(self):
        if not 0 < self.v_min <= self.v_nominal:
            raise ConfigError(f"rail {self.name}: need 0 < v_min <= v_nominal")
        if self.slew_rate_mv_per_us <= 0:
            raise ConfigError(f"rail {self.name}: slew rate must be > 0")


@dataclass(frozen=True)
class VfCurve:
    """Piecewise-linear volts(freq) with a functional-voltage floor.

    Evaluation clamps to the end points and never returns less than v_min.
    """

    points: Tuple[Tuple[float, float], ...]   # (GHz, V), ascending in GHz
    v_min: float

    def volts(self, freq: float) -> float:
        pts = self.points
        if freq <= pts[0][0]:
            v = pts[0][1]
        elif freq >= pts[-1][0]:
            v = pts[-1][1]
        else:
            v = pts[-1][1]
            for (f0, v0), (f1, v1) in zip(pts, pts[1:]):
                if f0 <= freq <= f1:
                    t = 0.0 if f1 == f0 else (freq - f0) / (f1 - f0)
                    v = v0 + t * (v1 - v0)
                    break
        return max(self.v_min, v)

    def max_freq_at_floor(self) -> float:
        """Highest frequency still served at v_min (the Pn frequency)."""
        best = self.points[0][0]
        for f, v in self.points:
            if v <= self.v_min + 1e-12:
                best = max(best, f)
        return best

    def is_monotone(self) -> bool:
        volts = [v for _, v in self.points]
        freqs = [f for f, _ in self.points]
        return all(b >= a for a, b in zip(volts, volts[1:])) and \
            all(b > a for a, b in zip(freqs, freqs[1:]))


@dataclass(frozen=True)
class MrcRegisterSet:
    """Opaque tuned-register payload for one DRAM frequency."""

    optimized_for: float            # GHz
    payload: bytes

    @property
    def ident(self) -> str:
        return f"mrc-{self.optimized_for:g}"


@dataclass(frozen=True)
class MrcBank:
    entries: Tuple[MrcRegisterSet, ...] = ()
    sram_budget_bytes: int = 512

    def without(self, dram_freq: float) -> "MrcBank":
        keep = tuple(e for e in self.entries if not _freq_eq(e.optimized_for, dram_freq))
        return MrcBank(keep, self.sram_budget_bytes)


def _freq_eq(a: float, b: float) -> bool:
    return abs(a - b) < 1e-9


def mrc_lookup(bank: MrcBank, dram_freq: float) -> Optional[MrcRegisterSet]:
    """Exact-frequency lookup; absent entries are the caller's problem."""
    for entry in bank.entries:
        if _freq_eq(entry.optimized_for, dram_freq):
            return entry
    return None


def mrc_nearest(bank: MrcBank, dram_freq: float) -> Optional[MrcRegisterSet]:
    if not bank.entries:
        return None
    return min(bank.entries, key=lambda e: abs(e.optimized_for - dram_freq))


def mrc_sram_footprint(bank: MrcBank) -> int:
    """Serialized size of all register sets, in bytes."""
    return sum(len(e.payload) for e in bank.entries)


@dataclass(frozen=True)
class DomainDesc:
    name: str                       # compute | io | memory
    components: Tuple[str, ...] = ()
    rails: Tuple[str, ...] = ()


@dataclass(frozen=True)
class LevelSpec:
    """One rung of the operating-point ladder (ascending performance)."""

    dram_freq: float                # GHz, must be one of the device bins
    io_interconnect_freq: float     # GHz
    rail_voltage_overrides: Mapping[str, float] = field(default_factory=dict)


@dataclass(frozen=True)
class OperatingPoint:
    level: int
    dram_freq: float
    mc_freq: float
    io_interconnect_freq: float
    rail_voltages: Mapping[str, float]
    mrc_set: Optional[str]          # ident of the installed register set
    core_freq: float
    gfx_freq: float

    def clocks(self) -> Dict[str, float]:
        return {
            "dram": self.dram_freq,
            "mc": self.mc_freq,
            "io_interconnect": self.io_interconnect_freq,
            "core": self.core_freq,
            "gfx": self.gfx_freq,
        }


# Which clocks load each rail; the rail must satisfy the fastest of them.
RAIL_CLOCKS: Mapping[str, Tuple[str, ...]] = {
    "V_SA": ("mc", "io_interconnect"),
    "VDDQ": ("dram",),
    "V_IO": ("dram",),
    "V_CORE": ("core",),
    "V_GFX": ("gfx",),
}


@dataclass(frozen=True)
class PerfModel:
    """Constants of the slowdown model shared by workload and telemetry."""

    lat_a_ns: float = 20.0          # fixed component of loaded memory latency
    lat_b_ns_ghz: float = 30.0      # scaled by 1/mc_freq
    lat_c_ns_ghz: float = 40.0      # scaled by 1/dram_freq
    peak_bw_gbps_per_ghz: float = 16.0   # dual-channel: 25.6 GB/s at 1.6 GHz
    io_capacity_gbps_per_ghz: float = 10.0
    mrc_perf_factor: float = 0.90


@dataclass(frozen=True)
class CounterGains:
    """Proportionality constants mapping demand to emulated counter values."""

    gfx_events_per_gbps: float = 120.0
    occupancy_at_full_util: float = 640.0
    stall_events_per_latency: float = 8.0
    io_rpq_at_full_util: float = 96.0
    noise_sigma: float = 0.0        # lognormal sigma; 0 disables noise


@dataclass(frozen=True)
class StaticDemandTable:
    """Bandwidth demand per peripheral class at a reference rate."""

    display_gbps: Mapping[str, float] = field(default_factory=dict)
    display_ref_hz: float = 60.0
    camera_gbps: Mapping[str, float] = field(default_factory=dict)
    camera_ref_fps: float = 30.0


@dataclass(frozen=True)
class SocConfig:
    tdp_watts: float = 4.5
    rails: Tuple[VoltageRail, ...] = ()
    domains: Tuple[DomainDesc, ...] = ()
    dram_freq_bins: Tuple[float, ...] = ()
    vf_curves: Mapping[str, VfCurve] = field(default_factory=dict)
    levels: Tuple[LevelSpec, ...] = ()
    power_coefficients: PowerCoefficients = field(default_factory=PowerCoefficients)
    perf_model: PerfModel = field(default_factory=PerfModel)
    counter_gains: CounterGains = field(default_factory=CounterGains)
    static_demand_table: StaticDemandTable = field(default_factory=StaticDemandTable)
    mrc_bank: MrcBank = field(default_factory=MrcBank)
    evaluation_interval_ms: float = 30.0
    sample_period_ms: float = 1.0
    mc_freq_ratio: float = 0.5      # MC clock as a fraction of DRAM clock
    core_base_freq: float = 1.2     # GHz
    gfx_base_freq: float = 0.3      # GHz
    core_max_freq: float = 3.1      # GHz
    gfx_max_freq: float = 1.1       # GHz
    graphics_core_share: float = 0.15   # core slice of the compute budget
    ghz_per_watt: float = 1.0       # compute power-to-frequency slope
    static_bw_guard: float = 0.10   # guard band on the static-demand threshold
    min_dwell_intervals: int = 1
    coscale_compute_bound: float = 0.5

    @property
    def n_levels(self) -> int:
        return len(self.levels)

    @property
    def high_level(self) -> int:
        return len(self.levels) - 1

    def rail(self, name: str) -> VoltageRail:
        for r in self.rails:
            if r.name == name:
                return r
        raise KeyError(name)

    def peak_bandwidth(self, dram_freq: float) -> float:
        """Peak memory bandwidth in GB/s at a DRAM frequency."""
        return self.perf_model.peak_bw_gbps_per_ghz * dram_freq

    def io_capacity(self, io_interconnect_freq: float) -> float:
        return self.perf_model.io_capacity_gbps_per_ghz * io_interconnect_freq

    def memory_latency_ns(self, op: OperatingPoint) -> float:
        m = self.perf_model
        return m.lat_a_ns + m.lat_b_ns_ghz / op.mc_freq + m.lat_c_ns_ghz / op.dram_freq

    def replace(self, **kw) -> "SocConfig":
        return dataclasses.replace(self, **kw)


@dataclass(frozen=True)
class Violation:
    path: str
    message: str

    def __str__(self) -> str:
        return f"{self.path}: {self.message}"


@dataclass(frozen=True)
class ValidationReport:
    violations: Tuple[Violation, ...] = ()

    @property
    def ok(self) -> bool:
        return not self.violations

    def to_dict(self) -> dict:
        return {"ok": self.ok,
                "violations": [{"path": v.path, "message": v.message}
                               for v in self.violations]}


def required_rail_voltages(cfg: SocConfig, clocks: Mapping[str, float]) -> Dict[str, float]:
    """Minimum voltage per rail given the clocks currently running on it."""
    req: Dict[str, float] = {}
    for rail_name, curve in cfg.vf_curves.items():
        sources = RAIL_CLOCKS.get(rail_name, ())
        fastest = max((clocks[c] for c in sources if c in clocks), default=0.0)
        req[rail_name] = curve.volts(fastest)
    return req


def resolve_compute_voltages(cfg: SocConfig, core_freq: float,
                             gfx_freq: float) -> Tuple[float, float]:
    return (cfg.vf_curves["V_CORE"].volts(core_freq),
            cfg.vf_curves["V_GFX"].volts(gfx_freq))


def operating_point(cfg: SocConfig, level: int,
                    core_freq: Optional[float] = None,
                    gfx_freq: Optional[float] = None) -> OperatingPoint:
    """Resolve one ladder level into a fully-specified operating point.

    Rail voltages are read off the V/f curves at the fastest clock on each
    rail (floored at v_min); explicit per-level overrides win. The register
    set is the bank entry tuned for the level's DRAM frequency, if any.
    Deterministic: same (cfg, level) always yields the identical point.
    """
    if not 0 <= level < cfg.n_levels:
        raise IndexError(f"level {level} out of range (0..{cfg.n_levels - 1})")
    spec = cfg.levels[level]
    core = cfg.core_base_freq if core_freq is None else core_freq
    gfx = cfg.gfx_base_freq if gfx_freq is None else gfx_freq
    clocks = {
        "dram": spec.dram_freq,
        "mc": spec.dram_freq * cfg.mc_freq_ratio,
        "io_interconnect": spec.io_interconnect_freq,
        "core": core,
        "gfx": gfx,
    }
    volts = required_rail_voltages(cfg, clocks)
    for rail_name, v in spec.rail_voltage_overrides.items():
        volts[rail_name] = v
    entry = mrc_lookup(cfg.mrc_bank, spec.dram_freq)
    return OperatingPoint(
        level=level,
        dram_freq=spec.dram_freq,
        mc_freq=clocks["mc"],
        io_interconnect_freq=spec.io_interconnect_freq,
        rail_voltages=volts,
        mrc_set=entry.ident if entry else None,
        core_freq=core,
        gfx_freq=gfx,
    )


def with_compute(cfg: SocConfig, op: OperatingPoint, core_freq: float,
                 gfx_freq: float) -> OperatingPoint:
    """Same memory/IO point, different compute clocks (voltages re-resolved)."""
    v_core, v_gfx = resolve_compute_voltages(cfg, core_freq, gfx_freq)
    volts = dict(op.rail_voltages)
    volts["V_CORE"] = v_core
    volts["V_GFX"] = v_gfx
    return dataclasses.replace(op, core_freq=core_freq, gfx_freq=gfx_freq,
                               rail_voltages=volts)


def validate_config(cfg: SocConfig) -> ValidationReport:
    """Check every structural invariant; never raises, always reports."""
    bad: list[Violation] = []

    def flag(path, msg):
        bad.append(Violation(path, msg))

    if cfg.tdp_watts <= 0:
        flag("tdp_watts", f"must be > 0, got {cfg.tdp_watts}")
    if cfg.evaluation_interval_ms <= 0:
        flag("evaluation_interval_ms", "must be > 0")
    if cfg.sample_period_ms <= 0 or cfg.sample_period_ms > cfg.evaluation_interval_ms:
        flag("sample_period_ms", "must be > 0 and <= evaluation_interval_ms")
    if not 0 < cfg.mc_freq_ratio <= 1:
        flag("mc_freq_ratio", "must be in (0, 1]")

    for i, b in enumerate(cfg.dram_freq_bins):
        if b <= 0:
            flag(f"dram_freq_bins[{i}]", "must be > 0")
    for a, b in zip(cfg.dram_freq_bins, cfg.dram_freq_bins[1:]):
        if b <= a:
            flag("dram_freq_bins", f"not strictly increasing at {a} -> {b}")

    rail_names = {r.name for r in cfg.rails}
    for needed in ("V_SA", "VDDQ", "V_IO"):
        if needed not in rail_names:
            flag("rails", f"missing required rail {needed}")
    if not rail_names & {"V_CORE", "V_GFX"}:
        flag("rails", "missing compute rails (V_CORE/V_GFX)")

    for name, curve in cfg.vf_curves.items():
        if not curve.is_monotone():
            flag(f"vf_curves[{name}]", "curve must be non-decreasing in frequency")
        if name in rail_names and curve.v_min < cfg.rail(name).v_min:
            flag(f"vf_curves[{name}]",
                 f"curve floor {curve.v_min} below rail v_min {cfg.rail(name).v_min}")
    for name in rail_names:
        if name not in cfg.vf_curves:
            flag(f"vf_curves[{name}]", "rail has no V/f curve")

    domain_names = sorted(d.name for d in cfg.domains)
    if cfg.domains and domain_names != ["compute", "io", "memory"]:
        flag("domains", f"expected compute/io/memory, got {domain_names}")

    bins = set(cfg.dram_freq_bins)
    prev = 0.0
    for i, lv in enumerate(cfg.levels):
        if not any(_freq_eq(lv.dram_freq, b) for b in bins):
            flag(f"levels[{i}].dram_freq",
                 f"{lv.dram_freq} is not a configured DRAM frequency bin")
        if lv.dram_freq < prev:
            flag(f"levels[{i}]", "ladder must be ascending in dram_freq")
        prev = lv.dram_freq
        try:
            op = operating_point(cfg, i)
        except Exception as exc:  # unresolved curves/rails already flagged
            flag(f"levels[{i}]", f"cannot resolve operating point: {exc}")
            continue
        req = required_rail_voltages(cfg, op.clocks())
        for rail_name, need in req.items():
            have = op.rail_voltages.get(rail_name, 0.0)
            if have < need - 1e-12:
                flag(f"levels[{i}].rail_voltages[{rail_name}]",
                     f"{have:.4f} V below V/f requirement {need:.4f} V")

    footprint = mrc_sram_footprint(cfg.mrc_bank)
    if footprint > cfg.mrc_bank.sram_budget_bytes:
        flag("mrc_bank", f"register sets need {footprint} B, "
             f"budget is {cfg.mrc_bank.sram_budget_bytes} B")

    for f in dataclasses.fields(cfg.power_coefficients):
        v = getattr(cfg.power_coefficients, f.name)
        if isinstance(v, (int, float)) and f.name != "mrc_perf_penalty" and v < 0:
            flag(f"power_coefficients.{f.name}", f"must be >= 0, got {v}")

    for group in ("display_gbps", "camera_gbps"):
        for k, v in getattr(cfg.static_demand_table, group).items():
            if v < 0:
                flag(f"static_demand_table.{group}[{k}]", "must be >= 0")

    return ValidationReport(tuple(bad))


# --------------------------------------------------------------------------
# JSON config I/O


def config_to_dict(cfg: SocConfig) -> dict:
    return {
        "tdp_watts": cfg.tdp_watts,
        "evaluation_interval_ms": cfg.evaluation_interval_ms,
        "sample_period_ms": cfg.sample_period_ms,
        "mc_freq_ratio": cfg.mc_freq_ratio,
        "dram_freq_bins": list(cfg.dram_freq_bins),
        "rails": [dataclasses.asdict(r) for r in cfg.rails],
        "domains": [dataclasses.asdict(d) for d in cfg.domains],
        "vf_curves": {k: {"v_min": c.v_min, "points": [list(p) for p in c.points]}
                      for k, c in cfg.vf_curves.items()},
        "levels": [{"dram_freq": lv.dram_freq,
                    "io_interconnect_freq": lv.io_interconnect_freq,
                    "rail_voltage_overrides": dict(lv.rail_voltage_overrides)}
                   for lv in cfg.levels],
        "power_coefficients": dataclasses.asdict(cfg.power_coefficients),
        "perf_model": dataclasses.asdict(cfg.perf_model),
        "counter_gains": dataclasses.asdict(cfg.counter_gains),
        "static_demand_table": dataclasses.asdict(cfg.static_demand_table),
        "mrc_bank": {
            "sram_budget_bytes": cfg.mrc_bank.sram_budget_bytes,
            "entries": [{"optimized_for": e.optimized_for,
                         "payload_hex": e.payload.hex()}
                        for e in cfg.mrc_bank.entries],
        },
        "core_base_freq": cfg.core_base_freq,
        "gfx_base_freq": cfg.gfx_base_freq,
        "core_max_freq": cfg.core_max_freq,
        "gfx_max_freq": cfg.gfx_max_freq,
        "graphics_core_share": cfg.graphics_core_share,
        "ghz_per_watt": cfg.ghz_per_watt,
        "static_bw_guard": cfg.static_bw_guard,
        "min_dwell_intervals": cfg.min_dwell_intervals,
        "coscale_compute_bound": cfg.coscale_compute_bound,
    }


def config_from_dict(data: Mapping) -> SocConfig:
    try:
        rails = tuple(VoltageRail(**r) for r in data.get("rails", ()))
        domains = tuple(DomainDesc(name=d["name"],
                                   components=tuple(d.get("components", ())),
                                   rails=tuple(d.get("rails", ())))
                        for d in data.get("domains", ()))
        curves = {k: VfCurve(points=tuple(tuple(p) for p in c["points"]),
                             v_min=c["v_min"])
                  for k, c in data.get("vf_curves", {}).items()}
        levels = tuple(LevelSpec(dram_freq=lv["dram_freq"],
                                 io_interconnect_freq=lv["io_interconnect_freq"],
                                 rail_voltage_overrides=dict(lv.get("rail_voltage_overrides", {})))
                       for lv in data.get("levels", ()))
        bank_data = data.get("mrc_bank", {})
        bank = MrcBank(
            entries=tuple(MrcRegisterSet(optimized_for=e["optimized_for"],
                                         payload=bytes.fromhex(e["payload_hex"]))
                          for e in bank_data.get("entries", ())),
            sram_budget_bytes=bank_data.get("sram_budget_bytes", 512),
        )
        sdt = data.get("static_demand_table", {})
        scalars = {k: data[k] for k in (
            "tdp_watts", "evaluation_interval_ms", "sample_period_ms",
            "mc_freq_ratio", "core_base_freq", "gfx_base_freq", "core_max_freq",
            "gfx_max_freq", "graphics_core_share", "ghz_per_watt",
            "static_bw_guard", "min_dwell_intervals", "coscale_compute_bound",
        ) if k in data}
        return SocConfig(
            rails=rails,
            domains=domains,
            dram_freq_bins=tuple(data.get("dram_freq_bins", ())),
            vf_curves=curves,
            levels=levels,
            power_coefficients=PowerCoefficients(**data.get("power_coefficients", {})),
            perf_model=PerfModel(**data.get("perf_model", {})),
            counter_gains=CounterGains(**data.get("counter_gains", {})),
            static_demand_table=StaticDemandTable(
                display_gbps=dict(sdt.get("display_gbps", {})),
                display_ref_hz=sdt.get("display_ref_hz", 60.0),
                camera_gbps=dict(sdt.get("camera_gbps", {})),
                camera_ref_fps=sdt.get("camera_ref_fps", 30.0),
            ),
            mrc_bank=bank,
            **scalars,
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"bad config structure: {exc}") from exc


def load_config(path) -> SocConfig:
    text = Path(path).read_text()
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from exc
    return config_from_dict(data)


def save_config(cfg: SocConfig, path) -> None:
    Path(path).write_text(json.dumps(config_to_dict(cfg), indent=2, sort_keys=True) + "\n")


def default_config() -> SocConfig:
    """The bundled two-level mobile config (see data/skylake-like.cfg)."""
    with resources.files("socdvfs.data").joinpath("skylake-like.cfg").open() as fh:
        return config_from_dict(json.load(fh))
