"""Workload traces: the time-sliced demand description a run consumes.

A trace is a sequence of slices, each carrying a bottleneck decomposition
(compute / memory-latency / memory-bandwidth fractions that sum to 1),
per-agent bandwidth demands, a C-state label and the peripheral setup.
Traces load from CSV (one row per slice) with a JSON sidecar for metadata.
"""

from __future__ import annotations

import csv
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Mapping, Optional, Tuple

import numpy as np

from .power import POWER_STATES
from .soc import OperatingPoint, PerfModel, StaticDemandTable

TRACE_COLUMNS = ("duration_ms", "frac_compute", "frac_lat", "frac_bw",
                 "core_bw", "gfx_bw", "io_bw", "scalability", "cstate")
WORKLOAD_CLASSES = ("cpu", "graphics", "battery-life")
_FRAC_TOL = 1e-9


class TraceFormatError(Exception):
    """Parse or invariant failure; message carries the slice location."""


@dataclass(frozen=True)
class PeripheralConfig:
    """Attached displays and camera/ISP streams, as the CSRs would report."""

    displays: Tuple[Tuple[str, float], ...] = ()   # (resolution class, Hz)
    cameras: Tuple[Tuple[str, float], ...] = ()    # (resolution class, fps)

    MAX_DISPLAYS = 3

    def __post_init__(self):
        if len(self.displays) > self.MAX_DISPLAYS:
            raise TraceFormatError(
                f"{len(self.displays)} displays configured; laptop-class cap is "
                f"{self.MAX_DISPLAYS}")


@dataclass(frozen=True)
class TraceSlice:
    duration_ms: float
    frac_compute: float
    frac_mem_latency: float
    frac_mem_bandwidth: float
    core_bw_demand: float = 0.0     # GB/s
    gfx_bw_demand: float = 0.0
    io_bw_demand: float = 0.0
    cpu_scalability: float = 0.0    # perf gain per unit core-frequency gain
    power_state: str = "C0"
    peripheral_config: PeripheralConfig = field(default_factory=PeripheralConfig)

    def validate(self, where: str = "slice") -> None:
        if self.duration_ms <= 0:
            raise TraceFormatError(f"{where}: duration must be > 0")
        fracs = (self.frac_compute, self.frac_mem_latency, self.frac_mem_bandwidth)
        if any(f < 0 or f > 1 for f in fracs):
            raise TraceFormatError(f"{where}: fractions must be in [0, 1]")
        if abs(sum(fracs) - 1.0) > _FRAC_TOL:
            raise TraceFormatError(
                f"{where}: bottleneck fractions sum to {sum(fracs):.6f}, expected 1")
        if not 0.0 <= self.cpu_scalability <= 1.0:
            raise TraceFormatError(f"{where}: scalability must be in [0, 1]")
        for name in ("core_bw_demand", "gfx_bw_demand", "io_bw_demand"):
            if getattr(self, name) < 0:
                raise TraceFormatError(f"{where}: {name} must be >= 0")
        if self.power_state not in POWER_STATES:
            raise TraceFormatError(f"{where}: unknown power state {self.power_state!r}")

    @property
    def total_bw_demand(self) -> float:
        return self.core_bw_demand + self.gfx_bw_demand + self.io_bw_demand


@dataclass(frozen=True)
class WorkloadTrace:
    name: str
    slices: Tuple[TraceSlice, ...]
    wl_class: str = "cpu"
    seed: Optional[int] = None

    def __post_init__(self):
        if self.wl_class not in WORKLOAD_CLASSES:
            raise TraceFormatError(f"unknown workload class {self.wl_class!r}")

    @property
    def duration_ms(self) -> float:
        return sum(s.duration_ms for s in self.slices)

    def slice_at(self, t_ms: float) -> TraceSlice:
        acc = 0.0
        for s in self.slices:
            acc += s.duration_ms
            if t_ms < acc:
                return s
        return self.slices[-1]

    def mean_scalability(self) -> float:
        total = self.duration_ms
        if total == 0:
            return 0.0
        return sum(s.cpu_scalability * s.duration_ms for s in self.slices) / total


def load_trace(path) -> WorkloadTrace:
    """Load a CSV trace (plus optional `<path>.json` sidecar) and validate it."""
    path = Path(path)
    sidecar = Path(str(path) + ".json")
    meta = {}
    if sidecar.exists():
        meta = json.loads(sidecar.read_text())
    peripherals = _peripherals_from_meta(meta.get("peripherals", {}))

    slices = []
    with path.open(newline="") as fh:
        reader = csv.reader(row for row in fh if not row.startswith("#"))
        try:
            header = tuple(next(reader))
        except StopIteration:
            header = TRACE_COLUMNS  # no rows at all: an empty, zero-length trace
        if header != TRACE_COLUMNS:
            raise TraceFormatError(
                f"{path}: header {header} does not match {TRACE_COLUMNS}")
        for i, row in enumerate(reader):
            if not row:
                continue
            try:
                s = TraceSlice(
                    duration_ms=float(row[0]),
                    frac_compute=float(row[1]),
                    frac_mem_latency=float(row[2]),
                    frac_mem_bandwidth=float(row[3]),
                    core_bw_demand=float(row[4]),
                    gfx_bw_demand=float(row[5]),
                    io_bw_demand=float(row[6]),
                    cpu_scalability=float(row[7]),
                    power_state=row[8].strip(),
                    peripheral_config=peripherals,
                )
            except (IndexError, ValueError) as exc:
                raise TraceFormatError(f"{path} slice {i}: {exc}") from exc
            s.validate(where=f"{path} slice {i}")
            slices.append(s)

    return WorkloadTrace(
        name=meta.get("name", path.stem),
        slices=tuple(slices),
        wl_class=meta.get("class", "cpu"),
        seed=meta.get("seed"),
    )


def save_trace(trace: WorkloadTrace, path) -> None:
    path = Path(path)
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(TRACE_COLUMNS)
        for s in trace.slices:
            w.writerow([s.duration_ms, s.frac_compute, s.frac_mem_latency,
                        s.frac_mem_bandwidth, s.core_bw_demand, s.gfx_bw_demand,
                        s.io_bw_demand, s.cpu_scalability, s.power_state])
    meta = {"name": trace.name, "class": trace.wl_class, "seed": trace.seed,
            "peripherals": _peripherals_to_meta(trace.slices[0].peripheral_config)
            if trace.slices else {}}
    Path(str(path) + ".json").write_text(json.dumps(meta, indent=2, sort_keys=True) + "\n")


def _peripherals_from_meta(meta: Mapping) -> PeripheralConfig:
    return PeripheralConfig(
        displays=tuple((d[0], float(d[1])) for d in meta.get("displays", ())),
        cameras=tuple((c[0], float(c[1])) for c in meta.get("cameras", ())),
    )


def _peripherals_to_meta(p: PeripheralConfig) -> dict:
    return {"displays": [list(d) for d in p.displays],
            "cameras": [list(c) for c in p.cameras]}


def static_demand(pcfg: PeripheralConfig, table: StaticDemandTable) -> float:
    """Bandwidth the peripheral configuration needs, in GB/s.

    Additive across peripherals; each class entry is anchored at the table's
    reference rate and scales linearly with refresh rate / frame rate.
    """
    total = 0.0
    for klass, hz in pcfg.displays:
        if klass not in table.display_gbps:
            raise LookupError(f"display class {klass!r} not in static demand table")
        total += table.display_gbps[klass] * hz / table.display_ref_hz
    for klass, fps in pcfg.cameras:
        if klass not in table.camera_gbps:
            raise LookupError(f"camera class {klass!r} not in static demand table")
        total += table.camera_gbps[klass] * fps / table.camera_ref_fps
    return total


def relative_performance(slice_: TraceSlice, op: OperatingPoint,
                         baseline: OperatingPoint, mrc_optimized: bool = True,
                         model: PerfModel = PerfModel()) -> float:
    """Throughput of `op` relative to `baseline` for one slice, in (0, 1+].

    Slowdown is the bottleneck-weighted sum of a core-frequency term, a
    loaded-latency ratio and a bandwidth-excess term; the returned ratio is
    its reciprocal. Unoptimized interface registers stretch the memory terms
    so a fully memory-bound slice lands at exactly `model.mrc_perf_factor`
    of its optimized throughput.
    """
    compute_term = slice_.frac_compute * (baseline.core_freq / op.core_freq)

    def lat(p: OperatingPoint) -> float:
        return model.lat_a_ns + model.lat_b_ns_ghz / p.mc_freq + \
            model.lat_c_ns_ghz / p.dram_freq

    lat_term = slice_.frac_mem_latency * (lat(op) / lat(baseline))
    peak = model.peak_bw_gbps_per_ghz * op.dram_freq
    bw_term = slice_.frac_mem_bandwidth * max(1.0, slice_.total_bw_demand / peak)

    mem = lat_term + bw_term
    if not mrc_optimized:
        mem /= model.mrc_perf_factor
    return 1.0 / (compute_term + mem)


# --------------------------------------------------------------------------
# Synthesis


@dataclass(frozen=True)
class PhaseSpec:
    """Mean behavior of one phase; jitter is fractional standard deviation."""

    duration_ms: float
    slice_ms: float = 30.0
    frac_compute: float = 1.0
    frac_lat: float = 0.0
    frac_bw: float = 0.0
    core_bw: float = 0.0
    gfx_bw: float = 0.0
    io_bw: float = 0.0
    scalability: float = 0.8
    cstate: str = "C0"
    demand_jitter: float = 0.0
    frac_jitter: float = 0.0


@dataclass(frozen=True)
class SynthesisProfile:
    name: str
    phases: Tuple[PhaseSpec, ...]
    repeats: int = 1
    wl_class: str = "cpu"
    peripherals: PeripheralConfig = field(default_factory=PeripheralConfig)

    def validate(self) -> None:
        if self.repeats < 1 or not self.phases:
            raise ValueError("profile needs at least one phase and one repeat")
        for i, ph in enumerate(self.phases):
            if ph.duration_ms <= 0 or ph.slice_ms <= 0:
                raise ValueError(f"phase {i}: durations must be > 0")
            if abs(ph.frac_compute + ph.frac_lat + ph.frac_bw - 1.0) > 1e-9:
                raise ValueError(f"phase {i}: mean fractions must sum to 1")
            if ph.demand_jitter < 0 or ph.frac_jitter < 0:
                raise ValueError(f"phase {i}: jitter must be >= 0")


def synthesize(profile: SynthesisProfile, seed: int = 0) -> WorkloadTrace:
    """Generate a trace from a phase profile; same (profile, seed) in, same
    trace out. Zero jitter reproduces the phase means exactly."""
    profile.validate()
    rng = np.random.default_rng(seed)
    slices = []
    for _ in range(profile.repeats):
        for ph in profile.phases:
            n = max(1, round(ph.duration_ms / ph.slice_ms))
            for _ in range(n):
                fracs = np.array([ph.frac_compute, ph.frac_lat, ph.frac_bw])
                if ph.frac_jitter > 0:
                    fracs = np.clip(fracs * rng.lognormal(0.0, ph.frac_jitter, 3), 0, None)
                    fracs = fracs / fracs.sum()
                demands = np.array([ph.core_bw, ph.gfx_bw, ph.io_bw])
                if ph.demand_jitter > 0:
                    demands = demands * rng.lognormal(0.0, ph.demand_jitter, 3)
                slices.append(TraceSlice(
                    duration_ms=ph.slice_ms,
                    frac_compute=float(fracs[0]),
                    frac_mem_latency=float(fracs[1]),
                    frac_mem_bandwidth=float(fracs[2]),
                    core_bw_demand=float(demands[0]),
                    gfx_bw_demand=float(demands[1]),
                    io_bw_demand=float(demands[2]),
                    cpu_scalability=ph.scalability,
                    power_state=ph.cstate,
                    peripheral_config=profile.peripherals,
                ))
    return WorkloadTrace(name=profile.name, slices=tuple(slices),
                         wl_class=profile.wl_class, seed=seed)


def profile_from_dict(data: Mapping) -> SynthesisProfile:
    return SynthesisProfile(
        name=data.get("name", "synthetic"),
        phases=tuple(PhaseSpec(**ph) for ph in data["phases"]),
        repeats=data.get("repeats", 1),
        wl_class=data.get("class", "cpu"),
        peripherals=_peripherals_from_meta(data.get("peripherals", {})),
    )


def load_profile(path) -> SynthesisProfile:
    return profile_from_dict(json.loads(Path(path).read_text()))
