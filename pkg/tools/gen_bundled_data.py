"""Regenerate the data files bundled inside socdvfs/data.

Run from the repo root:  python tools/gen_bundled_data.py
"""

import json
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parents[1] / "src"))

from socdvfs.soc import (DomainDesc, LevelSpec, MrcBank, MrcRegisterSet,
                         SocConfig, VfCurve, VoltageRail, config_to_dict,
                         StaticDemandTable)
from socdvfs.workload import (PeripheralConfig, TraceSlice, WorkloadTrace,
                              save_trace)

DATA = Path(__file__).resolve().parents[1] / "src" / "socdvfs" / "data"


def build_config() -> SocConfig:
    # Fast-rail nominals sized so the one-bin swing is roughly 100 mV
    # (a 2 us ramp at the 50 mV/us regulator slew rate).
    rails = (
        VoltageRail("V_SA", v_min=0.40, v_nominal=0.50),
        VoltageRail("VDDQ", v_min=1.00, v_nominal=1.00),
        VoltageRail("V_IO", v_min=0.51, v_nominal=0.60),
        VoltageRail("V_CORE", v_min=0.55, v_nominal=1.00),
        VoltageRail("V_GFX", v_min=0.70, v_nominal=1.05),
    )
    curves = {
        # Shared system-agent rail bottoms out at the low point's MC clock.
        "V_SA": VfCurve(points=((0.53, 0.40), (0.80, 0.50)), v_min=0.40),
        "VDDQ": VfCurve(points=((0.0, 1.00),), v_min=1.00),
        "V_IO": VfCurve(points=((1.06, 0.51), (1.60, 0.60)), v_min=0.51),
        "V_CORE": VfCurve(points=((0.4, 0.55), (0.8, 1.00), (3.1, 1.00)), v_min=0.55),
        "V_GFX": VfCurve(points=((0.3, 0.70), (1.1, 1.05)), v_min=0.70),
    }
    domains = (
        DomainDesc("compute", components=("cores", "gfx"), rails=("V_CORE", "V_GFX")),
        DomainDesc("io", components=("io_interconnect", "display", "isp"),
                   rails=("V_SA", "V_IO")),
        DomainDesc("memory", components=("mc", "ddrio", "dram"),
                   rails=("V_SA", "V_IO", "VDDQ")),
    )
    bank = MrcBank(entries=(
        MrcRegisterSet(optimized_for=1.60, payload=bytes(range(256))),
        MrcRegisterSet(optimized_for=1.06, payload=bytes(reversed(range(256)))),
    ), sram_budget_bytes=512)
    table = StaticDemandTable(
        display_gbps={"HD": 4.352, "FHD": 7.68, "4K": 17.92},
        display_ref_hz=60.0,
        camera_gbps={"HD30": 0.75, "FHD30": 1.5, "4K30": 6.0},
        camera_ref_fps=30.0,
    )
    return SocConfig(
        tdp_watts=4.5,
        rails=rails,
        domains=domains,
        dram_freq_bins=(0.8, 1.06, 1.6),
        vf_curves=curves,
        levels=(
            LevelSpec(dram_freq=1.06, io_interconnect_freq=0.4),
            LevelSpec(dram_freq=1.60, io_interconnect_freq=0.8),
        ),
        static_demand_table=table,
        mrc_bank=bank,
    )


def slices(rows, peripherals=PeripheralConfig()):
    return tuple(TraceSlice(*row, peripheral_config=peripherals) for row in rows)


def build_traces():
    traces = []

    # Core-bound with occasional demand spikes; memory-light.
    rows = []
    for i in range(30):
        core = 8.0 if i in (7, 19) else 1.5
        rows.append((30.0, 0.992, 0.005, 0.003, core, 0.05, 0.10, 0.9, "C0"))
    traces.append(WorkloadTrace("perlbench-like", slices(rows), "cpu"))

    # Latency-dominant, moderate demand.
    rows = [(30.0, 0.28, 0.62, 0.10, 6.5, 0.1, 0.2, 0.25, "C0")] * 30
    traces.append(WorkloadTrace("cactusadm-like", slices(rows), "cpu"))

    # Bandwidth microbenchmark: constant saturating demand, fully memory-bound.
    rows = [(30.0, 0.0, 0.15, 0.85, 24.0, 0.0, 0.0, 0.0, "C0")] * 30
    traces.append(WorkloadTrace("lbm-like", slices(rows), "cpu"))

    # Alternating multi-second phases: ~1 GB/s vs ~10 GB/s.
    rows = []
    for _ in range(4):
        rows += [(30.0, 0.970, 0.012, 0.018, 1.0, 0.05, 0.1, 0.7, "C0")] * 20
        rows += [(30.0, 0.300, 0.250, 0.450, 10.0, 0.2, 0.3, 0.3, "C0")] * 20
    traces.append(WorkloadTrace("astar-like", slices(rows), "cpu"))

    # Strongly compute-bound, scalability 0.8.
    rows = [(30.0, 0.965, 0.012, 0.023, 1.8, 0.05, 0.05, 0.8, "C0")] * 10
    traces.append(WorkloadTrace("compute-bound-like", slices(rows), "cpu"))

    # Frame rendering alternating sustained draw bursts with light scenes.
    rows = []
    for _ in range(4):
        rows += [(30.0, 0.975, 0.008, 0.017, 0.4, 1.2, 0.3, 0.85, "C0")] * 5
        rows += [(30.0, 0.550, 0.100, 0.350, 1.5, 9.0, 0.5, 0.85, "C0")] * 5
    traces.append(WorkloadTrace("graphics-like", slices(rows), "graphics"))

    # Frame-paced playback: 10% C0 / 5% C2 / 85% C8 per 180 ms cycle, with
    # the active burst straddling one 30 ms governor boundary so decisions
    # land while DRAM is clocked. Demand alternates light / IO-heavy cycles.
    display = PeripheralConfig(displays=(("HD", 60.0),))
    light = (18.0, 0.970, 0.010, 0.020, 0.5, 1.0, 0.6, 0.2, "C0")
    heavy = (18.0, 0.800, 0.080, 0.120, 3.0, 2.0, 3.0, 0.2, "C0")
    rows = []
    for cycle in range(5):
        rows.append((6.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, "C8"))
        rows.append(heavy if cycle % 2 else light)
        rows.append((9.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.6, 0.0, "C2"))
        rows.append((147.0, 1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, "C8"))
    traces.append(WorkloadTrace("video-playback-like", slices(rows, display),
                                "battery-life"))
    return traces


def build_profiles():
    return {
        "astar-like.profile.json": {
            "name": "astar-like-synth",
            "class": "cpu",
            "repeats": 4,
            "phases": [
                {"duration_ms": 600.0, "slice_ms": 30.0, "frac_compute": 0.97,
                 "frac_lat": 0.012, "frac_bw": 0.018, "core_bw": 1.0,
                 "scalability": 0.7},
                {"duration_ms": 600.0, "slice_ms": 30.0, "frac_compute": 0.3,
                 "frac_lat": 0.25, "frac_bw": 0.45, "core_bw": 10.0,
                 "scalability": 0.3},
            ],
        },
    }


def main():
    DATA.mkdir(parents=True, exist_ok=True)
    cfg = build_config()
    (DATA / "skylake-like.cfg").write_text(
        json.dumps(config_to_dict(cfg), indent=2, sort_keys=True) + "\n")
    for trace in build_traces():
        save_trace(trace, DATA / f"{trace.name}.trace")
    for name, profile in build_profiles().items():
        (DATA / name).write_text(json.dumps(profile, indent=2) + "\n")
    print(f"wrote {len(list(DATA.iterdir()))} files under {DATA}")


if __name__ == "__main__":
    main()
