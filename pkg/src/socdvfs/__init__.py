"""socdvfs: a discrete-time simulator and governor for coordinated
voltage/frequency scaling of the compute, IO and memory domains of a
thermally-constrained mobile SoC.

The package models demand prediction from performance counters, power-budget
redistribution under a TDP cap, the microsecond-scale transition flow with
DRAM-interface register reloads, and the resulting power/performance of
several scaling policies over workload traces.
"""

from .governor import (CalibrationError, Decision, DomainBudgets,
                       InfeasibleTdpError, PowerToFreqMap, PstateChoice,
                       ThresholdSet, calibrate_thresholds, load_thresholds,
                       predict, project_perf_boost, redistribute_budget,
                       save_thresholds, select_compute_pstate,
                       static_threshold_from_ladder)
from .power import (ActivitySample, PowerBreakdown, PowerCoefficients,
                    compute_power, edp, energy, io_domain_power, mc_power,
                    memory_power, mrc_penalty, soc_power)
from .sim import (FitError, POLICIES, SimReport, bundled_trace,
                  calibrate_coefficients, compare_policies, comparison_table,
                  fit_thresholds, oracle_decide, simulate, tdp_sweep)
from .soc import (ConfigError, MrcBank, MrcRegisterSet, OperatingPoint,
                  SocConfig, ValidationReport, VfCurve, VoltageRail,
                  default_config, load_config, mrc_lookup, mrc_sram_footprint,
                  operating_point, save_config, validate_config)
from .telemetry import PerfCounterSample, average_window, sample_counters
from .transition import (SocState, StepLatencies, TransitionError,
                         TransitionPlan, check_plan_safety, execute_transition,
                         plan_transition)
from .workload import (PeripheralConfig, PhaseSpec, SynthesisProfile,
                       TraceFormatError, TraceSlice, WorkloadTrace, load_trace,
                       relative_performance, save_trace, static_demand,
                       synthesize)

__version__ = "0.1.0"
