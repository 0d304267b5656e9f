"""Offline threshold calibration and its quality against the oracle.

Fits the per-counter mean+sigma thresholds on the bundled 500-trace
synthetic corpus, then scores the resulting governor against brute-force
decisions on both the fitting corpus and a disjoint held-out corpus.
"""

from socdvfs import corpus, operating_point
from socdvfs.governor import predict
from socdvfs.sim import fit_thresholds, oracle_decide
from socdvfs.soc import default_config

cfg = default_config()
traces = corpus.calibration_corpus(500)
thr = fit_thresholds(traces, cfg, bound=0.01)
print("fitted thresholds (degradation bound 1%):")
for k, v in thr.to_dict().items():
    print(f"  {k:15s} {v:.3f}")

hi, lo = operating_point(cfg, 1), operating_point(cfg, 0)


def score(name, trace_set):
    entries = corpus.calibration_entries(trace_set, cfg)
    downs = false_pos = agree = 0
    for e in entries:
        got = predict(e.counters, 0.0, thr, current_level=1).target_level
        want = oracle_decide(e.trace.slices[0], hi, lo, thr.degradation_bound, cfg)
        agree += got == want
        if got == 0:
            downs += 1
            false_pos += want != 0
    print(f"{name}: {downs} step-downs, {false_pos} false positives, "
          f"accuracy {agree / len(entries):.1%}")


score("calibration corpus", traces)
score("held-out corpus   ", corpus.heldout_corpus(500))
print("\n(a false positive would mean stepping down into a >1% true loss;")
print(" disagreements are conservative: the governor stays high on traces")
print(" the oracle would have allowed down)")
