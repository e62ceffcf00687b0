#!/usr/bin/env python3
"""Regenerate tests/fixtures/measured.json.

Records Monte-Carlo measurements the tests compare against:
per-N AUC of the ROC sweep, offset-estimate error at SNR 5 dB and the rate
at which the attacked subcarrier carries the largest statistic.
"""
import argparse
import json
import time
from pathlib import Path

import numpy as np

from loojam.config import load_config
from loojam.detector import detect, estimate_offset
from loojam.sim import AttackPlan, TrialConfig, simulate_trial, sweep

ROOT = Path(__file__).resolve().parents[1]
SWEEP_NS = (256, 512, 1024, 2048)


def offset_error(jsr_db: float, trials: int = 500, seed: int = 11) -> dict:
    cfg = TrialConfig(n_fft=256, snr_db=5.0, jsr_db=jsr_db, jammer=AttackPlan(offset=0.5, targets=(5,)),
                      base_seed=seed, trials=2 * trials)
    errs, found = [], 0
    for j in range(trials):
        rx, ref, _ = simulate_trial(cfg, 2 * j)
        est = estimate_offset(rx, ref, 5, cfg.detector)
        errs.append(abs(est.candidate - 0.5))
        found += est.found
    return {"jsr_db": jsr_db, "trials": trials, "base_seed": seed,
            "median_abs_error": float(np.median(errs)), "found_rate": found / trials}


def identification_rate(jsr_db: float, trials: int = 1000, seed: int = 12) -> dict:
    cfg = TrialConfig(n_fft=256, snr_db=5.0, jsr_db=jsr_db, jammer=AttackPlan(targets=(5,)),
                      base_seed=seed, trials=2 * trials)
    wins = 0
    for j in range(trials):
        rx, ref, _ = simulate_trial(cfg, 2 * j)
        s = detect(rx, ref, cfg.detector).statistic
        wins += bool(s[5] > np.max(np.delete(s, 5)))
    return {"jsr_db": jsr_db, "trials": trials, "base_seed": seed, "rate": wins / trials}


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--out", default=str(ROOT / "tests" / "fixtures" / "measured.json"))
    args = ap.parse_args()

    cfg = load_config(ROOT / "configs" / "roc_sweep.toml").trial
    t0 = time.perf_counter()
    curves = sweep(cfg, SWEEP_NS)
    elapsed = time.perf_counter() - t0
    data = {
        "roc_sweep": {
            "config": "configs/roc_sweep.toml",
            "seconds": round(elapsed, 1),
            "auc": {str(c.n_fft): c.auc for c in curves},
        },
        "offset_error": [offset_error(0.0), offset_error(10.0)],
        "identification": [identification_rate(0.0), identification_rate(10.0)],
    }
    Path(args.out).parent.mkdir(parents=True, exist_ok=True)
    Path(args.out).write_text(json.dumps(data, indent=2, sort_keys=True) + "\n")
    print(json.dumps(data, indent=2, sort_keys=True))


if __name__ == "__main__":
    main()
