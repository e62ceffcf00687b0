"""Command-line entry point.

Subcommands: ``grid``, ``detect``, ``simulate``, ``roc``, ``sweep``.
Failures print one JSON line ``{"error": ..., "message": ...}`` on stderr and
exit nonzero (2 for bad input or config, 1 otherwise).
"""
from __future__ import annotations

import argparse
import csv
import json
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .antijam import (
    CorrectionPolicy,
    choose_correction,
    correct_symbol,
    paper_candidates,
)
from .config import ConfigError, ExperimentConfig, load_config
from .detector import detect, disambiguate_cause
from .iqfile import IqFormatError, load_symbol, read_reference, write_iq, write_reference
from .ofdm import OfdmSymbol
from .sim import compute_roc, compute_subcarrier_roc, emit_outputs, run_monte_carlo, simulate_trial, sweep
from .ssb import build_ssb_grid, validate_grid


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(message)


def _int_list(text: str) -> list[int]:
    try:
        vals = [int(v) for v in text.split(",") if v.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from exc
    if not vals:
        raise argparse.ArgumentTypeError("empty list")
    return vals


def _experiment(path) -> ExperimentConfig:
    return load_config(path) if path else ExperimentConfig()


# -- grid ---------------------------------------------------------------------


def cmd_grid(args) -> int:
    grid = build_ssb_grid(args.dmrs_shift, args.sss_width)
    problems = validate_grid(grid)
    print(json.dumps(grid.summary(), sort_keys=True))
    if not args.no_map:
        print(grid.ascii_map())
    if args.csv:
        with open(args.csv, "w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["symbol", "subcarrier", "kind"])
            w.writerows(grid.csv_rows())
    if problems:
        for p in problems:
            print(f"violation: {p}", file=sys.stderr)
        return 1
    return 0


# -- detect -------------------------------------------------------------------


def cmd_detect(args) -> int:
    exp = _experiment(args.config)
    dcfg = exp.trial.detector
    if args.max_targets is not None:
        dcfg = replace(dcfg, max_targets=args.max_targets or None)
    rx = load_symbol(args.iq)
    reference = read_reference(args.reference, rx.n_fft)
    report = detect(rx, reference, dcfg)

    cause = report.cause
    best_n = None
    if cause is None:
        if not args.alt_n:
            raise UsageError("every active subcarrier shows LoO; pass --alt-n (and --alt-reference) to re-check N")
        pattern = args.alt_reference or args.reference

        def rerun(n: int):
            sym = OfdmSymbol(rx.samples[:n] if rx.n_fft >= n else np.pad(rx.samples, (0, n - rx.n_fft)),
                             rx.sample_rate / n)
            return detect(sym, read_reference(pattern.replace("{n}", str(n)), n), dcfg)

        verdict = disambiguate_cause(report, args.alt_n, rerun)
        cause, best_n = verdict.cause, verdict.best_n

    header = ["subcarrier", "psi", "s", "m_hat", "verdict"]
    rows = [list(r) for r in report.rows()]
    corrected_path = None
    if args.correct:
        policy = CorrectionPolicy(args.policy or exp.antijam.policy.value)
        cands = paper_candidates(exp.antijam.candidate_step, exp.antijam.candidate_max)
        corrected = rx
        for det in report.detections:
            corr = choose_correction(det, policy, rx.n_fft, cands, reference[det.subcarrier])
            if corr is not None:
                corrected = correct_symbol(corrected, det.frequency, det.gain, corr)
        after = detect(corrected, reference, dcfg)
        header += ["psi_before", "psi_after"]
        for row in rows:
            i = row[0]
            row += [int(report.psi.counts[i]), int(after.psi.counts[i])]
        if args.corrected_out:
            write_iq(args.corrected_out, corrected)
            corrected_path = args.corrected_out

    out = open(args.out, "w", newline="", encoding="utf-8") if args.out else sys.stdout
    try:
        w = csv.writer(out, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(v) if isinstance(v, float) else v for v in row])
    finally:
        if args.out:
            out.close()
    summary = {
        "cause": cause.value,
        "best_n": best_n,
        "n": rx.n_fft,
        "detections": [[d.subcarrier, d.m_hat] for d in report.detections],
        "loo_fraction": report.loo_fraction(),
    }
    if corrected_path:
        summary["corrected"] = str(corrected_path)
    line = "cause: " + json.dumps(summary, sort_keys=True)
    print(line if args.out else "# " + line)
    return 0


# -- simulate / roc / sweep ---------------------------------------------------


def cmd_simulate(args) -> int:
    exp = _experiment(args.config)
    cfg = exp.trial
    if args.trials is not None:
        cfg = replace(cfg, trials=args.trials)
    if args.iq_out or args.reference_out:
        rx, reference, truth = simulate_trial(cfg, args.trial_index)
        if args.iq_out:
            write_iq(args.iq_out, rx)
        if args.reference_out:
            write_reference(args.reference_out, reference)
        print(json.dumps({"trial": args.trial_index, **truth}, sort_keys=True))
        return 0
    records = run_monte_carlo(cfg, args.records, exp.workers)
    present = sum(r.jammer_present for r in records)
    flagged_present = sum(r.jammer_present and r.max_statistic >= cfg.detector.tau for r in records)
    flagged_absent = sum((not r.jammer_present) and r.max_statistic >= cfg.detector.tau for r in records)
    print(json.dumps({
        "n": cfg.n_fft,
        "trials": len(records),
        "present": present,
        "absent": len(records) - present,
        "tau": cfg.detector.tau,
        "detected_present": flagged_present,
        "flagged_absent": flagged_absent,
    }, sort_keys=True))
    return 0


def cmd_roc(args) -> int:
    exp = _experiment(args.config)
    cfg = exp.trial
    out = Path(args.out)
    records = run_monte_carlo(cfg, out / "records.jsonl" if args.keep_records else None, exp.workers)
    curve = compute_roc(records, cfg.tau_grid, cfg.n_fft, cfg.snr_db, cfg.jsr_db)
    emit_outputs([curve], out)
    if exp.per_subcarrier:
        sub = compute_subcarrier_roc(records, cfg.tau_grid, cfg.n_fft, cfg.snr_db, cfg.jsr_db)
        emit_outputs([sub], out, "roc_subcarrier.csv", "summary_subcarrier.csv")
    print(json.dumps({"n": cfg.n_fft, "auc": curve.auc, "out": str(out)}))
    return 0


def cmd_sweep(args) -> int:
    exp = _experiment(args.config)
    cfg = exp.trial
    if args.trials is not None:
        cfg = replace(cfg, trials=args.trials)
    if args.base_seed is not None:
        cfg = replace(cfg, base_seed=args.base_seed)
    curves = sweep(cfg, args.n, args.out, exp.workers, args.keep_records, exp.per_subcarrier)
    for c in curves:
        print(json.dumps({"n": c.n_fft, "auc": c.auc}))
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="loojam", description="OFDM jamming detection by loss of orthogonality")
    p.add_argument("--version", action="version", version=f"loojam {__version__}")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    g = sub.add_parser("grid", help="print the SSB resource grid")
    g.add_argument("--dmrs-shift", type=int, default=0, help="DMRS column offset (cell ID mod 4)")
    g.add_argument("--sss-width", type=int, default=127)
    g.add_argument("--csv", help="write symbol,subcarrier,kind rows here")
    g.add_argument("--no-map", action="store_true", help="skip the ASCII map")
    g.set_defaults(func=cmd_grid)

    d = sub.add_parser("detect", help="run the LoO detector on an IQ file")
    d.add_argument("iq", help="IQ file (binary or .csv)")
    d.add_argument("--reference", required=True, help="reference CSV subcarrier,re,im")
    d.add_argument("--config", help="TOML config for [detector] and [antijam]")
    d.add_argument("--max-targets", type=int, help="targets per symbol; 0 means unlimited")
    d.add_argument("--alt-n", type=_int_list, help="candidate N values for the wrong-N re-check")
    d.add_argument("--alt-reference", help="reference path for the re-check; '{n}' is replaced by N")
    d.add_argument("--correct", action="store_true", help="apply the anti-jamming correction")
    d.add_argument("--policy", choices=[p.value for p in CorrectionPolicy])
    d.add_argument("--corrected-out", help="write the corrected symbol here")
    d.add_argument("--out", help="report CSV path (default stdout)")
    d.set_defaults(func=cmd_detect)

    s = sub.add_parser("simulate", help="run one batch of trials")
    s.add_argument("--config", required=True)
    s.add_argument("--trials", type=int)
    s.add_argument("--records", help="stream trial records to this JSONL file")
    s.add_argument("--iq-out", help="write one trial's received symbol instead of running the batch")
    s.add_argument("--reference-out", help="write that trial's reference CSV")
    s.add_argument("--trial-index", type=int, default=0)
    s.set_defaults(func=cmd_simulate)

    r = sub.add_parser("roc", help="ROC for one configuration")
    r.add_argument("--config", required=True)
    r.add_argument("--out", required=True)
    r.add_argument("--keep-records", action="store_true")
    r.set_defaults(func=cmd_roc)

    w = sub.add_parser("sweep", help="ROC per FFT size")
    w.add_argument("--n", type=_int_list, required=True, help="e.g. 256,512,1024,2048")
    w.add_argument("--config")
    w.add_argument("--out", default="runs/sweep")
    w.add_argument("--trials", type=int)
    w.add_argument("--base-seed", type=int)
    w.add_argument("--keep-records", action="store_true")
    w.set_defaults(func=cmd_sweep)
    return p


def _fail(kind: str, message: str, code: int) -> int:
    print(json.dumps({"error": kind, "message": message}), file=sys.stderr)
    return code


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.func(args)
    except UsageError as exc:
        return _fail("usage", str(exc), 2)
    except (ConfigError, IqFormatError) as exc:
        return _fail(type(exc).__name__, str(exc), 2)
    except FileNotFoundError as exc:
        return _fail("FileNotFoundError", str(exc), 2)
    except (ValueError, OSError) as exc:
        return _fail(type(exc).__name__, str(exc), 1)


if __name__ == "__main__":
    sys.exit(main())
