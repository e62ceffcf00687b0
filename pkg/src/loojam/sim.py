"""Monte-Carlo driver: seeded trials, ROC aggregation and CSV export.

Each trial draws random unit-power QPSK on all N subcarriers, optionally
applies a frequency-shift attack to one uniformly drawn subcarrier, passes
the symbol through a channel realization, adds AWGN and runs the detector.
The receiver reference is the transmitted symbol times the true channel
response (perfect CSI). Even trial indices carry the jammer, odd ones do
not, so ``ceil(trials / 2)`` trials are jammer-present.

Trial seeds come from :func:`mix_seed`, so any trial can be recomputed on
its own and results do not depend on execution order.
"""
from __future__ import annotations

import csv
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np

from .channel import apply_tdl, load_profile, noise_variance, realize
from .detector import DetectorConfig, Verdict, detect
from .jammer import JammerConfig, JammerModel, apply_frequency_shift, apply_noise_jammer, complex_gaussian
from .ofdm import TWO_PI, OfdmSymbol, qpsk, synthesize

MASK64 = (1 << 64) - 1
GOLDEN64 = 0x9E3779B97F4A7C15
DEFAULT_FRACTIONS = (0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9)
DEFAULT_TAU_GRID = tuple(round(0.05 * j, 2) for j in range(21))


def mix_seed(base_seed: int, trial_index: int) -> int:
    """64-bit trial seed.

    ``z = base_seed + (trial_index + 1) * 0x9E3779B97F4A7C15 (mod 2**64)``
    followed by the splitmix64 finalizer::

        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9
        z = (z ^ (z >> 27)) * 0x94D049BB133111EB
        z =  z ^ (z >> 31)
    """
    if trial_index < 0:
        raise ValueError("trial index must be >= 0")
    z = (int(base_seed) + (int(trial_index) + 1) * GOLDEN64) & MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


@dataclass(frozen=True)
class AttackPlan:
    """How present-trials are attacked.

    ``offset``/``targets``/``phase`` fix the corresponding draw; ``None``
    draws it per trial (target uniform over subcarriers, offset a uniform
    integer part plus a value from ``offset_fractions``, phase uniform).
    ``seed`` pins the jammer's own randomness to ``mix_seed(seed, trial)``
    instead of the trial stream.
    """

    model: JammerModel = JammerModel.FREQUENCY_SHIFT
    offset: float | None = None
    targets: tuple[int, ...] | None = None
    amplitude: float | None = None
    phase: float | None = None
    offset_fractions: tuple[float, ...] = DEFAULT_FRACTIONS
    seed: int | None = None

    def __post_init__(self):
        object.__setattr__(self, "model", JammerModel(self.model))
        if self.model is JammerModel.PILOT_NULLING:
            raise ValueError("pilot_nulling acts on an SSB grid and is not supported by the symbol harness")
        if self.targets is not None:
            object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
            if not self.targets:
                raise ValueError("targets, when given, must be non-empty")
        if not self.offset_fractions:
            raise ValueError("offset_fractions must be non-empty")
        object.__setattr__(self, "offset_fractions", tuple(float(f) for f in self.offset_fractions))


@dataclass(frozen=True)
class TrialConfig:
    n_fft: int = 256
    snr_db: float | None = 5.0
    jsr_db: float = 0.0
    jammer: AttackPlan | None = field(default_factory=AttackPlan)
    channel_profile: str = "flat"
    channel_mode: str = "circular"
    trials: int = 2000
    base_seed: int = 0
    detector: DetectorConfig = field(default_factory=DetectorConfig)
    tau_grid: tuple[float, ...] = DEFAULT_TAU_GRID
    subcarrier_spacing: float = 15e3

    def __post_init__(self):
        if self.n_fft < 2:
            raise ValueError(f"N must be >= 2, got {self.n_fft}")
        if self.trials < 1:
            raise ValueError(f"trials must be >= 1, got {self.trials}")
        if self.channel_mode not in ("circular", "linear"):
            raise ValueError(f"channel mode must be 'circular' or 'linear', got {self.channel_mode!r}")
        tau = tuple(float(t) for t in self.tau_grid)
        if not tau:
            raise ValueError("tau_grid is empty")
        if any(not 0.0 <= t <= 1.0 for t in tau):
            raise ValueError("tau_grid values must lie in [0, 1]")
        if any(b < a for a, b in zip(tau, tau[1:])):
            raise ValueError("tau_grid must be sorted ascending")
        object.__setattr__(self, "tau_grid", tau)
        if self.base_seed < 0:
            raise ValueError("base_seed must be >= 0")

    @property
    def noiseless(self) -> bool:
        return self.snr_db is None or math.isinf(self.snr_db)


@dataclass(frozen=True)
class TrialRecord:
    """Outcome of one trial. Only nonzero statistics are stored."""

    trial_index: int
    seed: int
    jammer_present: bool
    statistics: dict[int, float]
    attacked_index: int | None = None
    true_offset: float | None = None
    m_hat: dict[int, float] = field(default_factory=dict)
    verdicts: dict[int, str] = field(default_factory=dict)

    @property
    def max_statistic(self) -> float:
        return max(self.statistics.values(), default=0.0)

    def to_json(self) -> str:
        return json.dumps(
            {
                "trial": self.trial_index,
                "seed": self.seed,
                "present": self.jammer_present,
                "attacked": self.attacked_index,
                "m": self.true_offset,
                "s": {str(k): v for k, v in sorted(self.statistics.items())},
                "m_hat": {str(k): v for k, v in sorted(self.m_hat.items())},
                "verdicts": {str(k): v for k, v in sorted(self.verdicts.items())},
            },
            sort_keys=True,
        )

    @classmethod
    def from_json(cls, line: str) -> "TrialRecord":
        d = json.loads(line)
        return cls(
            trial_index=int(d["trial"]),
            seed=int(d["seed"]),
            jammer_present=bool(d["present"]),
            statistics={int(k): float(v) for k, v in d["s"].items()},
            attacked_index=d["attacked"],
            true_offset=d["m"],
            m_hat={int(k): float(v) for k, v in d["m_hat"].items()},
            verdicts={int(k): str(v) for k, v in d["verdicts"].items()},
        )


@dataclass(frozen=True)
class RocPoint:
    tau: float
    p_f: float | None
    p_d: float | None


@dataclass(frozen=True)
class RocCurve:
    points: tuple[RocPoint, ...]
    auc: float | None
    n_fft: int
    snr_db: float | None
    jsr_db: float
    trials: int


@lru_cache(maxsize=16)
def _profile(name: str):
    return load_profile(name)


def is_present(trial_index: int, cfg: TrialConfig) -> bool:
    return cfg.jammer is not None and trial_index % 2 == 0


def simulate_trial(cfg: TrialConfig, trial_index: int):
    """Waveforms of one trial: ``(received, reference bins, ground truth dict)``."""
    n_fft = cfg.n_fft
    seed = mix_seed(cfg.base_seed, trial_index)
    rng = np.random.default_rng(seed)
    bins = qpsk(rng, n_fft)
    # all draws happen in every trial so present and absent trials share one stream layout
    target = int(rng.integers(n_fft))
    int_part = int(rng.integers(n_fft))
    plan = cfg.jammer or AttackPlan()
    frac = plan.offset_fractions[int(rng.integers(len(plan.offset_fractions)))]
    phase = float(rng.uniform(0.0, TWO_PI))
    ch_seed, noise_seed, jam_seed = (int(s) for s in rng.integers(0, 2**63 - 1, size=3))

    if plan.seed is not None:
        jam_seed = mix_seed(plan.seed, trial_index)
    clean = synthesize(bins, n_fft, cfg.subcarrier_spacing)
    tx = clean
    truth = {"seed": seed, "present": False, "attacked": None, "m": None}
    if is_present(trial_index, cfg):
        truth["present"] = True
        if plan.model is JammerModel.FREQUENCY_SHIFT:
            targets = plan.targets if plan.targets is not None else (target,)
            offset = plan.offset if plan.offset is not None else int_part + frac
            jcfg = JammerConfig(
                model=plan.model, offset=offset, amplitude=plan.amplitude,
                phase=plan.phase if plan.phase is not None else phase,
                jsr_db=cfg.jsr_db, targets=targets, seed=jam_seed,
            )
            tx, rec = apply_frequency_shift(clean, bins, jcfg)
            truth["attacked"] = int(targets[0])
            truth["m"] = float(rec.offsets[targets[0]])
        else:
            jcfg = JammerConfig(model=plan.model, jsr_db=cfg.jsr_db, seed=jam_seed)
            tx, _ = apply_noise_jammer(clean, jcfg)

    realization = realize(_profile(cfg.channel_profile), clean.sample_rate, ch_seed)
    circular = cfg.channel_mode == "circular"
    rx = apply_tdl(tx, realization, circular=circular)
    h = realization.frequency_response(n_fft)
    reference = h * bins
    if not cfg.noiseless:
        var = noise_variance(apply_tdl(clean, realization, circular=circular).power(), cfg.snr_db)
        noise = complex_gaussian(np.random.default_rng(noise_seed), n_fft, var)
        rx = rx.with_samples(rx.samples + noise)
    return rx, reference, truth


def run_trial(cfg: TrialConfig, trial_index: int) -> TrialRecord:
    """synthesize, maybe attack, channel, noise, detect; deterministic in ``(cfg, trial_index)``."""
    rx, reference, truth = simulate_trial(cfg, trial_index)
    report = detect(rx, reference, cfg.detector)
    s = report.statistic
    nz = np.nonzero(s)[0]
    verdicts = {int(i): v.value for i, v in enumerate(report.verdicts) if v is not Verdict.CLEAN}
    return TrialRecord(
        trial_index=trial_index,
        seed=truth["seed"],
        jammer_present=truth["present"],
        statistics={int(i): float(s[i]) for i in nz},
        attacked_index=truth["attacked"],
        true_offset=truth["m"],
        m_hat={d.subcarrier: d.m_hat for d in report.detections},
        verdicts=verdicts,
    )


def _run_chunk(args) -> list[TrialRecord]:
    cfg, indices = args
    return [run_trial(cfg, i) for i in indices]


def iter_trials(cfg: TrialConfig, workers: int = 1, chunk: int = 64) -> Iterator[TrialRecord]:
    """Records in trial-index order, computed serially or on ``workers`` processes."""
    if workers <= 1:
        for i in range(cfg.trials):
            yield run_trial(cfg, i)
        return
    chunks = [(cfg, range(s, min(s + chunk, cfg.trials))) for s in range(0, cfg.trials, chunk)]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        for batch in pool.map(_run_chunk, chunks):
            yield from batch


def run_monte_carlo(cfg: TrialConfig, records_path: str | Path | None = None, workers: int = 1) -> list[TrialRecord]:
    """All trials of ``cfg``; each record is written as a JSON line to ``records_path`` as it is produced."""
    out: list[TrialRecord] = []
    fh = None
    if records_path is not None:
        path = Path(records_path)
        try:
            path.parent.mkdir(parents=True, exist_ok=True)
            fh = path.open("w", encoding="utf-8")
        except OSError as exc:
            raise OSError(f"cannot open record file {path}: {exc}") from exc
    try:
        for rec in iter_trials(cfg, workers):
            if fh is not None:
                try:
                    fh.write(rec.to_json() + "\n")
                except OSError as exc:
                    raise OSError(f"trial {rec.trial_index}: failed to write record: {exc}") from exc
            out.append(rec)
    finally:
        if fh is not None:
            fh.close()
    return out


def load_records(path: str | Path) -> Iterator[TrialRecord]:
    with Path(path).open(encoding="utf-8") as fh:
        for line in fh:
            if line.strip():
                yield TrialRecord.from_json(line)


def _auc(points: Sequence[RocPoint]) -> float | None:
    if any(p.p_f is None or p.p_d is None for p in points):
        return None
    xy = sorted({(0.0, 0.0), (1.0, 1.0), *((p.p_f, p.p_d) for p in points)})
    x = np.array([a for a, _ in xy])
    y = np.array([b for _, b in xy])
    return float(np.sum(np.diff(x) * (y[1:] + y[:-1]) / 2.0))


def roc_from_scores(present: np.ndarray, scores: np.ndarray, tau_grid: Sequence[float]):
    """Points and AUC for decision ``score >= tau``. P_D/P_F are None with no positives/negatives."""
    present = np.asarray(present, dtype=bool)
    scores = np.asarray(scores, dtype=np.float64)
    n_pos = int(present.sum())
    n_neg = int(present.size - n_pos)
    points = []
    for tau in tau_grid:
        hit = scores >= tau
        p_d = float(np.sum(hit & present) / n_pos) if n_pos else None
        p_f = float(np.sum(hit & ~present) / n_neg) if n_neg else None
        points.append(RocPoint(float(tau), p_f, p_d))
    return tuple(points), _auc(points)


def compute_roc(records: Iterable[TrialRecord], tau_grid: Sequence[float], n_fft: int = 0,
                snr_db: float | None = None, jsr_db: float = 0.0) -> RocCurve:
    """Symbol-level ROC: a trial is declared attacked iff ``max_i s(i) >= tau``.

    AUC is the trapezoid area over the points plus the (0, 0) and (1, 1)
    corners; it is None when either class is missing.
    """
    present, scores = [], []
    for rec in records:
        present.append(rec.jammer_present)
        scores.append(rec.max_statistic)
    if not present:
        raise ValueError("no trial records")
    points, auc = roc_from_scores(np.array(present), np.array(scores), tau_grid)
    return RocCurve(points, auc, n_fft, snr_db, jsr_db, len(present))


def compute_subcarrier_roc(records: Iterable[TrialRecord], tau_grid: Sequence[float], n_fft: int,
                           snr_db: float | None = None, jsr_db: float = 0.0) -> RocCurve:
    """Per-subcarrier ROC: positives are attacked (trial, subcarrier) pairs, negatives all others."""
    tau = np.asarray(tau_grid, dtype=np.float64)
    pos_hits = np.zeros(tau.size, dtype=np.int64)
    neg_hits = np.zeros(tau.size, dtype=np.int64)
    n_pos = n_neg = trials = 0
    for rec in records:
        trials += 1
        attacked = rec.attacked_index if rec.jammer_present else None
        n_pos += attacked is not None
        n_neg += n_fft - (attacked is not None)
        for k, v in rec.statistics.items():
            hits = v >= tau
            if k == attacked:
                pos_hits += hits
            else:
                neg_hits += hits
        # zero statistics clear tau == 0 only
        zero = tau <= 0.0
        if attacked is not None and attacked not in rec.statistics:
            pos_hits += zero
        neg_hits += zero * (n_fft - (attacked is not None) - sum(1 for k in rec.statistics if k != attacked))
    if trials == 0:
        raise ValueError("no trial records")
    points = tuple(
        RocPoint(float(t), float(neg_hits[j] / n_neg) if n_neg else None, float(pos_hits[j] / n_pos) if n_pos else None)
        for j, t in enumerate(tau)
    )
    return RocCurve(points, _auc(points), n_fft, snr_db, jsr_db, trials)


def _fmt(x) -> str:
    if x is None:
        return "nan"
    if isinstance(x, float):
        return repr(x)
    return str(x)


def emit_outputs(curves: Sequence[RocCurve], out_dir: str | Path, name: str = "roc.csv",
                 summary_name: str = "summary.csv") -> tuple[Path, Path]:
    """Write ``roc.csv`` (n,snr_db,jsr_db,tau,p_f,p_d,trials) and ``summary.csv`` (n,auc)."""
    if not curves:
        raise ValueError("no curves to write")
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        roc_path = out / name
        with roc_path.open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["n", "snr_db", "jsr_db", "tau", "p_f", "p_d", "trials"])
            for c in curves:
                for p in c.points:
                    w.writerow([c.n_fft, _fmt(c.snr_db), _fmt(float(c.jsr_db)), _fmt(p.tau), _fmt(p.p_f),
                                _fmt(p.p_d), c.trials])
        summary_path = out / summary_name
        with summary_path.open("w", newline="", encoding="utf-8") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["n", "auc"])
            for c in curves:
                w.writerow([c.n_fft, _fmt(c.auc)])
    except OSError as exc:
        raise OSError(f"cannot write outputs to {out}: {exc}") from exc
    return roc_path, summary_path


def read_roc_csv(path: str | Path) -> list[dict]:
    with Path(path).open(newline="", encoding="utf-8") as fh:
        return list(csv.DictReader(fh))


def sweep(cfg: TrialConfig, ns: Sequence[int], out_dir: str | Path | None = None, workers: int = 1,
          keep_records: bool = False, per_subcarrier: bool = False) -> list[RocCurve]:
    """One ROC per N. Writes CSVs (and optional JSONL records) when ``out_dir`` is given."""
    curves, sub_curves = [], []
    for n in ns:
        c = replace(cfg, n_fft=int(n))
        rec_path = Path(out_dir) / f"records_n{n}.jsonl" if (out_dir is not None and keep_records) else None
        records = run_monte_carlo(c, rec_path, workers)
        curves.append(compute_roc(records, c.tau_grid, c.n_fft, c.snr_db, c.jsr_db))
        if per_subcarrier:
            sub_curves.append(compute_subcarrier_roc(records, c.tau_grid, c.n_fft, c.snr_db, c.jsr_db))
    if out_dir is not None:
        emit_outputs(curves, out_dir)
        if per_subcarrier:
            emit_outputs(sub_curves, out_dir, "roc_subcarrier.csv", "summary_subcarrier.csv")
    return curves
