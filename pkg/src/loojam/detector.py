"""Loss-of-orthogonality (LoO) detection.

Analytic path: the pair statistic ``H_{k,i} = sum_n exp(j*2*pi*(k - i - m)*n/N)``
is the trace of the outer product of the offset and pair exponentials and
is evaluated in closed form. ``psi(i)`` counts the other subcarriers ``k``
for which ``|H_{k,i}| > epsilon * N``; ``psi(i) == N - 1`` is full LoO.

Empirical path: the receiver knows the reference content of the symbol
(SSB signals are broadcast and deterministic), so it forms the residual
spectrum ``analyze(received) - reference`` and fits, per subcarrier ``i``,
the model "subcarrier i moved to the fractional index ``f`` with unknown
complex gain". The fit gain over the no-attack hypothesis is::

    L_i(f) = -2 Re(conj(X_i) R_i) - |X_i|^2 + |DTFT(ifft(R + X_i e_i))(f)|^2

and the offset estimate is ``m_hat = f_hat - i``. Subcarriers whose best fit
clears the noise-relative gate get ``psi(i)`` from the analytic count at
``m_hat``; all others get zero.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from . import kernels
from .ofdm import OfdmSymbol, _bins_from, analyze, geometric_sum


class Verdict(enum.Enum):
    LOO = "LoO"
    NO_FULLY_LOO = "NoFullyLoO"
    CLEAN = "Clean"


class Cause(enum.Enum):
    JAMMING_SUSPECTED = "JammingSuspected"
    WRONG_N_SUSPECTED = "WrongNSuspected"
    CLEAN = "Clean"


@dataclass(frozen=True)
class DetectorConfig:
    """Detector settings.

    epsilon
        Relative trace threshold: a pair counts when ``|H| > epsilon * N``.
        Also the noiseless floor of the residual gate (relative to the mean
        reference power per subcarrier).
    tau
        Decision threshold on ``s(i) = psi(i) / (N - 1)``.
    offset_step
        Resolution of the offset search; the search covers a full period of
        N subcarriers and ``m_hat`` is reported in ``[-N/2, N/2)``.
    gate
        Threshold on fit gain over noise variance; ``None`` means ``2 ln N``.
    noise_var
        Per-bin noise variance; ``None`` estimates it from the residual.
    max_targets
        Subcarriers accepted per symbol by successive cancellation;
        ``None`` keeps going until the gate fails.
    """

    epsilon: float = 1e-6
    tau: float = 0.5
    offset_step: float = 0.01
    oversample: int = 8
    window: int = 3
    gate: float | None = None
    noise_var: float | None = None
    max_targets: int | None = 1
    shortlist: int = 8
    peaks: int = 16

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValueError(f"epsilon must be > 0, got {self.epsilon}")
        if not 0.0 <= self.tau <= 1.0:
            raise ValueError(f"tau must be in [0, 1], got {self.tau}")
        if not self.offset_step > 0:
            raise ValueError(f"offset step must be > 0, got {self.offset_step}")
        if min(self.oversample, self.window, self.shortlist, self.peaks) < 1:
            raise ValueError("oversample, window, shortlist and peaks must be >= 1")
        if self.max_targets is not None and self.max_targets < 1:
            raise ValueError("max_targets must be >= 1 or None")
        if self.noise_var is not None and self.noise_var < 0:
            raise ValueError("noise_var must be >= 0")

    def gate_for(self, n_fft: int) -> float:
        return self.gate if self.gate is not None else 2.0 * math.log(n_fft)


@dataclass(frozen=True)
class TraceStatistic:
    k: int
    i: int
    m_hypothesis: float
    value: complex


@dataclass(frozen=True)
class PsiVector:
    counts: np.ndarray
    n_fft: int

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.int64)
        if counts.shape != (self.n_fft,):
            raise ValueError(f"expected {self.n_fft} counts, got shape {counts.shape}")
        if counts.min(initial=0) < 0 or counts.max(initial=0) > self.n_fft - 1:
            raise ValueError("psi counts must lie in [0, N-1]")
        object.__setattr__(self, "counts", counts)

    @property
    def pair_budget(self) -> int:
        """Unordered subcarrier pairs, N(N-1)/2; reported, not used to drive the loop."""
        return self.n_fft * (self.n_fft - 1) // 2

    @property
    def statistic(self) -> np.ndarray:
        return self.counts / (self.n_fft - 1)


@dataclass(frozen=True)
class Detection:
    """One accepted target: subcarrier, offset estimate and fitted tone."""

    subcarrier: int
    m_hat: float
    frequency: float
    gain: complex
    score: float


@dataclass(frozen=True)
class OffsetEstimate:
    """``m_hat`` is 0 unless ``found``; ``candidate`` is the best fit regardless of the gate."""

    m_hat: float
    found: bool
    score: float
    gain: complex = 0j
    candidate: float = 0.0


@dataclass(frozen=True)
class DetectionReport:
    psi: PsiVector
    verdicts: tuple[Verdict, ...]
    offsets: np.ndarray
    active: np.ndarray
    detections: tuple[Detection, ...] = ()
    noise_var: float = 0.0
    cause: Cause | None = None

    @property
    def n_fft(self) -> int:
        return self.psi.n_fft

    @property
    def statistic(self) -> np.ndarray:
        return self.psi.statistic

    def loo_fraction(self) -> float:
        idx = np.nonzero(self.active)[0]
        if idx.size == 0:
            return 0.0
        return sum(self.verdicts[i] is Verdict.LOO for i in idx) / idx.size

    def clean_fraction(self) -> float:
        idx = np.nonzero(self.active)[0]
        if idx.size == 0:
            return 1.0
        return sum(self.verdicts[i] is Verdict.CLEAN for i in idx) / idx.size

    def rows(self):
        """``(subcarrier, psi, s, m_hat, verdict)`` per subcarrier."""
        s = self.statistic
        for i in range(self.n_fft):
            yield i, int(self.psi.counts[i]), float(s[i]), float(self.offsets[i]), self.verdicts[i].value


@dataclass(frozen=True)
class CauseReport:
    cause: Cause
    best_n: int | None = None
    loo_fraction: float = 0.0
    scanned: dict[int, float] = field(default_factory=dict)


# -- analytic path -----------------------------------------------------------


def _check_index(idx: int, n_fft: int, name: str):
    if not 0 <= idx < n_fft:
        raise ValueError(f"{name}={idx} out of range for N={n_fft}")


def trace_A(k: int, i: int, m: float, n_fft: int) -> TraceStatistic:
    """``Tr(e^m x e^{k,i})`` without building the N x N matrix."""
    _check_index(k, n_fft, "k")
    _check_index(i, n_fft, "i")
    return TraceStatistic(k, i, float(m), geometric_sum(-(k - i - m), n_fft))


def psi_analytic(i: int, m: float, n_fft: int, epsilon: float = 1e-6) -> int:
    """Number of subcarriers ``k != i`` whose trace with the attacked ``i`` is nonzero."""
    _check_index(i, n_fft, "i")
    if not epsilon > 0:
        raise ValueError(f"epsilon must be > 0, got {epsilon}")
    return int(kernels.psi_counts(np.array([i]), np.array([float(m)]), n_fft, epsilon * n_fft)[0])


def psi_analytic_vector(offsets: Sequence[float], epsilon: float = 1e-6) -> PsiVector:
    """psi(i) for every subcarrier, subcarrier ``i`` shifted by ``offsets[i]``."""
    m = np.asarray(offsets, dtype=np.float64)
    n_fft = m.size
    counts = kernels.psi_counts(np.arange(n_fft), m, n_fft, epsilon * n_fft)
    return PsiVector(counts, n_fft)


def classify_loo(psi: PsiVector, n_fft: int | None = None) -> tuple[Verdict, ...]:
    n = psi.n_fft if n_fft is None else n_fft
    if n != psi.n_fft:
        raise ValueError(f"psi vector is for N={psi.n_fft}, not {n}")
    out = []
    for c in psi.counts:
        if c == n - 1:
            out.append(Verdict.LOO)
        elif c == 0:
            out.append(Verdict.CLEAN)
        else:
            out.append(Verdict.NO_FULLY_LOO)
    return tuple(out)


# -- empirical path ----------------------------------------------------------


def wrap_offset(m: float, n_fft: int) -> float:
    w = m - n_fft * math.floor(m / n_fft + 0.5)
    if abs(w - round(w)) < 1e-9:
        w = float(round(w))
    return float(w)


def dirichlet_template(f: float, n_fft: int) -> np.ndarray:
    """Bin values ``D(f - k)/N`` of a unit tone at fractional index ``f``; unit norm."""
    k = np.arange(n_fft)
    return np.conj(kernels.geometric_sums(f - k, n_fft)) / n_fft


class _ResidualFit:
    """Residual spectrum plus the per-hypothesis fitting machinery."""

    def __init__(self, received: OfdmSymbol, reference, cfg: DetectorConfig):
        y = analyze(received)
        n_fft = y.size
        ref = _reference_bins(reference, n_fft)
        self.n_fft = n_fft
        self.cfg = cfg
        self.ref = ref
        self.residual = y - ref
        self.active = np.abs(ref) > 0
        power = np.abs(ref[self.active]) ** 2
        self.ref_power = float(power.mean()) if power.size else 0.0
        if cfg.noise_var is None:
            self.noise_var = float(np.median(np.abs(self.residual) ** 2) / math.log(2.0))
        else:
            self.noise_var = float(cfg.noise_var)
        half = cfg.window * cfg.oversample
        u = np.arange(-half, half + 1) / cfg.oversample
        self._local = kernels.geometric_sums(u, n_fft) / n_fft
        self._n = np.arange(n_fft)

    @property
    def threshold(self) -> float:
        return max(self.cfg.gate_for(self.n_fft) * self.noise_var, self.cfg.epsilon * self.ref_power)

    def _base(self, i: int) -> float:
        x = self.ref[i]
        return float(-2.0 * np.real(np.conj(x) * self.residual[i]) - abs(x) ** 2)

    def coarse(self, active: np.ndarray) -> np.ndarray:
        """Approximate best gain per subcarrier (oversampled grid, windowed coupling)."""
        cfg = self.cfg
        spec = np.fft.fft(np.fft.ifft(self.residual), cfg.oversample * self.n_fft)
        power = np.abs(spec) ** 2
        k = min(power.size, cfg.peaks)
        cand = np.argpartition(power, power.size - k)[power.size - k:]
        best, _ = kernels.glrt_scan(
            spec, self.ref, self._local, active.astype(np.uint8), cfg.oversample, cfg.window, cand.astype(np.int64)
        )
        base = -2.0 * np.real(np.conj(self.ref) * self.residual) - np.abs(self.ref) ** 2
        return base + best

    def _fine_grid(self, f0: float) -> np.ndarray:
        step = self.cfg.offset_step
        span = int(math.ceil(1.0 / (self.cfg.oversample * step))) + 1
        return (round(f0 / step) + np.arange(-span, span + 1)) * step

    def _rows(self, grid: np.ndarray) -> np.ndarray:
        # exp(-j*2*pi*grid[r]*n/N) by recurrence instead of len(grid)*N exp calls
        n_fft = self.n_fft
        w = np.exp(-2j * np.pi * (grid[1] - grid[0]) * self._n / n_fft)
        rows = np.empty((grid.size, n_fft), dtype=np.complex128)
        rows[0] = np.exp(-2j * np.pi * grid[0] * self._n / n_fft)
        for r in range(1, grid.size):
            np.multiply(rows[r - 1], w, out=rows[r])
        return rows

    def refine(self, f0: float, active: np.ndarray) -> np.ndarray:
        """Fine-grid gain of every hypothesis for a tone near ``f0``.

        Hypothesis ``i`` differs from the bare residual only by ``X_i`` at bin
        ``i``, so its projections are shared ones plus a closed-form term.
        """
        rows = self._rows(self._fine_grid(f0))
        shared = rows @ np.fft.ifft(self.residual)
        idx = np.flatnonzero(active)
        # ifft of row r at bin h is D(grid[r] - h)/N
        coupling = np.fft.ifft(rows, axis=1)[:, idx]
        vals = np.abs(shared[:, None] + self.ref[idx][None, :] * coupling) ** 2
        out = np.full(self.n_fft, -np.inf)
        base = -2.0 * np.real(np.conj(self.ref[idx]) * self.residual[idx]) - np.abs(self.ref[idx]) ** 2
        out[idx] = base + vals.max(axis=0)
        return out

    def exact(self, i: int) -> tuple[float, float, complex]:
        """Best (gain, fractional index, complex tone gain) for hypothesis ``i``."""
        cfg = self.cfg
        n_fft = self.n_fft
        v = self.residual.copy()
        v[i] += self.ref[i]
        vt = np.fft.ifft(v)
        spec = np.fft.fft(vt, cfg.oversample * n_fft)
        q = int(np.argmax(np.abs(spec) ** 2))
        f0 = q / cfg.oversample
        grid = self._fine_grid(f0)
        vals = self._rows(grid) @ vt
        j = int(np.argmax(np.abs(vals) ** 2))
        f = float(grid[j])
        if abs(f - round(f)) < 1e-9:
            f = float(round(f))
        gain = complex(vals[j])
        if abs(spec[q]) > abs(gain):
            f, gain = f0, complex(spec[q])
        return self._base(i) + abs(gain) ** 2, f, gain

    def remove(self, i: int, f: float, gain: complex):
        self.residual[i] += self.ref[i]
        self.residual -= gain * dirichlet_template(f, self.n_fft)


def _reference_bins(reference, n_fft: int) -> np.ndarray:
    if isinstance(reference, np.ndarray) and reference.dtype.kind in "fc":
        ref = np.asarray(reference, dtype=np.complex128)
        if ref.shape != (n_fft,):
            raise ValueError(f"reference has {ref.size} bins, received symbol has N={n_fft}")
        return ref
    return _bins_from(list(reference), n_fft)


def estimate_offset(received: OfdmSymbol, reference, i: int, cfg: DetectorConfig = DetectorConfig()) -> OffsetEstimate:
    """Offset of subcarrier ``i`` from a Dirichlet-template fit of the residual spectrum.

    Returns ``found=False`` and ``m_hat=0`` when the fit gain does not clear the gate.
    """
    fit = _ResidualFit(received, reference, cfg)
    _check_index(i, fit.n_fft, "i")
    score, f, gain = fit.exact(i)
    m_hat = wrap_offset(f - i, fit.n_fft)
    if score < fit.threshold or score <= 0:
        return OffsetEstimate(0.0, False, score, 0j, m_hat)
    return OffsetEstimate(m_hat, True, score, gain, m_hat)


def detect(received: OfdmSymbol, reference, cfg: DetectorConfig = DetectorConfig()) -> DetectionReport:
    """Full empirical detection: offsets, gated psi, verdicts and a cause without N re-checks."""
    fit = _ResidualFit(received, reference, cfg)
    n_fft = fit.n_fft
    open_ = fit.active.copy()
    counts = np.zeros(n_fft, dtype=np.int64)
    offsets = np.full(n_fft, np.nan)
    found: list[Detection] = []
    limit = cfg.max_targets if cfg.max_targets is not None else n_fft
    thr = fit.threshold
    while len(found) < limit and open_.any():
        approx = fit.coarse(open_)
        order = np.argsort(approx)[::-1]
        picks = [int(i) for i in order[: cfg.shortlist] if open_[i]]
        best = None
        for i in picks:
            score, f, gain = fit.exact(i)
            if best is None or score > best[0]:
                best = (score, i, f, gain)
        if best is None:
            break
        # coarse-grid error grows with the tone power and can hide the true
        # hypothesis; re-rank all of them at the fitted tone frequency
        refined = fit.refine(best[2], open_)
        for i in np.argsort(refined)[::-1][: cfg.shortlist]:
            i = int(i)
            if refined[i] <= best[0]:
                break
            if i in picks:
                continue
            score, f, gain = fit.exact(i)
            if score > best[0]:
                best = (score, i, f, gain)
        score, i, f, gain = best
        if score < thr or score <= 0:
            break
        m_hat = wrap_offset(f - i, n_fft)
        counts[i] = psi_analytic(i, m_hat, n_fft, cfg.epsilon)
        offsets[i] = m_hat
        found.append(Detection(i, m_hat, f, gain, score))
        fit.remove(i, f, gain)
        open_[i] = False

    psi = PsiVector(counts, n_fft)
    verdicts = classify_loo(psi)
    report = DetectionReport(psi, verdicts, offsets, fit.active, tuple(found), fit.noise_var)
    return _with_cause(report, _basic_cause(report))


def psi_empirical(received: OfdmSymbol, reference, cfg: DetectorConfig = DetectorConfig()):
    """``(PsiVector, per-subcarrier m_hat)``; m_hat is NaN where nothing was detected."""
    report = detect(received, reference, cfg)
    return report.psi, report.offsets


def _with_cause(report: DetectionReport, cause: Cause | None) -> DetectionReport:
    return DetectionReport(
        report.psi, report.verdicts, report.offsets, report.active, report.detections, report.noise_var, cause
    )


def _basic_cause(report: DetectionReport) -> Cause | None:
    frac = report.loo_fraction()
    if report.clean_fraction() == 1.0:
        return Cause.CLEAN
    if frac < 1.0:
        return Cause.JAMMING_SUSPECTED
    return None


def disambiguate_cause(
    report: DetectionReport,
    alt_n_candidates: Iterable[int],
    rerun: Callable[[int], DetectionReport],
    mostly_clean: float = 0.5,
) -> CauseReport:
    """Tell a jammer apart from a wrong FFT size.

    Full LoO on every active subcarrier triggers a re-run under each
    candidate N; a candidate whose report is mostly Clean points at the
    wrong-N explanation.
    """
    frac = report.loo_fraction()
    if report.clean_fraction() == 1.0:
        return CauseReport(Cause.CLEAN, None, frac)
    if frac < 1.0:
        return CauseReport(Cause.JAMMING_SUSPECTED, None, frac)
    candidates = [int(n) for n in alt_n_candidates if int(n) != report.n_fft]
    if not candidates:
        raise ValueError("every subcarrier shows LoO; need alternative N candidates to re-check")
    scanned = {}
    for n in candidates:
        scanned[n] = rerun(n).clean_fraction()
    best_n = max(scanned, key=lambda n: (scanned[n], -abs(n - report.n_fft)))
    if scanned[best_n] >= mostly_clean:
        return CauseReport(Cause.WRONG_N_SUSPECTED, best_n, frac, scanned)
    return CauseReport(Cause.JAMMING_SUSPECTED, None, frac, scanned)


def rescan_from_stream(samples: np.ndarray, reference_for: Callable[[int], np.ndarray], cfg: DetectorConfig,
                       subcarrier_spacing: float = 15e3) -> Callable[[int], DetectionReport]:
    """Re-run helper for :func:`disambiguate_cause`: first N samples of a stream, reference at N."""
    samples = np.asarray(samples, dtype=np.complex128)

    def rerun(n_fft: int) -> DetectionReport:
        if samples.size < n_fft:
            raise ValueError(f"stream has {samples.size} samples, cannot analyze with N={n_fft}")
        return detect(OfdmSymbol(samples[:n_fft], subcarrier_spacing), reference_for(n_fft), cfg)

    return rerun
