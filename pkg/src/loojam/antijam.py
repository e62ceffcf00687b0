"""Corrective tone selection and multiplicative correction.

Two policies:

* ``PAPER`` walks a candidate list and keeps the first ``m'`` for which
  ``m' + k + i_tilde`` is never a multiple of N over all subcarriers ``k``.
  For an integer ``i_tilde`` that rejects every integer candidate (the ``k``
  run through a full residue system) and accepts every non-integer one; it
  picks a non-resonant tone but does not by itself undo the shift.
* ``NEGATION`` uses ``m' = -m_hat``, which moves the attacked subcarrier
  back onto its own index. This is the default.
"""
from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .detector import DetectorConfig, detect, dirichlet_template
from .ofdm import TWO_PI, OfdmSymbol, analyze

INTEGER_TOL = 1e-9


class CorrectionPolicy(enum.Enum):
    PAPER = "paper"
    NEGATION = "negation"


@dataclass(frozen=True)
class CorrectionSignal:
    m_prime: float
    amplitude: float = 1.0
    phase: float = 0.0
    policy: CorrectionPolicy = CorrectionPolicy.NEGATION

    def __post_init__(self):
        if not self.amplitude > 0:
            raise ValueError(f"correction amplitude must be > 0, got {self.amplitude}")

    @property
    def value(self) -> complex:
        return complex(self.amplitude * np.exp(1j * self.phase))

    def waveform(self, n_fft: int) -> np.ndarray:
        n = np.arange(n_fft)
        return self.value * np.exp(1j * TWO_PI * self.m_prime * n / n_fft)

    def inverse(self) -> "CorrectionSignal":
        return CorrectionSignal(-self.m_prime, 1.0 / self.amplitude, -self.phase, self.policy)


@dataclass(frozen=True)
class CorrectionOutcome:
    psi_before: int
    psi_after: int
    residual_leakage: float
    peak_leakage: float


def _is_integer(x: float) -> bool:
    return abs(x - round(x)) <= INTEGER_TOL


def resonates(m_prime: float, i_tilde: float, n_fft: int, rule: str = "sum") -> bool:
    """True if some subcarrier ``k`` hits a multiple of N.

    ``rule="sum"`` checks ``m' + k + i_tilde``; ``rule="difference"`` checks
    the cross-correlation exponent ``k - i_tilde - m'``.
    """
    for k in range(n_fft):
        if rule == "sum":
            val = m_prime + k + i_tilde
        elif rule == "difference":
            val = k - i_tilde - m_prime
        else:
            raise ValueError(f"unknown rule {rule!r}")
        if _is_integer(val / n_fft):
            return True
    return False


def select_m_prime_paper(
    i_tilde: float, n_fft: int, candidates: Iterable[float], rule: str = "sum"
) -> float | None:
    """First candidate that resonates with no subcarrier; None when all do."""
    cands = list(candidates)
    if not cands:
        raise ValueError("candidate sequence is empty")
    for m_prime in cands:
        if not resonates(float(m_prime), float(i_tilde), n_fft, rule):
            return float(m_prime)
    return None


def paper_candidates(step: float = 0.5, maximum: float = 4.0) -> list[float]:
    """``0, step, -step, 2*step, ...`` up to ``maximum`` in magnitude."""
    if not step > 0:
        raise ValueError("candidate step must be > 0")
    out = [0.0]
    j = 1
    while j * step <= maximum + 1e-12:
        out.extend([j * step, -j * step])
        j += 1
    return out


def select_m_prime_negation(m_hat: float, jammer_gain: complex | None = None) -> CorrectionSignal:
    """``m' = -m_hat``; with a known jammer gain the amplitude and phase are undone too."""
    if not math.isfinite(m_hat):
        raise ValueError(f"m_hat must be finite, got {m_hat}")
    m_prime = -m_hat + 0.0
    if jammer_gain is None or jammer_gain == 0:
        return CorrectionSignal(m_prime, 1.0, 0.0, CorrectionPolicy.NEGATION)
    return CorrectionSignal(m_prime, 1.0 / abs(jammer_gain), -float(np.angle(jammer_gain)), CorrectionPolicy.NEGATION)


def apply_correction(contribution: np.ndarray, corr: CorrectionSignal, n_fft: int) -> np.ndarray:
    """``contribution[n] * X_m' * exp(j*2*pi*m'*n/N)``."""
    contribution = np.asarray(contribution, dtype=np.complex128)
    if contribution.shape != (n_fft,):
        raise ValueError(f"expected {n_fft} samples, got shape {contribution.shape}")
    return contribution * corr.waveform(n_fft)


def correct_symbol(received: OfdmSymbol, frequency: float, gain: complex, corr: CorrectionSignal) -> OfdmSymbol:
    """Swap the fitted attacked tone in ``received`` for its corrected version."""
    n_fft = received.n_fft
    tone = np.fft.ifft(gain * dirichlet_template(frequency, n_fft))
    return received.with_samples(received.samples - tone + apply_correction(tone, corr, n_fft))


def choose_correction(
    detection, policy: CorrectionPolicy = CorrectionPolicy.NEGATION, n_fft: int | None = None,
    candidates: Sequence[float] | None = None, reference_value: complex | None = None,
) -> CorrectionSignal | None:
    """Correction for one detected target (a :class:`~loojam.detector.Detection`)."""
    if policy is CorrectionPolicy.NEGATION:
        jam = None
        if reference_value:
            jam = detection.gain / reference_value
        return select_m_prime_negation(detection.m_hat, jam)
    if n_fft is None:
        raise ValueError("paper policy needs N")
    m_prime = select_m_prime_paper(detection.subcarrier, n_fft, candidates or paper_candidates())
    if m_prime is None:
        return None
    return CorrectionSignal(m_prime, 1.0, 0.0, CorrectionPolicy.PAPER)


def verify_restoration(
    received: OfdmSymbol, corrected: OfdmSymbol, reference, subcarrier: int,
    cfg: DetectorConfig = DetectorConfig(),
) -> CorrectionOutcome:
    """Re-run detection before and after correction and measure leftover leakage."""
    before = detect(received, reference, cfg)
    after = detect(corrected, reference, cfg)
    ref = np.asarray(reference, dtype=np.complex128)
    resid = analyze(corrected) - ref
    others = np.delete(resid, subcarrier)
    return CorrectionOutcome(
        psi_before=int(before.psi.counts[subcarrier]),
        psi_after=int(after.psi.counts[subcarrier]),
        residual_leakage=float(np.sum(np.abs(others) ** 2)),
        peak_leakage=float(np.max(np.abs(others))) if others.size else 0.0,
    )


def dirichlet_leakage_bound(amplitude: float, offset: float, n_fft: int) -> float:
    """Largest per-bin leakage of a tone ``offset`` bins off its subcarrier, 0 < |offset| < 1."""
    delta = abs(offset)
    return float(amplitude * abs(math.sin(math.pi * delta)) / (n_fft * math.sin(math.pi * (1.0 - delta) / n_fft)))
