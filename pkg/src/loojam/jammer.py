"""Attack models applied to clean OFDM symbols.

``FREQUENCY_SHIFT`` multiplies the contribution of each targeted subcarrier
by the jamming tone ``X_m * exp(j*2*pi*m*n/N)``, moving it to the
(possibly fractional) index ``i + m``. ``BARRAGE_NOISE`` adds wideband
Gaussian noise at a jamming-to-signal ratio. ``PILOT_NULLING`` cancels the
PBCH DMRS resource elements of an SSB grid.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass, field
from typing import Any, Mapping

import numpy as np

from .ofdm import TWO_PI, OfdmSymbol
from .ssb import ReKind, SsbGrid


class JammerModel(enum.Enum):
    FREQUENCY_SHIFT = "frequency_shift"
    BARRAGE_NOISE = "barrage_noise"
    PILOT_NULLING = "pilot_nulling"


@dataclass(frozen=True)
class JammerConfig:
    """Attack parameters.

    ``offset`` is in subcarrier units and may be fractional. When
    ``amplitude`` is None the jammer gain ``A_m`` is set from ``jsr_db``:
    the attacked subcarriers end up with ``10**(jsr_db/10)`` times the mean
    per-subcarrier power of the clean symbol.
    """

    model: JammerModel = JammerModel.FREQUENCY_SHIFT
    offset: float = 0.0
    amplitude: float | None = None
    phase: float = 0.0
    jsr_db: float = 0.0
    targets: tuple[int, ...] = ()
    seed: int = 0

    def __post_init__(self):
        object.__setattr__(self, "model", JammerModel(self.model))
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        if self.amplitude is not None and self.amplitude < 0:
            raise ValueError(f"jammer amplitude must be >= 0, got {self.amplitude}")
        if self.model is JammerModel.FREQUENCY_SHIFT and not self.targets:
            raise ValueError("frequency_shift jammer needs at least one target subcarrier")

    @classmethod
    def from_mapping(cls, data: Mapping[str, Any]) -> "JammerConfig":
        known = {"model", "offset", "amplitude", "phase", "jsr_db", "targets", "seed"}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown jammer keys: {sorted(unknown)}")
        kwargs = dict(data)
        if "targets" in kwargs:
            kwargs["targets"] = tuple(kwargs["targets"])
        return cls(**kwargs)


@dataclass(frozen=True)
class AttackRecord:
    """Ground truth for one applied attack."""

    model: JammerModel
    offsets: dict[int, float]
    jammer_power: float
    seed: int
    gain: complex = 1.0 + 0.0j
    config: JammerConfig | None = field(default=None, compare=False)


def jammer_gain(bins: np.ndarray, cfg: JammerConfig) -> complex:
    """Complex jamming symbol ``X_m``."""
    if cfg.amplitude is not None:
        amp = cfg.amplitude
    else:
        bins = np.asarray(bins)
        active = np.abs(bins[np.abs(bins) > 0])
        target_amp = np.abs(bins[list(cfg.targets)]) if cfg.targets else active
        if active.size == 0 or not np.any(target_amp > 0):
            raise ValueError("cannot derive jammer amplitude from an empty symbol")
        ratio = np.sqrt(np.mean(active**2) / np.mean(target_amp**2))
        amp = 10.0 ** (cfg.jsr_db / 20.0) * ratio
    return complex(amp * np.exp(1j * cfg.phase))


def shifted_tone(value: complex, k: float, n_fft: int) -> np.ndarray:
    """Time-domain contribution ``value * exp(j*2*pi*k*n/N) / N`` of one tone."""
    n = np.arange(n_fft)
    return value * np.exp(1j * TWO_PI * k * n / n_fft) / n_fft


def apply_frequency_shift(
    clean: OfdmSymbol, bins: np.ndarray, cfg: JammerConfig
) -> tuple[OfdmSymbol, AttackRecord]:
    """Replace each targeted contribution ``c_i`` with ``c_i * a_m``.

    ``bins`` are the per-subcarrier symbols ``X_k`` the clean symbol was
    synthesized from.
    """
    if cfg.model is not JammerModel.FREQUENCY_SHIFT:
        raise ValueError(f"expected a frequency_shift config, got {cfg.model.value}")
    n_fft = clean.n_fft
    bins = np.asarray(bins, dtype=np.complex128)
    if bins.shape != (n_fft,):
        raise ValueError(f"expected {n_fft} subcarrier values, got shape {bins.shape}")
    for t in cfg.targets:
        if not 0 <= t < n_fft:
            raise ValueError(f"target subcarrier {t} out of range for N={n_fft}")

    x_m = jammer_gain(bins, cfg)
    x = clean.samples.copy()
    jammed = np.zeros(n_fft, dtype=np.complex128)
    for i in cfg.targets:
        x -= shifted_tone(bins[i], i, n_fft)
        jammed += shifted_tone(bins[i] * x_m, i + cfg.offset, n_fft)
    x += jammed
    record = AttackRecord(
        model=cfg.model,
        offsets={i: float(cfg.offset) for i in cfg.targets},
        jammer_power=float(np.mean(np.abs(jammed) ** 2)),
        seed=cfg.seed,
        gain=x_m,
        config=cfg,
    )
    return clean.with_samples(x), record


def complex_gaussian(rng: np.random.Generator, size: int, variance: float) -> np.ndarray:
    scale = np.sqrt(variance / 2.0)
    return scale * (rng.standard_normal(size) + 1j * rng.standard_normal(size))


def apply_noise_jammer(clean: OfdmSymbol, cfg: JammerConfig) -> tuple[OfdmSymbol, AttackRecord]:
    """Add circular Gaussian noise with power ``signal power * 10**(jsr_db/10)``."""
    if cfg.model is not JammerModel.BARRAGE_NOISE:
        raise ValueError(f"expected a barrage_noise config, got {cfg.model.value}")
    p_sig = clean.power()
    if not p_sig > 0:
        raise ValueError("signal power must be > 0 to scale a noise jammer")
    rng = np.random.default_rng(cfg.seed)
    noise = complex_gaussian(rng, clean.n_fft, p_sig * 10.0 ** (cfg.jsr_db / 10.0))
    record = AttackRecord(
        model=cfg.model,
        offsets={},
        jammer_power=float(np.mean(np.abs(noise) ** 2)),
        seed=cfg.seed,
        config=cfg,
    )
    return clean.with_samples(clean.samples + noise), record


def apply_pilot_nulling(
    values: np.ndarray, grid: SsbGrid, cfg: JammerConfig
) -> tuple[np.ndarray, AttackRecord]:
    """Add ``-X`` on every PBCH DMRS element of a frequency-domain SSB grid."""
    if cfg.model is not JammerModel.PILOT_NULLING:
        raise ValueError(f"expected a pilot_nulling config, got {cfg.model.value}")
    values = np.asarray(values, dtype=np.complex128)
    if values.shape != grid.cells.shape:
        raise ValueError(f"grid values shape {values.shape} does not match layout {grid.cells.shape}")
    dmrs = grid.cells == ReKind.PBCH_DMRS
    jam = np.zeros_like(values)
    jam[dmrs] = -values[dmrs]
    attacked = values.copy()
    attacked[dmrs] = 0.0
    record = AttackRecord(
        model=cfg.model,
        offsets={},
        jammer_power=float(np.sum(np.abs(jam) ** 2) / max(int(dmrs.sum()), 1)),
        seed=cfg.seed,
        config=cfg,
    )
    return attacked, record


def scale_to_jsr(jam: np.ndarray, reference_power: float, jsr_db: float) -> np.ndarray:
    """Rescale ``jam`` so its mean power is ``reference_power * 10**(jsr_db/10)``."""
    if not reference_power > 0:
        raise ValueError("reference power must be > 0")
    jam = np.asarray(jam, dtype=np.complex128)
    p_jam = float(np.mean(np.abs(jam) ** 2))
    if not p_jam > 0:
        raise ValueError("jamming waveform has zero power")
    return jam * np.sqrt(reference_power * 10.0 ** (jsr_db / 10.0) / p_jam)


def replay(record: AttackRecord, clean, bins=None, grid: SsbGrid | None = None):
    """Re-run the attack described by ``record`` on the same clean input."""
    cfg = record.config
    if cfg is None:
        raise ValueError("record carries no config to replay")
    if cfg.model is JammerModel.FREQUENCY_SHIFT:
        return apply_frequency_shift(clean, bins, cfg)
    if cfg.model is JammerModel.BARRAGE_NOISE:
        return apply_noise_jammer(clean, cfg)
    return apply_pilot_nulling(clean, grid, cfg)
