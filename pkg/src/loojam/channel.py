"""Tapped-delay-line fading channel and additive white Gaussian noise.

Profiles are read from TOML files (``taps = [[delay_s, power_linear], ...]``,
``has_los = true|false``); the package ships ``flat`` and ``cdl_d``.
"""
from __future__ import annotations

import sys
from dataclasses import dataclass
from importlib import resources
from pathlib import Path
from typing import Any, Mapping

import numpy as np

from .jammer import complex_gaussian
from .ofdm import OfdmSymbol

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

BUILTIN_PROFILES = ("flat", "cdl_d")


@dataclass(frozen=True)
class ChannelProfile:
    taps: tuple[tuple[float, float], ...]
    has_los: bool = False

    @property
    def delays(self) -> np.ndarray:
        return np.array([d for d, _ in self.taps])

    @property
    def powers(self) -> np.ndarray:
        return np.array([p for _, p in self.taps])


@dataclass(frozen=True)
class ChannelRealization:
    """Discrete-time complex tap gains at ``sample_rate``."""

    gains: np.ndarray
    sample_rate: float
    seed: int | None = None

    def frequency_response(self, n_fft: int) -> np.ndarray:
        wrapped = np.zeros(n_fft, dtype=np.complex128)
        np.add.at(wrapped, np.arange(self.gains.size) % n_fft, self.gains)
        return np.fft.fft(wrapped)


def _read_source(source) -> Mapping[str, Any]:
    if isinstance(source, Mapping):
        return source
    name = str(source)
    if name in BUILTIN_PROFILES:
        text = resources.files("loojam").joinpath("data", f"{name}.toml").read_text()
        return tomllib.loads(text)
    path = Path(name)
    with path.open("rb") as fh:
        return tomllib.load(fh)


def load_profile(source) -> ChannelProfile:
    """Parse and normalize a power-delay profile.

    ``source`` is a mapping, a path to a TOML file, or a built-in name.
    Delays must already be sorted; nothing is reordered silently.
    """
    data = _read_source(source)
    taps = data.get("taps")
    if not taps:
        raise ValueError("channel profile has no taps")
    rows = []
    for row in taps:
        if len(row) != 2:
            raise ValueError(f"tap must be [delay_s, power_linear], got {row!r}")
        delay, power = float(row[0]), float(row[1])
        if not (np.isfinite(delay) and np.isfinite(power)):
            raise ValueError(f"non-finite tap {row!r}")
        if delay < 0:
            raise ValueError(f"negative tap delay {delay}")
        if power < 0:
            raise ValueError(f"negative tap power {power}")
        rows.append((delay, power))
    delays = [d for d, _ in rows]
    if any(b < a for a, b in zip(delays, delays[1:])):
        raise ValueError("tap delays are not sorted")
    total = sum(p for _, p in rows)
    if not total > 0:
        raise ValueError("total tap power is zero")
    has_los = data.get("has_los", False)
    if not isinstance(has_los, bool):
        raise ValueError(f"has_los must be a boolean, got {has_los!r}")
    return ChannelProfile(tuple((d, p / total) for d, p in rows), has_los)


def realize(profile: ChannelProfile, sample_rate: float, seed: int) -> ChannelRealization:
    """Draw one static realization; taps are binned to the nearest sample delay.

    The first tap of a LOS profile is the specular path (fixed amplitude and
    phase); every other tap is Rayleigh.
    """
    rng = np.random.default_rng(seed)
    idx = np.rint(profile.delays * sample_rate).astype(np.int64)
    gains = np.zeros(int(idx.max()) + 1, dtype=np.complex128)
    for t, (k, p) in enumerate(zip(idx, profile.powers)):
        if t == 0 and profile.has_los:
            gains[k] += np.sqrt(p)
        else:
            gains[k] += complex_gaussian(rng, 1, p)[0]
    return ChannelRealization(gains, float(sample_rate), seed)


def apply_tdl(x: OfdmSymbol, realization: ChannelRealization, circular: bool = False) -> OfdmSymbol:
    """Convolve with the tap gains, truncated to N samples.

    ``circular=True`` wraps the tail, which is what an ideal cyclic prefix
    gives after removal.
    """
    if not np.isclose(x.sample_rate, realization.sample_rate, rtol=1e-9, atol=0.0):
        raise ValueError(
            f"sample-rate mismatch: symbol {x.sample_rate} Hz, channel {realization.sample_rate} Hz"
        )
    n_fft = x.n_fft
    if circular:
        y = np.fft.ifft(np.fft.fft(x.samples) * realization.frequency_response(n_fft))
    else:
        y = np.convolve(x.samples, realization.gains)[:n_fft]
    return x.with_samples(y)


def noise_variance(signal_power: float, snr_db: float) -> float:
    return signal_power / 10.0 ** (snr_db / 10.0)


def add_awgn(x: OfdmSymbol, snr_db: float, seed: int) -> OfdmSymbol:
    """Add circular Gaussian noise of variance ``signal power / 10**(snr_db/10)``."""
    p_sig = x.power()
    if not p_sig > 0:
        raise ValueError("signal power must be > 0 to set an SNR")
    rng = np.random.default_rng(seed)
    return x.with_samples(x.samples + complex_gaussian(rng, x.n_fft, noise_variance(p_sig, snr_db)))
