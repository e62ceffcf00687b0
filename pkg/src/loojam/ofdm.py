"""OFDM symbol synthesis/analysis and pairwise subcarrier orthogonality.

Conventions: the 1/N factor sits in :func:`synthesize`, so
``analyze(synthesize(X)) == X`` exactly (up to rounding). Subcarrier
waveforms are ``c_k[n] = X_k * exp(j*2*pi*k*n/N)`` with real-valued ``k``
allowed, which is how frequency-shifted (attacked) tones are represented.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from . import kernels

TWO_PI = 2.0 * np.pi


@dataclass(frozen=True)
class SubcarrierSymbol:
    """Complex symbol ``X_k = A_k * exp(j*phase)`` on subcarrier ``index``."""

    index: int
    amplitude: float
    phase: float = 0.0

    def __post_init__(self):
        if self.amplitude < 0 or not np.isfinite(self.amplitude):
            raise ValueError(f"amplitude must be finite and >= 0, got {self.amplitude}")
        if self.index < 0:
            raise ValueError(f"subcarrier index must be >= 0, got {self.index}")
        object.__setattr__(self, "phase", float(np.mod(self.phase, TWO_PI)))

    @property
    def value(self) -> complex:
        return complex(self.amplitude * np.exp(1j * self.phase))

    @classmethod
    def from_complex(cls, index: int, value: complex) -> "SubcarrierSymbol":
        return cls(int(index), float(abs(value)), float(np.angle(value)))


@dataclass(frozen=True)
class OfdmSymbol:
    """Time-domain samples of one OFDM symbol."""

    samples: np.ndarray
    subcarrier_spacing: float = 15e3

    def __post_init__(self):
        x = np.asarray(self.samples, dtype=np.complex128)
        if x.ndim != 1 or x.size < 2:
            raise ValueError("an OFDM symbol needs a 1-D sample vector with N >= 2")
        if not np.all(np.isfinite(x)):
            raise ValueError("samples contain NaN or Inf")
        x.setflags(write=False)
        object.__setattr__(self, "samples", x)

    @property
    def n_fft(self) -> int:
        return self.samples.size

    @property
    def sample_rate(self) -> float:
        return self.n_fft * self.subcarrier_spacing

    def power(self) -> float:
        return float(np.mean(np.abs(self.samples) ** 2))

    def with_samples(self, samples) -> "OfdmSymbol":
        return OfdmSymbol(samples, self.subcarrier_spacing)


@dataclass(frozen=True)
class SubcarrierWaveform:
    """Lazily evaluated tone ``X * exp(j*2*pi*k*n/N)``; ``k`` may be fractional."""

    k: float
    amplitude: float
    phase: float
    n_fft: int

    @property
    def value(self) -> complex:
        return complex(self.amplitude * np.exp(1j * self.phase))

    def __call__(self, n) -> np.ndarray:
        n = np.asarray(n, dtype=np.float64)
        return self.value * np.exp(1j * TWO_PI * self.k * n / self.n_fft)

    def samples(self) -> np.ndarray:
        return self(np.arange(self.n_fft))

    def times(self, other: "SubcarrierWaveform") -> "SubcarrierWaveform":
        """Pointwise product; frequencies add, amplitudes multiply, phases add."""
        if other.n_fft != self.n_fft:
            raise ValueError("waveforms have different N")
        return SubcarrierWaveform(
            self.k + other.k, self.amplitude * other.amplitude, self.phase + other.phase, self.n_fft
        )

    @classmethod
    def from_symbol(cls, symbol: SubcarrierSymbol, n_fft: int) -> "SubcarrierWaveform":
        return cls(float(symbol.index), symbol.amplitude, symbol.phase, n_fft)


class Orthogonality(enum.Enum):
    ORTHOGONAL = "orthogonal"
    NON_ORTHOGONAL = "non-orthogonal"


def _bins_from(symbols, n_fft: int) -> np.ndarray:
    if n_fft < 2:
        raise ValueError(f"N must be >= 2, got {n_fft}")
    if isinstance(symbols, np.ndarray) and symbols.dtype.kind in "fc":
        bins = np.zeros(n_fft, dtype=np.complex128)
        if symbols.ndim != 1 or symbols.size > n_fft:
            raise ValueError(f"expected at most {n_fft} subcarrier values, got shape {symbols.shape}")
        bins[: symbols.size] = symbols
        return bins
    bins = np.zeros(n_fft, dtype=np.complex128)
    seen = set()
    for sym in symbols:
        if sym.index >= n_fft:
            raise ValueError(f"subcarrier index {sym.index} out of range for N={n_fft}")
        if sym.index in seen:
            raise ValueError(f"duplicate subcarrier index {sym.index}")
        seen.add(sym.index)
        bins[sym.index] = sym.value
    return bins


def synthesize(
    symbols: Sequence[SubcarrierSymbol] | np.ndarray, n_fft: int, subcarrier_spacing: float = 15e3
) -> OfdmSymbol:
    """Build ``x_n = (1/N) sum_k X_k exp(j*2*pi*k*n/N)``.

    ``symbols`` is either a list of :class:`SubcarrierSymbol` (unlisted
    subcarriers are zero) or a complex array of per-bin values.
    """
    bins = _bins_from(symbols, n_fft)
    return OfdmSymbol(np.fft.ifft(bins), subcarrier_spacing)


def analyze(symbol: OfdmSymbol | np.ndarray) -> np.ndarray:
    """Per-bin values ``Y_k = sum_n x_n exp(-j*2*pi*k*n/N)`` (no 1/N)."""
    x = symbol.samples if isinstance(symbol, OfdmSymbol) else np.asarray(symbol, dtype=np.complex128)
    if x.size == 0:
        raise ValueError("cannot analyze an empty sample sequence")
    return np.fft.fft(x)


def to_subcarriers(bins: np.ndarray) -> list[SubcarrierSymbol]:
    return [SubcarrierSymbol.from_complex(k, v) for k, v in enumerate(np.asarray(bins))]


def inner_product(c_k: SubcarrierWaveform, c_i: SubcarrierWaveform) -> complex:
    """``(1/N) sum_n c_k[n] * conj(c_i[n])``, evaluated in closed form."""
    if c_k.n_fft != c_i.n_fft:
        raise ValueError(f"mismatched N: {c_k.n_fft} vs {c_i.n_fft}")
    n_fft = c_k.n_fft
    # sum_n exp(j*2*pi*(k - i)*n/N) == geometric_sum(i - k)
    h = geometric_sum(c_i.k - c_k.k, n_fft)
    return complex(c_k.value * np.conj(c_i.value) * h / n_fft)


def geometric_sum(d: float, n_fft: int) -> complex:
    """``sum_{n<N} exp(-j*2*pi*d*n/N)`` in closed form.

    N for d a multiple of N, 0 for other integers, the Dirichlet kernel
    ``sin(pi d)/sin(pi d/N) * exp(-j*pi*d*(N-1)/N)`` otherwise. Falls back
    to direct summation when ``|sin(pi d/N)| < 1e-8``.
    """
    if n_fft < 1:
        raise ValueError(f"N must be >= 1, got {n_fft}")
    return complex(kernels.geometric_sums(np.array([float(d)]), int(n_fft))[0])


def orthogonality_classify(o: complex, epsilon: float) -> Orthogonality:
    if not epsilon > 0:
        raise ValueError(f"epsilon must be > 0, got {epsilon}")
    return Orthogonality.ORTHOGONAL if abs(o) <= epsilon else Orthogonality.NON_ORTHOGONAL


def qpsk(rng: np.random.Generator, size: int) -> np.ndarray:
    """Unit-amplitude QPSK symbols."""
    phases = rng.integers(0, 4, size=size)
    return np.exp(1j * (np.pi / 4 + np.pi / 2 * phases))
