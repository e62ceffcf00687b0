"""IQ sample and reference files.

Binary IQ (``.iq``, ``.bin``, anything not ending in ``.csv``)::

    bytes 0..3    magic b"LJIQ"
    bytes 4..7    N, uint32 little-endian
    bytes 8..15   sample rate in Hz, float64 little-endian
    then          N complex samples as interleaved re, im float64 little-endian

CSV IQ (``.csv``)::

    # n_fft: 64
    # sample_rate: 960000.0
    re,im
    0.01,-0.02
    ...

The comment lines are optional; without them N is the row count and the
sample rate is ``N * 15 kHz``.

Reference CSV: header ``subcarrier,re,im``; subcarriers not listed are 0.
"""
from __future__ import annotations

import csv
import struct
from pathlib import Path

import numpy as np

from .ofdm import OfdmSymbol

MAGIC = b"LJIQ"
_HEADER = struct.Struct("<4sId")


class IqFormatError(ValueError):
    pass


def _is_csv(path: Path) -> bool:
    return path.suffix.lower() == ".csv"


def write_iq(path: str | Path, symbol: OfdmSymbol):
    path = Path(path)
    x = symbol.samples
    if _is_csv(path):
        with path.open("w", newline="", encoding="utf-8") as fh:
            fh.write(f"# n_fft: {symbol.n_fft}\n# sample_rate: {symbol.sample_rate!r}\n")
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["re", "im"])
            for v in x:
                w.writerow([repr(float(v.real)), repr(float(v.imag))])
        return
    inter = np.empty(2 * x.size, dtype="<f8")
    inter[0::2] = x.real
    inter[1::2] = x.imag
    with path.open("wb") as fh:
        fh.write(_HEADER.pack(MAGIC, x.size, float(symbol.sample_rate)))
        fh.write(inter.tobytes())


def read_iq(path: str | Path) -> tuple[np.ndarray, float]:
    """``(samples, sample_rate)``."""
    path = Path(path)
    if _is_csv(path):
        return _read_iq_csv(path)
    raw = path.read_bytes()
    if len(raw) < _HEADER.size:
        raise IqFormatError(f"{path}: file shorter than the {_HEADER.size}-byte header")
    magic, n_fft, rate = _HEADER.unpack_from(raw)
    if magic != MAGIC:
        raise IqFormatError(f"{path}: bad magic {magic!r}, expected {MAGIC!r}")
    body = raw[_HEADER.size:]
    if len(body) != 16 * n_fft:
        raise IqFormatError(f"{path}: header says N={n_fft} ({16 * n_fft} bytes), body has {len(body)} bytes")
    vals = np.frombuffer(body, dtype="<f8")
    return (vals[0::2] + 1j * vals[1::2]).astype(np.complex128), float(rate)


def _read_iq_csv(path: Path) -> tuple[np.ndarray, float]:
    meta = {}
    rows = []
    with path.open(newline="", encoding="utf-8") as fh:
        lines = [ln for ln in fh if ln.strip()]
    body = []
    for ln in lines:
        if ln.startswith("#"):
            key, _, val = ln[1:].partition(":")
            meta[key.strip()] = val.strip()
        else:
            body.append(ln)
    reader = csv.reader(body)
    header = next(reader, None)
    if header is None or [h.strip() for h in header] != ["re", "im"]:
        raise IqFormatError(f"{path}: expected header 're,im', got {header!r}")
    for lineno, row in enumerate(reader, start=2):
        if len(row) != 2:
            raise IqFormatError(f"{path}: row {lineno} has {len(row)} fields, expected 2")
        try:
            rows.append(complex(float(row[0]), float(row[1])))
        except ValueError as exc:
            raise IqFormatError(f"{path}: row {lineno}: {exc}") from exc
    x = np.array(rows, dtype=np.complex128)
    if "n_fft" in meta and int(meta["n_fft"]) != x.size:
        raise IqFormatError(f"{path}: header says N={meta['n_fft']}, found {x.size} rows")
    rate = float(meta["sample_rate"]) if "sample_rate" in meta else x.size * 15e3
    return x, rate


def load_symbol(path: str | Path) -> OfdmSymbol:
    x, rate = read_iq(path)
    if x.size < 2:
        raise IqFormatError(f"{path}: need at least 2 samples, got {x.size}")
    return OfdmSymbol(x, rate / x.size)


def write_reference(path: str | Path, bins: np.ndarray):
    bins = np.asarray(bins, dtype=np.complex128)
    with Path(path).open("w", newline="", encoding="utf-8") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["subcarrier", "re", "im"])
        for k in np.nonzero(bins)[0]:
            w.writerow([int(k), repr(float(bins[k].real)), repr(float(bins[k].imag))])


def read_reference(path: str | Path, n_fft: int) -> np.ndarray:
    """Dense length-N reference bins from a ``subcarrier,re,im`` CSV."""
    path = Path(path)
    out = np.zeros(n_fft, dtype=np.complex128)
    seen = set()
    with path.open(newline="", encoding="utf-8") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames is None or [f.strip() for f in reader.fieldnames] != ["subcarrier", "re", "im"]:
            raise IqFormatError(f"{path}: expected header 'subcarrier,re,im', got {reader.fieldnames!r}")
        for lineno, row in enumerate(reader, start=2):
            try:
                k = int(row["subcarrier"])
                v = complex(float(row["re"]), float(row["im"]))
            except (TypeError, ValueError) as exc:
                raise IqFormatError(f"{path}: row {lineno}: {exc}") from exc
            if not 0 <= k < n_fft:
                raise IqFormatError(f"{path}: row {lineno}: subcarrier {k} out of range for N={n_fft}")
            if k in seen:
                raise IqFormatError(f"{path}: row {lineno}: duplicate subcarrier {k}")
            seen.add(k)
            out[k] = v
    return out
