"""Synchronization signal block (SSB) resource-element layout.

Four OFDM symbols by 240 subcarriers: PSS in the first symbol, PBCH across
the second and fourth, SSS centred in the third with a 48-subcarrier PBCH
band on each side. PBCH DMRS sits on every fourth PBCH subcarrier. Symbols
are 0-based in arrays and 1-based in anything printed.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass

import numpy as np

N_SYMBOLS = 4
N_SUBCARRIERS = 240
PBCH_SIDE_BAND = 48
DEFAULT_SSS_WIDTH = 127

PBCH_TOTAL = 576
PBCH_PAYLOAD = 432
PBCH_DMRS = 144


class ReKind(enum.IntEnum):
    PSS = 0
    SSS = 1
    PBCH_PAYLOAD = 2
    PBCH_DMRS = 3
    UNUSED = 4

    @property
    def label(self) -> str:
        return _LABELS[self]

    @property
    def glyph(self) -> str:
        return _GLYPHS[self]


_LABELS = {
    ReKind.PSS: "pss",
    ReKind.SSS: "sss",
    ReKind.PBCH_PAYLOAD: "pbch_payload",
    ReKind.PBCH_DMRS: "pbch_dmrs",
    ReKind.UNUSED: "unused",
}
_GLYPHS = {
    ReKind.PSS: "P",
    ReKind.SSS: "S",
    ReKind.PBCH_PAYLOAD: "b",
    ReKind.PBCH_DMRS: "D",
    ReKind.UNUSED: ".",
}


@dataclass(frozen=True)
class SsbGrid:
    """Resource-element kinds, ``cells[symbol, subcarrier]`` holding :class:`ReKind` codes."""

    cells: np.ndarray
    dmrs_shift: int = 0
    sss_width: int = DEFAULT_SSS_WIDTH

    def __post_init__(self):
        cells = np.array(self.cells, dtype=np.int8)
        if cells.ndim != 2:
            raise ValueError("grid cells must be a 2-D array")
        cells.setflags(write=False)
        object.__setattr__(self, "cells", cells)

    @property
    def n_symbols(self) -> int:
        return self.cells.shape[0]

    @property
    def n_subcarriers(self) -> int:
        return self.cells.shape[1]

    def count(self, kind: ReKind) -> int:
        return int(np.count_nonzero(self.cells == kind))

    def mask(self, kind: ReKind) -> np.ndarray:
        return self.cells == kind

    def pbch_mask(self) -> np.ndarray:
        return (self.cells == ReKind.PBCH_PAYLOAD) | (self.cells == ReKind.PBCH_DMRS)

    def with_cell(self, symbol: int, subcarrier: int, kind: ReKind) -> "SsbGrid":
        cells = self.cells.copy()
        cells[symbol, subcarrier] = kind
        return SsbGrid(cells, self.dmrs_shift, self.sss_width)

    def summary(self) -> dict[str, int | float]:
        pbch = self.count(ReKind.PBCH_PAYLOAD) + self.count(ReKind.PBCH_DMRS)
        out: dict[str, int | float] = {kind.label: self.count(kind) for kind in ReKind}
        out["pbch_total"] = pbch
        out["dmrs_fraction"] = self.count(ReKind.PBCH_DMRS) / pbch if pbch else 0.0
        return out

    def ascii_map(self) -> str:
        rows = []
        for s in range(self.n_symbols):
            rows.append(f"{s + 1}: " + "".join(ReKind(c).glyph for c in self.cells[s]))
        return "\n".join(rows)

    def csv_rows(self):
        """Yield ``(symbol, subcarrier, kind)`` with 1-based symbols."""
        for s in range(self.n_symbols):
            for k in range(self.n_subcarriers):
                yield s + 1, k, ReKind(self.cells[s, k]).label


def _sss_band(sss_width: int) -> tuple[int, int]:
    start = (N_SUBCARRIERS - sss_width) // 2
    return start, start + sss_width


def build_ssb_grid(dmrs_shift: int = 0, sss_width: int = DEFAULT_SSS_WIDTH) -> SsbGrid:
    """Lay out PSS/SSS/PBCH/DMRS; ``dmrs_shift`` plays the role of cell-ID mod 4."""
    if not 0 <= dmrs_shift <= 3:
        raise ValueError(f"dmrs_shift must be in [0, 3], got {dmrs_shift}")
    if sss_width < 1 or sss_width + 2 * PBCH_SIDE_BAND > N_SUBCARRIERS:
        raise ValueError(f"sss_width must be in [1, {N_SUBCARRIERS - 2 * PBCH_SIDE_BAND}], got {sss_width}")

    cells = np.full((N_SYMBOLS, N_SUBCARRIERS), ReKind.UNUSED, dtype=np.int8)
    lo, hi = _sss_band(sss_width)
    cells[0, lo:hi] = ReKind.PSS
    cells[2, lo:hi] = ReKind.SSS

    pbch = np.zeros_like(cells, dtype=bool)
    pbch[1, :] = True
    pbch[3, :] = True
    pbch[2, :PBCH_SIDE_BAND] = True
    pbch[2, N_SUBCARRIERS - PBCH_SIDE_BAND:] = True

    dmrs_cols = (np.arange(N_SUBCARRIERS) % 4) == dmrs_shift
    cells[pbch] = ReKind.PBCH_PAYLOAD
    cells[pbch & dmrs_cols[None, :]] = ReKind.PBCH_DMRS
    return SsbGrid(cells, dmrs_shift, sss_width)


def dmrs_positions(grid: SsbGrid) -> frozenset[tuple[int, int]]:
    """0-based ``(symbol, subcarrier)`` of every PBCH DMRS cell."""
    sym, sc = np.nonzero(grid.cells == ReKind.PBCH_DMRS)
    return frozenset(zip(sym.tolist(), sc.tolist()))


def validate_grid(grid: SsbGrid) -> list[str]:
    """Every violated layout invariant; empty when the grid is valid."""
    problems = []
    if grid.cells.shape != (N_SYMBOLS, N_SUBCARRIERS):
        problems.append(
            f"dimension: expected {N_SYMBOLS}x{N_SUBCARRIERS}, got {grid.n_symbols}x{grid.n_subcarriers}"
        )
    valid_codes = np.isin(grid.cells, [int(k) for k in ReKind])
    if not valid_codes.all():
        problems.append(f"kind: {int((~valid_codes).sum())} cells hold an unknown kind code")

    payload = grid.count(ReKind.PBCH_PAYLOAD)
    dmrs = grid.count(ReKind.PBCH_DMRS)
    if payload + dmrs != PBCH_TOTAL:
        problems.append(f"pbch_total: expected {PBCH_TOTAL}, got {payload + dmrs}")
    if payload != PBCH_PAYLOAD:
        problems.append(f"pbch_payload: expected {PBCH_PAYLOAD}, got {payload}")
    if dmrs != PBCH_DMRS:
        problems.append(f"pbch_dmrs: expected {PBCH_DMRS}, got {dmrs}")

    if grid.cells.shape == (N_SYMBOLS, N_SUBCARRIERS):
        pbch = grid.pbch_mask()
        for s in (1, 3):
            n = int(pbch[s].sum())
            if n != N_SUBCARRIERS:
                problems.append(f"symbol {s + 1}: expected {N_SUBCARRIERS} PBCH REs, got {n}")
        sss_cols = np.nonzero(grid.cells[2] == ReKind.SSS)[0]
        if sss_cols.size == 0:
            problems.append("symbol 3: no SSS REs")
        else:
            below = int(pbch[2, : sss_cols[0]].sum())
            above = int(pbch[2, sss_cols[-1] + 1:].sum())
            if below != PBCH_SIDE_BAND or above != PBCH_SIDE_BAND:
                problems.append(
                    f"symbol 3: expected {PBCH_SIDE_BAND} PBCH REs below and above SSS, got {below} and {above}"
                )
            if int(pbch[2, sss_cols[0]:sss_cols[-1] + 1].sum()):
                problems.append("symbol 3: PBCH REs inside the SSS band")
        if int(pbch[0].sum()):
            problems.append(f"symbol 1: {int(pbch[0].sum())} PBCH REs in the PSS symbol")
    return problems
