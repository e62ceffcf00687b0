import numpy as np
import pytest

from loojam.ssb import ReKind, SsbGrid, build_ssb_grid, dmrs_positions, validate_grid


def test_default_counts():
    g = build_ssb_grid()
    s = g.summary()
    assert s["pbch_total"] == 576
    assert s["pbch_payload"] == 432
    assert s["pbch_dmrs"] == 144
    assert s["dmrs_fraction"] == 0.25


def test_per_symbol_dmrs_counts():
    g = build_ssb_grid(0)
    dmrs = g.mask(ReKind.PBCH_DMRS)
    assert [int(dmrs[s].sum()) for s in (1, 2, 3)] == [60, 24, 60]


def test_layout():
    g = build_ssb_grid()
    assert g.cells.shape == (4, 240)
    assert g.count(ReKind.PSS) == 127 and np.all(g.cells[0][g.cells[0] != ReKind.UNUSED] == ReKind.PSS)
    sss = np.nonzero(g.cells[2] == ReKind.SSS)[0]
    assert sss[0] == 56 and sss[-1] == 182
    pbch = g.pbch_mask()
    assert pbch[1].all() and pbch[3].all()
    assert pbch[2, :48].all() and pbch[2, 192:].all() and not pbch[2, 48:192].any()


@pytest.mark.parametrize("shift", range(4))
@pytest.mark.parametrize("width", [1, 127, 144])
def test_invariants_hold_for_all_accepted_params(shift, width):
    g = build_ssb_grid(shift, width)
    assert validate_grid(g) == []
    assert len(dmrs_positions(g)) == 576 // 4


def test_dmrs_positions_inside_pbch():
    g = build_ssb_grid(2)
    pbch = g.pbch_mask()
    assert all(pbch[s, k] for s, k in dmrs_positions(g))


def test_dmrs_positions_deterministic():
    g = build_ssb_grid()
    assert dmrs_positions(g) == dmrs_positions(g)


def test_shifts_disjoint():
    assert dmrs_positions(build_ssb_grid(0)).isdisjoint(dmrs_positions(build_ssb_grid(1)))


def test_invalid_params():
    with pytest.raises(ValueError):
        build_ssb_grid(4)
    with pytest.raises(ValueError):
        build_ssb_grid(0, 145)


class TestValidate:
    def test_flipped_dmrs_flags_both_counts(self):
        g = build_ssb_grid()
        s, k = sorted(dmrs_positions(g))[0]
        bad = g.with_cell(s, k, ReKind.PBCH_PAYLOAD)
        report = validate_grid(bad)
        assert any(p.startswith("pbch_payload") for p in report)
        assert any(p.startswith("pbch_dmrs") for p in report)

    def test_dimension_flagged(self):
        g = SsbGrid(build_ssb_grid().cells[:, :239])
        assert any(p.startswith("dimension") for p in validate_grid(g))

    def test_unknown_code_flagged(self):
        cells = build_ssb_grid().cells.copy()
        cells[0, 0] = 9
        assert any(p.startswith("kind") for p in validate_grid(SsbGrid(cells)))


def test_csv_rows_are_one_based():
    rows = list(build_ssb_grid().csv_rows())
    assert len(rows) == 960
    assert rows[0][0] == 1 and rows[-1][0] == 4
    assert {r[2] for r in rows} == {k.label for k in ReKind}


def test_ascii_map_shape():
    lines = build_ssb_grid().ascii_map().splitlines()
    assert len(lines) == 4 and all(len(ln) == 240 + 3 for ln in lines)
