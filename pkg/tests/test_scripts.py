import importlib.util
import subprocess
import sys

import pytest

from conftest import ROOT
from loojam.sim import RocCurve, RocPoint, emit_outputs


def _load(name):
    spec = importlib.util.spec_from_file_location(name, ROOT / "scripts" / f"{name}.py")
    mod = importlib.util.module_from_spec(spec)
    spec.loader.exec_module(mod)
    return mod


@pytest.fixture
def roc_csv(tmp_path):
    pts = (RocPoint(0.0, 1.0, 1.0), RocPoint(0.5, 0.2, 0.6), RocPoint(1.0, 0.0, 0.1))
    curves = [RocCurve(pts, 0.7, n, 5.0, 0.0, 10) for n in (64, 32)]
    curves.append(RocCurve((RocPoint(0.0, 1.0, None),), None, 8, 5.0, 0.0, 1))
    roc, _ = emit_outputs(curves, tmp_path)
    return roc


def test_read_curves(roc_csv):
    curves = _load("plot_roc").read_curves(roc_csv)
    assert list(curves) == [32, 64]
    assert curves[64] == [(0.0, 0.1), (0.2, 0.6), (1.0, 1.0)]


def test_plot_renders(roc_csv, tmp_path):
    pytest.importorskip("matplotlib")
    out = tmp_path / "roc.png"
    subprocess.run([sys.executable, str(ROOT / "scripts" / "plot_roc.py"), str(roc_csv), "--out", str(out)],
                   check=True, capture_output=True)
    assert out.read_bytes()[:4] == b"\x89PNG"
