import os
import subprocess
import sys

import numpy as np
import pytest

import oracles
from loojam import _pykernels, kernels

ck = pytest.importorskip("loojam._ckernels", reason="compiled extension not built")


def test_geometric_sums_parity(rng):
    n = 64
    d = np.concatenate([rng.uniform(-2 * n, 2 * n, 500), np.arange(-n, n, 0.5), [1e-10, n - 1e-10]])
    a = ck.geometric_sums(d, n)
    b = _pykernels.geometric_sums(d, n)
    assert np.max(np.abs(a - b)) < 1e-9
    for j in range(20):
        assert abs(b[j] - oracles.direct_geometric_sum(d[j], n)) < 1e-9


def test_psi_counts_parity(rng):
    n = 32
    idx = rng.integers(0, n, 200)
    m = np.where(rng.uniform(size=200) < 0.5, rng.integers(-n, n, 200), rng.uniform(-n, n, 200))
    a = ck.psi_counts(idx, m, n, 1e-6 * n)
    b = _pykernels.psi_counts(idx, m, n, 1e-6 * n)
    np.testing.assert_array_equal(a, b)


def test_glrt_scan_parity(rng):
    n, p, w = 64, 8, 3
    spec = rng.standard_normal(p * n) + 1j * rng.standard_normal(p * n)
    bins = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    offs = np.arange(-w * p, w * p + 1) / p
    local = _pykernels.geometric_sums(offs, n) / n
    active = (rng.uniform(size=n) < 0.8).astype(np.uint8)
    cand = rng.choice(p * n, 16, replace=False).astype(np.int64)
    va, pa = ck.glrt_scan(spec, bins, local, active, p, w, cand)
    vb, pb = _pykernels.glrt_scan(spec, bins, local, active, p, w, cand)
    on = active.astype(bool)
    np.testing.assert_allclose(np.asarray(va)[on], vb[on], rtol=1e-12)
    np.testing.assert_array_equal(np.asarray(pa), pb)
    assert np.all(np.isneginf(np.asarray(va)[~on]))


def test_default_backend_is_compiled():
    if os.environ.get("LOOJAM_PURE_PYTHON"):
        pytest.skip("fallback forced by environment")
    assert kernels.BACKEND == "cython"


def test_env_forces_fallback():
    env = dict(os.environ, LOOJAM_PURE_PYTHON="1")
    out = subprocess.run([sys.executable, "-c", "import loojam; print(loojam.BACKEND)"],
                         env=env, capture_output=True, text=True, check=True)
    assert out.stdout.strip() == "python"


def test_fallback_detector_agrees(rng):
    # the full detector gives the same answer on either backend
    code = (
        "import numpy as np;"
        "from loojam.jammer import JammerConfig, apply_frequency_shift;"
        "from loojam.ofdm import qpsk, synthesize;"
        "from loojam.detector import detect;"
        "b = qpsk(np.random.default_rng(5), 128);"
        "rx, _ = apply_frequency_shift(synthesize(b, 128), b, JammerConfig(offset=0.37, targets=(9,)));"
        "d = detect(rx, b).detections[0]; print(d.subcarrier, repr(d.m_hat))"
    )
    outs = set()
    for flag in ("", "1"):
        env = dict(os.environ, LOOJAM_PURE_PYTHON=flag)
        outs.add(subprocess.run([sys.executable, "-c", code], env=env, capture_output=True, text=True,
                                check=True).stdout)
    assert len(outs) == 1 and outs.pop().split()[0] == "9"
