"""Numpy implementations of the hot loops.

Reference behaviour for :mod:`loojam._ckernels`; both expose the same functions
with the same argument order and return types.
"""
import numpy as np

SINGULAR_TOL = 1e-8


def _sinpi(x):
    x = np.asarray(x, dtype=np.float64)
    r = np.round(x)
    s = np.sin(np.pi * (x - r))
    return np.where(np.mod(r, 2.0) != 0.0, -s, s)


def _reduce(d, n_fft):
    # the sum is N-periodic in d; keep the argument small for accuracy
    d = np.asarray(d, dtype=np.float64)
    return d - n_fft * np.round(d / n_fft)


def geometric_sums(d, n_fft):
    """sum_{n<N} exp(-2j*pi*d*n/N) for every entry of ``d``."""
    d = np.atleast_1d(np.asarray(d, dtype=np.float64))
    dr = _reduce(d, n_fft)
    den = np.sin(np.pi * dr / n_fft)
    out = np.empty(d.shape, dtype=np.complex128)
    regular = np.abs(den) >= SINGULAR_TOL
    dreg = dr[regular]
    out[regular] = (_sinpi(dreg) / den[regular]) * np.exp(-1j * np.pi * dreg * (n_fft - 1) / n_fft)
    if not regular.all():
        n = np.arange(n_fft)
        dsing = dr[~regular]
        out[~regular] = np.exp(-2j * np.pi * np.outer(dsing, n) / n_fft).sum(axis=1)
    return out


def psi_counts(idx, m, n_fft, threshold):
    """Count k != i with |sum_n exp(j*2*pi*(k - i - m)*n/N)| > threshold, per (i, m)."""
    idx = np.atleast_1d(np.asarray(idx, dtype=np.int64))
    m = np.atleast_1d(np.asarray(m, dtype=np.float64))
    k = np.arange(n_fft, dtype=np.float64)
    out = np.empty(idx.shape, dtype=np.int64)
    for j in range(idx.size):
        d = -(k - idx[j] - m[j])
        mag = np.abs(geometric_sums(d, n_fft))
        hit = mag > threshold
        hit[idx[j]] = False
        out[j] = int(hit.sum())
    return out


def glrt_scan(spec, bins, local, active, oversample, window, cand_pos):
    """Best template fit per subcarrier hypothesis.

    ``spec`` is the oversampled residual spectrum (length P*N) and ``local``
    the Dirichlet coupling term on offsets ``-W..W`` (step 1/P) around a
    subcarrier. Beyond the window only the peak positions ``cand_pos`` are
    tried, with the coupling evaluated in closed form.
    Returns (best value, position in ``spec``) per subcarrier; inactive ones get -inf, -1.
    """
    n_fft = bins.shape[0]
    total = spec.shape[0]
    half = window * oversample
    offs = np.arange(-half, half + 1)
    centers = np.arange(n_fft) * oversample
    pos = (centers[:, None] + offs[None, :]) % total
    vals = np.abs(spec[pos] + bins[:, None] * local[None, :]) ** 2

    cand_pos = np.asarray(cand_pos, dtype=np.int64)
    d = cand_pos[None, :] / oversample - np.arange(n_fft)[:, None]
    coupling = geometric_sums(d.ravel(), n_fft).reshape(d.shape) / n_fft
    cvals = np.abs(spec[cand_pos][None, :] + bins[:, None] * coupling) ** 2

    allv = np.concatenate([vals, cvals], axis=1)
    allp = np.concatenate([pos, np.broadcast_to(cand_pos, (n_fft, cand_pos.size))], axis=1)
    arg = np.argmax(allv, axis=1)
    rows = np.arange(n_fft)
    best = allv[rows, arg]
    where = allp[rows, arg].astype(np.int64)
    act = np.asarray(active, dtype=bool)
    best = np.where(act, best, -np.inf)
    where = np.where(act, where, -1)
    return best, where
