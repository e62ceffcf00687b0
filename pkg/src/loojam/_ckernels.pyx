# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled versions of the loops in :mod:`loojam._pykernels`."""
import numpy as np

cimport numpy as cnp
from libc.math cimport sin, cos, fabs, round as cround, fmod, M_PI, INFINITY

cnp.import_array()

cdef double SINGULAR_TOL = 1e-8


cdef inline double _sinpi(double x) nogil:
    cdef double r = cround(x)
    cdef double s = sin(M_PI * (x - r))
    if fmod(r, 2.0) != 0.0:
        return -s
    return s


cdef inline double _reduce(double d, long n_fft) nogil:
    return d - n_fft * cround(d / n_fft)


cdef inline void _geom(double d, long n_fft, double* re, double* im) nogil:
    cdef double dr = _reduce(d, n_fft)
    cdef double den = sin(M_PI * dr / n_fft)
    cdef double mag, ph, acc_re, acc_im
    cdef long n
    if fabs(den) >= SINGULAR_TOL:
        mag = _sinpi(dr) / den
        ph = -M_PI * dr * (n_fft - 1) / n_fft
        re[0] = mag * cos(ph)
        im[0] = mag * sin(ph)
    else:
        acc_re = 0.0
        acc_im = 0.0
        for n in range(n_fft):
            ph = -2.0 * M_PI * dr * n / n_fft
            acc_re += cos(ph)
            acc_im += sin(ph)
        re[0] = acc_re
        im[0] = acc_im


def geometric_sums(d, long n_fft):
    cdef const double[::1] dv = np.ascontiguousarray(np.atleast_1d(d), dtype=np.float64)
    cdef Py_ssize_t j, size = dv.shape[0]
    out = np.empty(size, dtype=np.complex128)
    cdef double[:, ::1] ov = out.view(np.float64).reshape(size, 2)
    cdef double re, im
    with nogil:
        for j in range(size):
            _geom(dv[j], n_fft, &re, &im)
            ov[j, 0] = re
            ov[j, 1] = im
    return out


def psi_counts(idx, m, long n_fft, double threshold):
    cdef const cnp.int64_t[::1] iv = np.ascontiguousarray(np.atleast_1d(idx), dtype=np.int64)
    cdef const double[::1] mv = np.ascontiguousarray(np.atleast_1d(m), dtype=np.float64)
    cdef Py_ssize_t j, size = iv.shape[0]
    out = np.zeros(size, dtype=np.int64)
    cdef cnp.int64_t[::1] ov = out
    cdef long k, count
    cdef double re, im
    with nogil:
        for j in range(size):
            count = 0
            for k in range(n_fft):
                if k == iv[j]:
                    continue
                _geom(-(k - iv[j] - mv[j]), n_fft, &re, &im)
                if re * re + im * im > threshold * threshold:
                    count += 1
            ov[j] = count
    return out


def glrt_scan(spec, bins, local, active, long oversample, long window, cand_pos):
    cdef const double[:, ::1] sv = np.ascontiguousarray(spec, dtype=np.complex128).view(np.float64).reshape(-1, 2)
    cdef const double[:, ::1] bv = np.ascontiguousarray(bins, dtype=np.complex128).view(np.float64).reshape(-1, 2)
    cdef const double[:, ::1] lv = np.ascontiguousarray(local, dtype=np.complex128).view(np.float64).reshape(-1, 2)
    cdef const cnp.uint8_t[::1] av = np.ascontiguousarray(active, dtype=np.uint8)
    cdef const cnp.int64_t[::1] cp = np.ascontiguousarray(cand_pos, dtype=np.int64)
    cdef long n_fft = bv.shape[0]
    cdef long total = sv.shape[0]
    cdef long half = window * oversample
    cdef Py_ssize_t ncand = cp.shape[0]
    best = np.empty(n_fft, dtype=np.float64)
    where = np.empty(n_fft, dtype=np.int64)
    cdef double[::1] bestv = best
    cdef cnp.int64_t[::1] wherev = where
    cdef long i, u, p, center, q, bpos
    cdef double re, im, val, bval, cre, cim
    with nogil:
        for i in range(n_fft):
            if not av[i]:
                bestv[i] = -INFINITY
                wherev[i] = -1
                continue
            center = i * oversample
            bval = -INFINITY
            bpos = -1
            for u in range(-half, half + 1):
                p = ((center + u) % total + total) % total
                re = sv[p, 0] + bv[i, 0] * lv[u + half, 0] - bv[i, 1] * lv[u + half, 1]
                im = sv[p, 1] + bv[i, 0] * lv[u + half, 1] + bv[i, 1] * lv[u + half, 0]
                val = re * re + im * im
                if val > bval:
                    bval = val
                    bpos = p
            for q in range(ncand):
                p = cp[q]
                _geom(<double>p / oversample - i, n_fft, &cre, &cim)
                cre = cre / n_fft
                cim = cim / n_fft
                re = sv[p, 0] + bv[i, 0] * cre - bv[i, 1] * cim
                im = sv[p, 1] + bv[i, 0] * cim + bv[i, 1] * cre
                val = re * re + im * im
                if val > bval:
                    bval = val
                    bpos = p
            bestv[i] = bval
            wherev[i] = bpos
    return best, where
