# cython: boundscheck=False, wraparound=False, cdivision=True
"""Compiled entropy/gradient kernel (see _core_py for the contract)."""

import numpy as np

cimport numpy as cnp
from libc.math cimport log2
from libc.stdlib cimport free, malloc
from scipy.linalg.cython_lapack cimport zheev

cnp.import_array()

COMPILED = True


def entropy_and_gradient(object w_in, double floor=1e-12):
    cdef cnp.ndarray[cnp.complex128_t, ndim=3] w = np.ascontiguousarray(
        w_in, dtype=np.complex128)
    if w.ndim != 3:
        raise ValueError("expected shape (k, da, db)")
    cdef Py_ssize_t k = w.shape[0], da = w.shape[1], db = w.shape[2]
    cdef cnp.ndarray[cnp.complex128_t, ndim=3] grad = np.zeros(
        (k, da, db), dtype=np.complex128)

    cdef int n = <int> da, info = 0, lwork = <int> (4 * da + 2)
    cdef double complex *a = <double complex *> malloc(da * da * sizeof(double complex))
    cdef double complex *t = <double complex *> malloc(da * db * sizeof(double complex))
    cdef double complex *work = <double complex *> malloc(lwork * sizeof(double complex))
    cdef double *ev = <double *> malloc(da * sizeof(double))
    cdef double *rwork = <double *> malloc((3 * da + 2) * sizeof(double))
    cdef double *logs = <double *> malloc(da * sizeof(double))
    if a == NULL or t == NULL or work == NULL or ev == NULL or rwork == NULL or logs == NULL:
        free(a); free(t); free(work); free(ev); free(rwork); free(logs)
        raise MemoryError()

    cdef double value = 0.0, p, mu, ratio
    cdef Py_ssize_t i, r, c, j, b
    cdef double complex acc
    try:
        for i in range(k):
            # sigma = w_i w_i^dagger, stored column-major for LAPACK
            for r in range(da):
                for c in range(da):
                    acc = 0
                    for b in range(db):
                        acc = acc + w[i, r, b] * w[i, c, b].conjugate()
                    a[c * da + r] = acc
            zheev("V", "U", &n, a, &n, ev, work, &lwork, rwork, &info)
            if info != 0:
                raise RuntimeError(f"zheev failed with info={info}")
            p = 0.0
            for j in range(da):
                if ev[j] > 0.0:
                    p += ev[j]
            if p <= 0.0:
                continue
            for j in range(da):
                mu = ev[j]
                ratio = mu / p
                if ratio > floor:
                    logs[j] = log2(ratio)
                    value -= mu * logs[j]
                else:
                    logs[j] = 0.0
            # t = diag(logs) V^dagger w_i ; grad_i = -V t
            for j in range(da):
                for b in range(db):
                    acc = 0
                    for r in range(da):
                        acc = acc + a[j * da + r].conjugate() * w[i, r, b]
                    t[j * db + b] = acc * logs[j]
            for r in range(da):
                for b in range(db):
                    acc = 0
                    for j in range(da):
                        acc = acc + a[j * da + r] * t[j * db + b]
                    grad[i, r, b] = -acc
    finally:
        free(a); free(t); free(work); free(ev); free(rwork); free(logs)
    return value, grad
