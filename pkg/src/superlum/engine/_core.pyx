# cython: boundscheck=False, wraparound=False, cdivision=True, initializedcheck=False
"""Compiled RK4 inner loops (BLAS-backed).

Semantics match engine._numpy_ref exactly: same stage weights, same
single-GEMM commutator, same O(nnz^2) jump update and Hadamard
anticommutator, same per-step symmetrization. The numpy module is the
reference; the parity test in tests/test_kernels.py holds the two together.
"""

import numpy as np

cimport numpy as cnp
from libc.math cimport sqrt
from scipy.linalg.cython_blas cimport zgemm, zgemv

BACKEND_NAME = "cython"

ctypedef double complex zcplx
ctypedef cnp.int64_t idx_t


cdef void _matmul(zcplx* a, zcplx* b, zcplx* c, int d) noexcept nogil:
    """Row-major c = a @ b via the transposed column-major identity."""
    cdef zcplx one = 1.0
    cdef zcplx zero = 0.0
    cdef char tn = b'N'
    zgemm(&tn, &tn, &d, &d, &d, &one, b, &d, a, &d, &zero, c, &d)


cdef void _assemble(zcplx[:, :, ::1] terms, double[:] u_row, zcplx[:, ::1] m) noexcept nogil:
    cdef int nt = terms.shape[0]
    cdef int d = terms.shape[1]
    cdef int i, j, t
    for i in range(d):
        for j in range(d):
            m[i, j] = u_row[0] * terms[0, i, j]
    for t in range(1, nt):
        for i in range(d):
            for j in range(d):
                m[i, j] = m[i, j] + u_row[t] * terms[t, i, j]


cdef void _lindblad_rhs(zcplx[:, :, ::1] terms, double[:] u_row, zcplx[:, ::1] rho_s,
                        idx_t[:] rows, idx_t[:] cols, zcplx[:] vals, idx_t[:] ptr,
                        double[:, ::1] weight,
                        zcplx[:, ::1] m, zcplx[:, ::1] t1, zcplx[:, ::1] k) noexcept nogil:
    cdef int d = rho_s.shape[0]
    cdef int i, j, op, p, q
    cdef Py_ssize_t s, e
    cdef zcplx mi = -1.0j
    cdef int nops = ptr.shape[0] - 1
    _assemble(terms, u_row, m)
    _matmul(&m[0, 0], &rho_s[0, 0], &t1[0, 0], d)
    # stage inputs are Hermitian, so [M, rho] = t1 - t1^dag
    for i in range(d):
        for j in range(d):
            k[i, j] = mi * (t1[i, j] - t1[j, i].conjugate()) - weight[i, j] * rho_s[i, j]
    for op in range(nops):
        s = ptr[op]
        e = ptr[op + 1]
        for p in range(s, e):
            for q in range(s, e):
                k[rows[p], rows[q]] = k[rows[p], rows[q]] + \
                    vals[p] * vals[q].conjugate() * rho_s[cols[p], cols[q]]


def lindblad_interval(zcplx[:, ::1] rho, zcplx[:, :, ::1] terms, double[:, ::1] u,
                      double h, int n_sub,
                      idx_t[:] rows, idx_t[:] cols, zcplx[:] vals, idx_t[:] ptr,
                      double[:, ::1] weight):
    """Advance rho in place over n_sub RK4 steps of size h; u holds the term
    weights at the half-step times. Returns the max Hermiticity defect seen
    before the per-step symmetrization."""
    cdef int d = rho.shape[0]
    k1_a = np.empty((d, d), dtype=complex); k2_a = np.empty((d, d), dtype=complex)
    k3_a = np.empty((d, d), dtype=complex); k4_a = np.empty((d, d), dtype=complex)
    y_a = np.empty((d, d), dtype=complex)
    m_a = np.empty((d, d), dtype=complex); t1_a = np.empty((d, d), dtype=complex)
    cdef zcplx[:, ::1] k1 = k1_a, k2 = k2_a, k3 = k3_a, k4 = k4_a, y = y_a, m = m_a, t1 = t1_a
    cdef double max_defect = 0.0, defect, dr, di
    cdef double hh = 0.5 * h, h6 = h / 6.0
    cdef int s, i, j
    cdef int jrow
    cdef zcplx dz, avg
    with nogil:
        for s in range(n_sub):
            jrow = 2 * s
            _lindblad_rhs(terms, u[jrow], rho, rows, cols, vals, ptr, weight, m, t1, k1)
            for i in range(d):
                for j in range(d):
                    y[i, j] = rho[i, j] + hh * k1[i, j]
            _lindblad_rhs(terms, u[jrow + 1], y, rows, cols, vals, ptr, weight, m, t1, k2)
            for i in range(d):
                for j in range(d):
                    y[i, j] = rho[i, j] + hh * k2[i, j]
            _lindblad_rhs(terms, u[jrow + 1], y, rows, cols, vals, ptr, weight, m, t1, k3)
            for i in range(d):
                for j in range(d):
                    y[i, j] = rho[i, j] + h * k3[i, j]
            _lindblad_rhs(terms, u[jrow + 2], y, rows, cols, vals, ptr, weight, m, t1, k4)
            for i in range(d):
                for j in range(d):
                    rho[i, j] = rho[i, j] + h6 * (k1[i, j] + 2.0 * (k2[i, j] + k3[i, j]) + k4[i, j])
            # symmetrize, tracking the pre-symmetrization defect
            for i in range(d):
                for j in range(i, d):
                    dz = rho[i, j] - rho[j, i].conjugate()
                    dr = dz.real; di = dz.imag
                    defect = sqrt(dr * dr + di * di)
                    if defect > max_defect:
                        max_defect = defect
                    avg = 0.5 * (rho[i, j] + rho[j, i].conjugate())
                    rho[i, j] = avg
                    rho[j, i] = avg.conjugate()
    return max_defect


cdef void _schro_rhs(zcplx[:, :, ::1] terms, double[:] u_row, zcplx[:] psi,
                     zcplx[:, ::1] m, zcplx[:] out, int d) noexcept nogil:
    cdef zcplx alpha = -1.0j
    cdef zcplx zero = 0.0
    cdef char tt = b'T'
    cdef int one = 1
    _assemble(terms, u_row, m)
    # row-major m applied to psi: transpose of the column-major view
    zgemv(&tt, &d, &d, &alpha, &m[0, 0], &d, &psi[0], &one, &zero, &out[0], &one)


def schrodinger_interval(zcplx[:] psi, zcplx[:, :, ::1] terms, double[:, ::1] u,
                         double h, int n_sub):
    """Advance psi in place over n_sub RK4 steps of size h."""
    cdef int d = psi.shape[0]
    k1_a = np.empty(d, dtype=complex); k2_a = np.empty(d, dtype=complex)
    k3_a = np.empty(d, dtype=complex); k4_a = np.empty(d, dtype=complex)
    y_a = np.empty(d, dtype=complex); m_a = np.empty((d, d), dtype=complex)
    cdef zcplx[:] k1 = k1_a, k2 = k2_a, k3 = k3_a, k4 = k4_a, y = y_a
    cdef zcplx[:, ::1] m = m_a
    cdef double hh = 0.5 * h, h6 = h / 6.0
    cdef int s, i, jrow
    with nogil:
        for s in range(n_sub):
            jrow = 2 * s
            _schro_rhs(terms, u[jrow], psi, m, k1, d)
            for i in range(d):
                y[i] = psi[i] + hh * k1[i]
            _schro_rhs(terms, u[jrow + 1], y, m, k2, d)
            for i in range(d):
                y[i] = psi[i] + hh * k2[i]
            _schro_rhs(terms, u[jrow + 1], y, m, k3, d)
            for i in range(d):
                y[i] = psi[i] + h * k3[i]
            _schro_rhs(terms, u[jrow + 2], y, m, k4, d)
            for i in range(d):
                psi[i] = psi[i] + h6 * (k1[i] + 2.0 * (k2[i] + k3[i]) + k4[i])
    return 0.0
