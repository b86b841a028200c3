"""Pure numpy reference implementation of the RK4 inner loops.

This is the import-time fallback when the compiled extension is missing,
and the correctness reference the compiled kernel is tested against. The
algorithms are identical: classical RK4 with Hamiltonian samples assembled
from per-stage scalar weights, a single-GEMM commutator (valid because the
stage inputs stay Hermitian), an O(nnz^2) jump update, and a Hadamard
anticommutator for diagonal sum_k c_k^dag c_k.
"""

from __future__ import annotations

import numpy as np

BACKEND_NAME = "numpy"


def _lindblad_rhs(terms, u_row, rho_s, rows, cols, vals, ptr, weight):
    m = np.tensordot(u_row, terms, axes=1)
    t1 = m @ rho_s
    k = t1 - t1.conj().T
    k *= -1j
    for i in range(len(ptr) - 1):
        s, e = ptr[i], ptr[i + 1]
        r, c, v = rows[s:e], cols[s:e], vals[s:e]
        # c rho c^dag restricted to its nonzero block:
        # out[r_i, r_j] += v_i conj(v_j) rho[c_i, c_j]
        k[np.ix_(r, r)] += np.outer(v, v.conj()) * rho_s[np.ix_(c, c)]
    k -= weight * rho_s
    return k


def lindblad_interval(rho, terms, u, h, n_sub, rows, cols, vals, ptr, weight):
    """Advance rho in place over n_sub RK4 steps of size h.

    u holds the Hamiltonian term weights at the half-step times
    t0 + j*h/2, j = 0..2*n_sub. Returns the largest Hermiticity defect
    seen before the per-step symmetrization.
    """
    max_defect = 0.0
    for s in range(n_sub):
        j = 2 * s
        k1 = _lindblad_rhs(terms, u[j], rho, rows, cols, vals, ptr, weight)
        y = rho + (0.5 * h) * k1
        k2 = _lindblad_rhs(terms, u[j + 1], y, rows, cols, vals, ptr, weight)
        y = rho + (0.5 * h) * k2
        k3 = _lindblad_rhs(terms, u[j + 1], y, rows, cols, vals, ptr, weight)
        y = rho + h * k3
        k4 = _lindblad_rhs(terms, u[j + 2], y, rows, cols, vals, ptr, weight)
        rho += (h / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
        defect = float(np.abs(rho - rho.conj().T).max())
        if defect > max_defect:
            max_defect = defect
        rho += rho.conj().T
        rho *= 0.5
    return max_defect


def _schrodinger_rhs(terms, u_row, psi):
    m = np.tensordot(u_row, terms, axes=1)
    return -1j * (m @ psi)


def schrodinger_interval(psi, terms, u, h, n_sub):
    """Advance psi in place over n_sub RK4 steps of size h."""
    for s in range(n_sub):
        j = 2 * s
        k1 = _schrodinger_rhs(terms, u[j], psi)
        k2 = _schrodinger_rhs(terms, u[j + 1], psi + (0.5 * h) * k1)
        k3 = _schrodinger_rhs(terms, u[j + 1], psi + (0.5 * h) * k2)
        k4 = _schrodinger_rhs(terms, u[j + 2], psi + h * k3)
        psi += (h / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
    return 0.0


def lindblad_interval_dense(rho, terms, u, h, n_sub, dense_ops, a_dense):
    """Generic-collapse variant (dense c rho c^dag); used when the packed
    fast path does not apply."""
    c_dags = [c.conj().T for c in dense_ops]

    def rhs(u_row, rho_s):
        m = np.tensordot(u_row, terms, axes=1)
        t1 = m @ rho_s
        k = -1j * (t1 - t1.conj().T)
        for c, cd in zip(dense_ops, c_dags):
            k += c @ rho_s @ cd
        k -= 0.5 * (a_dense @ rho_s + rho_s @ a_dense)
        return k

    max_defect = 0.0
    for s in range(n_sub):
        j = 2 * s
        k1 = rhs(u[j], rho)
        k2 = rhs(u[j + 1], rho + (0.5 * h) * k1)
        k3 = rhs(u[j + 1], rho + (0.5 * h) * k2)
        k4 = rhs(u[j + 2], rho + h * k3)
        rho += (h / 6.0) * (k1 + 2.0 * (k2 + k3) + k4)
        defect = float(np.abs(rho - rho.conj().T).max())
        max_defect = max(max_defect, defect)
        rho += rho.conj().T
        rho *= 0.5
    return max_defect
