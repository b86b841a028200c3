"""Shared preparation layer for the RK4 steppers.

Both backends (compiled and pure numpy) consume the same flattened plan:
Hamiltonian terms stacked into one contiguous array with per-stage scalar
weights, and collapse operators packed as COO triplets. The dissipator's
anticommutator piece requires sum_k c_k^dag c_k to be diagonal, which holds
for every collapse set this package builds (single-subsystem ladder and
dephasing operators); arbitrary collapse operators fall back to a dense path
in the numpy backend.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from ..errors import DimensionError, DomainError
from ..qops import HERMITIAN_TOL, Operator


@dataclass(frozen=True)
class Schedule:
    """Time-dependent Hamiltonian H(t) = sum_m coeffs[m](t) * terms[m].

    Coefficients must be real (Hermiticity of the samples is then inherited
    from the terms); callables should accept ndarray arguments.
    """

    terms: tuple[Operator, ...]
    coeffs: tuple

    def __post_init__(self):
        if not self.terms:
            raise DimensionError("schedule needs at least one term")
        dims = self.terms[0].dims
        for term in self.terms:
            if term.dims != dims:
                raise DimensionError("all schedule terms must share the same dims")
            defect = term.hermiticity_defect()
            if defect > HERMITIAN_TOL:
                raise DomainError(f"schedule term is not Hermitian (defect {defect:.2e})")
        if len(self.coeffs) != len(self.terms):
            raise DimensionError("one coefficient per term required")

    @property
    def dims(self) -> tuple[int, ...]:
        return self.terms[0].dims

    @property
    def dim(self) -> int:
        return self.terms[0].dim

    def sample(self, times: np.ndarray) -> np.ndarray:
        """Evaluate all coefficients on a time grid; shape (len(times), n_terms)."""
        times = np.asarray(times, dtype=float)
        out = np.empty((times.size, len(self.coeffs)), dtype=float)
        for m, c in enumerate(self.coeffs):
            if callable(c):
                vals = np.asarray(c(times))
                if vals.shape != times.shape:  # scalar-only callable
                    vals = np.array([c(t) for t in times])
            else:
                vals = np.full(times.shape, c, dtype=float)
            if np.iscomplexobj(vals):
                if np.abs(vals.imag).max() > 1e-14:
                    raise DomainError("Hamiltonian coefficients must be real")
                vals = vals.real
            out[:, m] = vals
        return out

    def at(self, t: float) -> Operator:
        u = self.sample(np.array([t]))[0]
        mat = sum(w * term.matrix for w, term in zip(u, self.terms))
        return Operator(mat, self.dims)

    def stacked_terms(self) -> np.ndarray:
        return np.ascontiguousarray(
            np.stack([term.matrix for term in self.terms]), dtype=complex
        )


@dataclass(frozen=True)
class CollapsePlan:
    """COO-packed collapse operators plus the precomputed anticommutator weight.

    ``weight`` is the elementwise matrix W_ij = (A_ii + A_jj)/2 with
    A = sum_k c_k^dag c_k, so the anticommutator term of the dissipator is the
    Hadamard product -W * rho. Valid only when A is diagonal; ``is_structured``
    reports whether the fast path applies.
    """

    rows: np.ndarray
    cols: np.ndarray
    vals: np.ndarray
    ptr: np.ndarray
    weight: np.ndarray
    is_structured: bool
    dense_ops: tuple[np.ndarray, ...]
    a_dense: np.ndarray

    @property
    def n_ops(self) -> int:
        return len(self.ptr) - 1


def pack_collapse(ops: Sequence[Operator], dim: int) -> CollapsePlan:
    rows, cols, vals = [], [], []
    ptr = [0]
    dense = []
    a_dense = np.zeros((dim, dim), dtype=complex)
    structured = True
    for op in ops:
        mat = np.asarray(op.matrix, dtype=complex)
        if mat.shape != (dim, dim):
            raise DimensionError("collapse operator dimension mismatch")
        r, c = np.nonzero(mat)
        rows.append(r)
        cols.append(c)
        vals.append(mat[r, c])
        ptr.append(ptr[-1] + r.size)
        dense.append(mat)
        a_dense += mat.conj().T @ mat
        # the O(nnz^2) jump update assumes each op touches every output row
        # at most once
        if np.unique(r).size != r.size:
            structured = False
    offdiag = a_dense - np.diag(np.diag(a_dense))
    if np.abs(offdiag).max(initial=0.0) > 1e-12:
        structured = False
    adiag = np.real(np.diag(a_dense))
    weight = 0.5 * (adiag[:, None] + adiag[None, :])
    return CollapsePlan(
        rows=np.ascontiguousarray(np.concatenate(rows) if rows else np.empty(0, int), dtype=np.int64),
        cols=np.ascontiguousarray(np.concatenate(cols) if cols else np.empty(0, int), dtype=np.int64),
        vals=np.ascontiguousarray(np.concatenate(vals) if vals else np.empty(0, complex), dtype=complex),
        ptr=np.asarray(ptr, dtype=np.int64),
        weight=np.ascontiguousarray(weight),
        is_structured=structured,
        dense_ops=tuple(dense),
        a_dense=a_dense,
    )


def substep_count(dt: float, h_max: float) -> int:
    if not np.isfinite(h_max) or h_max <= 0:
        return 1
    return max(1, int(np.ceil(dt / h_max - 1e-12)))


def step_bound(schedule_or_op, rate_scale: float = 0.0, step_scale: float = 1.0,
               t0: float = 0.0) -> float:
    """Maximum RK4 step: 1/50 of the fastest period present at t0.

    The fastest period is taken from the spectral radius of H(t0); decay
    rates are added to the frequency scale so purely dissipative problems
    are resolved too.
    """
    if isinstance(schedule_or_op, Schedule):
        h0 = schedule_or_op.at(t0).matrix
    else:
        h0 = np.asarray(schedule_or_op, dtype=complex)
    spectral = float(np.abs(np.linalg.eigvalsh(h0)).max()) if h0.size else 0.0
    scale = spectral + rate_scale
    if scale <= 0:
        return np.inf
    return step_scale * (2.0 * np.pi / scale) / 50.0


def stage_times(t0: float, h: float, n_sub: int) -> np.ndarray:
    """Half-step grid t0 + j*h/2 for j = 0..2*n_sub (RK4 stage abscissae)."""
    return t0 + 0.5 * h * np.arange(2 * n_sub + 1)
