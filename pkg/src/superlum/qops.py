"""Operator algebra on truncated Fock and qubit spaces.

Everything is dense complex128: the composite spaces in this package stay
below a few hundred dimensions, where dense linear algebra beats any sparse
machinery. Operators and states are frozen after construction (their numpy
buffers are marked read-only) so they can be shared freely across workers.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .errors import DimensionError

HERMITIAN_TOL = 1e-12
NORM_TOL = 1e-9


def _readonly(arr: np.ndarray) -> np.ndarray:
    out = np.ascontiguousarray(arr)
    if out is arr:
        out = arr.copy()
    out.setflags(write=False)
    return out


@dataclass(frozen=True)
class Operator:
    """Dense matrix on a composite Hilbert space.

    ``dims`` records the tensor factorization; its product must equal the
    matrix side length. Entries are dimensionless (frequencies in units of
    the model's reference frequency).
    """

    matrix: np.ndarray
    dims: tuple[int, ...]

    def __post_init__(self):
        mat = np.asarray(self.matrix, dtype=complex)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise DimensionError(f"operator matrix must be square, got shape {mat.shape}")
        dims = tuple(int(d) for d in self.dims)
        if int(np.prod(dims)) != mat.shape[0]:
            raise DimensionError(
                f"product of dims {dims} is {int(np.prod(dims))}, "
                f"but matrix side is {mat.shape[0]}"
            )
        object.__setattr__(self, "matrix", _readonly(mat))
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self) -> int:
        return self.matrix.shape[0]

    def dag(self) -> "Operator":
        return Operator(self.matrix.conj().T, self.dims)

    def hermiticity_defect(self) -> float:
        return float(np.abs(self.matrix - self.matrix.conj().T).max())

    def is_hermitian(self, tol: float = HERMITIAN_TOL) -> bool:
        return self.hermiticity_defect() <= tol

    def __add__(self, other: "Operator") -> "Operator":
        self._check_same_space(other)
        return Operator(self.matrix + other.matrix, self.dims)

    def __sub__(self, other: "Operator") -> "Operator":
        self._check_same_space(other)
        return Operator(self.matrix - other.matrix, self.dims)

    def __mul__(self, scalar: complex) -> "Operator":
        return Operator(self.matrix * scalar, self.dims)

    __rmul__ = __mul__

    def __matmul__(self, other: "Operator") -> "Operator":
        self._check_same_space(other)
        return Operator(self.matrix @ other.matrix, self.dims)

    def _check_same_space(self, other: "Operator") -> None:
        if self.dims != other.dims:
            raise DimensionError(f"operator dims differ: {self.dims} vs {other.dims}")


@dataclass(frozen=True)
class QuantumState:
    """Pure state vector or density matrix on a composite space.

    ``kind`` records which representation ``data`` holds. Construction
    validates normalization (pure), or unit trace / Hermiticity / positivity
    (density). ``eig_floor`` is the accepted numerical negativity of density
    eigenvalues: -1e-9 for hand-built states; integrator outputs are
    validated at the looser master-equation tolerance instead.
    """

    kind: str  # "pure" | "density"
    data: np.ndarray
    dims: tuple[int, ...]
    eig_floor: float = -NORM_TOL

    def __post_init__(self):
        dims = tuple(int(d) for d in self.dims)
        data = np.asarray(self.data, dtype=complex)
        d = int(np.prod(dims))
        if self.kind == "pure":
            if data.shape != (d,):
                raise DimensionError(f"pure state needs shape ({d},), got {data.shape}")
            nrm = float(np.linalg.norm(data))
            if abs(nrm - 1.0) > NORM_TOL:
                raise DimensionError(f"pure state norm {nrm} deviates from 1 beyond {NORM_TOL}")
        elif self.kind == "density":
            if data.shape != (d, d):
                raise DimensionError(f"density matrix needs shape ({d},{d}), got {data.shape}")
            tr = complex(np.trace(data))
            if abs(tr - 1.0) > NORM_TOL:
                raise DimensionError(f"density matrix trace {tr} deviates from 1 beyond {NORM_TOL}")
            if float(np.abs(data - data.conj().T).max()) > HERMITIAN_TOL:
                raise DimensionError("density matrix is not Hermitian within 1e-12")
            mineig = float(np.linalg.eigvalsh(data).min())
            if mineig < self.eig_floor:
                raise DimensionError(
                    f"density matrix min eigenvalue {mineig} < {self.eig_floor}"
                )
        else:
            raise DimensionError(f"unknown state kind {self.kind!r}")
        object.__setattr__(self, "data", _readonly(data))
        object.__setattr__(self, "dims", dims)

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims))

    @classmethod
    def pure(cls, vector: np.ndarray, dims: Sequence[int]) -> "QuantumState":
        return cls("pure", np.asarray(vector), tuple(dims))

    @classmethod
    def density(cls, matrix: np.ndarray, dims: Sequence[int],
                eig_floor: float = -NORM_TOL) -> "QuantumState":
        return cls("density", np.asarray(matrix), tuple(dims), eig_floor)

    def to_density(self) -> "QuantumState":
        if self.kind == "density":
            return self
        rho = np.outer(self.data, self.data.conj())
        return QuantumState("density", rho, self.dims)


def make_annihilation(dim: int) -> Operator:
    """Truncated lowering operator: entries sqrt(m) at (m-1, m)."""
    if dim < 2:
        raise DimensionError(f"annihilation operator needs dim >= 2, got {dim}")
    return Operator(np.diag(np.sqrt(np.arange(1, dim, dtype=float)), 1), (dim,))


_PAULI = {
    "x": np.array([[0.0, 1.0], [1.0, 0.0]], dtype=complex),
    "y": np.array([[0.0, -1.0j], [1.0j, 0.0]], dtype=complex),
    "z": np.array([[1.0, 0.0], [0.0, -1.0]], dtype=complex),
}


def make_pauli(axis: str) -> Operator:
    """Standard 2x2 Pauli matrix.

    Convention used throughout: the excited qubit state is the sigma_z = +1
    eigenvector, i.e. basis index 0.
    """
    if axis not in _PAULI:
        raise DimensionError(f"unknown Pauli axis {axis!r}; expected one of x, y, z")
    return Operator(_PAULI[axis], (2,))


def make_identity(dim: int) -> Operator:
    return Operator(np.eye(dim, dtype=complex), (dim,))


def make_lowering_qubit() -> Operator:
    """Qubit lowering operator |g><e| (maps index 0 to index 1)."""
    return Operator(np.array([[0.0, 0.0], [1.0, 0.0]], dtype=complex), (2,))


def tensor(factors: Iterable[Operator]) -> Operator:
    """Kronecker product in the given order; dims concatenate."""
    factors = list(factors)
    if not factors:
        raise DimensionError("tensor() needs at least one factor")
    mat = factors[0].matrix
    dims: tuple[int, ...] = factors[0].dims
    for f in factors[1:]:
        mat = np.kron(mat, f.matrix)
        dims = dims + f.dims
    return Operator(mat, dims)


def basis_state(dims: Sequence[int], occupations: Sequence[int]) -> QuantumState:
    """Product basis state |n_1, n_2, ...> as a pure QuantumState."""
    dims = tuple(int(d) for d in dims)
    if len(occupations) != len(dims):
        raise DimensionError("one occupation number per subsystem required")
    idx = 0
    for d, n in zip(dims, occupations):
        if not 0 <= n < d:
            raise DimensionError(f"occupation {n} outside [0, {d})")
        idx = idx * d + n
    vec = np.zeros(int(np.prod(dims)), dtype=complex)
    vec[idx] = 1.0
    return QuantumState.pure(vec, dims)


def vacuum_state(dims: Sequence[int]) -> QuantumState:
    return basis_state(dims, [0] * len(dims))


def expectation(state: QuantumState, obs: Operator) -> complex:
    """<psi|O|psi> for pure states, Tr(rho O) for density matrices."""
    if state.dims != obs.dims:
        raise DimensionError(f"state dims {state.dims} do not match operator dims {obs.dims}")
    if state.kind == "pure":
        return complex(np.vdot(state.data, obs.matrix @ state.data))
    # Tr(rho O) as an elementwise sum; avoids forming the product matrix
    return complex(np.sum(state.data * obs.matrix.T))
