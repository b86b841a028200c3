import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from superlum.errors import DimensionError
from superlum.qops import (
    Operator,
    QuantumState,
    basis_state,
    expectation,
    make_annihilation,
    make_identity,
    make_pauli,
    tensor,
    vacuum_state,
)


class TestAnnihilation:
    def test_lowest_truncation(self):
        a = make_annihilation(2)
        assert np.array_equal(a.matrix, np.array([[0, 1], [0, 0]], dtype=complex))

    @pytest.mark.parametrize("dim", [2, 5, 17])
    def test_number_operator(self, dim):
        a = make_annihilation(dim)
        n = a.dag().matrix @ a.matrix
        assert np.allclose(n, np.diag(np.arange(dim)), atol=1e-14)

    def test_commutator_truncation_artifact(self):
        a = make_annihilation(4)
        comm = a.matrix @ a.dag().matrix - a.dag().matrix @ a.matrix
        expected = np.eye(4)
        expected[3, 3] = -3.0
        assert np.allclose(comm, expected, atol=1e-14)

    def test_invalid_dimension(self):
        with pytest.raises(DimensionError):
            make_annihilation(1)

    @given(dim=st.integers(min_value=2, max_value=24))
    def test_adjoint_involution(self, dim):
        a = make_annihilation(dim)
        assert np.array_equal(a.dag().dag().matrix, a.matrix)


class TestPauli:
    def test_z_convention(self):
        # excited state = sigma_z = +1 eigenvector = index 0
        assert np.array_equal(make_pauli("z").matrix, np.diag([1.0, -1.0]))

    def test_x(self):
        assert np.array_equal(make_pauli("x").matrix, np.array([[0, 1], [1, 0]], dtype=complex))

    def test_x_squared_identity(self):
        sx = make_pauli("x")
        assert np.allclose((sx @ sx).matrix, np.eye(2))

    def test_unknown_axis(self):
        with pytest.raises(DimensionError):
            make_pauli("w")


class TestTensor:
    def test_identities(self):
        out = tensor([make_identity(2), make_identity(3)])
        assert out.dims == (2, 3)
        assert np.array_equal(out.matrix, np.eye(6))

    def test_sz_times_number(self):
        n3 = make_annihilation(3).dag() @ make_annihilation(3)
        out = tensor([make_pauli("z"), n3])
        assert np.allclose(np.diag(out.matrix), [0, 1, 2, 0, -1, -2])

    def test_side_length(self):
        out = tensor([make_identity(2), make_identity(3), make_identity(5)])
        assert out.matrix.shape == (30, 30)
        assert out.dims == (2, 3, 5)

    def test_empty_list(self):
        with pytest.raises(DimensionError):
            tensor([])

    def test_associativity_exact(self):
        a, b, c = make_pauli("x"), make_annihilation(3), make_pauli("z")
        left = tensor([tensor([a, b]), c])
        right = tensor([a, tensor([b, c])])
        assert np.array_equal(left.matrix, right.matrix)


class TestExpectation:
    def test_vacuum_photon_number(self):
        n = make_annihilation(5).dag() @ make_annihilation(5)
        assert expectation(vacuum_state([5]), n) == 0

    def test_fock_one(self):
        n = make_annihilation(5).dag() @ make_annihilation(5)
        assert expectation(basis_state([5], [1]), n) == pytest.approx(1.0, abs=1e-14)

    def test_maximally_mixed_sz(self):
        rho = QuantumState.density(0.5 * np.eye(2), (2,))
        assert abs(expectation(rho, make_pauli("z"))) < 1e-14

    def test_dimension_mismatch(self):
        with pytest.raises(DimensionError):
            expectation(vacuum_state([3]), make_pauli("z"))

    @given(seed=st.integers(min_value=0, max_value=2**32 - 1))
    @settings(max_examples=25, deadline=None)
    def test_hermitian_expectation_real(self, seed):
        rng = np.random.default_rng(seed)
        d = int(rng.integers(2, 8))
        m = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
        herm = Operator(0.5 * (m + m.conj().T), (d,))
        vec = rng.normal(size=d) + 1j * rng.normal(size=d)
        state = QuantumState.pure(vec / np.linalg.norm(vec), (d,))
        assert abs(expectation(state, herm).imag) <= 1e-10


class TestStateValidation:
    def test_pure_norm_enforced(self):
        with pytest.raises(DimensionError):
            QuantumState.pure(np.array([1.0, 1.0]), (2,))

    def test_density_trace_enforced(self):
        with pytest.raises(DimensionError):
            QuantumState.density(np.eye(2), (2,))

    def test_density_hermiticity_enforced(self):
        m = np.array([[0.5, 0.1], [0.3, 0.5]], dtype=complex)
        with pytest.raises(DimensionError):
            QuantumState.density(m, (2,))

    def test_density_positivity_enforced(self):
        m = np.array([[1.2, 0.0], [0.0, -0.2]], dtype=complex)
        with pytest.raises(DimensionError):
            QuantumState.density(m, (2,))

    def test_to_density(self):
        rho = basis_state([2, 3], [1, 0]).to_density()
        assert rho.kind == "density"
        assert rho.data[3, 3] == 1.0

    def test_operator_dims_must_factor(self):
        with pytest.raises(DimensionError):
            Operator(np.eye(6), (2, 2))

    def test_states_and_operators_are_readonly(self):
        op = make_pauli("x")
        with pytest.raises(ValueError):
            op.matrix[0, 0] = 5.0
        st_ = vacuum_state([3])
        with pytest.raises(ValueError):
            st_.data[0] = 0.0
