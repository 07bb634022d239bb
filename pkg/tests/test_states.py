import numpy as np
import pytest

from eofdual.linalg import ValidationError
from eofdual.states import (
    BipartiteDims,
    DensityMatrix,
    FourPartyDims,
    IsometryParameter,
    PureState,
    ensemble_from_isometry,
    product_across_cut,
    product_state_across_cut,
    random_isometry,
    reduce_subsystem,
    rng_stream,
    sample_density,
    sample_haar_pure,
    sample_hermitian,
    subsystem_to_cut,
    validate_density,
)

D22 = BipartiteDims(2, 2)


def bell_state(dims=D22):
    v = np.zeros(4, dtype=complex)
    v[0] = v[3] = 1 / np.sqrt(2)
    return PureState(dims, v)


class TestValidateDensity:
    def test_maximally_mixed_ok(self):
        rho = validate_density(np.eye(4) / 4, D22)
        assert rho.dims == D22

    def test_trace_violation(self):
        with pytest.raises(ValidationError, match="trace"):
            validate_density(np.eye(4) * (1.01 / 4), D22)

    def test_psd_violation(self):
        with pytest.raises(ValidationError, match="PSD"):
            validate_density(np.diag([1.2, -0.2, 0.0, 0.0]), D22)

    def test_hermiticity_violation(self):
        m = np.eye(4, dtype=complex) / 4
        m[0, 1] = 0.1
        with pytest.raises(ValidationError, match="hermiticity"):
            validate_density(m, D22)


class TestEnsembleFromIsometry:
    def test_identity_mixing_recovers_eigendecomposition(self):
        rho = sample_density(D22, 3, seed=5)
        from eofdual.linalg import hermitian_eig

        vals, vecs = hermitian_eig(rho.matrix)
        r = int((vals > 1e-12).sum())
        ens = ensemble_from_isometry(rho, IsometryParameter(np.eye(r, dtype=complex)))
        np.testing.assert_allclose(np.sort(ens.weights), np.sort(vals[:r]), atol=1e-10)

    def test_rank_one_single_member(self):
        psi = sample_haar_pure(D22, seed=2)
        rho = DensityMatrix(D22, psi.projector())
        u = random_isometry(3, 1, rng_stream(0, 9))
        ens = ensemble_from_isometry(rho, u)
        for p, s in zip(ens.weights, ens.states):
            overlap = abs(np.vdot(s.amplitudes, psi.amplitudes))
            assert overlap == pytest.approx(1.0, abs=1e-9)

    def test_reconstruction_random_isometry(self):
        rho = sample_density(D22, 4, seed=7)
        u = random_isometry(8, 4, rng_stream(1, 9))
        ens = ensemble_from_isometry(rho, u)
        avg = sum(p * s.projector() for p, s in zip(ens.weights, ens.states))
        assert np.max(np.abs(avg - rho.matrix)) <= 1e-10

    def test_wrong_rank_rejected(self):
        rho = sample_density(D22, 2, seed=3)
        with pytest.raises(ValidationError):
            ensemble_from_isometry(rho, IsometryParameter(np.eye(4, dtype=complex)))


class TestSampling:
    def test_haar_deterministic(self):
        a = sample_haar_pure(D22, seed=11)
        b = sample_haar_pure(D22, seed=11)
        np.testing.assert_array_equal(a.amplitudes, b.amplitudes)

    def test_haar_mean_z_observable(self):
        z = np.kron(np.diag([1.0, -1.0]), np.eye(2))
        n = 10_000
        vals = np.empty(n)
        for i in range(n):
            v = sample_haar_pure(D22, seed=99, index=i).amplitudes
            vals[i] = np.real(v.conj() @ z @ v)
        sigma = vals.std(ddof=1) / np.sqrt(n)
        assert abs(vals.mean()) <= 3 * sigma

    def test_haar_mean_reduced_purity(self):
        # Haar moment: E[Tr rho_A^2] = (dA + dB) / (dA*dB + 1)
        da, db = 2, 2
        expected = (da + db) / (da * db + 1)
        n = 10_000
        vals = np.empty(n)
        for i in range(n):
            m = sample_haar_pure(BipartiteDims(da, db), seed=123, index=i).matrix
            red = m @ m.conj().T
            vals[i] = np.real(np.trace(red @ red))
        sigma = vals.std(ddof=1) / np.sqrt(n)
        assert abs(vals.mean() - expected) <= 3 * sigma

    def test_density_rank_one_pure(self):
        rho = sample_density(D22, 1, seed=4)
        purity = np.real(np.trace(rho.matrix @ rho.matrix))
        assert purity == pytest.approx(1.0, abs=1e-10)

    def test_density_trace_and_validation(self):
        rho = sample_density(D22, 4, seed=4)
        assert abs(np.trace(rho.matrix) - 1) <= 1e-12
        validate_density(rho.matrix, D22)  # must not raise

    def test_density_deterministic(self):
        a = sample_density(D22, 2, seed=21)
        b = sample_density(D22, 2, seed=21)
        np.testing.assert_array_equal(a.matrix, b.matrix)

    def test_hermitian_deterministic_and_hermitian(self):
        h = sample_hermitian(D22, seed=8)
        h2 = sample_hermitian(D22, seed=8)
        np.testing.assert_array_equal(h.matrix, h2.matrix)


class TestReshape:
    def test_basis_state(self):
        v = np.zeros(4, dtype=complex)
        v[0] = 1.0
        np.testing.assert_array_equal(
            PureState(D22, v).matrix, np.array([[1, 0], [0, 0]], dtype=complex)
        )

    def test_bell_matrix_view(self):
        np.testing.assert_allclose(bell_state().matrix, np.eye(2) / np.sqrt(2))

    def test_round_trip_bit_for_bit(self):
        psi = sample_haar_pure(BipartiteDims(3, 2), seed=17)
        again = PureState.from_matrix(psi.matrix, psi.dims)
        assert np.array_equal(psi.amplitudes, again.amplitudes)

    def test_reductions_share_spectrum(self):
        psi = sample_haar_pure(BipartiteDims(3, 4), seed=31)
        m = psi.matrix
        specA = np.linalg.eigvalsh(m @ m.conj().T)
        specB = np.linalg.eigvalsh(m.conj().T @ m)
        nonzeroB = specB[specB > 1e-10]
        nonzeroA = specA[specA > 1e-10]
        np.testing.assert_allclose(np.sort(nonzeroA), np.sort(nonzeroB), atol=1e-10)


class TestFourParty:
    def test_reduce_product_state(self):
        rho1 = sample_density(D22, 2, seed=41, index=0)
        rho2 = sample_density(D22, 2, seed=41, index=1)
        comp = product_across_cut(rho1, rho2)
        np.testing.assert_allclose(reduce_subsystem(comp, 1).matrix, rho1.matrix, atol=1e-12)
        np.testing.assert_allclose(reduce_subsystem(comp, 2).matrix, rho2.matrix, atol=1e-12)

    def test_product_state_vector_matches_operator(self):
        p1 = sample_haar_pure(D22, seed=42, index=0)
        p2 = sample_haar_pure(D22, seed=42, index=1)
        vec = product_state_across_cut(p1, p2)
        op = product_across_cut(
            DensityMatrix(D22, p1.projector()), DensityMatrix(D22, p2.projector())
        )
        np.testing.assert_allclose(vec.projector(), op.matrix, atol=1e-12)

    def test_subsystem_to_cut_preserves_trace_pairing(self):
        dims = FourPartyDims(2, 2, 2, 2)
        rng = np.random.default_rng(7)
        a = rng.standard_normal((16, 16)) + 1j * rng.standard_normal((16, 16))
        b = rng.standard_normal((16, 16)) + 1j * rng.standard_normal((16, 16))
        lhs = np.trace(a @ b)
        rhs = np.trace(subsystem_to_cut(a, dims) @ subsystem_to_cut(b, dims))
        assert abs(lhs - rhs) <= 1e-10 * max(1.0, abs(lhs))
