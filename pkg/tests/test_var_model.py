
import numpy as np
import pytest
import scipy.linalg
from hypothesis import given, strategies as st
from numpy.testing import assert_allclose, assert_array_equal

from vart2 import var_model as vm
from vart2.errors import InvalidModel, NonStationary, NotPositiveDefinite
from vart2.numerics import RngStream
from vart2.performance import simulate_segment

from support import batch_means_se, chemical_published, random_var, steel, var1

seeds = st.integers(0, 2**32 - 1)


def lambda_pi_closed(phi, n):
    """Closed forms valid for invertible ``phi`` with ``I - phi`` invertible."""
    eye = np.eye(phi.shape[0])
    inv_1m = np.linalg.inv(eye - phi)
    pw = np.linalg.matrix_power
    lam = (phi - pw(phi, n)) @ inv_1m
    pi = np.linalg.inv(np.linalg.inv(phi) - eye) @ ((eye - pw(phi, n - 1)) @ inv_1m - (n - 1) * pw(phi, n - 1))
    return lam, pi


class TestModel:
    def test_intercept(self):
        m = vm.VarModel([1.0, 2.0], ([[0.5, 0.1], [0.0, 0.2]],), np.eye(2))
        assert_allclose(m.intercept, (np.eye(2) - m.phi[0]) @ [1.0, 2.0])

    def test_json_round_trip(self, tmp_path):
        m = random_var(np.random.default_rng(4), 3, 2)
        vm.save_model(m, tmp_path / "m.json")
        back = vm.load_model(tmp_path / "m.json")
        for a, b in zip((m.mu, *m.phi, m.sigma_eps), (back.mu, *back.phi, back.sigma_eps)):
            assert_array_equal(a, b)

    def test_json_is_row_major(self):
        m = vm.VarModel([0, 0], ([[1e-1, 2e-1], [3e-1, 4e-1]],), [[1.0, 0.5], [0.5, 2.0]])
        doc = m.to_dict()
        assert doc["phi"] == [[0.1, 0.2, 0.3, 0.4]]
        assert doc["sigma_eps"] == [1.0, 0.5, 0.5, 2.0]

    def test_accepts_nested_matrices(self):
        doc = {"v": 2, "p": 1, "mu": [0, 0], "phi": [[[0.1, 0.2], [0.3, 0.4]]], "sigma_eps": [[1, 0], [0, 1]]}
        assert_array_equal(vm.VarModel.from_dict(doc).phi[0], [[0.1, 0.2], [0.3, 0.4]])

    @pytest.mark.parametrize("doc", [
        {"v": 2, "p": 2, "mu": [0, 0], "phi": [[0.1, 0, 0, 0.1]], "sigma_eps": [1, 0, 0, 1]},
        {"v": 2, "p": 1, "mu": [0], "phi": [[0.1, 0, 0, 0.1]], "sigma_eps": [1, 0, 0, 1]},
        {"v": 2, "p": 1, "mu": [0, 0], "phi": [[0.1, 0, 0]], "sigma_eps": [1, 0, 0, 1]},
        {"v": 2, "p": 1, "mu": [0, 0], "phi": [[0.1, 0, 0, 0.1]]},
    ])
    def test_inconsistent_documents(self, doc):
        with pytest.raises(InvalidModel):
            vm.VarModel.from_dict(doc)

    def test_innovation_covariance_must_be_positive_definite(self):
        with pytest.raises(NotPositiveDefinite):
            vm.VarModel([0, 0], (np.zeros((2, 2)),), [[1.0, 2.0], [2.0, 1.0]])

    def test_zero_last_lag_rejected(self):
        with pytest.raises(InvalidModel):
            vm.VarModel([0, 0], (0.5 * np.eye(2), np.zeros((2, 2))), np.eye(2))

    def test_shifted(self):
        m = vm.VarModel([1.0, 1.0], (np.zeros((2, 2)),), np.diag([4.0, 9.0]))
        assert_allclose(m.shifted(0.5).mu, [2.0, 2.5])
        assert_allclose(m.shifted([1.0, 0.0]).mu, [3.0, 1.0])


class TestCompanion:
    def test_order_one(self):
        m = var1([[0.3, 0.1], [0.0, 0.4]], np.eye(2))
        psi, sig_b = vm.companion(m)
        assert_array_equal(psi, m.phi[0])
        assert_array_equal(sig_b, m.sigma_eps)

    def test_chemical_first_block_row(self):
        psi, sig_b = vm.companion(chemical_published())
        assert_allclose(psi[:2], [[0.690, -0.043, 0.010, 0.091, -0.006, -0.017],
                                  [0.049, 0.633, -0.016, 0.270, 1.125, -0.317]])
        assert_array_equal(psi[2:, :4], np.eye(4))
        assert_array_equal(psi[2:, 4:], 0)
        assert_allclose(sig_b[:2, :2], [[0.011, -0.001], [-0.001, 0.012]])
        assert_array_equal(sig_b[2:], 0)

    def test_random_order_two_layout(self):
        m = random_var(np.random.default_rng(8), 2, 2)
        psi, _ = vm.companion(m)
        assert_array_equal(psi[:2, :2], m.phi[0])
        assert_array_equal(psi[:2, 2:], m.phi[1])
        assert_array_equal(psi[2:, :2], np.eye(2))
        assert_array_equal(psi[2:, 2:], 0)


class TestStationarity:
    def test_white_noise(self):
        m = var1(np.zeros((2, 2)), np.eye(2))
        assert vm.is_stationary(m)
        assert vm.stationarity_margin(m) == 1.0

    def test_explosive(self):
        m = var1(1.1 * np.eye(2), np.eye(2))
        assert not vm.is_stationary(m)
        with pytest.raises(NonStationary):
            vm.sigma_z(m)

    def test_unit_root_margin(self):
        m = var1(np.diag([1 - 1e-9, 0.5]), np.eye(2))
        assert not vm.is_stationary(m)


class TestSecondMoments:
    def test_white_noise_sigma_z(self):
        s = np.array([[2.0, 0.3], [0.3, 1.0]])
        assert_allclose(vm.sigma_z(var1(np.zeros((2, 2)), s)), s)

    @given(seeds, st.integers(1, 4), st.integers(1, 3))
    def test_sigma_z_solves_lyapunov(self, seed, v, p):
        m = random_var(np.random.default_rng(seed), v, p, radius=0.95)
        psi, sig_b = vm.companion(m)
        assert_allclose(vm.sigma_z(m), scipy.linalg.solve_discrete_lyapunov(psi, sig_b), atol=1e-9)

    def test_sigma_z_simulation(self):
        m = random_var(np.random.default_rng(11), 2, 2, radius=0.7)
        x = simulate_segment(m, 1_000_000, None, RngStream(11, 0)) - m.mu
        z = np.hstack([x[1:], x[:-1]])
        est, se = batch_means_se(np.einsum("ti,tj->tij", z, z))
        assert np.all(np.abs(est - vm.sigma_z(m)) < 3.5 * se)

    def test_white_noise_lags(self):
        s = np.array([[1.0, 0.4], [0.4, 2.0]])
        g = vm.lag_covariances(var1(np.zeros((2, 2)), s), 4)
        assert_allclose(g[0], s)
        assert_array_equal(g[1:], 0)

    @given(seeds, st.integers(1, 4))
    def test_order_one_powers(self, seed, v):
        m = random_var(np.random.default_rng(seed), v, 1)
        g = vm.lag_covariances(m, 6)
        for k in range(7):
            assert_allclose(g[k], np.linalg.matrix_power(m.phi[0], k) @ g[0], atol=1e-10)

    @given(seeds, st.integers(1, 4), st.integers(1, 3))
    def test_yule_walker_recursion(self, seed, v, p):
        m = random_var(np.random.default_rng(seed), v, p)
        g = vm.lag_covariances(m, 2 * p + 6)

        def gam(k):
            return g[k] if k >= 0 else g[-k].T

        for k in range(p, p + 6):
            rec = sum(m.phi[i] @ gam(k - i - 1) for i in range(p))
            assert np.max(np.abs(g[k] - rec)) < 1e-8

    def test_chemical_lag_one(self):
        g = vm.lag_covariances(chemical_published(), 2)
        assert_allclose(g[1], [[0.016, 0.018], [0.026, 0.146]], atol=1e-3)

    def test_companion_block_matches_order_one(self):
        m = random_var(np.random.default_rng(3), 3, 1)
        psi = m.phi[0]
        direct = scipy.linalg.solve_discrete_lyapunov(psi, m.sigma_eps)
        assert_allclose(vm.sigma_z(m), direct, atol=1e-10)

    def test_correlation_diagonal(self):
        r0 = vm.cross_correlation(steel(), 0)
        assert_allclose(np.diag(r0), 1.0)

    def test_negative_lag_is_transpose(self):
        m = steel()
        assert_allclose(vm.cross_correlation(m, -2), vm.cross_correlation(m, 2).T)

    @given(seeds, st.integers(1, 4), st.integers(1, 3))
    def test_symmetric_and_positive_definite(self, seed, v, p):
        m = random_var(np.random.default_rng(seed), v, p)
        for s in (vm.sigma_z(m), vm.sigma_x(m), vm.sigma_xbar(m, 5)):
            assert np.max(np.abs(s - s.T)) <= 1e-12
            np.linalg.cholesky(s)


class TestPowerSums:
    def test_single_observation(self):
        lam, pi = vm.lambda_pi(np.array([[0.5, 0.1], [0.2, 0.3]]), 1)
        assert_array_equal(lam, 0)
        assert_array_equal(pi, 0)

    def test_zero_matrix(self):
        lam, pi = vm.lambda_pi(np.zeros((3, 3)), 9)
        assert_array_equal(lam, 0)
        assert_array_equal(pi, 0)

    @given(seeds, st.integers(1, 4), st.integers(2, 20))
    def test_closed_forms(self, seed, v, n):
        rng = np.random.default_rng(seed)
        m = random_var(rng, v, 1, radius=rng.uniform(0.2, 0.9))
        phi = m.phi[0]
        if np.min(np.abs(np.linalg.eigvals(phi))) < 0.05:
            phi = phi + 0.1 * np.eye(v) * np.sign(np.trace(phi) + 1e-9)
        if np.max(np.abs(np.linalg.eigvals(phi))) >= 0.99:
            return
        lam, pi = vm.lambda_pi(phi, n)
        lam_c, pi_c = lambda_pi_closed(phi, n)
        assert_allclose(lam, lam_c, atol=1e-10)
        assert_allclose(pi, pi_c, atol=1e-9)

    def test_seven_observations(self):
        phi = np.array([[0.5, 0.2], [-0.1, 0.4]])
        lam, pi = vm.lambda_pi(phi, 7)
        lam_c, pi_c = lambda_pi_closed(phi, 7)
        assert_allclose(lam, lam_c, atol=1e-10)
        assert_allclose(pi, pi_c, atol=1e-10)


class TestBlockMeanCovariance:
    def test_white_noise(self):
        s = np.array([[1.0, 0.3], [0.3, 2.0]])
        m = var1(np.zeros((2, 2)), s)
        assert_allclose(vm.sigma_xbar_var1(m.phi[0], s, 6), s / 6)
        assert_allclose(vm.sigma_xbar(m, 6), s / 6)
        assert_allclose(vm.sigma_xbar_direct(m, 6), s / 6)

    def test_single_observation(self):
        m = steel()
        sx = vm.sigma_x(m)
        assert_allclose(vm.sigma_xbar_var1(m.phi[0], sx, 1), sx, atol=1e-12)
        assert_allclose(vm.sigma_xbar_direct(m, 1), sx, atol=1e-12)

    def test_steel_routes_agree(self):
        m = steel()
        assert_allclose(vm.sigma_xbar(m, 4), vm.sigma_xbar_direct(m, 4), atol=1e-10)

    @given(seeds, st.integers(1, 4), st.integers(1, 16))
    def test_order_one_routes_agree(self, seed, v, n):
        m = random_var(np.random.default_rng(seed), v, 1)
        a = vm.sigma_xbar_var1(m.phi[0], vm.sigma_x(m), n)
        assert np.max(np.abs(a - vm.sigma_xbar_direct(m, n))) < 1e-10

    def test_joint_block_covariance(self):
        m = random_var(np.random.default_rng(5), 2, 2)
        n = 6
        weights = np.kron(np.ones((1, n)) / n, np.eye(2))
        assert_allclose(weights @ vm.block_covariance(m, n) @ weights.T, vm.sigma_xbar(m, n), atol=1e-12)

    @given(seeds, st.integers(1, 4), st.integers(1, 3))
    def test_trace_nonincreasing(self, seed, v, p):
        m = random_var(np.random.default_rng(seed), v, p)
        tr = [np.trace(vm.sigma_xbar(m, n)) for n in (1, 2, 4, 8, 16, 32)]
        assert np.all(np.diff(tr) <= 1e-12)

    def test_invalid_block_size(self):
        with pytest.raises(ValueError):
            vm.sigma_xbar(steel(), 0)
