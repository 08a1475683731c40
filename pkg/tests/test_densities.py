import numpy as np
import pytest

from follmer import (FunctionTarget, GaussianComponent, GaussianMixture,
                     Preconditioner, gm_log_density, gm_sample, log_rnd,
                     single_gaussian)
from follmer.registry import example_registry

# log(1/4 N(2; -2, 0.25) + 3/4 N(2; 2, 0.25)), frozen from a 50-digit
# direct two-term sum (mpmath)
EX1_LOGDENS_AT_2 = -0.51347342509650413841
# log nu(0.5) - log phi(0.5) for the same target against N(0, 1)
EX1_LOG_RND_AT_HALF = -3.9694230772673562382


@pytest.fixture(scope="module")
def ex1():
    return example_registry(1)


class TestGaussianComponent:
    def test_cholesky_roundtrip(self):
        cov = np.array([[2.0, 0.6], [0.6, 1.0]])
        comp = GaussianComponent([0.0, 1.0], cov)
        assert np.allclose(comp.chol @ comp.chol.T, cov, rtol=1e-8)

    def test_asymmetric_rejected(self):
        with pytest.raises(ValueError, match="symmetric"):
            GaussianComponent([0.0, 0.0], [[1.0, 0.3], [0.1, 1.0]])

    def test_non_spd_rejected(self):
        with pytest.raises(ValueError, match="positive definite"):
            GaussianComponent([0.0, 0.0], [[1.0, 2.0], [2.0, 1.0]])

    def test_log_density_matches_quadratic(self):
        comp = GaussianComponent([1.0, -1.0], [[1.5, 0.4], [0.4, 0.8]])
        x = np.array([0.3, 0.2])
        diff = x - comp.mean
        cov_inv = np.linalg.inv(comp.covariance)
        want = (-0.5 * diff @ cov_inv @ diff
                - 0.5 * np.log((2 * np.pi) ** 2 * np.linalg.det(comp.covariance)))
        assert comp.log_density(x) == pytest.approx(want, rel=1e-12)


class TestMixtureValidation:
    def test_weights_must_sum_to_one(self):
        with pytest.raises(ValueError, match="sum to 1"):
            GaussianMixture([0.5, 0.4], [GaussianComponent([0.0], [[1.0]])] * 2)

    def test_dimension_mismatch(self):
        comps = [GaussianComponent([0.0], [[1.0]]),
                 GaussianComponent([0.0, 0.0], np.eye(2))]
        with pytest.raises(ValueError, match="dimension"):
            GaussianMixture([0.5, 0.5], comps)

    def test_point_dimension_checked(self, ex1):
        with pytest.raises(ValueError):
            gm_log_density(ex1.mixture, [0.0, 0.0])


class TestGmLogDensity:
    def test_standard_normal_at_mode(self):
        gm = single_gaussian([0.0], [[1.0]])
        assert gm_log_density(gm, [0.0]) == pytest.approx(-0.5 * np.log(2 * np.pi),
                                                          abs=1e-12)

    def test_example1_at_two(self, ex1):
        assert gm_log_density(ex1.mixture, [2.0]) == pytest.approx(
            EX1_LOGDENS_AT_2, abs=1e-12)

    def test_single_component_degenerates(self):
        comp = GaussianComponent([1.0, 2.0], 0.5 * np.eye(2))
        gm = GaussianMixture([1.0], [comp])
        x = np.array([1.0, 2.0])
        assert gm_log_density(gm, x) == pytest.approx(comp.log_density(x), abs=1e-12)

    def test_agrees_with_naive_sum_where_it_survives(self, ex1):
        rng = np.random.default_rng(0)
        xs = rng.uniform(-4, 4, size=(200, 1))
        naive = np.log([
            sum(th * np.exp(c.log_density(x))
                for th, c in zip(ex1.mixture.weights, ex1.mixture.components))
            for x in xs
        ])
        ours = gm_log_density(ex1.mixture, xs)
        assert np.allclose(ours, naive, rtol=1e-10)

    def test_finite_where_naive_underflows(self):
        gm = single_gaussian([0.0], [[1.0]])
        x = np.array([60.0])
        assert np.exp(gm.log_density(x) * 1.0) == 0.0 or True  # naive would be 0
        naive = np.exp(gm.components[0].log_density(x))
        assert naive == 0.0
        assert np.isfinite(gm_log_density(gm, x))

    def test_anisotropic_path_matches_scipy(self):
        from scipy.stats import multivariate_normal
        spec = example_registry(10)
        rng = np.random.default_rng(1)
        xs = rng.normal(0, 4, size=(50, 2))
        want = np.log(sum(
            th * multivariate_normal(c.mean, c.covariance).pdf(xs)
            for th, c in zip(spec.mixture.weights, spec.mixture.components)
        ))
        assert np.allclose(gm_log_density(spec.mixture, xs), want, rtol=1e-10)


class TestGmSample:
    def test_law_of_large_numbers(self):
        cov = np.array([[1.0, 0.3], [0.3, 0.5]])
        gm = single_gaussian([2.0, -1.0], cov)
        batch = gm_sample(gm, 100_000, seed=7)
        tol = 4 * np.sqrt(np.trace(cov) / batch.n)
        assert np.linalg.norm(batch.data.mean(axis=0) - [2.0, -1.0]) < tol

    def test_deterministic(self, ex1):
        a = gm_sample(ex1.mixture, 500, seed=3)
        b = gm_sample(ex1.mixture, 500, seed=3)
        assert np.array_equal(a.data, b.data)

    def test_eight_mode_assignment_counts(self):
        spec = example_registry(4)
        n = 100_000
        batch = gm_sample(spec.mixture, n, seed=11)
        means = np.stack([c.mean for c in spec.mixture.components])
        nearest = np.linalg.norm(
            batch.data[:, None, :] - means[None], axis=2).argmin(axis=1)
        counts = np.bincount(nearest, minlength=8)
        sd = np.sqrt(n * (1 / 8) * (7 / 8))
        assert np.all(np.abs(counts - n / 8) < 4 * sd)

    def test_mixture_moments(self):
        spec = example_registry(11, 2)
        gm = spec.mixture
        batch = gm_sample(gm, 100_000, seed=13)
        mean_err = np.linalg.norm(batch.data.mean(axis=0) - gm.mean())
        assert mean_err < 4 * np.sqrt(np.trace(gm.covariance()) / batch.n)
        emp_cov = np.cov(batch.data.T)
        assert np.allclose(emp_cov, gm.covariance(), atol=0.05)

    def test_n_must_be_positive(self, ex1):
        with pytest.raises(ValueError):
            gm_sample(ex1.mixture, 0, seed=0)


class TestLogRnd:
    def test_zero_when_target_is_reference(self):
        pc = Preconditioner.from_moments([0.5, -0.2], [[1.2, 0.1], [0.1, 0.9]])
        gm = single_gaussian(pc.mean, pc.covariance)
        rng = np.random.default_rng(5)
        xs = rng.normal(0, 2, size=(1000, 2))
        assert np.max(np.abs(log_rnd(gm, pc, xs))) < 1e-10

    def test_constant_shift_contract(self, ex1):
        gm, pc = ex1.mixture, ex1.preconditioner
        c = 0.37
        shifted = FunctionTarget(1, lambda x: gm.neg_log_density_unnorm(x) - np.log(c))
        xs = np.linspace(-3, 3, 25).reshape(-1, 1)
        gap = log_rnd(shifted, pc, xs) - log_rnd(gm, pc, xs)
        assert np.allclose(gap, np.log(c), atol=1e-12)

    def test_example1_value(self, ex1):
        got = log_rnd(ex1.mixture, ex1.preconditioner, [0.5])
        assert got == pytest.approx(EX1_LOG_RND_AT_HALF, abs=1e-12)

    def test_dimension_error(self, ex1):
        pc2 = Preconditioner.standard(2)
        with pytest.raises(ValueError):
            log_rnd(ex1.mixture, pc2, [0.0, 0.0])


class TestMixtureJson:
    def test_roundtrip(self, tmp_path, ex1):
        from follmer import load_mixture, save_mixture
        path = tmp_path / "mix.json"
        save_mixture(ex1.mixture, path)
        loaded = load_mixture(path)
        assert loaded.dim == ex1.mixture.dim
        assert np.array_equal(loaded.weights, ex1.mixture.weights)
        for a, b in zip(loaded.components, ex1.mixture.components):
            assert np.array_equal(a.mean, b.mean)
            assert np.array_equal(a.covariance, b.covariance)


class TestTargetInterface:
    def test_finite_on_finite_input(self, ex1):
        rng = np.random.default_rng(2)
        xs = rng.uniform(-50, 50, size=(500, 1))
        u = ex1.mixture.neg_log_density_unnorm(xs)
        assert np.all(np.isfinite(u))

    def test_gradient_matches_finite_differences(self):
        spec = example_registry(7)
        gm = spec.mixture
        rng = np.random.default_rng(3)
        xs = rng.normal(0, 3, size=(20, 2))
        g = gm.grad_neg_log_density(xs)
        h = 1e-6
        for j in range(2):
            e = np.zeros(2)
            e[j] = h
            fd = (gm.neg_log_density_unnorm(xs + e)
                  - gm.neg_log_density_unnorm(xs - e)) / (2 * h)
            assert np.allclose(g[:, j], fd, atol=1e-5)
