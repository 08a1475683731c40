import itertools

import numpy as np
import pytest

from follmer import (DegenerateInput, SampleBatch, adjusted_metrics, gm_sample,
                     mixture_moment_truth, mmd, mode_coverage, moment_estimates,
                     single_gaussian, wasserstein2_1d, wasserstein2_nd)
from follmer.registry import example_registry


def brute_force_w2(xs, ys):
    """Exhaustive assignment minimum; the independent oracle."""
    n = len(xs)
    best = np.inf
    for perm in itertools.permutations(range(n)):
        cost = np.mean([np.sum((xs[i] - ys[j]) ** 2) for i, j in enumerate(perm)])
        best = min(best, cost)
    return np.sqrt(best)


class TestW21d:
    def test_identical(self):
        x = np.array([0.3, -1.0, 2.0])
        assert wasserstein2_1d(x, x) == 0.0

    def test_single_point_transport(self):
        assert wasserstein2_1d([0.0], [1.0]) == pytest.approx(1.0)

    def test_two_point_matches_brute_force(self):
        xs, ys = np.array([0.0, 2.0]), np.array([1.0, 3.0])
        assert wasserstein2_1d(xs, ys) == pytest.approx(1.0)
        # the other pairing costs sqrt((9+1)/2)
        assert wasserstein2_1d(xs, ys) == pytest.approx(
            brute_force_w2(xs.reshape(-1, 1), ys.reshape(-1, 1)))

    def test_symmetry(self):
        rng = np.random.default_rng(0)
        x, y = rng.normal(size=40), rng.normal(size=40)
        assert wasserstein2_1d(x, y) == pytest.approx(wasserstein2_1d(y, x), abs=1e-12)

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            wasserstein2_1d([0.0, 1.0], [0.0])


class TestW2Nd:
    def test_identical(self):
        rng = np.random.default_rng(1)
        x = rng.normal(size=(30, 3))
        assert wasserstein2_nd(x, x) == 0.0

    def test_1d_specialization_matches_sorting(self):
        rng = np.random.default_rng(2)
        x, y = rng.normal(size=(64, 1)), rng.normal(size=(64, 1))
        assert wasserstein2_nd(x, y) == pytest.approx(
            wasserstein2_1d(x.ravel(), y.ravel()), abs=1e-10)

    def test_matches_brute_force_n4(self):
        rng = np.random.default_rng(3)
        x, y = rng.normal(size=(4, 2)), rng.normal(size=(4, 2))
        assert wasserstein2_nd(x, y) == pytest.approx(brute_force_w2(x, y), abs=1e-12)

    def test_matches_brute_force_many_instances(self):
        rng = np.random.default_rng(4)
        for _ in range(50):
            n = rng.integers(2, 7)
            d = rng.integers(1, 4)
            x, y = rng.normal(size=(n, d)), rng.normal(size=(n, d))
            assert wasserstein2_nd(x, y) == pytest.approx(
                brute_force_w2(x, y), abs=1e-12)

    def test_triangle_sanity(self):
        rng = np.random.default_rng(5)
        for _ in range(50):
            x, y, z = (rng.normal(size=(12, 2)) for _ in range(3))
            assert wasserstein2_nd(x, z) <= (
                wasserstein2_nd(x, y) + wasserstein2_nd(y, z) + 1e-12)

    def test_subsampling_is_seeded(self):
        rng = np.random.default_rng(6)
        x, y = rng.normal(size=(2000, 2)), rng.normal(size=(2000, 2))
        a = wasserstein2_nd(x, y, cap=200, seed=9)
        b = wasserstein2_nd(x, y, cap=200, seed=9)
        assert a == b

    def test_shape_mismatch(self):
        with pytest.raises(ValueError):
            wasserstein2_nd(np.zeros((3, 2)), np.zeros((3, 3)))


def kernel_sum_oracle(xs, ys):
    """Direct double-loop V-statistic with the pooled median bandwidth."""
    pooled = np.vstack([xs, ys])
    dists = [np.linalg.norm(a - b) for i, a in enumerate(pooled)
             for j, b in enumerate(pooled) if i < j]
    sigma = np.median(dists)

    def k(a, b):
        return np.exp(-np.sum((a - b) ** 2) / (2 * sigma**2))

    kxx = np.mean([k(a, b) for a in xs for b in xs])
    kyy = np.mean([k(a, b) for a in ys for b in ys])
    kxy = np.mean([k(a, b) for a in xs for b in ys])
    return kxx + kyy - 2 * kxy


class TestMmd:
    def test_identical_sets_vanish(self):
        rng = np.random.default_rng(7)
        x = rng.normal(size=(50, 2))
        assert mmd(x, x) == 0.0

    def test_translation_invariance(self):
        rng = np.random.default_rng(8)
        x, y = rng.normal(size=(40, 2)), rng.normal(size=(40, 2))
        shift = np.array([3.0, -2.0])
        assert mmd(x + shift, y + shift) == pytest.approx(mmd(x, y), abs=1e-12)

    def test_small_case_matches_kernel_sum(self):
        xs = np.array([[0.0], [1.0], [2.5]])
        ys = np.array([[0.5], [2.0]])
        assert mmd(xs, ys) == pytest.approx(kernel_sum_oracle(xs, ys), abs=1e-12)

    def test_twenty_random_instances_match_oracle(self):
        rng = np.random.default_rng(9)
        for _ in range(20):
            n, m = rng.integers(2, 8), rng.integers(2, 8)
            d = rng.integers(1, 4)
            xs, ys = rng.normal(size=(n, d)), rng.normal(size=(m, d))
            assert mmd(xs, ys) == pytest.approx(kernel_sum_oracle(xs, ys),
                                                abs=1e-10)

    def test_symmetry(self):
        rng = np.random.default_rng(10)
        x, y = rng.normal(size=(30, 2)), rng.normal(size=(25, 2))
        assert mmd(x, y) == pytest.approx(mmd(y, x), abs=1e-12)

    def test_degenerate_input(self):
        x = np.zeros((5, 2))
        with pytest.raises(DegenerateInput):
            mmd(x, x)


class TestAdjustedMetrics:
    def test_samples_equal_truth_b_gives_exact_zero(self):
        gm = example_registry(1).mixture
        a = gm_sample(gm, 400, seed=1)
        b = gm_sample(gm, 400, seed=2)
        rep = adjusted_metrics(b, a, b)
        assert rep.adj_w2 == 0.0
        assert rep.adj_mmd == 0.0

    def test_report_identity_bit_exact(self):
        gm = example_registry(4).mixture
        s = gm_sample(gm, 600, seed=3)
        a = gm_sample(gm, 600, seed=4)
        b = gm_sample(gm, 600, seed=5)
        rep = adjusted_metrics(s, a, b, subsample_seed=6)
        assert rep.adj_w2 == rep.raw_w2 - rep.baseline_w2
        assert rep.adj_mmd == rep.raw_mmd - rep.baseline_mmd
        assert rep.n_used == 600

    def test_null_distribution_centers_on_zero(self):
        gm = example_registry(1).mixture
        vals = []
        for seed in range(20):
            s = gm_sample(gm, 1500, seed=100 + seed)
            a = gm_sample(gm, 1500, seed=200 + seed)
            b = gm_sample(gm, 1500, seed=300 + seed)
            vals.append(adjusted_metrics(s, a, b).adj_w2)
        vals = np.array(vals)
        assert abs(vals.mean()) < 2 * vals.std(ddof=1)

    def test_size_mismatch(self):
        gm = example_registry(1).mixture
        with pytest.raises(ValueError):
            adjusted_metrics(gm_sample(gm, 10, 0), gm_sample(gm, 10, 1),
                             gm_sample(gm, 11, 2))


class TestMomentEstimates:
    def test_point_mass_at_origin(self):
        batch = SampleBatch(np.zeros((10, 3)), seed=0)
        est = moment_estimates(batch, np.array([1.0, 0.0, 0.0]))
        assert np.allclose(est, [0.0, 0.0, 1.0, 5.0])

    def test_single_gaussian_closed_forms(self):
        mean = np.array([0.4, -0.3])
        cov = np.array([[0.8, 0.2], [0.2, 0.5]])
        gm = single_gaussian(mean, cov)
        alpha = np.array([0.6, 0.8])
        batch = gm_sample(gm, 100_000, seed=21)
        est = moment_estimates(batch, alpha)
        a, v = alpha @ mean, alpha @ cov @ alpha
        want = np.array([a, v + a**2, np.exp(a + v / 2),
                         5 * np.cos(a) * np.exp(-v / 2)])
        assert np.allclose(mixture_moment_truth(gm, alpha), want, rtol=1e-12)
        proj = batch.data @ alpha
        se = np.array([proj.std(), (proj**2).std(), np.exp(proj).std(),
                       (5 * np.cos(proj)).std()]) / np.sqrt(batch.n)
        assert np.all(np.abs(est - want) < 4 * se)

    def test_example11_projection_mean(self):
        d = 3
        spec = example_registry(11, d)
        alpha = np.ones(d) / np.sqrt(d)
        truth = mixture_moment_truth(spec.mixture, alpha)
        assert truth[0] == pytest.approx(0.6 * np.sqrt(d), rel=1e-12)

    def test_non_unit_alpha_rejected(self):
        batch = SampleBatch(np.zeros((5, 2)), seed=0)
        with pytest.raises(ValueError):
            moment_estimates(batch, np.array([1.0, 1.0]))


class TestModeCoverage:
    def test_means_cover_everything(self):
        gm = example_registry(4).mixture
        means = np.stack([c.mean for c in gm.components])
        data = np.repeat(means, 10, axis=0)
        cov = mode_coverage(SampleBatch(data, seed=0), gm)
        assert cov.n_covered == gm.n_components

    def test_collapsed_sample_covers_one(self):
        gm = example_registry(4).mixture
        data = np.tile(gm.components[0].mean, (50, 1))
        cov = mode_coverage(SampleBatch(data, seed=0), gm)
        assert cov.n_covered == 1
        assert cov.counts[0] == 50

    def test_ground_truth_covers_all_eight(self):
        gm = example_registry(4).mixture
        batch = gm_sample(gm, 10_000, seed=31)
        assert mode_coverage(batch, gm).n_covered == 8

    def test_radius_mult_validated(self):
        gm = example_registry(4).mixture
        with pytest.raises(ValueError):
            mode_coverage(gm_sample(gm, 10, 0), gm, radius_mult=0.0)
