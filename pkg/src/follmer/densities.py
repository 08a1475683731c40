"""Target densities: Gaussian mixtures, the Gaussian reference measure, and
the log density ratio between them.

Targets expose U(x) with p(x) ∝ exp(-U(x)); the normalizing constant is
never computed, so log_rnd is only defined up to one additive constant and
every consumer downstream must be (and is) invariant to that constant.
"""

import json
from abc import ABC, abstractmethod
from dataclasses import dataclass

import numpy as np
from scipy.linalg import cholesky, solve_triangular

from .batch import SampleBatch

_LOG_2PI = float(np.log(2.0 * np.pi))


def _logsumexp_last(lp: np.ndarray) -> np.ndarray:
    """Stable logsumexp along the last axis (scipy's is slow on big arrays)."""
    m = lp.max(axis=-1, keepdims=True)
    out = np.log(np.exp(lp - m).sum(axis=-1)) + m[..., 0]
    return out


def _as_points(x, dim: int):
    """Coerce x to an (n, dim) array, remembering whether it was a single point."""
    x = np.asarray(x, dtype=float)
    single = x.ndim == 1
    pts = np.atleast_2d(x)
    if pts.shape[-1] != dim:
        raise ValueError(f"expected points of dimension {dim}, got shape {x.shape}")
    return pts.reshape(-1, dim), single, pts.shape[:-1]


def _isotropic_scale(cov: np.ndarray) -> float | None:
    """Return s for cov = s^2 I, or None if cov is not isotropic."""
    d = cov.shape[0]
    s2 = cov[0, 0]
    if np.allclose(cov, s2 * np.eye(d), rtol=0.0, atol=1e-14 * max(1.0, s2)):
        return float(np.sqrt(s2))
    return None


class GaussianComponent:
    """One Gaussian N(mean, covariance) with a cached Cholesky factor.

    Construction fails on asymmetric (tolerance 1e-10 per entry) or
    non-positive-definite covariances.
    """

    def __init__(self, mean, covariance):
        mean = np.asarray(mean, dtype=float).reshape(-1)
        cov = np.asarray(covariance, dtype=float)
        d = mean.shape[0]
        if cov.shape != (d, d):
            raise ValueError(f"covariance shape {cov.shape} does not match dim {d}")
        if not np.all(np.abs(cov - cov.T) <= 1e-10):
            raise ValueError("covariance is not symmetric within 1e-10")
        try:
            chol = cholesky(cov, lower=True)
        except np.linalg.LinAlgError as exc:  # pragma: no cover - scipy raises LinAlgError
            raise ValueError("covariance is not positive definite") from exc
        self.mean = mean
        self.covariance = cov
        self.chol = chol
        self._log_norm = -0.5 * d * _LOG_2PI - float(np.sum(np.log(np.diag(chol))))
        self._iso_scale = _isotropic_scale(cov)
        for arr in (self.mean, self.covariance, self.chol):
            arr.setflags(write=False)

    @property
    def dim(self) -> int:
        return self.mean.shape[0]

    def log_density(self, x) -> np.ndarray:
        """log N(x; mean, covariance) for x of shape (..., d)."""
        pts, single, lead = _as_points(x, self.dim)
        diff = pts - self.mean
        if self._iso_scale is not None:
            quad = np.einsum("ij,ij->i", diff, diff) / self._iso_scale**2
        else:
            w = solve_triangular(self.chol, diff.T, lower=True)
            quad = np.einsum("ij,ij->j", w, w)
        out = self._log_norm - 0.5 * quad
        return float(out[0]) if single else out.reshape(lead)


class Target(ABC):
    """A (possibly unnormalized) target density p(x) ∝ exp(-U(x)).

    Implementations must evaluate U on batches of shape (..., d) and return
    shape (...,). mean() returns the exact E[X] when known, else None;
    grad_neg_log_density raises NotImplementedError when no gradient is
    available (callers fall back to finite differences).
    """

    @property
    @abstractmethod
    def dim(self) -> int: ...

    @abstractmethod
    def neg_log_density_unnorm(self, x) -> np.ndarray: ...

    def grad_neg_log_density(self, x) -> np.ndarray:
        raise NotImplementedError(f"{type(self).__name__} supplies no gradient")

    def mean(self):
        return None


class FunctionTarget(Target):
    """Wrap user callables as a Target. Callables must accept (..., d) batches."""

    def __init__(self, dim, neg_log_density, grad=None, mean=None):
        self._dim = int(dim)
        self._u = neg_log_density
        self._grad = grad
        self._mean = None if mean is None else np.asarray(mean, dtype=float)

    @property
    def dim(self) -> int:
        return self._dim

    def neg_log_density_unnorm(self, x):
        return self._u(np.asarray(x, dtype=float))

    def grad_neg_log_density(self, x):
        if self._grad is None:
            raise NotImplementedError("no gradient supplied")
        return self._grad(np.asarray(x, dtype=float))

    def mean(self):
        return self._mean


class GaussianMixture(Target):
    """Weighted Gaussian mixture: doubles as target density and ground-truth
    sampler for the evaluation metrics.

    Weights must sum to one (tolerance 1e-12) and all components must share
    one dimension.
    """

    def __init__(self, weights, components):
        weights = np.asarray(weights, dtype=float).reshape(-1)
        components = list(components)
        if len(weights) != len(components):
            raise ValueError("one weight per component required")
        if np.any(weights < 0.0) or np.any(weights > 1.0):
            raise ValueError("weights must lie in [0, 1]")
        if abs(float(weights.sum()) - 1.0) > 1e-12:
            raise ValueError("weights must sum to 1 within 1e-12")
        dims = {c.dim for c in components}
        if len(dims) != 1:
            raise ValueError(f"components disagree on dimension: {sorted(dims)}")
        self.weights = weights
        self.components = components
        self._dim = dims.pop()
        self._log_weights = np.log(weights)
        self.weights.setflags(write=False)
        # fast path when every component is isotropic (all registry examples but one)
        scales = [c._iso_scale for c in components]
        self._iso_scales = None if any(s is None for s in scales) else np.asarray(scales)
        self._means = np.stack([c.mean for c in components])

    @property
    def dim(self) -> int:
        return self._dim

    @property
    def n_components(self) -> int:
        return len(self.components)

    def component_log_densities(self, x) -> np.ndarray:
        """log θ_i + log N_i(x), shape (..., κ)."""
        pts, single, lead = _as_points(x, self.dim)
        if self._iso_scales is not None:
            # ||x - m||^2 = ||x||^2 - 2 x·m + ||m||^2, one GEMM for all components
            x2 = np.einsum("ij,ij->i", pts, pts)[:, None]
            m2 = np.einsum("ij,ij->i", self._means, self._means)[None, :]
            quad = (x2 - 2.0 * pts @ self._means.T + m2) / self._iso_scales[None, :] ** 2
            log_norm = np.array([c._log_norm for c in self.components])
            lp = log_norm[None, :] - 0.5 * quad
        else:
            lp = np.stack([c.log_density(pts) for c in self.components], axis=-1)
        lp = lp + self._log_weights
        return lp[0] if single else lp.reshape(*lead, -1)

    def log_density(self, x) -> np.ndarray:
        """log Σ_i θ_i N_i(x) via logsumexp (never by summing raw densities)."""
        lp = self.component_log_densities(x)
        return _logsumexp_last(lp)

    def neg_log_density_unnorm(self, x):
        return -self.log_density(x)

    def grad_neg_log_density(self, x):
        """∇U = Σ_i w_i(x) Σ_i^{-1} (x - μ_i) with softmax responsibilities."""
        pts, single, lead = _as_points(x, self.dim)
        lp = self.component_log_densities(pts)
        w = np.exp(lp - lp.max(axis=-1, keepdims=True))
        w /= w.sum(axis=-1, keepdims=True)
        grad = np.zeros_like(pts)
        for i, comp in enumerate(self.components):
            diff = pts - comp.mean
            if comp._iso_scale is not None:
                pulled = diff / comp._iso_scale**2
            else:
                half = solve_triangular(comp.chol, diff.T, lower=True)
                pulled = solve_triangular(comp.chol.T, half, lower=False).T
            grad += w[:, i : i + 1] * pulled
        return grad[0] if single else grad.reshape(*lead, self.dim)

    def mean(self) -> np.ndarray:
        return self.weights @ self._means

    def covariance(self) -> np.ndarray:
        """Σ_i θ_i (Σ_i + μ_i μ_iᵀ) - m mᵀ."""
        m = self.mean()
        second = sum(
            th * (c.covariance + np.outer(c.mean, c.mean))
            for th, c in zip(self.weights, self.components)
        )
        return second - np.outer(m, m)

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        """Draw n rows: categorical component pick, then μ_i + L_i z."""
        idx = rng.choice(self.n_components, size=n, p=self.weights)
        z = rng.standard_normal((n, self.dim))
        out = np.empty((n, self.dim))
        for i, comp in enumerate(self.components):
            rows = idx == i
            if np.any(rows):
                out[rows] = comp.mean + z[rows] @ comp.chol.T
        return out

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "weights": self.weights.tolist(),
            "means": [c.mean.tolist() for c in self.components],
            "covariances": [c.covariance.tolist() for c in self.components],
        }

    @classmethod
    def from_dict(cls, spec: dict) -> "GaussianMixture":
        dim = int(spec["dim"])
        comps = [
            GaussianComponent(m, c) for m, c in zip(spec["means"], spec["covariances"])
        ]
        gm = cls(spec["weights"], comps)
        if gm.dim != dim:
            raise ValueError(f"declared dim {dim} does not match means of dim {gm.dim}")
        return gm


def single_gaussian(mean, covariance) -> GaussianMixture:
    """One-component mixture, handy for Gaussian targets."""
    return GaussianMixture([1.0], [GaussianComponent(mean, covariance)])


@dataclass(frozen=True)
class Preconditioner:
    """Reference Gaussian measure N(mean, covariance) with covariance = A Aᵀ."""

    mean: np.ndarray
    covariance: np.ndarray
    chol: np.ndarray

    def __post_init__(self):
        comp = GaussianComponent(self.mean, self.covariance)
        object.__setattr__(self, "mean", comp.mean)
        object.__setattr__(self, "covariance", comp.covariance)
        object.__setattr__(self, "chol", comp.chol)
        object.__setattr__(self, "_comp", comp)

    @classmethod
    def from_moments(cls, mean, covariance) -> "Preconditioner":
        mean = np.asarray(mean, dtype=float)
        return cls(mean, np.asarray(covariance, dtype=float), None)

    @classmethod
    def standard(cls, dim: int) -> "Preconditioner":
        return cls.from_moments(np.zeros(dim), np.eye(dim))

    @classmethod
    def isotropic(cls, dim: int, sigma: float, mean=None) -> "Preconditioner":
        if sigma <= 0:
            raise ValueError("sigma must be positive")
        mean = np.zeros(dim) if mean is None else mean
        return cls.from_moments(mean, sigma**2 * np.eye(dim))

    @property
    def dim(self) -> int:
        return self.mean.shape[0]

    @property
    def iso_scale(self) -> float | None:
        return self._comp._iso_scale

    def log_density(self, x) -> np.ndarray:
        return self._comp.log_density(x)

    def sample(self, n: int, rng: np.random.Generator) -> np.ndarray:
        z = rng.standard_normal((n, self.dim))
        return self.mean + z @ self.chol.T

    def push(self, z: np.ndarray) -> np.ndarray:
        """μ + A z for z of shape (..., d)."""
        return self.mean + z @ self.chol.T


def gm_log_density(gm: GaussianMixture, x) -> np.ndarray:
    """Mixture log density at x (see GaussianMixture.log_density)."""
    return gm.log_density(x)


def gm_sample(gm: GaussianMixture, n: int, seed: int) -> SampleBatch:
    """Exact mixture draw, deterministic given seed."""
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    data = gm.sample(n, rng)
    return SampleBatch(data, seed=seed, meta={"sampler": "ground_truth"})


def log_rnd(target: Target, pc: Preconditioner, x) -> np.ndarray:
    """log of the density ratio target/reference at x, up to one additive
    constant fixed across all x (the target's unknown log-normalizer)."""
    if target.dim != pc.dim:
        raise ValueError(f"target dim {target.dim} != preconditioner dim {pc.dim}")
    return -target.neg_log_density_unnorm(x) - pc.log_density(x)


def load_mixture(path) -> GaussianMixture:
    """Read the mixture JSON file format
    {dim, weights: [...], means: [[...]], covariances: [[[...]]]}."""
    with open(path) as fh:
        return GaussianMixture.from_dict(json.load(fh))


def save_mixture(gm: GaussianMixture, path) -> None:
    with open(path, "w") as fh:
        json.dump(gm.to_dict(), fh, indent=2)
