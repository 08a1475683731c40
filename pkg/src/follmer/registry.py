"""Registry of the eleven benchmark Gaussian-mixture targets with their
reference-measure presets."""

from dataclasses import dataclass

import numpy as np

from .densities import GaussianComponent, GaussianMixture, Preconditioner

EXAMPLE_IDS = tuple(range(1, 12))

# examples without a preset use the standard reference N(0, I)
_PC_SIGMA = {4: 2.0, 5: 4.0, 7: 2.0, 8: 1.7, 9: 2.1}


@dataclass(frozen=True)
class ExampleSpec:
    id: int
    dim: int
    mixture: GaussianMixture
    preconditioner: Preconditioner
    notes: str = ""


def _iso_mixture(weights, means, var: float) -> GaussianMixture:
    means = np.atleast_2d(np.asarray(means, dtype=float))
    d = means.shape[1]
    comps = [GaussianComponent(m, var * np.eye(d)) for m in means]
    return GaussianMixture(weights, comps)


def _circle(n_modes: int, radius: float) -> np.ndarray:
    i = np.arange(n_modes)
    ang = 2.0 * (i) * np.pi / n_modes
    return radius * np.stack([np.sin(ang), np.cos(ang)], axis=1)


def _grid(side_coords) -> np.ndarray:
    pts = [(a, b) for a in side_coords for b in side_coords]
    return np.asarray(pts, dtype=float)


def _build_mixture(ex_id: int, dim: int | None):
    uniform_note = "unit weights normalized to uniform 1/kappa"
    if ex_id in (1, 2, 3):
        center = {1: 2.0, 2: 4.0, 3: 8.0}[ex_id]
        gm = _iso_mixture([0.25, 0.75], [[-center], [center]], 0.25)
        return gm, f"1D modes at -/+{center:g}, weights (1/4, 3/4)"
    if ex_id == 4:
        return _iso_mixture(np.full(8, 1 / 8), _circle(8, 4.0), 0.03), \
            "8-mode circle, radius 4; " + uniform_note
    if ex_id == 5:
        return _iso_mixture(np.full(16, 1 / 16), _circle(16, 8.0), 0.03), \
            "16-mode circle, radius 8; " + uniform_note
    if ex_id == 6:
        means = _grid([2 * i - 5 for i in range(1, 5)])
        return _iso_mixture(np.full(16, 1 / 16), means, 0.03), \
            "4x4 grid at {-3,-1,1,3}^2; " + uniform_note
    if ex_id == 7:
        means = _grid([2 * (2 * i - 5) for i in range(1, 5)])
        return _iso_mixture(np.full(16, 1 / 16), means, 0.03), \
            "4x4 grid at {-6,-2,2,6}^2; " + uniform_note
    if ex_id == 8:
        means = _grid([3 * (i - 3) for i in range(1, 6)])
        return _iso_mixture(np.full(25, 1 / 25), means, 0.03), \
            "5x5 grid, spacing 3; " + uniform_note
    if ex_id == 9:
        means = _grid([3 * (i - 4) for i in range(1, 8)])
        return _iso_mixture(np.full(49, 1 / 49), means, 0.03), \
            "7x7 grid, spacing 3; " + uniform_note
    if ex_id == 10:
        comps = []
        for i in (1, 2):
            for j in (1, 2):
                mean = np.array([6.0 * i - 6.0, 6.0 * j - 6.0])
                rho = ((-1.0) ** (i + j + 1)) * 0.9
                comps.append(GaussianComponent(mean, np.array([[1.0, rho],
                                                               [rho, 1.0]])))
        gm = GaussianMixture(np.full(4, 0.25), comps)
        return gm, ("anisotropic square, correlation (-1)^(i+j+1) 0.9; "
                    + uniform_note)
    if ex_id == 11:
        d = 2 if dim is None else int(dim)
        if d < 1:
            raise ValueError("example 11 needs dim >= 1")
        ones = np.ones(d)
        gm = _iso_mixture([0.2, 0.8], [-ones, ones], 0.25)
        return gm, f"two modes at -/+1 vector in dimension {d}, weights (1/5, 4/5)"
    raise ValueError(f"unknown example id {ex_id}; valid ids are 1..11")


def example_registry(ex_id: int, dim: int | None = None) -> ExampleSpec:
    """Return benchmark example ex_id (1..11); example 11 takes a dimension
    (default 2). The preconditioner is the preset sigma^2 I with mean 0."""
    if ex_id not in EXAMPLE_IDS:
        raise ValueError(f"unknown example id {ex_id}; valid ids are 1..11")
    if dim is not None and ex_id != 11:
        raise ValueError("only example 11 is parameterized by dimension")
    gm, notes = _build_mixture(ex_id, dim)
    sigma = _PC_SIGMA.get(ex_id, 1.0)
    pc = Preconditioner.isotropic(gm.dim, sigma)
    return ExampleSpec(id=ex_id, dim=gm.dim, mixture=gm, preconditioner=pc,
                       notes=notes)
