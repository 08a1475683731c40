"""Baseline MCMC samplers (random-walk MH, tamed ULA, tamed MALA) and the
flow-warm-started hybrid.

Chains run in lockstep as vectorized batches; every chain owns two RNG
streams (proposal normals, acceptance uniforms) spawned from (seed, chain
index), so output is deterministic and independent of scheduling.
"""

import math
from dataclasses import dataclass

import numpy as np

from .batch import SampleBatch
from .densities import Preconditioner, Target
from .errors import NumericalFailure
from .flow import FlowConfig, follmer_sample

_VARIANTS = ("mh", "tula", "tmala")
_FD_STEP = 1e-5


@dataclass(frozen=True)
class McmcConfig:
    variant: str = "mh"
    step: float = 0.2
    burn_in: int = 10_000
    chains: int = 50
    seed: int = 0

    def __post_init__(self):
        if self.variant not in _VARIANTS:
            raise ValueError(f"variant must be one of {_VARIANTS}")
        if self.step <= 0.0:
            raise ValueError("step must be positive")
        if self.chains < 1:
            raise ValueError("chains must be >= 1")
        if self.burn_in < 0:
            raise ValueError("burn_in must be >= 0")


@dataclass
class ChainState:
    """Current position with its cached -U value and the chain's stream."""

    position: np.ndarray
    log_density_unnorm: float
    rng: np.random.Generator | None = None


def make_chain_state(target: Target, position, rng=None) -> ChainState:
    position = np.asarray(position, dtype=float)
    logp = -float(target.neg_log_density_unnorm(position))
    return ChainState(position, logp, rng)


def grad_neg_log_density(target: Target, x: np.ndarray) -> np.ndarray:
    """∇U on a batch, falling back to central differences (step 1e-5)."""
    x = np.atleast_2d(np.asarray(x, dtype=float))
    try:
        g = np.atleast_2d(np.asarray(target.grad_neg_log_density(x)))
    except NotImplementedError:
        g = np.empty_like(x)
        for j in range(x.shape[1]):
            offset = np.zeros(x.shape[1])
            offset[j] = _FD_STEP
            g[:, j] = (
                target.neg_log_density_unnorm(x + offset)
                - target.neg_log_density_unnorm(x - offset)
            ) / (2.0 * _FD_STEP)
    if not np.all(np.isfinite(g)):
        raise NumericalFailure("non-finite gradient of the target potential")
    return g


def tamed_drift(target: Target, x: np.ndarray, step: float) -> np.ndarray:
    """b_t = b / (1 + step ||b||) with b = -∇U; ||step b_t|| < 1 always."""
    b = -grad_neg_log_density(target, x)
    norm = np.linalg.norm(b, axis=-1, keepdims=True)
    return b / (1.0 + step * norm)


def _step_batch(variant: str, target: Target, x: np.ndarray, logp: np.ndarray,
                z: np.ndarray, u, step: float):
    """Advance a (chains, d) batch one transition; returns (x, logp)."""
    if variant == "tula":
        bt = tamed_drift(target, x, step)
        y = x + step * bt + math.sqrt(2.0 * step) * z
        return y, -np.asarray(target.neg_log_density_unnorm(y), dtype=float)
    if variant == "mh":
        y = x + step * z
        logp_y = -np.asarray(target.neg_log_density_unnorm(y), dtype=float)
        log_ratio = logp_y - logp
    else:  # tmala: tamed proposal with Metropolis correction
        mean_x = x + step * tamed_drift(target, x, step)
        y = mean_x + math.sqrt(2.0 * step) * z
        logp_y = -np.asarray(target.neg_log_density_unnorm(y), dtype=float)
        mean_y = y + step * tamed_drift(target, y, step)
        # N(.; mean, 2*step I) forward/reverse; the shared constant cancels
        log_q_xy = -np.sum((y - mean_x) ** 2, axis=-1) / (4.0 * step)
        log_q_yx = -np.sum((x - mean_y) ** 2, axis=-1) / (4.0 * step)
        log_ratio = (logp_y - logp) + (log_q_yx - log_q_xy)
    with np.errstate(divide="ignore"):
        accept = np.log(u) < log_ratio
    x_new = np.where(accept[..., None], y, x)
    logp_new = np.where(accept, logp_y, logp)
    return x_new, logp_new


def _single_step(variant: str, state: ChainState, target: Target, step: float,
                 rng) -> ChainState:
    z = np.asarray(rng.standard_normal(target.dim))
    u = float(rng.random()) if variant != "tula" else 1.0
    x, logp = _step_batch(
        variant, target, state.position[None, :],
        np.array([state.log_density_unnorm]), z[None, :], np.array([u]), step,
    )
    return ChainState(x[0], float(logp[0]), state.rng)


def mh_step(state: ChainState, target: Target, step: float, rng) -> ChainState:
    """Random-walk proposal y = x + step z, accepted w.p. min(1, e^{U(x)-U(y)})."""
    return _single_step("mh", state, target, step, rng)


def tula_step(state: ChainState, target: Target, step: float, rng) -> ChainState:
    """Tamed unadjusted Langevin update x + step b_t(x) + sqrt(2 step) z."""
    return _single_step("tula", state, target, step, rng)


def tmala_step(state: ChainState, target: Target, step: float, rng) -> ChainState:
    """Tamed Langevin proposal with the Metropolis-Hastings correction."""
    return _single_step("tmala", state, target, step, rng)


def tmala_acceptance_probability(target: Target, x, y, step: float) -> float:
    """min(1, [pi(y) q(y->x)] / [pi(x) q(x->y)]) for the tamed proposal."""
    x = np.asarray(x, dtype=float)[None, :]
    y = np.asarray(y, dtype=float)[None, :]
    logp_x = -float(target.neg_log_density_unnorm(x)[0])
    logp_y = -float(target.neg_log_density_unnorm(y)[0])
    mean_x = x + step * tamed_drift(target, x, step)
    mean_y = y + step * tamed_drift(target, y, step)
    log_q_xy = -float(np.sum((y - mean_x) ** 2)) / (4.0 * step)
    log_q_yx = -float(np.sum((x - mean_y) ** 2)) / (4.0 * step)
    return float(min(1.0, np.exp(logp_y - logp_x + log_q_yx - log_q_xy)))


def _chain_randomness(seed: int, chains: int, transitions: int, dim: int):
    """Pre-draw normals (transitions+1, chains, d) and uniforms per chain.

    Normals and uniforms come from separate child streams of each chain's
    SeedSequence, so extending a run keeps its prefix unchanged.
    """
    z = np.empty((transitions + 1, chains, dim))
    u = np.empty((transitions, chains))
    for i, child in enumerate(np.random.SeedSequence(seed).spawn(chains)):
        z_seq, u_seq = child.spawn(2)
        z[:, i, :] = np.random.default_rng(z_seq).standard_normal(
            (transitions + 1, dim))
        u[:, i] = np.random.default_rng(u_seq).random(transitions)
    return z, u


def _run(cfg: McmcConfig, target: Target, x0, n_records: int,
         include_start: bool) -> np.ndarray:
    """Lockstep chains; returns recorded states (n_records, chains, d).

    include_start=False records the states after transitions burn_in+1 ..
    burn_in+n_records; include_start=True records the state right after
    burn-in and then n_records-1 subsequent states (used by the hybrid,
    whose warm inits are themselves samples).
    """
    d = target.dim
    transitions = cfg.burn_in + n_records - (1 if include_start else 0)
    z, u = _chain_randomness(cfg.seed, cfg.chains, transitions, d)
    x = z[0].copy() if x0 is None else np.array(x0, dtype=float)  # default N(0, I)
    logp = -np.asarray(target.neg_log_density_unnorm(x), dtype=float)
    out = np.empty((n_records, cfg.chains, d))
    rec = 0
    if include_start and cfg.burn_in == 0:
        out[rec] = x
        rec += 1
    first_kept = cfg.burn_in if include_start else cfg.burn_in + 1
    for k in range(transitions):
        x, logp = _step_batch(cfg.variant, target, x, logp, z[k + 1], u[k], cfg.step)
        if k + 1 >= first_kept:
            out[rec] = x
            rec += 1
    return out


def run_chains(cfg: McmcConfig, target: Target, init: SampleBatch | None = None,
               n_per_chain: int = 1) -> SampleBatch:
    """Run cfg.chains independent chains, discard burn-in, keep n_per_chain
    states per chain, and interleave them round-robin.

    Default initialization draws each chain start from N(0, I_d). The output
    has chains * n_per_chain rows and is deterministic given cfg.seed.
    """
    if n_per_chain < 1:
        raise ValueError("n_per_chain must be >= 1")
    if init is not None and init.n != cfg.chains:
        raise ValueError(
            f"init has {init.n} rows but cfg.chains = {cfg.chains}")
    x0 = None if init is None else init.data
    states = _run(cfg, target, x0, n_per_chain, include_start=False)
    data = states.reshape(n_per_chain * cfg.chains, target.dim)
    meta = {"sampler": cfg.variant, "chains": str(cfg.chains),
            "burn_in": str(cfg.burn_in), "step": repr(cfg.step)}
    return SampleBatch(data, seed=cfg.seed, meta=meta)


def hybrid_sample(flow_cfg: FlowConfig, mcmc_cfg: McmcConfig, target: Target,
                  pc: Preconditioner, n: int) -> SampleBatch:
    """Warm-start MCMC from a coarse Monte Carlo flow run.

    One flow particle per chain seeds the chains; after burn-in the retained
    states (starting with the post-burn-in state itself) are interleaved
    round-robin and truncated to n samples.
    """
    if flow_cfg.M < 1:
        raise ValueError("the hybrid warm start always uses the Monte Carlo "
                         "velocity; flow_cfg.M must be >= 1")
    if n < 1:
        raise ValueError("n must be >= 1")
    inits = follmer_sample(flow_cfg, target, pc, mcmc_cfg.chains)
    n_records = -(-n // mcmc_cfg.chains)  # ceil
    states = _run(mcmc_cfg, target, inits.data, n_records, include_start=True)
    data = states.reshape(n_records * mcmc_cfg.chains, target.dim)[:n]
    meta = {"sampler": f"hybrid_{mcmc_cfg.variant}",
            "flow_seed": str(flow_cfg.seed), "mcmc_seed": str(mcmc_cfg.seed),
            "K": str(flow_cfg.K), "M": str(flow_cfg.M)}
    return SampleBatch(data, seed=mcmc_cfg.seed, meta=meta)
