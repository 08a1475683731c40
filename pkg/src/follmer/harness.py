"""Experiment runner: resolves a target, draws samples with the configured
sampler, scores them against ground truth, and emits samples.csv /
report.json / trajectories.csv plus aggregated sweep CSVs."""

import csv
import dataclasses
import json
import time
from dataclasses import dataclass, field, replace
from pathlib import Path

import numpy as np

from .batch import SampleBatch
from .densities import GaussianMixture, Preconditioner, gm_sample, load_mixture
from .flow import FlowConfig, follmer_sample, follmer_trajectories
from .mcmc import McmcConfig, hybrid_sample, run_chains
from .metrics import (adjusted_metrics, mixture_moment_truth, mode_coverage,
                      moment_estimates)
from .registry import example_registry

FLOW_SAMPLERS = ("follmer_closed", "follmer_mc")
MCMC_SAMPLERS = ("mh", "tula", "tmala")
HYBRID_SAMPLERS = ("hybrid_mh", "hybrid_tula", "hybrid_tmala")
SAMPLERS = FLOW_SAMPLERS + MCMC_SAMPLERS + HYBRID_SAMPLERS

SWEEP_AXES = ("K", "M", "sigma", "d")


@dataclass(frozen=True)
class RunConfig:
    """One experiment: target selection, sampler, size, seed, output dir.

    cfg.seed is the master seed; the flow/mcmc/truth/subsample seeds are all
    derived from it, so a run is reproducible from this config alone.
    """

    out_dir: str
    sampler: str = "follmer_closed"
    example: int | None = 1
    mixture_path: str | None = None
    dim: int | None = None
    n: int = 10_000
    seed: int = 0
    flow: FlowConfig = field(default_factory=FlowConfig)
    mcmc: McmcConfig = field(default_factory=McmcConfig)
    precond_sigma: float | None = None
    traj: int = 0

    def __post_init__(self):
        if self.sampler not in SAMPLERS:
            raise ValueError(f"unknown sampler {self.sampler!r}; choose from {SAMPLERS}")
        if self.example is None and self.mixture_path is None:
            raise ValueError("either an example id or a mixture file is required")
        if self.n < 1:
            raise ValueError("n must be >= 1")
        if self.traj < 0:
            raise ValueError("traj must be >= 0")


def resolve_target(cfg: RunConfig) -> tuple[GaussianMixture, Preconditioner, str]:
    """Target mixture, preconditioner (with sigma override applied), label."""
    if cfg.mixture_path is not None:
        gm = load_mixture(cfg.mixture_path)
        pc = Preconditioner.standard(gm.dim)
        label = f"mixture:{cfg.mixture_path}"
    else:
        spec = example_registry(cfg.example, cfg.dim)
        gm, pc = spec.mixture, spec.preconditioner
        label = f"example:{spec.id}"
    if cfg.precond_sigma is not None:
        pc = Preconditioner.isotropic(gm.dim, cfg.precond_sigma)
    return gm, pc, label


def _derived_seeds(seed: int) -> dict:
    keys = np.random.SeedSequence(seed).generate_state(5)
    names = ("flow", "mcmc", "truth_a", "truth_b", "subsample")
    return {name: int(k) for name, k in zip(names, keys)}


def _draw_samples(cfg: RunConfig, gm, pc, seeds) -> SampleBatch:
    flow_cfg = replace(cfg.flow, seed=seeds["flow"])
    mcmc_cfg = replace(cfg.mcmc, seed=seeds["mcmc"])
    if cfg.sampler == "follmer_closed":
        return follmer_sample(replace(flow_cfg, M=0), gm, pc, cfg.n)
    if cfg.sampler == "follmer_mc":
        if flow_cfg.M < 1:
            raise ValueError("sampler follmer_mc requires flow.M >= 1")
        return follmer_sample(flow_cfg, gm, pc, cfg.n)
    if cfg.sampler in MCMC_SAMPLERS:
        mcmc_cfg = replace(mcmc_cfg, variant=cfg.sampler)
        per_chain = -(-cfg.n // mcmc_cfg.chains)
        batch = run_chains(mcmc_cfg, gm, n_per_chain=per_chain)
        return SampleBatch(batch.data[: cfg.n], seed=batch.seed, meta=batch.meta)
    variant = cfg.sampler.removeprefix("hybrid_")
    return hybrid_sample(flow_cfg, replace(mcmc_cfg, variant=variant), gm, pc, cfg.n)


def _write_samples_csv(path: Path, data: np.ndarray) -> None:
    header = ",".join(f"x{j + 1}" for j in range(data.shape[1]))
    np.savetxt(path, data, delimiter=",", header=header, comments="")


def _write_trajectories_csv(path: Path, nodes: np.ndarray, traj: np.ndarray) -> None:
    # traj has shape (K+1, particles, d)
    d = traj.shape[2]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["particle_id", "t"] + [f"x{j + 1}" for j in range(d)])
        for p in range(traj.shape[1]):
            for k, t in enumerate(nodes):
                writer.writerow([p, repr(float(t))] + [repr(float(v)) for v in traj[k, p]])


def run_experiment(cfg: RunConfig) -> dict:
    """Run one experiment and write samples.csv + report.json (and
    trajectories.csv for flow runs with cfg.traj > 0). Returns the report."""
    out = Path(cfg.out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise OSError(f"cannot create output directory {out}: {exc}") from exc
    gm, pc, label = resolve_target(cfg)
    seeds = _derived_seeds(cfg.seed)
    t0 = time.perf_counter()
    try:
        samples = _draw_samples(cfg, gm, pc, seeds)
    except Exception as exc:
        raise type(exc)(f"sampler {cfg.sampler!r} failed: {exc}") from exc
    truth_a = gm_sample(gm, cfg.n, seeds["truth_a"])
    truth_b = gm_sample(gm, cfg.n, seeds["truth_b"])
    report_metrics = adjusted_metrics(samples, truth_a, truth_b,
                                      subsample_seed=seeds["subsample"])
    coverage = mode_coverage(samples, gm)
    alpha = np.ones(gm.dim) / np.sqrt(gm.dim)
    moments = moment_estimates(samples, alpha)
    proj = samples.data @ alpha
    moment_se = np.array([
        proj.std(ddof=1),
        (proj**2).std(ddof=1),
        np.exp(proj).std(ddof=1),
        (5.0 * np.cos(proj)).std(ddof=1),
    ]) / np.sqrt(samples.n)
    wall = time.perf_counter() - t0

    files = {"samples": str(out / "samples.csv"), "report": str(out / "report.json")}
    _write_samples_csv(out / "samples.csv", samples.data)
    if cfg.traj > 0 and cfg.sampler in FLOW_SAMPLERS:
        flow_cfg = replace(cfg.flow, seed=seeds["flow"],
                           M=0 if cfg.sampler == "follmer_closed" else cfg.flow.M)
        count = min(cfg.traj, cfg.n)
        traj = follmer_trajectories(flow_cfg, gm, pc, count)
        _write_trajectories_csv(out / "trajectories.csv", flow_cfg.time_grid().nodes, traj)
        files["trajectories"] = str(out / "trajectories.csv")

    report = {
        "config": _config_echo(cfg),
        "target": {"label": label, "dim": gm.dim,
                   "components": gm.n_components,
                   "precond_sigma": float(np.sqrt(pc.covariance[0, 0]))},
        "seeds": {"root": cfg.seed, **seeds},
        "metrics": report_metrics.to_dict(),
        "mode_coverage": coverage.to_dict(),
        "moments": {
            "alpha": alpha.tolist(),
            "estimates": moments.tolist(),
            "standard_errors": moment_se.tolist(),
            "truth": mixture_moment_truth(gm, alpha).tolist(),
        },
        "wall_time_s": wall,
        "files": files,
    }
    with open(out / "report.json", "w") as fh:
        json.dump(report, fh, indent=2, sort_keys=True)
    return report


def _config_echo(cfg: RunConfig) -> dict:
    echo = dataclasses.asdict(cfg)
    echo["flow"] = dataclasses.asdict(cfg.flow)
    echo["mcmc"] = dataclasses.asdict(cfg.mcmc)
    return echo


def _sweep_cell(base: RunConfig, axis: str, value, cell_dir: Path) -> RunConfig:
    cfg = replace(base, out_dir=str(cell_dir))
    if axis == "K":
        return replace(cfg, flow=replace(cfg.flow, K=int(value)))
    if axis == "M":
        return replace(cfg, flow=replace(cfg.flow, M=int(value)),
                       sampler="follmer_mc")
    if axis == "sigma":
        return replace(cfg, precond_sigma=float(value))
    # axis == "d": the two-mode diagonal example in dimension value; the MC
    # sampler scales its draws with dimension and uses the warped grid
    d = int(value)
    cfg = replace(cfg, example=11, mixture_path=None, dim=d)
    if cfg.sampler == "follmer_mc":
        cfg = replace(cfg, flow=replace(cfg.flow, M=200 * d, grid="exp"))
    return cfg


_SWEEP_COLUMNS = (
    "axis", "value", "sampler", "n", "seed", "raw_w2", "adj_w2", "raw_mmd",
    "adj_mmd", "n_covered", "n_modes", "moment_1", "moment_2", "moment_mgf",
    "moment_cos", "se_1", "se_2", "se_mgf", "se_cos", "truth_1", "truth_2",
    "truth_mgf", "truth_cos", "wall_time_s",
)


def sweep(base: RunConfig, axis: str, values, out_dir: str | None = None) -> list[dict]:
    """Run one experiment per axis value and aggregate a CSV row per value.

    A failing cell aborts the sweep after writing the partial results with
    sweep_report.json flagged incomplete.
    """
    if axis not in SWEEP_AXES:
        raise ValueError(f"axis must be one of {SWEEP_AXES}")
    values = list(values)
    if not values:
        raise ValueError("sweep needs at least one axis value")
    out = Path(out_dir if out_dir is not None else base.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rows: list[dict] = []
    status = {"status": "complete", "axis": axis, "values": values}
    try:
        for value in values:
            cfg = _sweep_cell(base, axis, value, out / f"{axis}_{value}")
            report = run_experiment(cfg)
            m = report["metrics"]
            mom = report["moments"]
            rows.append({
                "axis": axis, "value": value, "sampler": cfg.sampler,
                "n": cfg.n, "seed": cfg.seed,
                "raw_w2": m["raw_w2"], "adj_w2": m["adj_w2"],
                "raw_mmd": m["raw_mmd"], "adj_mmd": m["adj_mmd"],
                "n_covered": report["mode_coverage"]["n_covered"],
                "n_modes": report["mode_coverage"]["n_modes"],
                "moment_1": mom["estimates"][0], "moment_2": mom["estimates"][1],
                "moment_mgf": mom["estimates"][2], "moment_cos": mom["estimates"][3],
                "se_1": mom["standard_errors"][0], "se_2": mom["standard_errors"][1],
                "se_mgf": mom["standard_errors"][2], "se_cos": mom["standard_errors"][3],
                "truth_1": mom["truth"][0], "truth_2": mom["truth"][1],
                "truth_mgf": mom["truth"][2], "truth_cos": mom["truth"][3],
                "wall_time_s": report["wall_time_s"],
            })
    except Exception as exc:
        status.update(status="incomplete", failed_value=value, error=str(exc))
        _write_sweep_files(out, rows, status)
        raise
    _write_sweep_files(out, rows, status)
    return rows


def _write_sweep_files(out: Path, rows: list[dict], status: dict) -> None:
    with open(out / "sweep.csv", "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=_SWEEP_COLUMNS)
        writer.writeheader()
        writer.writerows(rows)
    status["rows"] = len(rows)
    status["csv"] = str(out / "sweep.csv")
    with open(out / "sweep_report.json", "w") as fh:
        json.dump(status, fh, indent=2, sort_keys=True)
