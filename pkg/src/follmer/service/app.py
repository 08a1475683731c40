"""FastAPI service wrapping the experiment harness.

Runs execute synchronously inside the request and write their artifacts
(samples.csv, report.json, ...) under the requested output directory on the
service host; responses carry the report and the file paths.
"""

import json
from pathlib import Path

import numpy as np
from fastapi import FastAPI, HTTPException

from .. import __version__
from ..errors import NumericalFailure
from ..flow import FlowConfig
from ..harness import RunConfig, run_experiment, sweep
from ..mcmc import McmcConfig
from ..registry import EXAMPLE_IDS, example_registry
from .models import (ExampleInfo, RunSummary, SampleRequest, SweepRequest,
                     SweepSummary)


def _example_info(ex_id: int, dim: int | None = None) -> ExampleInfo:
    spec = example_registry(ex_id, dim)
    return ExampleInfo(
        id=spec.id, dim=spec.dim, components=spec.mixture.n_components,
        weights=spec.mixture.weights.tolist(),
        precond_sigma=float(np.sqrt(spec.preconditioner.covariance[0, 0])),
        notes=spec.notes,
    )


def _to_run_config(req: SampleRequest) -> RunConfig:
    req.check_sampler()
    mixture_path = None
    if req.mixture is not None:
        # persist the inline mixture next to the run artifacts
        out = Path(req.out_dir)
        out.mkdir(parents=True, exist_ok=True)
        mixture_path = str(out / "mixture.json")
        with open(mixture_path, "w") as fh:
            json.dump(req.mixture.model_dump(), fh, indent=2)
    elif req.example is None:
        raise ValueError("either an example id or an inline mixture is required")
    return RunConfig(
        out_dir=req.out_dir,
        sampler=req.sampler,
        example=req.example if mixture_path is None else None,
        mixture_path=mixture_path,
        dim=req.dim,
        n=req.n,
        seed=req.seed,
        flow=FlowConfig(K=req.k, epsilon=req.eps, M=req.m, grid=req.grid),
        mcmc=McmcConfig(step=req.step, burn_in=req.burn_in, chains=req.chains),
        precond_sigma=req.precond_sigma,
        traj=req.traj,
    )


def create_app() -> FastAPI:
    app = FastAPI(title="follmer flow sampling service", version=__version__)

    @app.get("/health")
    def health() -> dict:
        return {"status": "ok", "version": __version__}

    @app.get("/examples", response_model=list[ExampleInfo])
    def list_examples():
        return [_example_info(i) for i in EXAMPLE_IDS]

    @app.get("/examples/{ex_id}")
    def get_example(ex_id: int, dim: int | None = None) -> dict:
        try:
            spec = example_registry(ex_id, dim)
        except ValueError as exc:
            raise HTTPException(status_code=404, detail=str(exc)) from exc
        info = _example_info(ex_id, dim).model_dump()
        info["mixture"] = spec.mixture.to_dict()
        return info

    @app.post("/sample", response_model=RunSummary)
    def sample(req: SampleRequest) -> RunSummary:
        cfg = _build(req)
        report = _guard(run_experiment, cfg)
        return RunSummary(report=report, files=report["files"])

    @app.post("/sweep", response_model=SweepSummary)
    def run_sweep(req: SweepRequest) -> SweepSummary:
        try:
            req.check_axis()
        except ValueError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        base = _build(req.base)
        rows = _guard(sweep, base, req.axis, req.values)
        out = Path(base.out_dir)
        with open(out / "sweep_report.json") as fh:
            status = json.load(fh)["status"]
        return SweepSummary(rows=rows, csv_path=str(out / "sweep.csv"), status=status)

    def _build(req: SampleRequest) -> RunConfig:
        try:
            return _to_run_config(req)
        except (ValueError, OSError) as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc

    def _guard(fn, *args):
        try:
            return fn(*args)
        except (ValueError, NotImplementedError) as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc
        except NumericalFailure as exc:
            raise HTTPException(status_code=500,
                                detail=f"numerical failure: {exc}") from exc
        except OSError as exc:
            raise HTTPException(status_code=400, detail=str(exc)) from exc

    return app


app = create_app()
