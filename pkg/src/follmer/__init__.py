"""Unit-time ODE-flow sampling of multimodal targets, with MCMC baselines,
two-sample evaluation metrics, and an experiment harness."""

from .batch import SampleBatch
from .densities import (FunctionTarget, GaussianComponent, GaussianMixture,
                        Preconditioner, Target, gm_log_density, gm_sample,
                        load_mixture, log_rnd, save_mixture, single_gaussian)
from .errors import DegenerateInput, NumericalFailure
from .flow import (ClosedFormMixtureField, FlowConfig, MonteCarloField,
                   TimeGrid, VelocityField, closed_form_velocity,
                   euler_integrate, follmer_sample, follmer_trajectories,
                   make_time_grid, mc_velocity, velocity_at_zero)
from .harness import RunConfig, run_experiment, sweep
from .mcmc import (ChainState, McmcConfig, hybrid_sample, make_chain_state,
                   mh_step, run_chains, tamed_drift,
                   tmala_acceptance_probability, tmala_step, tula_step)
from .metrics import (MetricReport, ModeCoverage, adjusted_metrics,
                      mixture_moment_truth, mmd, mode_coverage,
                      moment_estimates, wasserstein2_1d, wasserstein2_nd)
from .registry import EXAMPLE_IDS, ExampleSpec, example_registry

__version__ = "0.1.0"

__all__ = [
    "SampleBatch", "FunctionTarget", "GaussianComponent", "GaussianMixture",
    "Preconditioner", "Target", "gm_log_density", "gm_sample", "load_mixture",
    "log_rnd", "save_mixture", "single_gaussian", "DegenerateInput",
    "NumericalFailure", "ClosedFormMixtureField", "FlowConfig",
    "MonteCarloField", "TimeGrid", "VelocityField", "closed_form_velocity",
    "euler_integrate", "follmer_sample", "follmer_trajectories",
    "make_time_grid", "mc_velocity", "velocity_at_zero", "RunConfig",
    "run_experiment", "sweep", "ChainState", "McmcConfig", "hybrid_sample",
    "make_chain_state", "mh_step", "run_chains", "tamed_drift",
    "tmala_acceptance_probability", "tmala_step", "tula_step",
    "MetricReport", "ModeCoverage", "adjusted_metrics",
    "mixture_moment_truth", "mmd", "mode_coverage", "moment_estimates",
    "wasserstein2_1d", "wasserstein2_nd", "EXAMPLE_IDS", "ExampleSpec",
    "example_registry",
]
