"""Gaussian fluid-queue simulation and traffic-limit experiments.

The library samples stationary-increment Gaussian inputs from a variance
function, computes the stationary workload of the fluid queue they feed,
solves for the normalizing time scale, and statistically compares the
rescaled workload against the limiting fractional-Brownian-motion queue
in both the heavy- and light-traffic regimes.
"""

from .variance import VarianceModel, check_condition_C, estimate_rv_index, potter_check
from .sampling import GridSpec, PathSample, EmbeddingReport, sample_path, sample_increments
from .queues import (QueueConfig, WorkloadPath, reich_q0, forward_workload,
                     stationary_workload, one_sided_sup_q0)
from .scaling import DeltaSolution, solve_delta, delta_exponent_audit
from .entropy import (covering_number, dudley_integral, expected_sup_ratio,
                      modulus_bound, sigma_inverse)
from .stats import (EmpiricalSample, dkw_threshold, ks_one_sample_exponential,
                    ks_two_sample, loglog_slope)
from .experiments import (ExperimentConfig, ConvergenceReport,
                          reference_fbm_queue_samples, rescaled_workload_samples,
                          run_input_flt, run_workload_flt,
                          run_omega_gamma_decay, run_modulus_diagnostic)

__version__ = "0.1.0"
