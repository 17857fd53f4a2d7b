"""Special functions on cones of positive semidefinite matrices.

Bessel series of matrix argument, Jack/spherical polynomials, Dunkl-type
Bessel kernels, the associated convolution structure, matrix beta and
Wishart sampling, and a verification harness that checks the defining
identities numerically at small rank.
"""

from .cones import (
    DomainError,
    FieldParams,
    IndexPoleError,
    Spectrum,
    field_params,
)
from .jack import jack_C, jack_at_ones, partitions_up_to, pochhammer_gen, zonal_Z
from .series import BesselValue, SeriesControl
from .bessel import bessel_J, f_mu, limit_rate, olshanski_psi, phi_mu, wolf_haar_oracle
from .dunkl import MultiplicityB, dunkl_bessel_A, dunkl_bessel_B, hyp0f0, hyp0f1
from .measures import (
    BetaParams,
    RngStream,
    beta_const,
    beta_density,
    gamma_omega,
    ks_distance,
    project_block,
    sample_beta_general,
    sample_matrix_beta,
    wishart_sample,
)
from .convolution import convolve_points, kappa_mu, sample_ball
from .reports import SuiteSummary, VerificationReport
from .suite import SuiteConfig, run_identity, run_suite

__version__ = "0.1.0"

__all__ = [
    "DomainError",
    "FieldParams",
    "IndexPoleError",
    "Spectrum",
    "field_params",
    "jack_C",
    "jack_at_ones",
    "partitions_up_to",
    "pochhammer_gen",
    "zonal_Z",
    "BesselValue",
    "SeriesControl",
    "bessel_J",
    "f_mu",
    "phi_mu",
    "olshanski_psi",
    "limit_rate",
    "wolf_haar_oracle",
    "MultiplicityB",
    "dunkl_bessel_A",
    "dunkl_bessel_B",
    "hyp0f0",
    "hyp0f1",
    "BetaParams",
    "RngStream",
    "beta_const",
    "beta_density",
    "gamma_omega",
    "ks_distance",
    "project_block",
    "sample_beta_general",
    "sample_matrix_beta",
    "wishart_sample",
    "convolve_points",
    "kappa_mu",
    "sample_ball",
    "SuiteSummary",
    "VerificationReport",
    "SuiteConfig",
    "run_identity",
    "run_suite",
]
