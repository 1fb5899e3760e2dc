"""Exact and approximate parallelism of operators on finite-dimensional spaces."""

from .cstar import (
    LinkingElement,
    ModuleElement,
    State,
    algebra_parallel_state,
    cauchy_schwarz_check,
    eps_state_inequality,
    find_parallel_state,
    linking_embed,
    module_inner,
    module_norm,
    module_parallel_suite,
    ratio_identity_check,
    state_variance_eps_identity,
)
from .exceptions import DomainError, InputError, NumericError
from .linalg import (
    DEFAULT_TOL,
    Tolerances,
    max_singular_triplet,
    op_norm,
    psd_sqrt,
    schatten_norm,
    spectral_radius,
)
from .minimax import OptResult, UnimodularScalar, max_over_circle, min_over_plane, sphere_sup_M
from .parallel import (
    ParallelReport,
    bs_orthogonal_sup,
    characterization_suite,
    derivation_norm,
    elementary_operator_bounds,
    eps_pointwise_bound_check,
    identity_parallel_suite,
    is_eps_parallel,
    is_exact_parallel,
    make_parallel_pair,
    spectral_criterion,
    unitary_orbit_check,
    vector_eps_parallel,
    witness_vector,
)
from .schatten import HermFunctional, PExponent, clarkson_check, jordan_split, linear_dependence_test, schatten_parallel
from .suite import SuiteConfig, SuiteReport, run_suite

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
