"""Best-approximation errors, approximation schemes and lethargy constructions at desk scale."""

from __future__ import annotations

from .analysis import (
    a_eps_norm,
    approx_space_norm,
    dsp_hilbert,
    dsp_refute_c0,
    farness,
    farness_report,
    int0_witness,
    jackson_sequence,
    operator_norm,
    perturbation_bound,
    shapiro_check,
)
from .bestapprox import ErrorProfile, dist_nterm, dist_subspace, error_profile, level_error
from .errors import (
    ApproxError,
    BudgetExceeded,
    CallbackContractError,
    IndexSelectionExhausted,
    InsufficientSubspace,
    LambdaInfeasible,
    SolverError,
)
from .fixtures import (
    Fixture,
    gen_cfar,
    gen_chebyshev,
    gen_muntz_grid,
    gen_projected_counterexample,
    gen_slow_scheme,
)
from .lethargy import EpsilonSequence, WitnessResult, bernstein_construct, series_construct, verify_witness
from .schemes import (
    Dictionary,
    Scheme,
    k_map,
    linear_chain,
    nterm_scheme,
    poly_grid_scheme,
    project_scheme,
    sum_scheme,
    validate_scheme,
)
from .spaces import INF, Space, lorentz_norm, modulus_of_convexity, norm, pnorm_profile, rearrange_nonincreasing

__version__ = "0.1.0"
