"""Proximal-gradient methods in discrete variable-exponent spaces.

The package provides the modular / Luxemburg-norm machinery of
ell^{p(.)}, closed-form componentwise thresholding operators, the
proximal-gradient solvers built from them, linear operators with
verified adjoints, and reproducible experiment pipelines with a
command-line front end.
"""

from .space import (
    ExponentMap,
    modular_rho,
    modular_rho_bar,
    grad_modular_rho,
    grad_modular_rho_bar,
    pointwise_jmap,
    luxemburg_norm,
    luxemburg_norm_scalar,
    duality_map,
)
from .thresholding import (
    t_ista,
    t_primal,
    t_dual,
    prox_step_primal,
    prox_step_dual,
)
from .operators import (
    LinearOperator,
    IdentityOperator,
    MatrixOperator,
    Convolution1D,
    Convolution2D,
    gaussian_kernel,
    gaussian_kernel2d,
    operator_norm,
    adjoint_mismatch,
)
from .objectives import (
    FidelitySpec,
    PenaltySpec,
    fidelity_value,
    fidelity_gradient,
    objective_value,
)
from .solvers import (
    SolverConfig,
    StopRule,
    IterateTrace,
    solve_primal,
    solve_dual,
    solve_ista,
    solve_primal_lp,
    solve_dual_lp,
)
from .experiments import (
    ExperimentSpec,
    GaussianNoise,
    SaltPepperNoise,
    TwoLevelBuilder,
    MagnitudeBuilder,
    Metrics,
    add_noise,
    build_exponent_map,
    compute_metrics,
    gen_spikes,
    gen_spikes2d,
    gen_heterogeneous,
    half_masks,
    ista_probe,
    run_deconv1d,
    run_denoise_mixed,
    run_rate_study,
    support_f1,
)
from .fileio import (
    read_spec,
    parse_spec_text,
    write_csv,
    write_pgm,
    read_pgm,
    svg_line_plot,
)

__version__ = "0.1.0"

__all__ = [
    "ExponentMap",
    "modular_rho",
    "modular_rho_bar",
    "grad_modular_rho",
    "grad_modular_rho_bar",
    "pointwise_jmap",
    "luxemburg_norm",
    "luxemburg_norm_scalar",
    "duality_map",
    "t_ista",
    "t_primal",
    "t_dual",
    "prox_step_primal",
    "prox_step_dual",
    "LinearOperator",
    "IdentityOperator",
    "MatrixOperator",
    "Convolution1D",
    "Convolution2D",
    "gaussian_kernel",
    "gaussian_kernel2d",
    "operator_norm",
    "adjoint_mismatch",
    "FidelitySpec",
    "PenaltySpec",
    "fidelity_value",
    "fidelity_gradient",
    "objective_value",
    "SolverConfig",
    "StopRule",
    "IterateTrace",
    "solve_primal",
    "solve_dual",
    "solve_ista",
    "solve_primal_lp",
    "solve_dual_lp",
    "ExperimentSpec",
    "GaussianNoise",
    "SaltPepperNoise",
    "TwoLevelBuilder",
    "MagnitudeBuilder",
    "Metrics",
    "add_noise",
    "build_exponent_map",
    "compute_metrics",
    "gen_spikes",
    "gen_spikes2d",
    "gen_heterogeneous",
    "half_masks",
    "ista_probe",
    "run_deconv1d",
    "run_denoise_mixed",
    "run_rate_study",
    "support_f1",
    "read_spec",
    "parse_spec_text",
    "write_csv",
    "write_pgm",
    "read_pgm",
    "svg_line_plot",
]
