"""Distance-function-wavelet kernels, multiscale interpolation series,
Hermite boundary collocation, node placement, and fractional/potential
integral transforms."""

__version__ = "0.1.0"

from .distances import AnisotropyTensor, general_distance, geodesic_distance
from .estimators import DfwInterpolator, HermiteInterpolator
from .exceptions import (ConfigError, ConvergenceError, DfwaveError,
                         IOFormatError, PoleError, SingularError)
from .hermite import (BoundaryOperatorSet, BoundarySpec, EdgeStudyResult,
                      HermiteModel, assemble_hermite, assemble_multi_bc,
                      edge_effect_ratio, evaluate_hermite, fit_hermite)
from .kernels import (FAMILIES, KernelSpec, eval_kernel,
                      kernel_normal_derivative, radial_profile)
from .nodes import (DomainBox, OptimizeResult, chebyshev_nodes,
                    condition_estimate, max_omega, omega, optimize_minmax)
from .series import (DfwModel, FitReport, NodeSet, RationalDfwModel, ScaleSet,
                     assemble, evaluate, evaluate_rational, fit, fit_rational)
from .study import (TARGETS, ConvergenceRecord, ErrorProfile, StudySpec,
                    conjecture_bound, error_map, estimate_order,
                    run_convergence)
from .transforms import (GridFunction, RadialQuadratureSpec, RadialSamples,
                         abel_backward, abel_forward, fractional_laplacian,
                         laplace_potential_dfw, poisson_extension, radon_dfw,
                         riesz_potential, weyl_transform)

__all__ = [
    "__version__",
    "AnisotropyTensor", "general_distance", "geodesic_distance",
    "DfwInterpolator", "HermiteInterpolator",
    "ConfigError", "ConvergenceError", "DfwaveError", "IOFormatError",
    "PoleError", "SingularError",
    "BoundaryOperatorSet", "BoundarySpec", "EdgeStudyResult", "HermiteModel",
    "assemble_hermite", "assemble_multi_bc", "edge_effect_ratio",
    "evaluate_hermite", "fit_hermite",
    "FAMILIES", "KernelSpec", "eval_kernel", "kernel_normal_derivative",
    "radial_profile",
    "DomainBox", "OptimizeResult", "chebyshev_nodes", "condition_estimate",
    "max_omega", "omega", "optimize_minmax",
    "DfwModel", "FitReport", "NodeSet", "RationalDfwModel", "ScaleSet",
    "assemble", "evaluate", "evaluate_rational", "fit", "fit_rational",
    "TARGETS", "ConvergenceRecord", "ErrorProfile", "StudySpec",
    "conjecture_bound", "error_map", "estimate_order", "run_convergence",
    "GridFunction", "RadialQuadratureSpec", "RadialSamples", "abel_backward",
    "abel_forward", "fractional_laplacian", "laplace_potential_dfw",
    "poisson_extension", "radon_dfw", "riesz_potential", "weyl_transform",
]
