"""Pick interpolation on the polydisk, the ball and grid domains through
families of weighted reproducing kernels ``k^nu``, ``nu = |f|^2 mu``."""

__version__ = "0.1.0"

from .disk import SchurChain, classical_pick_matrix, eval_interpolant, solve_disk
from .errors import DegenerateError, DomainError, InputError, OutsideOmegaFError, PickError, ValidationError
from .instance import (
    AlgebraSpec,
    DomainKind,
    DomainSpec,
    InterpolationInstance,
    SpaceKind,
    SpaceSpec,
    annulus_grid,
    load_instance,
    validate_instance,
)
from .kernels import ClosedFormKernel, kernel_eval
from .moments import BaseMeasure, MomentTable, base_moment, weighted_moment
from .pick import (
    Certificate,
    CertifyConfig,
    SweepConfig,
    Verdict,
    certify_infeasible,
    family_sweep,
    pick_matrix,
    psd_check,
    schur_product,
)
from .polynomial import CPolynomial, eval_polynomial, poly_multiply
from .weighted import (
    build_cyclic_model,
    build_weighted_model,
    omega_f_check,
    rescaled_cyclic_kernel,
    weighted_kernel_eval,
)

__all__ = [
    "__version__",
    "SchurChain",
    "classical_pick_matrix",
    "eval_interpolant",
    "solve_disk",
    "DegenerateError",
    "DomainError",
    "InputError",
    "OutsideOmegaFError",
    "PickError",
    "ValidationError",
    "AlgebraSpec",
    "DomainKind",
    "DomainSpec",
    "InterpolationInstance",
    "SpaceKind",
    "SpaceSpec",
    "annulus_grid",
    "load_instance",
    "validate_instance",
    "ClosedFormKernel",
    "kernel_eval",
    "BaseMeasure",
    "MomentTable",
    "base_moment",
    "weighted_moment",
    "Certificate",
    "CertifyConfig",
    "SweepConfig",
    "Verdict",
    "certify_infeasible",
    "family_sweep",
    "pick_matrix",
    "psd_check",
    "schur_product",
    "CPolynomial",
    "eval_polynomial",
    "poly_multiply",
    "build_cyclic_model",
    "build_weighted_model",
    "omega_f_check",
    "rescaled_cyclic_kernel",
    "weighted_kernel_eval",
]
