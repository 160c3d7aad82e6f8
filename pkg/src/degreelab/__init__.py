"""Exact spectral analysis on the Boolean cube, degree-minimizing
interpolation over restricted supports, and exhaustive desk-scale
verification of low-degree identifiability claims."""

from .boolfn import (
    DegreeTolerance,
    FourierSpectrum,
    TruthTable,
    degree,
    influence,
    inner_product,
    inverse_wht,
    multi_degree,
    wht,
)
from .estimator import MinDegreeRegressor
from .genmodel import GenerationModel, ParityComponent, SupportSpec, builtin_model
from .minsolve import (
    MinDegreeSolution,
    Realization,
    Representation,
    SupportedTask,
    conditional_degree,
    corollary_membership_check,
    hamming_extension,
    min_degree_fit,
    min_degree_solve,
    realization_degree,
)
from .tasks import (
    DegreeMixture,
    ParityFamily,
    RandomPolynomialFamily,
    enumerate_family,
    sample_mixture_task,
    sample_task,
)
from .theoremlab import VerificationReport, objective, run_claim
from .transforms import (
    BasisTransform,
    CubeBijection,
    SignedPermutation,
    compose_with,
    deg_under_basis,
    enumerate_bijections,
    is_compatible,
    is_degree_one,
    preserves_Fk,
)

__version__ = "0.1.0"
