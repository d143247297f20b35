"""Fourier-Laguerre spectral calculus for cylindrical functions on the Heisenberg group.

Submodules:

* :mod:`.laguerre` - scaled Laguerre basis functions and Gauss rules
* :mod:`.field` - coefficient fields, physical grids, synthesis and analysis
* :mod:`.spectral` - diagonal operators (fractional powers, resolvents, propagators)
* :mod:`.weights` - the weights w1..w4 and related gauges
* :mod:`.constants` - Dawson integrals, kappa and the composite bounds
* :mod:`.gram` - weighted Gram matrices for sandwiched operators
* :mod:`.verify` - report-producing numerical checks
* :mod:`.cli` - the ``heisenberg-spectral`` command
"""

__version__ = "0.1.0"

from .errors import DomainError, GridRangeError, OptimizationError, PoleError, ResolutionError
from .field import (
    ClosureField,
    LambdaGrid,
    PhysicalGrid,
    SpectralCoefficients,
    analyze,
    coefficient_field,
    l2_norm,
    synthesize,
    synthesize_grid,
)
from .spectral import (
    AbsT,
    Conformal,
    PowerOfL,
    Product,
    Propagator,
    PureFractional,
    Resolvent,
    SobolevJapaneseBracket,
    SubLaplacian,
    apply,
    eig_L,
    multiplier,
)
from .weights import WeightSpec

__all__ = [
    "__version__",
    "DomainError",
    "GridRangeError",
    "OptimizationError",
    "PoleError",
    "ResolutionError",
    "ClosureField",
    "LambdaGrid",
    "PhysicalGrid",
    "SpectralCoefficients",
    "analyze",
    "coefficient_field",
    "l2_norm",
    "synthesize",
    "synthesize_grid",
    "AbsT",
    "Conformal",
    "PowerOfL",
    "Product",
    "Propagator",
    "PureFractional",
    "Resolvent",
    "SobolevJapaneseBracket",
    "SubLaplacian",
    "apply",
    "eig_L",
    "multiplier",
    "WeightSpec",
]
