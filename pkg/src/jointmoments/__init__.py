"""Joint moments of characteristic polynomials of beta ensembles.

Closed-form limits (partition sums, Barnes-G/Upsilon constants), quadrature
oracles for small ensembles, and Monte Carlo samplers for the Hua-Pickrell,
circular Jacobi, Laguerre and inverse-Laguerre ensembles and their
interlacing arrays.
"""

from .ensembles import ArrayBatch, EnsembleSpec, InterlacingArray, Kind, sample_array, sample_arrays
from .errors import (
    ConvergenceWarning,
    DegenerateConfigurationError,
    DomainError,
    EffectiveSampleSizeWarning,
    JointMomentsError,
    PoleError,
    QuadratureError,
)
from .limits import (
    JointMomentParams,
    f0_limit,
    f_limit,
    forrester_joint_moment,
    x_moment_limit,
    x_second_moment_closed,
    y_moment_limit,
)
from .mc import MomentEstimate
from .mcmc import ChainConfig, sample_mcmc
from .oracle import QuadResult
from .partitions import Partition, enumerate_partitions
from .specfun import QuadratureSpec

__version__ = "0.1.0"

__all__ = [
    "ArrayBatch",
    "ChainConfig",
    "ConvergenceWarning",
    "DegenerateConfigurationError",
    "DomainError",
    "EffectiveSampleSizeWarning",
    "EnsembleSpec",
    "InterlacingArray",
    "JointMomentParams",
    "JointMomentsError",
    "Kind",
    "MomentEstimate",
    "Partition",
    "PoleError",
    "QuadResult",
    "QuadratureError",
    "QuadratureSpec",
    "enumerate_partitions",
    "f0_limit",
    "f_limit",
    "forrester_joint_moment",
    "sample_array",
    "sample_arrays",
    "sample_mcmc",
    "x_moment_limit",
    "x_second_moment_closed",
    "y_moment_limit",
]
