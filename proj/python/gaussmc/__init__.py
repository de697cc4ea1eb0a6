"""O(d)-storage Markov chain sampler for Gaussian vectors with a given correlation matrix."""

from ._core import *  # noqa: F401,F403
from ._core import (
    ArgumentError,
    CapacityError,
    CholeskyFactor,
    CovarianceModel,
    Error,
    FactorizationError,
    NotPsdError,
    NumericError,
    RngStream,
    TestFunctional,
)

__version__ = "0.1.0"
