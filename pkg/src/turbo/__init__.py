"""Trust-region Bayesian optimization with local GPs and Thompson sampling."""

from .kernels import BACKEND
from .optimizer import RunTrace, Turbo, TurboConfig, run
from .trust_region import TRConfig

__all__ = ["BACKEND", "RunTrace", "TRConfig", "Turbo", "TurboConfig", "run"]
__version__ = "0.1.0"
