"""UAV-assisted hierarchical federated learning toolkit.

Thin re-export of the compiled core: stochastic-geometry success
probabilities, Monte Carlo channel validation, the unbiased two-level
training loop with baselines, and convergence/latency calculators.
"""

from ._uhfl import *  # noqa: F401,F403
from ._uhfl import __doc__ as _core_doc

__version__ = "0.1.0"
__all__ = [n for n in dir() if not n.startswith("_")]
