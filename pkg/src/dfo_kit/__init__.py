"""Model-based derivative-free trust-region methods with instrumentation.

The solver sees only a counted zeroth-order :class:`~dfo_kit.problems.Oracle`;
analytic gradients and Lipschitz constants are harness-side ground truth.
"""
from . import _kernels
from .drivers import ALGORITHMS, IterationRecord, RunResult, TRConfig, TRState, run
from .problems import Oracle, Problem, adversarial_instance, make_problem

__version__ = "0.1.0"

__all__ = [
    "ALGORITHMS",
    "IterationRecord",
    "Oracle",
    "Problem",
    "RunResult",
    "TRConfig",
    "TRState",
    "adversarial_instance",
    "make_problem",
    "run",
    "__version__",
]
