"""Symmetrized perturbed-tanh neural network operators and their asymptotics."""

from ._accel import BACKEND
from .analysis import (
    ExpansionReport,
    StabilityReport,
    damasclin_correction,
    kantorovich_rate_check,
    rate_fit,
    stability_sweep,
    voronovskaya_residual,
)
from .corpus import CorpusEntry, TestFunction, get_function, standard_corpus
from .errors import (
    Advisory,
    DomainError,
    InsufficientData,
    OrderTooHigh,
    OrderUnavailable,
    RadiusCapped,
    WindowTooSmall,
)
from .fractional import CaputoScheme, FractionalOrder, caputo_left, caputo_right, fractional_remainder
from .kernel import (
    ActivationParams,
    KernelEvalPolicy,
    activation,
    activation_dq,
    activation_dx,
    activation_dxx,
    density,
    kernel_decay_radius,
    symmetrized_kernel,
)
from .operators import OperatorSpec, apply, apply_basic, apply_kantorovich, apply_quadrature, moment

__version__ = "0.1.0"
