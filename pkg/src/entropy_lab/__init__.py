"""Exact and asymptotic Rényi entropies of free fermions on multi-block configurations."""

from .asymptotics import (
    Prediction,
    Regime,
    b_alpha,
    c_alpha,
    compose_conjecture,
    general_asymptotic,
    geometric_factor,
    predict,
)
from .blocks import (
    BlockError,
    BlockSet,
    Configuration,
    canonicalize,
    complement,
    random_configuration,
    symmetric_config,
    union,
)
from .entropy import (
    entanglement_spectrum,
    multipartite_information_exact,
    mutual_information_exact,
    renyi,
)
from .spectral import correlation_matrix, dual_correlation_matrix, occupation

__version__ = "0.1.0"

__all__ = [
    "BlockError",
    "BlockSet",
    "Configuration",
    "Prediction",
    "Regime",
    "b_alpha",
    "c_alpha",
    "canonicalize",
    "complement",
    "compose_conjecture",
    "correlation_matrix",
    "dual_correlation_matrix",
    "entanglement_spectrum",
    "general_asymptotic",
    "geometric_factor",
    "multipartite_information_exact",
    "mutual_information_exact",
    "occupation",
    "predict",
    "random_configuration",
    "renyi",
    "symmetric_config",
    "union",
]
