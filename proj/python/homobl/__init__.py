"""Periodic homogenization with oscillating Dirichlet data.

Thin wrapper over the C++ core. Configs are JSON text in the same format as
the `homobl` command-line tool.
"""

from ._homobl import (
    ConfigError,
    HomoblError,
    __version__,
    boundary_layer,
    canonical_config,
    config_hash,
    correctors,
    diophantine_constant,
    measure_complement,
    poisson_kernel_reference,
    run,
)

__all__ = [
    "ConfigError",
    "HomoblError",
    "__version__",
    "boundary_layer",
    "canonical_config",
    "config_hash",
    "correctors",
    "diophantine_constant",
    "measure_complement",
    "poisson_kernel_reference",
    "run",
]
