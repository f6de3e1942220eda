"""
Fully quantized two-mode EIT in a three-level Lambda medium.

Modules
-------
params       SI configuration and derived quantities
dressed      first-order dressed states and energies
fock_oracle  exact truncated-Fock-space numerics
response     susceptibility, group velocity, nonlinear coefficients
presets      ready-made configurations
io           configuration documents, manifests, serializers
cli          command-line front end
"""

__version__ = "0.1.0"

from .params import (  # noqa: E402
    CODATA,
    AtomMediumSpec,
    Constants,
    LaserSpec,
    SystemConfig,
    build_config,
    practical_units,
)
from .presets import config_from_couplings, slow_light_config  # noqa: E402

__all__ = [
    "CODATA", "AtomMediumSpec", "Constants", "LaserSpec", "SystemConfig", "build_config",
    "practical_units", "config_from_couplings", "slow_light_config", "__version__",
]
