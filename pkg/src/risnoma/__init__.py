"""Link-level simulator for a two-user NOMA device-to-device pair served
through a partitioned reconfigurable surface under Nakagami-m fading."""

from .bounds import NudgedShapeWarning, RateBounds, rate_bounds
from .channel import ApproxGainDist, LinkSet, NakagamiParams, expected_gain_sq, fit_approx_dist
from .config import SweepSpec, load_config, parse_config
from .errors import (
    ConfigError,
    DegenerateConfigurationError,
    DomainError,
    InvalidPartitionError,
    NonConvergenceError,
    NumericError,
    RisNomaError,
)
from .metrics import EnergyModel, energy_efficiency, spectral_efficiency
from .montecarlo import ErgodicEstimate, McSettings, estimate_noma, estimate_oma
from .noma import PowerSplit, RatePair, ScenarioConfig, default_scenario, partition_elements

__version__ = "0.1.0"
