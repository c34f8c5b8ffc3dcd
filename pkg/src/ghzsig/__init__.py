"""Simulator for a GHZ-triplet quantum signature protocol with fingerprint arbitration."""

from .errors import (
    CapabilityError,
    ConstructionError,
    GhzSigError,
    InternalConsistencyError,
    InvalidArgumentError,
    KeyExhaustedError,
    OneTimeViolationError,
    ProtocolOrderError,
    ResourceError,
    ScenarioError,
)

__version__ = "0.1.0"

__all__ = [
    "CapabilityError",
    "ConstructionError",
    "GhzSigError",
    "InternalConsistencyError",
    "InvalidArgumentError",
    "KeyExhaustedError",
    "OneTimeViolationError",
    "ProtocolOrderError",
    "ResourceError",
    "ScenarioError",
]
