"""Exception hierarchy shared by every module."""


class GhzSigError(Exception):
    """Base class for all errors raised by this package."""


class InvalidArgumentError(GhzSigError, ValueError):
    pass


class InternalConsistencyError(GhzSigError):
    """A state or record violated an invariant that should be impossible to break."""


class ProtocolOrderError(GhzSigError):
    """An operation was attempted in the wrong protocol phase."""


class KeyExhaustedError(GhzSigError):
    pass


class OneTimeViolationError(GhzSigError):
    """A key segment was used a second time."""


class ResourceError(GhzSigError):
    """A finite supply (fingerprint copies, key material) ran out."""


class CapabilityError(GhzSigError):
    """The request exceeds what the desk-scale simulator can do exactly."""


class ConstructionError(GhzSigError):
    pass


class ScenarioError(GhzSigError):
    pass
