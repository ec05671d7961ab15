"""Exception hierarchy shared across the package."""


class DigitalTopologyError(ValueError):
    """Base class for invalid images, maps, or arguments."""


class DimensionMismatch(DigitalTopologyError):
    pass


class NotATree(DigitalTopologyError):
    pass


class NotASelfMap(DigitalTopologyError):
    pass


class DiscontinuousMap(DigitalTopologyError):
    pass


class PreconditionViolation(DigitalTopologyError):
    """A caller-supplied vertex or instance does not meet a documented precondition."""


class BrokenFinder(RuntimeError):
    """An approximate-fixed-point finder returned a vertex that is not one."""


class NoApproximateFixedPoint(DigitalTopologyError):
    pass
