"""Exception hierarchy shared by every module."""


class NeurocascadeError(Exception):
    """Base class for all errors raised by this package."""


class InvalidInputError(NeurocascadeError, ValueError):
    """A value violates a documented precondition."""


class CapacityError(NeurocascadeError):
    """A computation would exceed a configured size bound."""


class GroundingError(NeurocascadeError):
    """A real input could not be grounded to a letter."""

    def __init__(self, message, position=None):
        super().__init__(message)
        self.position = position


class IntegrityError(NeurocascadeError):
    """A neuron state left every interval of its state partition."""

    def __init__(self, message, neuron=None, step=None):
        super().__init__(message)
        self.neuron = neuron
        self.step = step


class ParameterError(InvalidInputError):
    """Neuron parameters violate the inequality their construction needs."""
