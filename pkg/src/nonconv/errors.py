"""Exception types raised across the package."""


class SingularInput(ValueError):
    """Matrix is numerically rank deficient."""


class BadOrder(ValueError):
    """Exterior power order outside 1..d."""


class NotUnimodular(ValueError):
    """A matrix function produced a matrix with det far from 1."""


class RangeTooSmall(ValueError):
    """A schedule cannot be evaluated far enough for the requested check."""


class NotErgodic(ValueError):
    """Transition matrix is reducible or periodic."""


class MarkovScheduleNotAffine(ValueError):
    """Markov-driven products require affine index maps q_i(n) = a_i n + b_i."""


class DegenerateBlocks(ValueError):
    """Block length r(m1) is zero."""


class StreamExhausted(RuntimeError):
    """A finite matrix stream ran out of matrices."""


class InsufficientData(ValueError):
    """Too few positive tail estimates to fit a rate."""


class ProductOverflow(OverflowError):
    """Unrescaled direct product left the floating range."""


class ConfigError(ValueError):
    """Invalid experiment configuration."""

    def __init__(self, diagnostics):
        if isinstance(diagnostics, str):
            diagnostics = [diagnostics]
        self.diagnostics = list(diagnostics)
        super().__init__("; ".join(self.diagnostics))
