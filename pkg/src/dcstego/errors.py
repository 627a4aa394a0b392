"""Exception types shared across the package."""


class StegoError(Exception):
    """Base class for all package-specific errors."""


class ParameterError(StegoError, ValueError):
    """A parameter is outside its documented domain."""


class ContextError(StegoError, ValueError):
    """A context sequence contains tokens outside the model alphabet."""


class LivelockError(StegoError):
    """Encoding made no progress within the block budget."""

    def __init__(self, blocks: int, consumed_bits: int):
        super().__init__(
            f"no termination after {blocks} blocks ({consumed_bits} bits consumed)"
        )
        self.blocks = blocks
        self.consumed_bits = consumed_bits


class FrameError(StegoError):
    """The recovered header is inconsistent with any plausible session."""


class BridgeError(StegoError):
    """The external model process failed or broke protocol."""
