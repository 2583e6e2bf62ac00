"""Exception types shared across the package."""


class TpmError(Exception):
    """Base class for all package-specific errors."""


class ParameterError(TpmError, ValueError):
    """An argument violates a documented precondition."""


class DegenerateCloudError(ParameterError):
    """Point cloud has zero spread and cannot be normalized."""


class DegenerateMaskError(ParameterError):
    """Mask ratio leaves zero masked or zero visible patches."""


class MaskParseError(ParameterError):
    """Malformed mask-construction string."""


class ConfigError(ParameterError):
    """Invalid or unknown configuration entry."""


class ShapeError(TpmError, ValueError):
    """Tensor shapes are incompatible for the requested operation."""


class NumericError(TpmError, ArithmeticError):
    """A forward value became NaN/Inf, or the loss diverged."""


class StateError(TpmError, RuntimeError):
    """Operation invoked out of order (e.g. backward without a graph)."""


class DataFormatError(TpmError, ValueError):
    """Dataset file is corrupt or has an unsupported version."""

    def __init__(self, message: str, offset: int | None = None):
        super().__init__(message if offset is None else f"{message} (byte offset {offset})")
        self.offset = offset


class CheckpointFormatError(TpmError, ValueError):
    """Checkpoint file is corrupt (bad magic, truncation, CRC mismatch)."""

    def __init__(self, message: str, offset: int | None = None):
        super().__init__(message if offset is None else f"{message} (byte offset {offset})")
        self.offset = offset


class CheckpointVersionError(CheckpointFormatError):
    """Checkpoint was written by an unsupported format version."""


class CompatibilityError(TpmError, ValueError):
    """Checkpoint tensors do not match the requested model configuration."""
