"""Exception types shared across the package."""


class WaveStencilError(Exception):
    """Base class for errors raised by this package."""


class ConfigError(WaveStencilError, ValueError):
    """Invalid geometry, tiling, or configuration value."""


class SnapshotFormatError(WaveStencilError):
    """Malformed snapshot stream.  ``offset`` is the byte position of the problem."""

    def __init__(self, message: str, offset: int):
        super().__init__(f"{message} (at byte {offset})")
        self.offset = offset


class InstabilityError(WaveStencilError, ArithmeticError):
    """A non-finite wavefield value appeared during time stepping."""

    def __init__(self, step: int, detail: str = ""):
        msg = f"non-finite wavefield detected at step {step}"
        if detail:
            msg += f": {detail}"
        super().__init__(msg)
        self.step = step


class VerificationError(WaveStencilError):
    """A kernel variant disagreed with the reference propagator."""
