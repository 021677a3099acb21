# core/errors.py
from darkcool.core.defaults import EXIT_CODES


class CoolingError(Exception):
    """Base class for every failure the CLI maps to an exit code."""

    exit_code = EXIT_CODES["numerical"]

    def to_dict(self):
        return {
            "error": type(self).__name__,
            "message": str(self),
            "exit_code": self.exit_code,
        }


class ConfigError(CoolingError):
    exit_code = EXIT_CODES["config"]


class RangeError(ConfigError, ValueError):
    """An index, count or argument outside its allowed range."""


class NumericalGuardError(CoolingError):
    exit_code = EXIT_CODES["numerical"]


class BoundaryDecayError(NumericalGuardError):
    """Eigenfunctions do not decay at the grid ends: the grid is too small."""


class TruncationError(NumericalGuardError):
    """Momentum kicks leak population past the retained basis."""


class DiagonalizationError(NumericalGuardError):
    pass


class ExcitationRangeError(NumericalGuardError):
    pass


class ProfileError(NumericalGuardError):
    pass


class DimensionError(NumericalGuardError, ValueError):
    pass


class OutputError(CoolingError):
    exit_code = EXIT_CODES["io"]
