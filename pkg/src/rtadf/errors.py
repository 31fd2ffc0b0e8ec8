"""Exception hierarchy. The CLI maps each class to an exit code."""


class RtadfError(Exception):
    exit_code = 4


class SeriesError(RtadfError, ValueError):
    """Bad input data: unreadable file, missing column, duplicate date, ..."""

    exit_code = 2


class ConfigError(RtadfError, ValueError):
    """Invalid test, simulation or generator parameters."""

    exit_code = 3


class DegenerateWindowError(RtadfError, ArithmeticError):
    """Regression window with zero residual variance or a rank-deficient design."""

    exit_code = 4


class MonteCarloError(RtadfError, RuntimeError):
    exit_code = 4
