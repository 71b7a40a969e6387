"""
Exception hierarchy for calmetrics
Each class carries the CLI exit code it maps to
"""


class CalMetricsError(Exception):
    """Base class for all calmetrics errors"""
    exit_code = 1


class InputReadError(CalMetricsError):
    """Input file missing or unreadable"""
    exit_code = 3


class InputParseError(CalMetricsError, ValueError):
    """
    Malformed input record.

    Args:
        message (str): What is wrong with the record
        line (int): 1-based line number in the source file (header is line 1)
    """
    exit_code = 3

    def __init__(self, message, line=None):
        self.line = line
        if line is not None:
            message = f"line {line}: {message}"
        super().__init__(message)


class DegenerateClassError(CalMetricsError, ValueError):
    """Operation needs both classes but one of them is empty"""
    exit_code = 4


class MetricDomainError(CalMetricsError, ValueError):
    """Metric evaluated outside its domain (e.g. precision gain at zero precision)"""
    exit_code = 4


class ConstantVectorError(CalMetricsError, ValueError):
    """Rank correlation of a constant vector is undefined"""
    exit_code = 4


class InvalidPriorError(CalMetricsError, ValueError):
    """Prior outside the open interval (0, 1)"""
    exit_code = 5


class PriorMismatchError(InvalidPriorError):
    """PriorConfig.pi does not match the empirical prior of the evaluated data"""


class InvalidConfigError(CalMetricsError, ValueError):
    """Unknown metric name, missing reference prior or otherwise unusable options"""
    exit_code = 5


class UnachievableTargetError(CalMetricsError, ValueError):
    """Undersampling to the requested prior would leave no minority example"""
    exit_code = 5
