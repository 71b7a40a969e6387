"""
Centralized logging module for calmetrics
Implements rotating file handler with 10MB size limit plus a stderr channel
for warnings and errors
"""
import logging
import sys
from logging.handlers import RotatingFileHandler

# Global logger instance
_logger = None
_debug_enabled = None

LOG_FORMAT = '[%(asctime)s] %(levelname)s [%(module)s.%(funcName)s:%(lineno)d] %(message)s'
LOG_DATE_FORMAT = '%Y-%m-%d %H:%M:%S'


def is_debug_enabled():
    """
    Check if debug logging is enabled in settings.
    The flag is read once per process, see reset_logger().

    Returns:
        bool: True if debug logging is enabled, False otherwise
    """
    global _debug_enabled

    if _debug_enabled is None:
        try:
            from config import load_settings  # Lazy import to avoid circular dependency
            _debug_enabled = bool(load_settings().get('debug_logging', False))
        except Exception:
            _debug_enabled = False
    return _debug_enabled


def get_logger():
    """
    Get or create the application logger.

    Logger behavior:
    - Logs to file only when debug_logging is enabled in settings
    - Rotates log files when they exceed 10MB, keeps up to 5 backups
    - Always echoes WARNING and above to stderr (the CLI diagnostics stream)

    Returns:
        logging.Logger: Configured logger instance
    """
    global _logger

    if _logger is not None:
        return _logger

    _logger = logging.getLogger('calmetrics')
    _logger.setLevel(logging.DEBUG)

    # Remove any existing handlers to avoid duplicates
    _logger.handlers.clear()

    console = logging.StreamHandler(sys.stderr)
    console.setLevel(logging.WARNING)
    console.setFormatter(logging.Formatter('%(levelname)s: %(message)s'))
    _logger.addHandler(console)

    if is_debug_enabled():
        from config import load_settings, DEBUG_LOG_FILE
        log_file = load_settings().get('log_file') or DEBUG_LOG_FILE
        handler = RotatingFileHandler(
            log_file,
            maxBytes=10 * 1024 * 1024,  # 10MB
            backupCount=5,
            encoding='utf-8'
        )
        handler.setFormatter(logging.Formatter(fmt=LOG_FORMAT, datefmt=LOG_DATE_FORMAT))
        _logger.addHandler(handler)

    # Prevent propagation to root logger
    _logger.propagate = False

    return _logger


def reset_logger(debug_enabled=None):
    """
    Drop the cached logger so the next call re-reads settings.

    Args:
        debug_enabled (bool): Force the debug flag instead of reading settings
    """
    global _logger, _debug_enabled

    if _logger is not None:
        for handler in list(_logger.handlers):
            handler.close()
        _logger.handlers.clear()
    _logger = None
    _debug_enabled = debug_enabled


def debug(message, *args, **kwargs):
    """
    Log a debug message if debug logging is enabled.

    Example:
        debug("Sweeping %d distinct thresholds", count)
    """
    if is_debug_enabled():
        get_logger().debug(message, *args, **kwargs)


def info(message, *args, **kwargs):
    """Log an info message if debug logging is enabled."""
    if is_debug_enabled():
        get_logger().info(message, *args, **kwargs)


def warning(message, *args, **kwargs):
    """Log a warning; always reaches stderr."""
    get_logger().warning(message, *args, **kwargs)


def error(message, *args, **kwargs):
    """Log an error; always reaches stderr."""
    get_logger().error(message, *args, **kwargs)


def exception(message, *args, **kwargs):
    """
    Log an exception with traceback.
    Call this from an except block; the traceback goes to the debug log file
    when enabled, stderr gets the message line.

    Example:
        try:
            evaluate(data, pi0, metrics)
        except DegenerateClassError as e:
            exception("Group %s skipped: %s", group, e)
    """
    get_logger().error(message, *args, exc_info=is_debug_enabled(), **kwargs)
