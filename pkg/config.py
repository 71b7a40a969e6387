"""
Configuration constants and settings for calmetrics
"""
import os
import json

# File paths
BASE_DIR = os.path.dirname(os.path.abspath(__file__))
SETTINGS_FILE = os.environ.get('CALMETRICS_SETTINGS', os.path.join(BASE_DIR, 'settings.json'))
DEBUG_LOG_FILE = os.path.join(BASE_DIR, 'debug.log')

# Desk-scale defaults for the synthetic experiments
DEFAULT_MU1 = 2.0
DEFAULT_MU0 = 1.8
DEFAULT_PRIOR_GRID = [0.5, 0.2, 0.05, 0.01, 0.001]
DEFAULT_KL_GRID = [0.08, 0.04, 0.02, 0.01, 0.005, 0.0]
DEFAULT_PI_RANGE = (0.001, 0.5)

# Default settings
DEFAULT_SETTINGS = {
    'debug_logging': False,
    'log_file': DEBUG_LOG_FILE,
    'seed': 0,
    'threshold': 0.5,
    'synthetic_n': 100000,
    'mu1': DEFAULT_MU1,
    'mu0': DEFAULT_MU0,
    'experiment_runs': 10,
    'oracle_runs': 200,
    'ci_level': 0.95,
    'workers': 1,
    'pool_count': 20,
    'pool_models': 30,
    'pool_n': 20000,
    'pool_pi': 0.005,
}


# Lazy import to avoid circular dependency
def _get_logger():
    """Import logger functions lazily to avoid circular import"""
    from logger import debug, error, warning
    return debug, error, warning


def load_settings(settings_file=None):
    """
    Load settings from file merged over the defaults.

    A missing or unreadable file yields the defaults; keys missing from the
    file keep their default value.

    Note: This function does NOT use logging to avoid circular dependencies
    since logger.is_debug_enabled() calls load_settings().
    """
    settings_file = settings_file or SETTINGS_FILE
    settings = DEFAULT_SETTINGS.copy()

    try:
        if os.path.exists(settings_file):
            with open(settings_file, 'r', encoding='utf-8') as f:
                stored = json.load(f)
            if isinstance(stored, dict):
                settings.update(stored)
    except (OSError, ValueError):
        return DEFAULT_SETTINGS.copy()

    return settings


def save_settings(settings, settings_file=None):
    """
    Save settings to file as plain indented JSON.

    Returns:
        bool: True on success, False if the file could not be written
    """
    debug, error, _ = _get_logger()
    settings_file = settings_file or SETTINGS_FILE
    debug("Saving settings to %s", settings_file)
    try:
        with open(settings_file, 'w', encoding='utf-8') as f:
            json.dump(settings, f, indent=2)
            f.flush()
            os.fsync(f.fileno())

        debug("Settings saved successfully")
        return True
    except (OSError, TypeError) as e:
        error(f"Failed to save settings: {e}")
        return False
