"""
calmetrics Version Management
Semantic Versioning: MAJOR.MINOR.PATCH

MAJOR: Breaking changes to metric definitions or file formats
MINOR: New metrics, commands or experiments (backward compatible)
PATCH: Bug fixes, small improvements, documentation updates
"""

# Current version
VERSION_MAJOR = 1
VERSION_MINOR = 2
VERSION_PATCH = 0

# Build metadata (optional)
VERSION_BUILD = "20261018"  # YYYYMMDD format

# Pre-release identifier (optional, e.g., 'alpha', 'beta', 'rc1')
VERSION_PRERELEASE = None

# Codename for this version (optional)
VERSION_CODENAME = "Drift Attribution"


def get_version():
    """
    Get the full version string
    Returns: str - Full version string (e.g., "1.2.0" or "1.2.0-beta")
    """
    version = f"{VERSION_MAJOR}.{VERSION_MINOR}.{VERSION_PATCH}"

    if VERSION_PRERELEASE:
        version += f"-{VERSION_PRERELEASE}"

    return version


def get_version_info():
    """
    Get detailed version information
    Returns: dict - Dictionary with version details
    """
    return {
        'version': get_version(),
        'major': VERSION_MAJOR,
        'minor': VERSION_MINOR,
        'patch': VERSION_PATCH,
        'build': VERSION_BUILD,
        'prerelease': VERSION_PRERELEASE,
        'codename': VERSION_CODENAME,
        'display': get_display_version()
    }


def get_display_version():
    """
    Get version string suitable for --version output
    Returns: str - e.g. "v1.2.0 - Drift Attribution"
    """
    version = f"v{get_version()}"

    if VERSION_CODENAME:
        version += f" - {VERSION_CODENAME}"

    return version


# Version history and changelog
VERSION_HISTORY = [
    {
        'version': '1.2.0',
        'codename': 'Drift Attribution',
        'date': '2026-10-18',
        'type': 'minor',
        'changes': [
            'Added eval --by-group --drift: raw vs calibrated deltas per group with a prior/likelihood verdict',
            'Added rankcorr over CSV pool files in addition to synthetic pools',
            'Curve CSV header now records whether the gain AUC was clamped',
        ]
    },
    {
        'version': '1.1.0',
        'codename': 'Undersampling Oracle',
        'date': '2026-09-02',
        'type': 'minor',
        'changes': [
            'Added oracle command: repeated undersampling to a reference prior',
            'Closed-form calibrated value printed next to the oracle mean',
            'Per-run seeds derived with SeedSequence.spawn, PCG64 streams',
        ]
    },
    {
        'version': '1.0.0',
        'codename': 'Calibrated Precision',
        'date': '2026-07-14',
        'type': 'major',
        'changes': [
            'Calibrated precision, F1, AUC-PR and AUC-PR-Gain',
            'ROC / PR / PR-Gain curves over distinct-score thresholds',
            'Two-Gaussian benchmark with prior and difficulty sweeps',
        ]
    },
]
