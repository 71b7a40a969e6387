"""
Utility functions shared by the calmetrics modules: seeding, retries,
ordered parallel map and number formatting
"""
import math
from concurrent.futures import ThreadPoolExecutor
from functools import wraps

import numpy as np

from errors import DegenerateClassError
from logger import debug, warning


def as_seed_sequence(seed):
    """Accept an int or an existing SeedSequence"""
    if isinstance(seed, np.random.SeedSequence):
        return seed
    return np.random.SeedSequence(int(seed))


def spawn_seeds(seed, count):
    """
    Derive independent child seed sequences.

    Args:
        seed: int or numpy.random.SeedSequence
        count (int): Number of children

    Returns:
        list[numpy.random.SeedSequence]
    """
    return as_seed_sequence(seed).spawn(count)


def make_rng(seed):
    """
    Generator on the fixed PCG64 bit generator so streams are identical across
    platforms and numpy versions that keep PCG64.
    """
    return np.random.Generator(np.random.PCG64(as_seed_sequence(seed)))


def seed_to_int(seed):
    """Collapse a seed sequence into a plain 32-bit integer seed"""
    return int(as_seed_sequence(seed).generate_state(1)[0])


def retry_on_degenerate(max_retries=1):
    """
    Decorator to retry a seeded draw that produced a single-class dataset.

    The decorated function must take its seed as the keyword argument `seed`.
    Each retry replaces it with a child derived from the failing seed, so the
    retried draw is still reproducible.

    Args:
        max_retries: Maximum number of retry attempts (default: 1)

    Example:
        @retry_on_degenerate(max_retries=1)
        def draw(spec, *, seed):
            ...
    """
    def decorator(func):
        @wraps(func)
        def wrapper(*args, seed, **kwargs):
            seed = as_seed_sequence(seed)
            last_exception = None

            for attempt in range(max_retries + 1):  # +1 for initial attempt
                if attempt > 0:
                    seed = seed.spawn(1)[0]
                    warning(f"Retry attempt {attempt}/{max_retries} for {func.__name__} with a derived seed")
                try:
                    result = func(*args, seed=seed, **kwargs)
                    if attempt > 0:
                        debug(f"{func.__name__} succeeded on retry attempt {attempt}")
                    return result
                except DegenerateClassError as e:
                    last_exception = e
                    if attempt < max_retries:
                        warning(f"{func.__name__} drew a single-class dataset, will retry ({attempt + 1}/{max_retries})")

            raise DegenerateClassError(
                f"{func.__name__} still degenerate after {max_retries} retries: {last_exception}"
            )

        return wrapper
    return decorator


def ordered_map(func, items, workers=1):
    """
    Apply func to every item, results in input order regardless of completion
    order.

    Args:
        func: Callable of one argument
        items: Iterable of arguments
        workers (int): Thread count; 1 runs inline

    Returns:
        list
    """
    items = list(items)
    if workers is None or workers <= 1 or len(items) <= 1:
        return [func(item) for item in items]

    debug("ordered_map running %d tasks on %d workers", len(items), workers)
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(func, items))


def format_float(value):
    """
    17 significant digits, enough to round-trip any double.
    Non-finite values become None so JSON stays valid.
    """
    if value is None:
        return None
    value = float(value)
    if not math.isfinite(value):
        return None
    return format(value, '.17g')


def parse_float_list(text):
    """Parse '0.5,0.2,0.05' into [0.5, 0.2, 0.05]"""
    return [float(part) for part in str(text).split(',') if part.strip()]
