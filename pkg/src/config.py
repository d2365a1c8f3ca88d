"""
Environment-backed defaults for the command line front end.

Values come from the process environment, optionally populated from a
``.env`` file in the working directory or the project root. Command line
flags always take precedence over anything loaded here.
"""

import logging
import os
from pathlib import Path

import numpy as np
from dotenv import load_dotenv

from .errors import ConfigError

DEFAULT_ALPHA = 0.85
DEFAULT_SEED = 0
DEFAULT_LOG_LEVEL = "WARNING"

# Seeds are 64-bit integers; negative values wrap to their two's complement
SEED_MASK = 2**64 - 1


def load_env():
    """
    Load the first ``.env`` file found into the environment.

    Returns:
        Path: the file that was loaded, or None if there was none
    """
    env_paths = [
        Path(".env"),
        Path(__file__).resolve().parent.parent / ".env",
    ]
    for env_path in env_paths:
        if env_path.exists():
            load_dotenv(env_path)
            return env_path
    return None


def _read(name, default, parse):
    raw = os.environ.get(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        return parse(raw.strip())
    except ValueError as e:
        raise ConfigError(f"{name}={raw!r} is not valid: {e}") from e


def default_alpha():
    """Damping factor from MPPR_ALPHA, 0.85 when unset."""
    alpha = _read("MPPR_ALPHA", DEFAULT_ALPHA, float)
    if not 0.0 < alpha < 1.0:
        raise ConfigError(f"MPPR_ALPHA must lie in (0, 1), got {alpha}")
    return alpha


def default_seed():
    return _read("MPPR_SEED", DEFAULT_SEED, int)


def seed_bits(seed):
    """Map a signed or unsigned 64-bit seed onto the unsigned range numpy accepts."""
    return int(seed) & SEED_MASK


def make_rng(seed):
    return np.random.default_rng(seed_bits(seed))


def default_workers():
    """Thread count for concurrent rounds from MPPR_WORKERS, CPU count otherwise."""
    workers = _read("MPPR_WORKERS", os.cpu_count() or 1, int)
    if workers < 1:
        raise ConfigError(f"MPPR_WORKERS must be >= 1, got {workers}")
    return workers


def default_log_level():
    name = os.environ.get("MPPR_LOG_LEVEL", DEFAULT_LOG_LEVEL).strip().upper()
    level = logging.getLevelName(name)
    if not isinstance(level, int):
        raise ConfigError(f"MPPR_LOG_LEVEL={name!r} is not a logging level")
    return level
