"""
Optional numba acceleration for the per-step kernels.

When numba is not importable the kernels run as plain Python; results are
the same, only slower.
"""

try:
    from numba import njit

    numba_available = True
except ImportError:
    numba_available = False

    def njit(*args, **kwargs):
        """Stand-in decorator that returns the function unchanged."""
        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]

        def decorator(func):
            return func

        return decorator


__all__ = ["njit", "numba_available"]
