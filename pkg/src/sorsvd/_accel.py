"""Numba detection and the switch between compiled and pure-numpy kernels.

Set ``SORSVD_DISABLE_NUMBA=1`` to force the numpy fallback even when numba
is installed. ``SORSVD_THREADS`` caps BLAS and numba thread pools.
"""
import os

try:
    import numba
    HAVE_NUMBA = True
except ImportError:  # pragma: no cover - depends on environment
    numba = None
    HAVE_NUMBA = False


def _flag(name):
    return os.environ.get(name, "").strip().lower() in {"1", "true", "yes", "on"}


USE_NUMBA = HAVE_NUMBA and not _flag("SORSVD_DISABLE_NUMBA")


def njit(func):
    """Compile ``func`` with numba (cached) when available, else return it."""
    if HAVE_NUMBA:
        return numba.njit(cache=True)(func)
    return func


def backend():
    return "numba" if USE_NUMBA else "numpy"


_thread_limiter = None


def apply_thread_cap(n_threads=None):
    """Cap kernel parallelism from the argument or ``SORSVD_THREADS``.

    Returns the applied cap, or None when no cap was requested.
    """
    global _thread_limiter
    if n_threads is None:
        raw = os.environ.get("SORSVD_THREADS", "").strip()
        if not raw:
            return None
        n_threads = int(raw)
    if n_threads < 1:
        raise ValueError("SORSVD_THREADS must be a positive integer")
    try:
        from threadpoolctl import threadpool_limits
    except ImportError:  # pragma: no cover
        pass
    else:
        _thread_limiter = threadpool_limits(limits=n_threads)
    if HAVE_NUMBA:
        numba.set_num_threads(min(n_threads, numba.config.NUMBA_NUM_THREADS))
    return n_threads
