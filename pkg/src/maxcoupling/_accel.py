"""Backend selection for the hot kernels.

Set ``MAXCOUPLING_DISABLE_NUMBA=1`` before import to force the pure-numpy
paths. ``MAXCOUPLING_THREADS`` caps the numba thread pool used by the
parallel random-walk kernel.
"""

import os

_FALSY = {"", "0", "false", "no", "off"}


def _env_flag(name: str) -> bool:
    return os.environ.get(name, "").strip().lower() not in _FALSY


try:
    import numba
except ImportError:  # pragma: no cover - numba is a declared dependency
    numba = None

NUMBA_AVAILABLE = numba is not None
if NUMBA_AVAILABLE and "NUMBA_THREADING_LAYER" not in os.environ:
    # skip an outdated system TBB; numba falls back to the next layer that loads
    numba.config.THREADING_LAYER_PRIORITY = ["omp", "workqueue", "tbb"]
USE_NUMBA = NUMBA_AVAILABLE and not _env_flag("MAXCOUPLING_DISABLE_NUMBA")


def thread_cap() -> int | None:
    raw = os.environ.get("MAXCOUPLING_THREADS", "").strip()
    if not raw:
        return None
    try:
        cap = int(raw)
    except ValueError:
        return None
    return cap if cap > 0 else None


def apply_thread_cap() -> None:
    if not USE_NUMBA:
        return
    cap = thread_cap()
    if cap is not None:
        numba.set_num_threads(min(cap, numba.config.NUMBA_NUM_THREADS))


def backend_name() -> str:
    return "numba" if USE_NUMBA else "numpy"
