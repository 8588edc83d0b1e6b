"""Optional numba acceleration with a pure-numpy fallback.

The hot numerical kernels in :mod:`wdbounds._kernels` are written so that the
same source runs either under ``numba.njit`` or as plain numpy code.  Which
path is taken is decided once, at import time:

* if the environment variable ``WDBOUNDS_JIT`` is set to ``0``, ``false`` or
  ``off``, the pure-numpy path is used;
* otherwise numba is used when it can be imported, and the fallback is used
  when it cannot.

``JIT_ENABLED`` records the decision so callers (and the benchmark script)
can report which path is active.
"""

from __future__ import annotations

import os

__all__ = ["JIT_ENABLED", "njit"]


def _jit_requested() -> bool:
    value = os.environ.get("WDBOUNDS_JIT", "1").strip().lower()
    return value not in ("0", "false", "off", "no")


if _jit_requested():
    try:
        from numba import njit

        JIT_ENABLED = True
    except ImportError:  # pragma: no cover - exercised only without numba
        JIT_ENABLED = False
else:
    JIT_ENABLED = False

if not JIT_ENABLED:

    def njit(*args, **kwargs):
        """No-op replacement for ``numba.njit``."""

        if len(args) == 1 and callable(args[0]) and not kwargs:
            return args[0]

        def wrap(func):
            return func

        return wrap
