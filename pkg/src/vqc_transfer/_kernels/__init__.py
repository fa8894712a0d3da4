"""Hot per-sample kernels behind a backend switch.

The compiled extension ``_ckernels`` is used when it imports; otherwise the
vectorized numpy module ``_fallback`` takes over. Set ``QVA_BACKEND=python``
to force the fallback. ``QVA_THREADS`` caps the number of worker threads used
to split large batches (0 or unset means one per CPU). Rows are computed
independently and concatenated in input order, so results do not depend on
the thread count.
"""
import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

from . import _fallback

try:
    from . import _ckernels
except ImportError:  # pragma: no cover - depends on the build
    _ckernels = None

BACKENDS = {"python": _fallback}
if _ckernels is not None:
    BACKENDS["compiled"] = _ckernels

_requested = os.environ.get("QVA_BACKEND", "").strip().lower()
if _requested and _requested not in BACKENDS:
    raise ImportError(f"QVA_BACKEND={_requested!r} is not available; have {sorted(BACKENDS)}")
BACKEND = _requested or ("compiled" if _ckernels is not None else "python")

# Below this many rows a batch is never split across threads.
_MIN_ROWS_PER_THREAD = 4096


def _thread_count():
    raw = os.environ.get("QVA_THREADS", "0").strip() or "0"
    n = int(raw)
    if n < 0:
        raise ValueError(f"QVA_THREADS must be >= 0, got {n}")
    return n or (os.cpu_count() or 1)


def _prepare(enc, var, theta, h, psi0):
    return (
        np.ascontiguousarray(enc, dtype=np.int32),
        np.ascontiguousarray(var, dtype=np.int32),
        np.ascontiguousarray(theta, dtype=np.float64),
        np.ascontiguousarray(h, dtype=np.complex128),
        np.ascontiguousarray(psi0, dtype=np.complex128),
    )


def _rows(fn, arrays, rest, backend):
    arrays = [np.ascontiguousarray(a, dtype=np.float64) for a in arrays]
    n = arrays[0].shape[0]
    workers = min(_thread_count(), n // _MIN_ROWS_PER_THREAD)
    if workers <= 1:
        return fn(*rest[:3], *arrays, *rest[3:])
    bounds = np.linspace(0, n, workers + 1).astype(int)
    chunks = [[a[lo:hi] for a in arrays] for lo, hi in zip(bounds[:-1], bounds[1:])]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        parts = list(pool.map(lambda c: fn(*rest[:3], *c, *rest[3:]), chunks))
    return np.concatenate(parts, axis=0)


def _module(backend):
    return BACKENDS[backend or BACKEND]


def forward_batch(enc, var, theta, xs, h, psi0, backend=None):
    rest = _prepare(enc, var, theta, h, psi0)
    return _rows(_module(backend).forward_batch, [xs], rest, backend)


def grad_theta_batch(enc, var, theta, xs, h, psi0, backend=None):
    rest = _prepare(enc, var, theta, h, psi0)
    return _rows(_module(backend).grad_theta_batch, [xs], rest, backend)


def grad_x_batch(enc, var, theta, xs_left, xs_right, h, psi0, backend=None):
    rest = _prepare(enc, var, theta, h, psi0)
    return _rows(_module(backend).grad_x_batch, [xs_left, xs_right], rest, backend)
