"""Small shared helpers: thread pool sizing, JSON encoding, sequences."""

import os
from concurrent.futures import ThreadPoolExecutor

import numpy as np

__all__ = [
    "thread_count",
    "thread_map",
    "jsonify",
    "complex_to_pair",
    "pair_to_complex",
    "geometric_extrapolate",
]

_THREADS_ENV = "COMPLEX_STURM_THREADS"


def thread_count():
    """Worker count for parallel sections.

    Reads the ``COMPLEX_STURM_THREADS`` environment variable; falls back to
    the CPU count. Always at least 1, capped at 64.
    """
    raw = os.environ.get(_THREADS_ENV, "").strip()
    if raw:
        try:
            n = int(raw)
        except ValueError:
            n = 1
    else:
        n = os.cpu_count() or 1
    return max(1, min(n, 64))


def thread_map(fn, items):
    """Map ``fn`` over ``items``, in a thread pool when more than one worker
    is configured. Order of results matches ``items``; exceptions propagate.
    """
    items = list(items)
    n = thread_count()
    if n <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ThreadPoolExecutor(max_workers=min(n, len(items))) as pool:
        return list(pool.map(fn, items))


def complex_to_pair(z):
    """Encode a complex number as a JSON-safe ``[re, im]`` pair."""
    z = complex(z)
    return [z.real, z.imag]


def pair_to_complex(pair):
    """Decode a ``[re, im]`` pair (or a bare real) to a complex number."""
    if isinstance(pair, (list, tuple)):
        if len(pair) != 2:
            raise ValueError("complex pair must have exactly two entries")
        return complex(float(pair[0]), float(pair[1]))
    return complex(float(pair), 0.0)


def jsonify(obj):
    """Recursively convert numpy scalars/arrays and complex numbers into
    JSON-serializable structures (complex -> [re, im], inf -> 'inf')."""
    if isinstance(obj, dict):
        return {str(k): jsonify(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonify(v) for v in obj]
    if isinstance(obj, np.ndarray):
        return [jsonify(v) for v in obj.tolist()]
    if isinstance(obj, (complex, np.complexfloating)):
        return complex_to_pair(obj)
    if isinstance(obj, (float, np.floating)):
        f = float(obj)
        if np.isposinf(f):
            return "inf"
        if np.isneginf(f):
            return "-inf"
        return f
    if isinstance(obj, (bool, np.bool_)):
        return bool(obj)
    if isinstance(obj, (int, np.integer)):
        return int(obj)
    return obj


def geometric_extrapolate(values, min_tail=4, ratio_cap=0.95, ratio_spread=0.25):
    """Extrapolate the limit of a sequence whose increments decay roughly
    geometrically.

    Parameters
    ----------
    values : sequence of float or complex
        Successive approximations ``v_k``.
    min_tail : int
        How many trailing increment ratios must be available and consistent.
    ratio_cap : float
        Ratios must stay below this for the tail to count as contracting.
    ratio_spread : float
        Maximum allowed relative spread of the trailing ratios.

    Returns
    -------
    (limit, remainder) or None
        ``limit`` is the extrapolated value, ``remainder`` an estimate of
        ``|limit - values[-1]|``. ``None`` when the tail is not consistently
        geometric.
    """
    v = np.asarray(values)
    if v.size < min_tail + 2:
        return None
    d = np.diff(v)
    tail = d[-(min_tail + 1):]
    mags = np.abs(tail)
    if np.any(mags == 0.0):
        # Increments vanished: the sequence already settled.
        return v[-1], 0.0
    ratios = mags[1:] / mags[:-1]
    q = float(np.mean(ratios))
    if q >= ratio_cap or q <= 0.0:
        return None
    if np.max(np.abs(ratios - q)) > ratio_spread * max(q, 1e-3):
        return None
    # Sum the remaining geometric tail: next increment ~ d[-1] * q.
    last = tail[-1]
    remainder = last * q / (1.0 - q)
    limit = v[-1] + remainder
    return limit, abs(remainder)
