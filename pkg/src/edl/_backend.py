"""Kernel selection.

The compiled extension is used when it imports; setting ``EDL_PURE=1`` forces
the pure-Python kernels.  ``BACKEND`` names the active one.
"""
import os

import numpy as np

from . import _pykernels

try:
    from . import _kernels as _ext
except ImportError:  # extension not built
    _ext = None

if os.environ.get("EDL_PURE", "").strip() not in ("", "0"):
    _ext = None

BACKEND = "cython" if _ext is not None else "python"


def available():
    return ("cython", "python") if _ext is not None else ("python",)


def default_threads():
    env = os.environ.get("EDL_THREADS")
    if env:
        try:
            return max(1, int(env))
        except ValueError:
            pass
    return os.cpu_count() or 1


def pack_words(mask, n):
    """Pack an int bit mask over ``n`` positions into little-endian uint64 words."""
    nwords = (n + 63) // 64
    return np.frombuffer(mask.to_bytes(nwords * 8, "little"), dtype=np.uint64).copy()


def count_cliques_in(graph, cand, l, threads=None, backend=None):
    """``l``-cliques of ``graph`` inside the vertex mask ``cand`` (0-indexed bits)."""
    backend = backend or BACKEND
    if backend == "cython":
        if _ext is None:
            raise RuntimeError("compiled kernels are not available")
        threads = threads or default_threads()
        return _ext.count_cliques_in(graph.words, pack_words(cand, graph.n), l, threads)
    return _pykernels.count_cliques_in(graph.rows, cand, l)
