import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from edl import _backend
from edl.graph import Graph, count_cliques, hamming_graph

needs_ext = pytest.mark.skipif("cython" not in _backend.available(),
                               reason="compiled kernels not built")


def random_graph(n, density, seed):
    rng = np.random.default_rng(seed)
    rows = [0] * n
    for i in range(n):
        for j in range(i + 1, n):
            if rng.random() < density:
                rows[i] |= 1 << j
                rows[j] |= 1 << i
    return Graph(n, rows)


def test_backend_name():
    assert _backend.BACKEND in _backend.available()
    assert "python" in _backend.available()


def test_pack_words():
    w = _backend.pack_words((1 << 70) | 1, 130)
    assert w.dtype == np.uint64 and list(w) == [1, 1 << 6, 0]


@needs_ext
@pytest.mark.parametrize("n,density", [(1, 0.5), (63, 0.5), (64, 0.6), (65, 0.4), (150, 0.5)])
def test_parity_random(n, density):
    G = random_graph(n, density, n)
    for l in range(0, 6):
        a = count_cliques(G, l, backend="cython", threads=2)
        b = count_cliques(G, l, backend="python")
        assert (a.cliques, a.independents) == (b.cliques, b.independents)


@needs_ext
@settings(max_examples=40, deadline=None)
@given(st.integers(2, 90), st.floats(0, 1), st.integers(0, 2**32 - 1), st.integers(1, 5))
def test_parity_property(n, density, seed, l):
    G = random_graph(n, density, seed)
    assert (count_cliques(G, l, backend="cython").cliques
            == count_cliques(G, l, backend="python").cliques)


@needs_ext
def test_parity_cayley():
    G = hamming_graph(9, {1, 4, 5, 8})
    for l in (3, 4):
        assert (count_cliques(G, l, backend="cython").cliques
                == count_cliques(G, l, backend="python").cliques)


@needs_ext
def test_thread_count_does_not_change_result():
    G = random_graph(120, 0.55, 7)
    counts = {count_cliques(G, 4, backend="cython", threads=t).cliques for t in (1, 2, 3)}
    assert len(counts) == 1


def test_unavailable_backend(monkeypatch):
    monkeypatch.setattr(_backend, "_ext", None)
    with pytest.raises(RuntimeError):
        _backend.count_cliques_in(random_graph(4, 1, 0), 0b1111, 2, backend="cython")


def test_default_threads(monkeypatch):
    monkeypatch.setenv("EDL_THREADS", "3")
    assert _backend.default_threads() == 3
    monkeypatch.setenv("EDL_THREADS", "junk")
    assert _backend.default_threads() >= 1
