"""Labeled simple graphs on bit rows, exact K_l / independent-set counting,
and the reference constructions (Q-family, Hamming/Cayley graphs, blow-ups).

Vertices are labeled ``1..n`` in every public function.  Internally vertex
``v`` occupies bit ``v - 1`` of each adjacency row.
"""
from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import comb, factorial
from typing import Iterable, NamedTuple

import numpy as np

from . import _backend

Q = "Q"
QBAR = "Qbar"
TIE = "tie"
FAMILIES = (Q, QBAR)


class GraphError(ValueError):
    """Invalid graph input (bad vertex, self-loop, malformed file)."""


def _bits(mask: int):
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


class Graph:
    """Immutable labeled simple graph.

    ``rows[i]`` is an int whose set bits are the (0-indexed) neighbours of
    vertex ``i + 1``.  ``vertex_transitive`` is a promise made by the
    constructor (e.g. Cayley graphs) that lets counting use one vertex.
    """

    __slots__ = ("n", "rows", "vertex_transitive", "_words")

    def __init__(self, n: int, rows: Iterable[int], *, vertex_transitive: bool = False,
                 validate: bool = True):
        rows = tuple(rows)
        if n < 0 or len(rows) != n:
            raise GraphError(f"expected {n} adjacency rows, got {len(rows)}")
        if validate:
            full = (1 << n) - 1
            for i, row in enumerate(rows):
                if row & ~full or row < 0:
                    raise GraphError(f"row {i + 1} references a vertex outside 1..{n}")
                if row >> i & 1:
                    raise GraphError(f"self-loop at vertex {i + 1}")
                for j in _bits(row):
                    if not rows[j] >> i & 1:
                        raise GraphError(f"asymmetric adjacency between {i + 1} and {j + 1}")
        self.n = n
        self.rows = rows
        self.vertex_transitive = vertex_transitive
        self._words = None

    # -- construction -----------------------------------------------------
    @classmethod
    def from_edge_mask(cls, n: int, mask: int) -> "Graph":
        """Graph whose edge ``k`` (pairs ``i<j`` in lexicographic order) is bit ``k``."""
        rows = [0] * n
        k = 0
        for i in range(n):
            for j in range(i + 1, n):
                if mask >> k & 1:
                    rows[i] |= 1 << j
                    rows[j] |= 1 << i
                k += 1
        return cls(n, rows, validate=False)

    # -- views --------------------------------------------------------------
    @property
    def words(self) -> np.ndarray:
        """Rows packed as an ``(n, ceil(n/64))`` uint64 array (cached)."""
        if self._words is None:
            nwords = (self.n + 63) // 64
            buf = b"".join(row.to_bytes(nwords * 8, "little") for row in self.rows)
            words = np.frombuffer(buf, dtype=np.uint64).reshape(self.n, nwords).copy()
            words.setflags(write=False)
            self._words = words
        return self._words

    def has_edge(self, u: int, v: int) -> bool:
        return bool(self.rows[u - 1] >> (v - 1) & 1)

    def degree(self, v: int) -> int:
        return self.rows[v - 1].bit_count()

    def neighbors(self, v: int) -> set[int]:
        return {j + 1 for j in _bits(self.rows[v - 1])}

    def edges(self) -> list[tuple[int, int]]:
        out = []
        for i, row in enumerate(self.rows):
            out.extend((i + 1, j + 1) for j in _bits(row >> (i + 1) << (i + 1)))
        return out

    @property
    def num_edges(self) -> int:
        return sum(row.bit_count() for row in self.rows) // 2

    def edge_mask(self) -> int:
        mask = 0
        k = 0
        for i in range(self.n):
            row = self.rows[i]
            for j in range(i + 1, self.n):
                if row >> j & 1:
                    mask |= 1 << k
                k += 1
        return mask

    def relabel(self, mapping: dict[int, int]) -> "Graph":
        """Graph with vertex ``v`` renamed ``mapping[v]`` (a permutation of 1..n)."""
        if sorted(mapping) != list(range(1, self.n + 1)) or sorted(mapping.values()) != sorted(mapping):
            raise GraphError("relabeling must be a permutation of the vertex set")
        rows = [0] * self.n
        for i, row in enumerate(self.rows):
            new = 0
            for j in _bits(row):
                new |= 1 << (mapping[j + 1] - 1)
            rows[mapping[i + 1] - 1] = new
        return Graph(self.n, rows, validate=False)

    def induced(self, vertices: Iterable[int]) -> "Graph":
        """Induced subgraph on ``vertices``, relabeled ``1..k`` in the given order."""
        vs = [v - 1 for v in vertices]
        pos = {v: i for i, v in enumerate(vs)}
        rows = []
        for v in vs:
            row = 0
            for j in _bits(self.rows[v]):
                if j in pos:
                    row |= 1 << pos[j]
            rows.append(row)
        return Graph(len(vs), rows, validate=False)

    # -- dunder ---------------------------------------------------------------
    def __eq__(self, other):
        return isinstance(other, Graph) and self.n == other.n and self.rows == other.rows

    def __hash__(self):
        return hash((self.n, self.rows))

    def __repr__(self):
        return f"Graph(n={self.n}, m={self.num_edges})"


@dataclass(frozen=True)
class CountReport:
    l: int
    n: int
    cliques: int
    independents: int

    @property
    def total(self) -> int:
        return comb(self.n, self.l)

    @property
    def clique_density(self) -> float:
        return self.cliques / self.total if self.total else 0.0

    @property
    def independent_density(self) -> float:
        return self.independents / self.total if self.total else 0.0


def from_edge_list(n: int, edges: Iterable[tuple[int, int]]) -> Graph:
    if n < 0:
        raise GraphError("vertex count must be nonnegative")
    rows = [0] * n
    for u, v in edges:
        if not (1 <= u <= n and 1 <= v <= n):
            raise GraphError(f"edge ({u}, {v}) has an endpoint outside 1..{n}")
        if u == v:
            raise GraphError(f"self-loop at vertex {u}")
        rows[u - 1] |= 1 << (v - 1)
        rows[v - 1] |= 1 << (u - 1)
    return Graph(n, rows, validate=False)


def empty_graph(n: int) -> Graph:
    return Graph(n, [0] * n, validate=False)


def complete_graph(n: int) -> Graph:
    full = (1 << n) - 1
    return Graph(n, [full ^ (1 << i) for i in range(n)], validate=False)


def complement(G: Graph) -> Graph:
    full = (1 << G.n) - 1
    rows = [full ^ row ^ (1 << i) for i, row in enumerate(G.rows)]
    return Graph(G.n, rows, vertex_transitive=G.vertex_transitive, validate=False)


def count_cliques_through(G: Graph, v: int, l: int, *, threads=None, backend=None) -> int:
    """Number of ``l``-cliques containing vertex ``v``."""
    if l == 0:
        return 0
    return _backend.count_cliques_in(G, G.rows[v - 1], l - 1, threads=threads, backend=backend)


def _clique_total(G: Graph, l: int, threads, backend, transitive) -> int:
    if l == 0:
        return 1
    if l > G.n:
        return 0
    if transitive and G.vertex_transitive and l >= 1:
        through = count_cliques_through(G, 1, l, threads=threads, backend=backend)
        total, rem = divmod(G.n * through, l)
        assert rem == 0, "vertex-transitive scaling produced a non-integer count"
        return total
    return _backend.count_cliques_in(G, (1 << G.n) - 1, l, threads=threads, backend=backend)


def count_cliques(G: Graph, l: int, *, threads=None, backend=None,
                  transitive: bool = True) -> CountReport:
    """Exact numbers of ``l``-cliques and independent ``l``-sets of ``G``.

    For graphs flagged vertex-transitive the count through vertex 1 is scaled
    by ``n / l`` unless ``transitive=False``.
    """
    if l < 0:
        raise GraphError("subset size must be nonnegative")
    cliques = _clique_total(G, l, threads, backend, transitive)
    independents = _clique_total(complement(G), l, threads, backend, transitive)
    return CountReport(l=l, n=G.n, cliques=cliques, independents=independents)


def q_graph(n: int, b: int, family: str = Q) -> Graph:
    """``Q_{n,b}`` (clique on vertices 1..b, rest isolated) or its complement."""
    if not 0 <= b <= n:
        raise GraphError(f"clique size {b} outside 0..{n}")
    if family not in FAMILIES:
        raise GraphError(f"unknown family {family!r}")
    block = (1 << b) - 1
    rows = [block ^ (1 << i) if i < b else 0 for i in range(n)]
    G = Graph(n, rows, validate=False)
    return G if family == Q else complement(G)


def hamming_graph(dim: int, distances: Iterable[int]) -> Graph:
    """Cayley graph on ``{0,1}^dim``: vectors adjacent iff their Hamming
    distance lies in ``distances``.  Vertex ``x + 1`` is the vector ``x``."""
    distances = set(distances)
    if not 0 <= dim <= 16:
        raise GraphError("dimension must be in 0..16")
    if not distances <= set(range(1, dim + 1)):
        raise GraphError(f"distances must lie in 1..{dim}")
    N = 1 << dim
    weight = np.array([bin(x).count("1") for x in range(N)], dtype=np.int64)
    allowed = np.zeros(dim + 1, dtype=bool)
    allowed[sorted(distances)] = True
    nwords = (N + 63) // 64
    ids = np.arange(N, dtype=np.int64)
    words = np.zeros((N, nwords), dtype=np.uint64)
    step = 512
    for start in range(0, N, step):
        block = ids[start:start + step, None] ^ ids[None, :]
        adj = allowed[weight[block]]
        packed = np.packbits(adj, axis=1, bitorder="little")
        pad = nwords * 8 - packed.shape[1]
        if pad:
            packed = np.pad(packed, ((0, 0), (0, pad)))
        words[start:start + step] = packed.view(np.uint64)
    rows = [int.from_bytes(words[i].tobytes(), "little") for i in range(N)]
    G = Graph(N, rows, vertex_transitive=True, validate=False)
    words.setflags(write=False)
    G._words = words
    return G


def _stirling2_table(size: int) -> list[list[int]]:
    table = [[0] * (size + 1) for _ in range(size + 1)]
    table[0][0] = 1
    for i in range(1, size + 1):
        for j in range(1, i + 1):
            table[i][j] = j * table[i - 1][j] + table[i - 1][j - 1]
    return table


# SURJECTIONS[l][k] = k! S(l, k): maps from an l-set onto a k-set
SURJECTIONS = [[factorial(k) * s for k, s in enumerate(row)] for row in _stirling2_table(6)]


def blowup_limit_density(H: Graph, l: int, kind: str = "clique", *, threads=None, backend=None) -> float:
    """Limit of d(K_l) (or d(K̄_l)) in the blow-up of ``H`` where each vertex
    becomes a clique of size m and each edge a complete bipartite graph,
    as m tends to infinity."""
    if not 1 <= l <= 6:
        raise GraphError("blow-up densities are tabulated for 1 <= l <= 6")
    N = H.n
    if N == 0:
        raise GraphError("blow-up of the empty vertex set is undefined")
    if kind == "clique":
        num = sum(SURJECTIONS[l][k] * count_cliques(H, k, threads=threads, backend=backend).cliques
                  for k in range(1, l + 1))
    elif kind == "independent":
        num = factorial(l) * count_cliques(H, l, threads=threads, backend=backend).independents
    else:
        raise GraphError(f"unknown kind {kind!r}")
    return float(Fraction(num, N ** l))


class EditDistance(NamedTuple):
    family: str
    t: int
    distance: float
    edits: int


def edit_distance_to_q(G: Graph) -> EditDistance:
    """Closest member of the Q-family (clique on 1..t, or its complement),
    measured in edits divided by n^2.  Ties keep the first of Q_0..Q_n,
    then Qbar_0..Qbar_n."""
    n = G.n
    if n < 1:
        raise GraphError("edit distance needs at least one vertex")
    m = G.num_edges
    pairs = comb(n, 2)
    inside = [0] * (n + 1)  # edges of G within vertices 1..t
    for t in range(1, n + 1):
        inside[t] = inside[t - 1] + (G.rows[t - 1] & ((1 << (t - 1)) - 1)).bit_count()
    best = None
    for family in FAMILIES:
        for t in range(n + 1):
            if family == Q:
                edits = (m - inside[t]) + (comb(t, 2) - inside[t])
            else:
                edits = inside[t] + (pairs - comb(t, 2) - (m - inside[t]))
            if best is None or edits < best[2]:
                best = (family, t, edits)
    family, t, edits = best
    return EditDistance(family, t, edits / n ** 2, edits)


# -- text format ------------------------------------------------------------

def format_graph(G: Graph) -> str:
    edges = G.edges()
    lines = [f"{G.n} {len(edges)}"] + [f"{u} {v}" for u, v in edges]
    return "\n".join(lines) + "\n"


def parse_graph(text: str) -> Graph:
    tokens = [line.split() for line in text.splitlines() if line.strip()]
    if not tokens or len(tokens[0]) != 2:
        raise GraphError("graph header must be 'n m'")
    try:
        n, m = int(tokens[0][0]), int(tokens[0][1])
        edges = [(int(a), int(b)) for a, b in tokens[1:]]
    except ValueError as exc:
        raise GraphError(f"malformed graph file: {exc}") from None
    if len(edges) != m:
        raise GraphError(f"header announces {m} edges, file lists {len(edges)}")
    return from_edge_list(n, edges)


def read_graph(path) -> Graph:
    with open(path, encoding="utf-8") as fh:
        return parse_graph(fh.read())


def write_graph(G: Graph, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_graph(G))
