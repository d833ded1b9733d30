"""Compression (shifting) on set systems and graphs.

Members of a :class:`SetSystem` are bitmasks over the ground set ``1..n``
(element ``i`` is bit ``i - 1``).  Every operation that takes a system also
accepts a :class:`~edl.graph.Graph`, treated as its 2-uniform edge system,
and answers in kind.
"""
from __future__ import annotations

from functools import lru_cache
from itertools import islice, permutations
from math import perm
from typing import Iterable, NamedTuple

import numpy as np

from .graph import Graph, GraphError, _bits


class SetSystemError(ValueError):
    pass


class SetSystem:
    """A family of distinct subsets of the ordered ground set ``1..ground_n``."""

    __slots__ = ("ground_n", "members")

    def __init__(self, ground_n: int, members: Iterable[int] = ()):
        members = frozenset(members)
        full = (1 << ground_n) - 1
        for m in members:
            if m < 0 or m & ~full:
                raise SetSystemError(f"member {sorted(_elements(m))} leaves the ground set 1..{ground_n}")
        self.ground_n = ground_n
        self.members = members

    @classmethod
    def from_sets(cls, ground_n: int, sets: Iterable[Iterable[int]]) -> "SetSystem":
        masks = []
        for s in sets:
            mask = 0
            for e in s:
                if not 1 <= e <= ground_n:
                    raise SetSystemError(f"element {e} outside 1..{ground_n}")
                mask |= 1 << (e - 1)
            masks.append(mask)
        return cls(ground_n, masks)

    @classmethod
    def from_graph(cls, G: Graph) -> "SetSystem":
        return cls(G.n, ((1 << (u - 1)) | (1 << (v - 1)) for u, v in G.edges()))

    def to_graph(self) -> Graph:
        edges = []
        for m in self.members:
            if m.bit_count() != 2:
                raise SetSystemError("only 2-uniform systems convert to graphs")
            u, v = _elements(m)
            edges.append((u, v))
        from .graph import from_edge_list
        return from_edge_list(self.ground_n, edges)

    def sets(self) -> list[tuple[int, ...]]:
        """Members as sorted element tuples, in a canonical order."""
        return sorted((_elements(m) for m in self.members), key=lambda s: (len(s), s))

    def __len__(self):
        return len(self.members)

    def __contains__(self, s):
        if not isinstance(s, int):
            s = sum(1 << (e - 1) for e in s)
        return s in self.members

    def __eq__(self, other):
        return (isinstance(other, SetSystem) and self.ground_n == other.ground_n
                and self.members == other.members)

    def __hash__(self):
        return hash((self.ground_n, self.members))

    def __repr__(self):
        return f"SetSystem({self.ground_n}, {self.sets()})"


def _elements(mask: int) -> tuple[int, ...]:
    return tuple(b + 1 for b in _bits(mask))


def _check_pair(n, u, v):
    if u == v:
        raise SetSystemError("shift needs two distinct elements")
    if not (1 <= u <= n and 1 <= v <= n):
        raise SetSystemError(f"shift elements ({u}, {v}) outside 1..{n}")


# -- the shift itself ---------------------------------------------------------

def _shift_members(members: frozenset, a: int, b: int) -> frozenset:
    ubit, vbit = 1 << a, 1 << b
    out = set()
    for m in members:
        if m & ubit and not m & vbit:
            moved = m ^ ubit ^ vbit
            if moved not in members:
                out.add(moved)
                continue
        out.add(m)
    return frozenset(out)


def _graph_movers(G: Graph, a: int, b: int) -> int:
    # neighbours w of a (w != b) whose edge aw moves to bw
    return G.rows[a] & ~G.rows[b] & ~(1 << b)


def _shift_graph(G: Graph, a: int, b: int) -> Graph:
    movers = _graph_movers(G, a, b)
    if not movers:
        return G
    rows = list(G.rows)
    rows[a] &= ~movers
    rows[b] |= movers
    swap = (1 << a) | (1 << b)
    for w in _bits(movers):
        rows[w] ^= swap
    return Graph(G.n, rows, validate=False)


def shift(F, u: int, v: int):
    """Apply S_{u->v}: each member containing u but not v trades u for v,
    unless the traded set is already present."""
    n = F.n if isinstance(F, Graph) else F.ground_n
    _check_pair(n, u, v)
    if isinstance(F, Graph):
        return _shift_graph(F, u - 1, v - 1)
    return SetSystem(F.ground_n, _shift_members(F.members, u - 1, v - 1))


def dominates(F, u: int, v: int) -> bool:
    """True iff ``u`` dominates ``v``, i.e. S_{v->u} leaves ``F`` unchanged."""
    n = F.n if isinstance(F, Graph) else F.ground_n
    _check_pair(n, u, v)
    if isinstance(F, Graph):
        return not _graph_movers(F, v - 1, u - 1)
    return _shift_members(F.members, v - 1, u - 1) == F.members


def is_shifted(F) -> bool:
    n = F.n if isinstance(F, Graph) else F.ground_n
    return all(dominates(F, i, j) for i in range(1, n + 1) for j in range(i + 1, n + 1))


def potential(F) -> int:
    """Sum over members of the sum of their elements; shifts toward smaller
    labels strictly decrease it."""
    sets = F.edges() if isinstance(F, Graph) else (_elements(m) for m in F.members)
    return sum(sum(s) for s in sets)


def shift_to_fixpoint(F):
    """Shift toward smaller labels until the result is shifted.

    Pairs ``(i, j)``, ``i < j``, are swept lexicographically applying S_{j->i};
    the sweep restarts after every change.
    """
    n = F.n if isinstance(F, Graph) else F.ground_n
    current = F
    changed = True
    while changed:
        changed = False
        for i in range(1, n + 1):
            for j in range(i + 1, n + 1):
                nxt = shift(current, j, i)
                if nxt != current:
                    current = nxt
                    changed = True
                    break
            if changed:
                break
    return current


# -- threshold graphs -----------------------------------------------------------

UNIVERSAL = "universal"
ISOLATED = "isolated"


class ThresholdCheck(NamedTuple):
    """Outcome of threshold recognition.

    ``order`` lists the vertices so each is adjacent to all (``universal``)
    or none (``isolated``) of its predecessors; ``kinds`` says which.  Both
    are ``None`` and ``reason`` explains the failure otherwise.
    """
    is_threshold: bool
    order: tuple[int, ...] | None
    kinds: tuple[str, ...] | None
    reason: str | None

    def __bool__(self):
        return self.is_threshold


def is_threshold(G: Graph) -> ThresholdCheck:
    """Recognise threshold graphs by peeling universal or isolated vertices.

    The lowest-labeled peelable vertex goes first; a lone remaining vertex
    counts as universal.
    """
    if isinstance(G, SetSystem):
        G = G.to_graph()
    remaining = (1 << G.n) - 1
    degree = [row.bit_count() for row in G.rows]
    removed, kinds = [], []
    left = G.n
    while remaining:
        for v in _bits(remaining):
            if degree[v] == left - 1:
                kind = UNIVERSAL
                break
            if degree[v] == 0:
                kind = ISOLATED
                break
        else:
            stuck = sorted(b + 1 for b in _bits(remaining))
            degs = {b + 1: degree[b] for b in _bits(remaining)}
            return ThresholdCheck(False, None, None,
                                  f"no universal or isolated vertex among {stuck} (degrees {degs})")
        remaining &= ~(1 << v)
        left -= 1
        for w in _bits(G.rows[v] & remaining):
            degree[w] -= 1
        removed.append(v + 1)
        kinds.append(kind)
    return ThresholdCheck(True, tuple(reversed(removed)), tuple(reversed(kinds)), None)


def shifted_relabeling(check: ThresholdCheck) -> dict[int, int]:
    """Relabeling that makes a threshold graph shifted: universal vertices of
    the witness order in reverse, then isolated ones in order."""
    if not check.is_threshold:
        raise GraphError("relabeling needs a threshold witness")
    good = [v for v, k in zip(check.order, check.kinds) if k == UNIVERSAL]
    bad = [v for v, k in zip(check.order, check.kinds) if k == ISOLATED]
    return {v: i + 1 for i, v in enumerate(list(reversed(good)) + bad)}


def is_stable_system(H) -> bool:
    """Every pair of ground elements is comparable under dominance."""
    n = H.n if isinstance(H, Graph) else H.ground_n
    return all(dominates(H, u, v) or dominates(H, v, u)
               for u in range(1, n + 1) for v in range(u + 1, n + 1))


# -- labeled copies ----------------------------------------------------------------

_CHUNK = 1 << 16


@lru_cache(maxsize=64)
def _injection_images(h: int, m: int) -> np.ndarray:
    # (m!/(m-h)!, h) array of 1 << I(w) for every injection I
    inj = np.array(list(permutations(range(m), h)), dtype=np.int64).reshape(-1, h)
    return np.left_shift(1, inj)


def _injection_chunks(h: int, m: int):
    if perm(m, h) <= 50_000:
        yield _injection_images(h, m)
        return
    it = permutations(range(m), h)
    while True:
        block = list(islice(it, _CHUNK))
        if not block:
            return
        yield np.left_shift(1, np.array(block, dtype=np.int64))


def count_labeled_copies(H, F) -> int:
    """Number of injections I of ground(H) into ground(F) with I(A) in F for
    every member A of H (labeled, not necessarily induced, copies)."""
    if isinstance(H, Graph):
        H = SetSystem.from_graph(H)
    if isinstance(F, Graph):
        F = SetSystem.from_graph(F)
    h, m = H.ground_n, F.ground_n
    if h > 8 or m > 12:
        raise SetSystemError("labeled-copy counting is limited to |ground(H)| <= 8, |ground(F)| <= 12")
    if h > m:
        return 0
    if not H.members:
        return perm(m, h)
    if not F.members:
        return 0
    present = np.zeros(1 << m, dtype=bool)
    present[list(F.members)] = True
    columns = [[b for b in _bits(a)] for a in H.members]
    total = 0
    for pw in _injection_chunks(h, m):
        ok = np.ones(pw.shape[0], dtype=bool)
        for cols in columns:
            img = pw[:, cols].sum(axis=1) if cols else np.zeros(pw.shape[0], dtype=np.int64)
            ok &= present[img]
        total += int(ok.sum())
    return total


# -- text format -------------------------------------------------------------------

def format_set_system(F: SetSystem) -> str:
    sets = F.sets()
    lines = [f"{F.ground_n} {len(sets)}"] + [" ".join(map(str, s)) for s in sets]
    return "\n".join(lines) + "\n"


def parse_set_system(text: str) -> SetSystem:
    lines = text.splitlines()
    while lines and not lines[-1].strip():
        lines.pop()
    if not lines or len(lines[0].split()) != 2:
        raise SetSystemError("set-system header must be 'n m'")
    try:
        n, m = (int(t) for t in lines[0].split())
        sets = [[int(t) for t in line.split()] for line in lines[1:]]
    except ValueError as exc:
        raise SetSystemError(f"malformed set-system file: {exc}") from None
    if len(sets) != m:
        raise SetSystemError(f"header announces {m} members, file lists {len(sets)}")
    F = SetSystem.from_sets(n, sets)
    if len(F) != m:
        raise SetSystemError("set-system file repeats a member")
    return F


def read_set_system(path) -> SetSystem:
    with open(path, encoding="utf-8") as fh:
        return parse_set_system(fh.read())


def write_set_system(F: SetSystem, path) -> None:
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(format_set_system(F))
