"""Brute-force oracles and reproducible fuzz suites.

Every finite comparison is made on raw counts.  Exhaustive searches index
labeled graphs by their edge mask (see :meth:`Graph.from_edge_mask`) and
look counts up in per-mask tables, so a whole ``n <= 7`` sweep is a handful
of numpy passes.
"""
from __future__ import annotations

import time
from dataclasses import dataclass, field
from functools import lru_cache
from itertools import combinations, permutations
from math import comb
from typing import Iterator, NamedTuple

import numpy as np

from .graph import (FAMILIES, Graph, GraphError, blowup_limit_density, complement, count_cliques,
                    count_cliques_through, hamming_graph, q_graph)
from .shifting import (SetSystem, count_labeled_copies, dominates, is_shifted, is_stable_system,
                       is_threshold, shift, shifted_relabeling)

MAX_WITNESSES = 16
FRANEK_RODL_DIM = 13
FRANEK_RODL_DISTANCES = (1, 4, 5, 8, 9, 11)
D4_LIMIT = 0.99 / 64
DBAR4_LIMIT = 0.993 / 64


@dataclass
class VerificationReport:
    suite: str
    trials: int = 0
    violations: int = 0
    witnesses: list = field(default_factory=list)
    elapsed: float = 0.0
    details: dict = field(default_factory=dict)

    def fail(self, witness) -> None:
        self.violations += 1
        if len(self.witnesses) < MAX_WITNESSES:
            self.witnesses.append(witness)

    def merge(self, other: "VerificationReport") -> "VerificationReport":
        out = VerificationReport(self.suite, self.trials + other.trials,
                                 self.violations + other.violations,
                                 (self.witnesses + other.witnesses)[:MAX_WITNESSES],
                                 self.elapsed + other.elapsed, {**self.details, **other.details})
        return out

    @property
    def ok(self) -> bool:
        return self.violations == 0

    def to_json(self) -> dict:
        # elapsed is left out so identical runs give identical documents
        return {"suite": self.suite, "trials": self.trials, "violations": self.violations,
                "witnesses": self.witnesses, "details": self.details}


# -- enumeration --------------------------------------------------------------

MAX_ENUM_N = 8


def _pairs(n: int) -> list[tuple[int, int]]:
    return [(i, j) for i in range(n) for j in range(i + 1, n)]


@lru_cache(maxsize=None)
def _edge_permutation_table(n: int) -> np.ndarray:
    # row p, column k: edge index of the image of edge k under the p-th permutation
    pairs = _pairs(n)
    index = {pq: k for k, pq in enumerate(pairs)}
    rows = []
    for perm in permutations(range(n)):
        rows.append([index[tuple(sorted((perm[i], perm[j])))] for i, j in pairs])
    return np.array(rows, dtype=np.int64).reshape(len(rows), len(pairs))


def _orbit(mask: int, table: np.ndarray) -> np.ndarray:
    cols = [k for k in range(table.shape[1]) if mask >> k & 1]
    if not cols:
        return np.zeros(1, dtype=np.int64)
    return np.unique(np.left_shift(1, table[:, cols]).sum(axis=1))


def enumerate_graphs(n: int, dedup: bool = False) -> Iterator[Graph]:
    """All labeled graphs on ``n`` vertices in edge-mask order; with ``dedup``
    only the first (smallest-mask) member of each isomorphism class."""
    if not 0 <= n <= MAX_ENUM_N:
        raise GraphError(f"enumeration is limited to 0 <= n <= {MAX_ENUM_N}")
    total = 1 << comb(n, 2)
    if not dedup:
        for mask in range(total):
            yield Graph.from_edge_mask(n, mask)
        return
    table = _edge_permutation_table(n)
    seen = np.zeros(total, dtype=bool)
    start, chunk = 0, 1 << 16
    while start < total:
        free = np.flatnonzero(~seen[start:start + chunk])
        if not free.size:
            start += chunk
            continue
        mask = start + int(free[0])
        seen[_orbit(mask, table)] = True
        yield Graph.from_edge_mask(n, mask)
        start = mask + 1


def count_classes(n: int) -> int:
    return sum(1 for _ in enumerate_graphs(n, dedup=True))


@lru_cache(maxsize=32)
def count_tables(n: int, l: int) -> tuple[np.ndarray, np.ndarray]:
    """Per-edge-mask numbers of ``l``-cliques and independent ``l``-sets."""
    if n > 7:
        raise GraphError("count tables are limited to n <= 7")
    masks = np.arange(1 << comb(n, 2), dtype=np.int64)
    index = {pq: k for k, pq in enumerate(_pairs(n))}
    cliques = np.zeros(masks.size, dtype=np.int64)
    indeps = np.zeros(masks.size, dtype=np.int64)
    for subset in combinations(range(n), l):
        sub = sum(1 << index[pq] for pq in combinations(subset, 2))
        hit = masks & sub
        cliques += hit == sub
        indeps += hit == 0
    cliques.setflags(write=False)
    indeps.setflags(write=False)
    return cliques, indeps


# -- exhaustive oracles ----------------------------------------------------------

class BruteResult(NamedTuple):
    """Best count, a maximizing graph (threshold when one exists), the number
    of maximizing labeled graphs and the first threshold maximizer or None."""
    value: int
    witness: Graph
    maximizers: int
    threshold_witness: Graph | None


def _best_of(n: int, score: np.ndarray) -> BruteResult:
    best = int(score.max())
    hits = np.flatnonzero(score == best)
    first_threshold = None
    for mask in hits:
        G = Graph.from_edge_mask(n, int(mask))
        if is_threshold(G):
            first_threshold = G
            break
    witness = first_threshold or Graph.from_edge_mask(n, int(hits[0]))
    return BruteResult(best, witness, int(hits.size), first_threshold)


def _check_small(n: int):
    if not 0 <= n <= 7:
        raise GraphError("exhaustive search is limited to n <= 7")


def brute_conditional_max(n: int, r: int, s: int, min_ind: int) -> BruteResult:
    """Most ``s``-cliques over labeled graphs with at least ``min_ind``
    independent ``r``-sets."""
    _check_small(n)
    cl = count_tables(n, s)[0]
    ind = count_tables(n, r)[1]
    if not (ind >= min_ind).any():
        raise GraphError(f"no graph on {n} vertices has {min_ind} independent {r}-sets")
    score = np.where(ind >= min_ind, cl, -1)
    return _best_of(n, score)


def best_family_count(n: int, r: int, s: int, min_ind: int) -> tuple[int, str, int]:
    """Best ``s``-clique count among Q and Qbar members meeting the constraint,
    with the family and clique size b of the first best member."""
    best = None
    for family in FAMILIES:
        for b in range(n + 1):
            rep = count_cliques(q_graph(n, b, family), s), count_cliques(q_graph(n, b, family), r)
            if rep[1].independents >= min_ind and (best is None or rep[0].cliques > best[0]):
                best = (rep[0].cliques, family, b)
    if best is None:
        raise GraphError("no family member meets the constraint")
    return best


class MaxMinResult(NamedTuple):
    value: int
    normalized: float | None
    witness: Graph
    maximizers: int
    threshold_witness: Graph | None


def brute_max_min(n: int, r: int, s: int) -> MaxMinResult:
    """Largest min(s-cliques, independent r-sets) over labeled graphs;
    ``normalized`` is value / C(n, r) when ``r == s``."""
    _check_small(n)
    score = np.minimum(count_tables(n, s)[0], count_tables(n, r)[1])
    res = _best_of(n, score)
    norm = res.value / comb(n, r) if r == s and comb(n, r) else None
    return MaxMinResult(res.value, norm, res.witness, res.maximizers, res.threshold_witness)


def goodman_min(n: int) -> int:
    """Fewest monochromatic triangles (triangles plus independent triples)."""
    _check_small(n)
    cl, ind = count_tables(n, 3)
    return int((cl + ind).min())


def goodman_formula(n: int) -> int:
    # Goodman's exact minimum, as an independent closed-form cross-check
    return comb(n, 3) - (n * ((n - 1) ** 2 // 4)) // 2


# -- the lower-dimensional counterexample --------------------------------------------

@dataclass
class FranekRodlReport:
    n: int
    c1: int
    c2: int
    c3: int
    c4: int
    i4: int
    d4: float
    dbar4: float
    sample_ratio: float
    ok: bool

    def to_json(self) -> dict:
        return {"n": self.n, "c1": self.c1, "c2": self.c2, "c3": self.c3, "c4": self.c4,
                "i4": self.i4, "d4": self.d4, "dbar4": self.dbar4,
                "d4_limit": D4_LIMIT, "dbar4_limit": DBAR4_LIMIT,
                "sample_ratio": self.sample_ratio, "pass": self.ok}


def franek_rodl_check(*, threads=None, backend=None, sample: int = 512, seed: int = 0) -> FranekRodlReport:
    """Clique counts and blow-up densities of the Cayley graph on {0,1}^13
    with distance set {1,4,5,8,9,11}.

    ``sample_ratio`` compares the K4 count of a random ``sample``-vertex
    induced subgraph, scaled up, with the transitivity-derived total; it is a
    sanity figure near 1, not part of ``ok``.
    """
    G = hamming_graph(FRANEK_RODL_DIM, FRANEK_RODL_DISTANCES)
    Gbar = complement(G)
    counts = [count_cliques(G, l, threads=threads, backend=backend).cliques for l in range(1, 5)]
    i4 = count_cliques(Gbar, 4, threads=threads, backend=backend).cliques
    d4 = blowup_limit_density(G, 4, threads=threads, backend=backend)
    dbar4 = blowup_limit_density(G, 4, "independent", threads=threads, backend=backend)
    ratio = float("nan")
    if sample >= 4:
        rng = np.random.default_rng(seed)
        picked = sorted(int(v) + 1 for v in rng.choice(G.n, size=min(sample, G.n), replace=False))
        H = G.induced(picked)
        local = count_cliques(H, 4, threads=threads, backend=backend, transitive=False).cliques
        ratio = local * comb(G.n, 4) / comb(H.n, 4) / counts[3]
    if counts[3] * 4 != G.n * count_cliques_through(G, 1, 4, threads=threads, backend=backend):
        raise AssertionError("K4 total disagrees with the per-vertex count")
    return FranekRodlReport(G.n, *counts, i4, d4, dbar4, ratio, d4 < D4_LIMIT and dbar4 < DBAR4_LIMIT)


# -- shifting suites ----------------------------------------------------------------

def exhaustive_shift_monotonicity(max_n: int = 6) -> VerificationReport:
    """Every labeled graph on n <= max_n, every ordered pair (u, v) and every
    l: shifting never lowers the l-clique or independent l-set count."""
    if max_n > 7:
        raise GraphError("exhaustive shift suite is limited to n <= 7")
    t0 = time.perf_counter()
    rep = VerificationReport("shift-exhaustive")
    for n in range(2, max_n + 1):
        tables = [count_tables(n, l) for l in range(1, n + 1)]
        for mask in range(1 << comb(n, 2)):
            G = Graph.from_edge_mask(n, mask)
            for u in range(1, n + 1):
                for v in range(1, n + 1):
                    if u == v:
                        continue
                    moved = shift(G, u, v).edge_mask()
                    for l, (cl, ind) in enumerate(tables, start=1):
                        rep.trials += 1
                        if cl[moved] < cl[mask] or ind[moved] < ind[mask]:
                            rep.fail({"n": n, "edge_mask": mask, "u": u, "v": v, "l": l})
    rep.elapsed = time.perf_counter() - t0
    return rep


def exhaustive_threshold_equivalence(max_n: int = 6) -> VerificationReport:
    """Shifted graphs are threshold, and every threshold graph becomes
    shifted under its witness-derived relabeling."""
    if max_n > 7:
        raise GraphError("exhaustive threshold suite is limited to n <= 7")
    t0 = time.perf_counter()
    rep = VerificationReport("threshold")
    threshold_count = 0
    for n in range(0, max_n + 1):
        for G in enumerate_graphs(n):
            rep.trials += 1
            check = is_threshold(G)
            threshold_count += bool(check)
            if is_shifted(G) and not check:
                rep.fail({"n": n, "edge_mask": G.edge_mask(), "claim": "shifted implies threshold"})
            elif check and not is_shifted(G.relabel(shifted_relabeling(check))):
                rep.fail({"n": n, "edge_mask": G.edge_mask(), "claim": "threshold relabels to shifted"})
    rep.details["threshold_graphs"] = threshold_count
    rep.elapsed = time.perf_counter() - t0
    return rep


def _random_graph(rng, n: int) -> Graph:
    density = rng.random()
    m = comb(n, 2)
    bits = rng.random(m) < density
    mask = int(sum(1 << k for k in np.flatnonzero(bits)))
    return Graph.from_edge_mask(n, mask)


def fuzz_shift_monotonicity(trials: int, max_n: int = 10, seed: int = 0) -> VerificationReport:
    """Random (G, u, v, l) with 2 <= n <= max_n; each trial draws from its own
    stream seeded by (seed, trial index)."""
    if not 2 <= max_n <= 12:
        raise GraphError("max_n must lie in 2..12")
    t0 = time.perf_counter()
    rep = VerificationReport("shift-fuzz")
    for i in range(trials):
        rng = np.random.default_rng([seed, i])
        n = int(rng.integers(2, max_n + 1))
        G = _random_graph(rng, n)
        u, v = (int(x) + 1 for x in rng.choice(n, size=2, replace=False))
        l = int(rng.integers(1, n + 1))
        before = count_cliques(G, l, backend="python")
        after = count_cliques(shift(G, u, v), l, backend="python")
        rep.trials += 1
        if after.cliques < before.cliques or after.independents < before.independents:
            rep.fail({"n": n, "edge_mask": G.edge_mask(), "u": u, "v": v, "l": l})
    rep.elapsed = time.perf_counter() - t0
    return rep


@lru_cache(maxsize=1)
def threshold_pool() -> tuple[SetSystem, ...]:
    """Every labeled threshold graph on 1..4 vertices, as 2-uniform systems."""
    return tuple(SetSystem.from_graph(G) for n in range(1, 5)
                 for G in enumerate_graphs(n) if is_threshold(G))


def _random_system(rng, ground: int, max_size: int | None = None) -> SetSystem:
    sizes = rng.integers(1, min(max_size or ground, ground) + 1, size=int(rng.integers(0, 2 * ground + 1)))
    members = set()
    for size in sizes:
        members.add(int(sum(1 << int(e) for e in rng.choice(ground, size=int(size), replace=False))))
    return SetSystem(ground, members)


def _random_stable(rng, tries: int = 64) -> SetSystem | None:
    for _ in range(tries):
        H = _random_system(rng, int(rng.integers(1, 5)), 3)
        if is_stable_system(H):
            return H
    return None


def _random_unstable(rng, tries: int = 64) -> SetSystem | None:
    for _ in range(tries):
        H = _random_system(rng, int(rng.integers(2, 5)), 3)
        if not is_stable_system(H):
            return H
    return None


def _copy_violations(H: SetSystem, F: SetSystem):
    base = count_labeled_copies(H, F)
    for u in range(1, F.ground_n + 1):
        for v in range(1, F.ground_n + 1):
            if u != v:
                moved = count_labeled_copies(H, shift(F, u, v))
                if moved < base:
                    yield u, v, base, moved


def fuzz_copy_monotonicity(trials: int, seed: int = 0, control: int | None = None) -> VerificationReport:
    """Random stable H and random F on at most 7 elements, checked over all
    ordered pairs (u, v).  Stable H alternates between labeled threshold
    graphs on <= 4 vertices and rejection-sampled stable systems.  A control
    group of non-stable H (``control`` draws, default trials // 10) is only
    tallied in ``details``."""
    t0 = time.perf_counter()
    rep = VerificationReport("copies")
    pool = threshold_pool()
    for i in range(trials):
        rng = np.random.default_rng([seed, i])
        H = pool[int(rng.integers(len(pool)))] if i % 2 == 0 else _random_stable(rng)
        if H is None:
            H = pool[int(rng.integers(len(pool)))]
        F = _random_system(rng, int(rng.integers(max(2, H.ground_n), 8)))
        rep.trials += 1
        for u, v, base, moved in _copy_violations(H, F):
            rep.fail({"H": H.sets(), "H_ground": H.ground_n, "F": F.sets(), "F_ground": F.ground_n,
                      "u": u, "v": v, "before": base, "after": moved})
            break
    control = trials // 10 if control is None else control
    hits = 0
    for i in range(control):
        rng = np.random.default_rng([seed, trials + i, 1])
        H = _random_unstable(rng)
        if H is None:
            continue
        F = _random_system(rng, int(rng.integers(max(2, H.ground_n), 8)))
        hits += next(_copy_violations(H, F), None) is not None
    rep.details["control_trials"] = control
    rep.details["control_decreases"] = hits
    rep.elapsed = time.perf_counter() - t0
    return rep


# -- extremality suites ---------------------------------------------------------------

def maxmin_suite(max_n: int = 7, r: int = 3) -> VerificationReport:
    """Threshold attainment of the finite max-min for n = r..max_n and a
    nondecreasing normalized trend."""
    t0 = time.perf_counter()
    rep = VerificationReport("maxmin")
    values = {}
    prev = None
    for n in range(r, min(max_n, 7) + 1):
        res = brute_max_min(n, r, r)
        rep.trials += 1
        values[n] = {"value": res.value, "normalized": res.normalized,
                     "threshold_witness": res.threshold_witness is not None}
        if res.threshold_witness is None:
            rep.fail({"n": n, "claim": "threshold maximizer", "value": res.value})
        if prev is not None and res.normalized < prev:
            rep.fail({"n": n, "claim": "nondecreasing", "normalized": res.normalized, "previous": prev})
        prev = res.normalized
    rep.details["values"] = values
    rep.elapsed = time.perf_counter() - t0
    return rep


def conditional_suite(n: int = 6, r: int = 3, s: int = 3) -> VerificationReport:
    """At every constraint level: a threshold maximizer exists, and the
    maximum equals the best Q / Qbar member."""
    t0 = time.perf_counter()
    rep = VerificationReport("conditional")
    for level in range(comb(n, r) + 1):
        res = brute_conditional_max(n, r, s, level)
        fam_value, family, b = best_family_count(n, r, s, level)
        rep.trials += 1
        if res.threshold_witness is None:
            rep.fail({"min_ind": level, "claim": "threshold maximizer", "value": res.value})
        if res.value != fam_value:
            rep.fail({"min_ind": level, "claim": "family attains the maximum", "value": res.value,
                      "family_value": fam_value, "family": family, "b": b,
                      "witness_edge_mask": res.witness.edge_mask()})
    rep.elapsed = time.perf_counter() - t0
    return rep


def goodman_suite(max_n: int = 7) -> VerificationReport:
    t0 = time.perf_counter()
    rep = VerificationReport("goodman")
    values = {}
    for n in range(3, min(max_n, 7) + 1):
        got = goodman_min(n)
        values[n] = got
        rep.trials += 1
        if got != goodman_formula(n) or (n >= 6 and got < 1):
            rep.fail({"n": n, "minimum": got, "formula": goodman_formula(n)})
    rep.details["values"] = values
    rep.elapsed = time.perf_counter() - t0
    return rep


SUITES = ("shift", "threshold", "maxmin", "conditional", "goodman", "copies")


def run_suite(name: str, *, max_n: int = 6, trials: int = 1000, seed: int = 0) -> list[VerificationReport]:
    """Run one named suite (or ``all``); ``shift`` is the exhaustive sweep to
    min(max_n, 6) followed by ``trials`` random cases on up to max(max_n, 2)
    vertices."""
    if name == "all":
        return [r for s in SUITES for r in run_suite(s, max_n=max_n, trials=trials, seed=seed)]
    if name == "shift":
        return [exhaustive_shift_monotonicity(min(max_n, 6)),
                fuzz_shift_monotonicity(trials, max(2, min(max_n, 12)), seed)]
    if name == "threshold":
        return [exhaustive_threshold_equivalence(min(max_n, 7))]
    if name == "maxmin":
        return [maxmin_suite(min(max_n, 7))]
    if name == "conditional":
        return [conditional_suite(min(max_n, 7))]
    if name == "goodman":
        return [goodman_suite(min(max_n, 7))]
    if name == "copies":
        return [fuzz_copy_monotonicity(trials, seed)]
    raise ValueError(f"unknown suite {name!r}; choose from {SUITES + ('all',)}")
