"""Parametric models of threshold graphs.

A :class:`Profile` gives the relative sizes of alternating blocks
``x_1, y_1, x_2, y_2, ...``: every vertex of an x-block is adjacent to all
earlier vertices, every vertex of a y-block to none.  A :class:`StepModel`
describes a shifted graph by its clique fraction and a non-increasing step
function recording how far each clique vertex reaches into the independent
part.
"""
from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Sequence

from .graph import Graph
from .shifting import UNIVERSAL, is_threshold

ZERO_TOL = 1e-12
MASS_TOL = 1e-12


class ProfileError(ValueError):
    pass


@dataclass(frozen=True)
class Profile:
    x: tuple[float, ...]
    y: tuple[float, ...]

    def __post_init__(self):
        object.__setattr__(self, "x", tuple(float(v) for v in self.x))
        object.__setattr__(self, "y", tuple(float(v) for v in self.y))
        if len(self.x) != len(self.y) or not self.x:
            raise ProfileError("x and y must have the same positive length")
        if min(self.x + self.y) < 0:
            raise ProfileError("profile entries must be nonnegative")
        if abs(sum(self.x) + sum(self.y) - 1.0) > MASS_TOL:
            raise ProfileError(f"profile mass is {sum(self.x) + sum(self.y)!r}, expected 1")

    @property
    def k(self) -> int:
        return len(self.x)

    @classmethod
    def from_blocks(cls, blocks: Sequence[float]) -> "Profile":
        """Build from the interleaved sequence ``x_1, y_1, x_2, y_2, ...``."""
        blocks = list(blocks)
        if len(blocks) % 2:
            blocks.append(0.0)
        return cls(tuple(blocks[0::2]), tuple(blocks[1::2]))

    def blocks(self) -> list[float]:
        out = []
        for a, b in zip(self.x, self.y):
            out += [a, b]
        return out

    def to_json(self) -> dict:
        return {"x": list(self.x), "y": list(self.y)}

    @classmethod
    def from_json(cls, doc) -> "Profile":
        if isinstance(doc, str):
            doc = json.loads(doc)
        return cls(tuple(doc["x"]), tuple(doc["y"]))


def p_density(P: Profile, s: int) -> float:
    """Limit K_s density of the threshold graph described by ``P``."""
    if s < 2:
        raise ProfileError("clique size must be at least 2")
    total = sum(P.x) ** s
    tail = 0.0  # sum of x_j for j > i
    for i in range(P.k - 1, 0, -1):
        tail += P.x[i]
        total += s * P.y[i - 1] * tail ** (s - 1)
    return total


def q_density(P: Profile, r: int) -> float:
    """Limit independent r-set density of the threshold graph described by ``P``."""
    if r < 2:
        raise ProfileError("independent-set size must be at least 2")
    total = sum(P.y) ** r
    tail = 0.0  # sum of y_j for j >= i
    for i in range(P.k - 1, -1, -1):
        tail += P.y[i]
        total += r * P.x[i] * tail ** (r - 1)
    return total


def _interior_zeros(blocks: list[float]) -> int:
    # zeros among blocks[1:] that are followed by a nonzero entry
    tail = blocks[1:]
    last = max((i for i, v in enumerate(tail) if v >= ZERO_TOL), default=0)
    return sum(1 for v in tail[:last] if v < ZERO_TOL)


def is_nondegenerate(P: Profile) -> bool:
    """Zeros of ``y_1, x_2, y_2, ..., x_k, y_k`` form a suffix (``x_1`` exempt)."""
    return _interior_zeros(P.blocks()) == 0


def reduce_nondegenerate(P: Profile, tol: float = ZERO_TOL) -> Profile:
    """Merge across interior zero blocks until the profile is non-degenerate,
    then pad with zeros back to ``k`` blocks.  Both densities are unchanged.

    With ``tol`` above the default, blocks lighter than ``tol`` are first
    dropped and the rest rescaled, so the densities change by O(tol).
    """
    z = P.blocks()
    if tol > ZERO_TOL:
        z = [v if v >= tol else 0.0 for v in z]
        mass = sum(z)
        z = [v / mass for v in z]
    while True:
        last = max((i for i in range(1, len(z)) if z[i] >= ZERO_TOL), default=0)
        j = next((i for i in range(1, last) if z[i] < ZERO_TOL), None)
        if j is None:
            break
        # neighbours of a vanished block are of the same kind and fuse
        z = z[:j - 1] + [z[j - 1] + z[j] + z[j + 1]] + z[j + 2:]
    z += [0.0] * (2 * P.k - len(z))
    return Profile.from_blocks(z)


def _largest_remainder(weights: Sequence[float], n: int) -> list[int]:
    quotas = [w * n for w in weights]
    sizes = [int(q) for q in quotas]
    short = n - sum(sizes)
    order = sorted(range(len(weights)), key=lambda i: (-(quotas[i] - sizes[i]), i))
    for i in order[:short]:
        sizes[i] += 1
    return sizes


def profile_to_graph(P: Profile, n: int) -> Graph:
    """Threshold graph on ``n`` vertices with block sizes rounded from ``n * P``
    (largest remainder, ties to the lower block index)."""
    if n < 1:
        raise ProfileError("need at least one vertex")
    sizes = _largest_remainder(P.blocks(), n)
    rows = [0] * n
    v = 0
    for idx, size in enumerate(sizes):
        joins = idx % 2 == 0
        for _ in range(size):
            if joins and v:
                rows[v] |= (1 << v) - 1
                bit = 1 << v
                for u in range(v):
                    rows[u] |= bit
            v += 1
    return Graph(n, rows, validate=False)


def graph_to_profile(G: Graph) -> Profile:
    """Block fractions read off a threshold ordering of ``G``."""
    check = is_threshold(G)
    if not check:
        raise ProfileError(f"graph is not threshold: {check.reason}")
    runs: list[list] = []
    for i, kind in enumerate(check.kinds):
        joins = kind == UNIVERSAL or i == 0
        if runs and runs[-1][0] == joins:
            runs[-1][1] += 1
        else:
            runs.append([joins, 1])
    blocks = [size / G.n for _, size in runs]
    return Profile.from_blocks(blocks)


# -- step-function model ------------------------------------------------------------

@dataclass(frozen=True)
class StepFunction:
    """Piecewise-constant function on [0, 1].

    ``breaks`` is the partition ``0 = b_0 < b_1 < ... < b_m = 1`` and
    ``vals[i]`` the value on ``[b_i, b_{i+1})``.
    """
    breaks: tuple[float, ...]
    vals: tuple[float, ...]

    def __post_init__(self):
        breaks = tuple(float(b) for b in self.breaks)
        vals = tuple(float(v) for v in self.vals)
        if len(breaks) == len(vals) - 1:  # interior breakpoints only
            breaks = (0.0,) + breaks + (1.0,)
        if len(breaks) != len(vals) + 1 or not vals:
            raise ProfileError("need len(breaks) == len(vals) + 1 with at least one piece")
        if breaks[0] != 0.0 or breaks[-1] != 1.0:
            raise ProfileError("breakpoints must run from 0 to 1")
        if any(b1 < b0 for b0, b1 in zip(breaks, breaks[1:])):
            raise ProfileError("breakpoints must be nondecreasing")
        object.__setattr__(self, "breaks", breaks)
        object.__setattr__(self, "vals", vals)

    @classmethod
    def constant(cls, value: float) -> "StepFunction":
        return cls((0.0, 1.0), (value,))

    def pieces(self):
        return zip(self.breaks, self.breaks[1:], self.vals)

    def is_nonincreasing(self) -> bool:
        return all(b <= a for a, b in zip(self.vals, self.vals[1:]))

    def is_nondecreasing(self) -> bool:
        return all(b >= a for a, b in zip(self.vals, self.vals[1:]))

    def integral_power(self, e: int, *, complement: bool = False) -> float:
        """Integral of ``f^e`` (or ``(1 - f)^e``)."""
        return sum((b - a) * ((1.0 - v) if complement else v) ** e for a, b, v in self.pieces())

    def moment(self, k: int) -> float:
        """Integral of ``(k-1) t^(k-2) f(t)``, exact per piece."""
        return sum(v * (b ** (k - 1) - a ** (k - 1)) for a, b, v in self.pieces())


@dataclass(frozen=True)
class StepModel:
    x: float
    f: StepFunction

    def __post_init__(self):
        if not 0.0 <= self.x <= 1.0:
            raise ProfileError("clique fraction must lie in [0, 1]")
        if not self.f.is_nonincreasing():
            raise ProfileError("f must be non-increasing")
        if min(self.f.vals) < 0 or max(self.f.vals) > 1:
            raise ProfileError("f must take values in [0, 1]")

    def to_json(self) -> dict:
        return {"x": self.x, "breaks": list(self.f.breaks), "vals": list(self.f.vals)}

    @classmethod
    def from_json(cls, doc) -> "StepModel":
        if isinstance(doc, str):
            doc = json.loads(doc)
        return cls(float(doc["x"]), StepFunction(tuple(doc["breaks"]), tuple(doc["vals"])))


def step_densities(M: StepModel, k: int) -> tuple[float, float]:
    """(independent k-set density, K_k density) of the model graph."""
    if k < 2:
        raise ProfileError("k must be at least 2")
    x = M.x
    pa = (1 - x) ** k + k * x * (1 - x) ** (k - 1) * M.f.integral_power(k - 1, complement=True)
    pc = x ** k + k * x ** (k - 1) * (1 - x) * M.f.moment(k)
    return pa, pc


TERMS = ("bound", "first", "second")


def integral_margin(f: StepFunction, k: int, term: str = "bound") -> float:
    """Slack in the bound on the integral of ``(1 - f)^(k-1)`` for non-increasing ``f``.

    With ``I`` the integral of ``(k-1) t^(k-2) f``, the bound is the larger of
    ``1 - I^(1/(k-1))`` and ``(1 - I)^(k-1)``.  ``term`` selects the bound (the
    larger expression) or one of the two expressions, to measure tightness of
    the 0/1-valued and constant extremal functions separately.
    """
    if k < 3:
        raise ProfileError("k must be at least 3")
    if not f.is_nonincreasing():
        raise ProfileError("f must be non-increasing")
    if term not in TERMS:
        raise ProfileError(f"term must be one of {TERMS}")
    lhs = f.integral_power(k - 1, complement=True)
    moment = min(max(f.moment(k), 0.0), 1.0)
    first = 1 - moment ** (1 / (k - 1))
    second = (1 - moment) ** (k - 1)
    rhs = {"bound": max(first, second), "first": first, "second": second}[term]
    return rhs - lhs


NORM_TOL = 1e-9


def monomial_margin(g: StepFunction, B: float, k: int, term: str = "bound",
                    normalize: bool = False) -> float:
    """Slack in the lower bound on the inner product of ``(k-1) t^(k-2)`` with a
    non-decreasing ``g`` of unit (k-1)-norm bounded by ``B``.

    ``normalize=True`` rescales ``g`` and ``B`` jointly to unit norm first;
    otherwise an off-norm ``g`` is rejected.  ``term`` is as in
    :func:`integral_margin` (``first`` is the B-dependent expression,
    ``second`` the constant 1).
    """
    if k < 3:
        raise ProfileError("k must be at least 3")
    if not g.is_nondecreasing():
        raise ProfileError("g must be non-decreasing")
    if term not in TERMS:
        raise ProfileError(f"term must be one of {TERMS}")
    norm = g.integral_power(k - 1) ** (1 / (k - 1))
    if normalize:
        if norm == 0:
            raise ProfileError("g is identically zero")
        g = StepFunction(g.breaks, tuple(v / norm for v in g.vals))
        B = B / norm
    elif abs(norm - 1) > NORM_TOL:
        raise ProfileError(f"||g||_{k - 1} = {norm!r}, expected 1")
    if B < 1:
        raise ProfileError("B must be at least 1")
    if min(g.vals) < 0 or max(g.vals) > B * (1 + 1e-12):
        raise ProfileError("g must take values in [0, B]")
    inner = g.moment(k)
    first = B * (1 - (1 - B ** -(k - 1)) ** (k - 1))
    bound = {"bound": min(first, 1.0), "first": first, "second": 1.0}[term]
    return inner - bound
