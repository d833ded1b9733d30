"""Closed-form extremal bounds and a multistart optimizer over profiles.

Every scalar root is found by bisection on a bracketing interval where the
defining function changes sign exactly once; no general-purpose nonlinear
solver is involved.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .graph import Q, QBAR, TIE
from .threshold import Profile, p_density, q_density, reduce_nondegenerate

BISECT_ITERS = 200
TIE_TOL = 1e-12
RESIDUAL_TOL = 1e-10


class SolverError(ValueError):
    pass


def bisect(fn: Callable[[float], float], lo: float, hi: float, iters: int = BISECT_ITERS) -> float:
    """Root of ``fn`` in ``[lo, hi]`` given a sign change at the ends.

    Stops early once the midpoint no longer splits the interval in floating
    point; returns the endpoint with the smaller residual.
    """
    flo, fhi = fn(lo), fn(hi)
    if flo == 0:
        return lo
    if fhi == 0:
        return hi
    if (flo > 0) == (fhi > 0):
        raise SolverError(f"no sign change on [{lo}, {hi}]")
    for _ in range(iters):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        fm = fn(mid)
        if fm == 0:
            return mid
        if (fm > 0) == (flo > 0):
            lo, flo = mid, fm
        else:
            hi, fhi = mid, fm
    return lo if abs(flo) <= abs(fhi) else hi


def indep_poly(r: int, t: float) -> float:
    """``t^r + r t^(r-1) (1 - t)``: independent r-set density of Qbar with
    co-clique fraction ``t``, equivalently of Q with clique fraction ``1 - t``."""
    return t ** r + r * t ** (r - 1) * (1 - t)


@dataclass(frozen=True)
class ExtremalPoint:
    """A solved bound.  ``t`` is the member parameter ``b/n`` of the winning
    family (clique fraction for Q, co-clique fraction for Qbar); on a tie it
    is the Q value and ``roots`` carries both."""
    family: str
    t: float
    value: float
    roots: dict = field(default_factory=dict)
    residuals: dict = field(default_factory=dict)

    def __post_init__(self):
        bad = {k: v for k, v in self.residuals.items() if not abs(v) <= RESIDUAL_TOL}
        if bad:
            raise SolverError(f"root residuals exceed {RESIDUAL_TOL}: {bad}")

    def to_json(self) -> dict:
        return {"family": self.family, "t": self.t, "value": self.value, "roots": dict(self.roots)}


def _pick(v_q: float, v_qbar: float) -> str:
    if abs(v_q - v_qbar) < TIE_TOL:
        return TIE
    return Q if v_q > v_qbar else QBAR


def solve_q(r: int, p: float) -> float:
    """Root in [0, 1] of ``q^r + r q^(r-1) (1 - q) = p``.

    The left side is nondecreasing (derivative ``r(r-1) q^(r-2) (1-q)``), so the
    root is bracketed by 0 and 1.
    """
    if r < 2:
        raise SolverError("r must be at least 2")
    if not 0.0 <= p <= 1.0:
        raise SolverError(f"p = {p} outside [0, 1]")
    return bisect(lambda q: indep_poly(r, q) - p, 0.0, 1.0)


def m_bound(r: int, s: int, p: float) -> ExtremalPoint:
    """Largest K_s density given independent r-set density at least ``p``."""
    if r < 2 or s < 2:
        raise SolverError("r and s must be at least 2")
    q = solve_q(r, p)
    c = p ** (1.0 / r)
    v_qbar = (1 - c) ** s + s * c * (1 - c) ** (s - 1)
    v_q = (1 - q) ** s
    family = _pick(v_q, v_qbar)
    return ExtremalPoint(
        family=family,
        t=c if family == QBAR else 1 - q,
        value=max(v_q, v_qbar),
        roots={"q": q, "t_Q": 1 - q, "t_Qbar": c, "value_Q": v_q, "value_Qbar": v_qbar},
        residuals={"q": indep_poly(r, q) - p},
    )


def kk_bound(r: int, s: int, alpha: float) -> float:
    """Upper bound ``alpha^(s/r)`` on K_s density given K_r density ``alpha``."""
    if r >= s:
        raise SolverError("need r < s")
    if not 0.0 <= alpha <= 1.0:
        raise SolverError(f"alpha = {alpha} outside [0, 1]")
    return alpha ** (s / r)


def phi_max(a: float, b: float, r: int, s: int) -> ExtremalPoint:
    """Maximum of ``min(a d(K_s), b d(indep r-set))`` over the two families.

    Each defining equation has an increasing side vs a decreasing side on
    [0, 1], so its crossing is unique and bisection finds it.
    """
    if a <= 0 or b <= 0:
        raise SolverError("a and b must be positive")
    if r < 3 or s < 3:
        raise SolverError("r and s must be at least 3")

    def f_alpha(t):
        return a * t ** s - b * indep_poly(r, 1 - t)

    def f_beta(t):
        return b * t ** r - a * indep_poly(s, 1 - t)

    alpha = bisect(f_alpha, 0.0, 1.0)
    beta = bisect(f_beta, 0.0, 1.0)
    v_q, v_qbar = a * alpha ** s, b * beta ** r
    scale = max(a, b)
    family = _pick(v_q, v_qbar)
    return ExtremalPoint(
        family=family,
        t=beta if family == QBAR else alpha,
        value=max(v_q, v_qbar),
        roots={"alpha": alpha, "beta": beta, "value_Q": v_q, "value_Qbar": v_qbar},
        residuals={"alpha": f_alpha(alpha) / scale, "beta": f_beta(beta) / scale},
    )


def rho_maxmin(r: int) -> ExtremalPoint:
    """Asymptotic maximum of ``min(d(K_r), d(indep r-set))``: ``rho^r`` where
    ``rho^r = (1 - rho)^r + r rho (1 - rho)^(r-1)``."""
    if r < 3:
        raise SolverError("r must be at least 3")

    def f(t):
        return t ** r - indep_poly(r, 1 - t)

    rho = bisect(f, 0.0, 1.0)
    return ExtremalPoint(family=TIE, t=rho, value=rho ** r, roots={"rho": rho},
                         residuals={"rho": f(rho)})


def lemma_ineq_root(r: int, s: int) -> float:
    """Unique positive root of ``(a + 1)^(r-1) - 1 = (r-1)(s-1) a``.

    ``g(a) = (r-1)(s-1) a - (a + 1)^(r-1) + 1`` is concave, vanishes at 0 and is
    increasing there, so it is positive just right of 0 and eventually negative.
    """
    if r < 3 or s < 3:
        raise SolverError("r and s must be at least 3")
    c = (r - 1) * (s - 1)

    def g(a):
        return c * a - (a + 1) ** (r - 1) + 1

    hi = 1.0
    while g(hi) >= 0:
        hi *= 2
    return bisect(g, 1e-9, hi)


def lemma_ineq_margin(r: int, s: int) -> float:
    """``(1 + 1/a) - (1 + 1/((r-1)(s-1) a))^(s-1)`` at the root ``a``; positive."""
    alpha = lemma_ineq_root(r, s)
    return (1 + 1 / alpha) - (1 + 1 / ((r - 1) * (s - 1) * alpha)) ** (s - 1)


# -- Figure-style curves -------------------------------------------------------------

@dataclass(frozen=True)
class CurveRow:
    theta: float
    family: str
    q_density: float
    p_density: float


def family_profile(family: str, theta: float) -> Profile:
    """Profile of Q_{n, theta n} or Qbar_{n, theta n}."""
    if family == Q:
        return Profile((theta,), (1 - theta,))
    if family == QBAR:
        return Profile((0.0, 1 - theta), (theta, 0.0))
    raise SolverError(f"unknown family {family!r}")


def curve(r: int, s: int, steps: int) -> list[CurveRow]:
    """(independent r-set density, K_s density) along both families for
    theta on a uniform grid of ``steps`` points."""
    if steps < 2:
        raise SolverError("steps must be at least 2")
    rows = []
    for i in range(steps):
        theta = i / (steps - 1)
        for fam in (Q, QBAR):
            P = family_profile(fam, theta)
            rows.append(CurveRow(theta, fam, q_density(P, r), p_density(P, s)))
    return rows


def curve_intersection(rows: list[CurveRow]) -> tuple[float, float]:
    """Interior crossing point (q, p) of the Q and Qbar polylines.

    Both curves are graphs of decreasing functions p(q); the Qbar polyline is
    interpolated at the Q polyline's q values and the sign change of the
    difference is located linearly.  Near the shared endpoints (empty and
    complete graph) the curves touch and interpolation noise can flip signs,
    so the crossing farthest from them (largest min(q, p)) is returned.
    """
    qq = np.array([(r.q_density, r.p_density) for r in rows if r.family == Q])
    qb = np.array([(r.q_density, r.p_density) for r in rows if r.family == QBAR])
    order = np.argsort(qb[:, 0])
    diff = qq[:, 1] - np.interp(qq[:, 0], qb[order, 0], qb[order, 1])
    crossings = []
    for i in range(len(diff) - 1):
        d0, d1 = diff[i], diff[i + 1]
        if d0 == 0:
            crossings.append(qq[i])
        elif (d0 > 0) != (d1 > 0) and d1 != 0:
            crossings.append(qq[i] + d0 / (d0 - d1) * (qq[i + 1] - qq[i]))
    crossings = [pt for pt in crossings if min(pt) > 0]
    if crossings:
        pt = max(crossings, key=min)
        return float(pt[0]), float(pt[1])
    raise SolverError("curves do not cross in the interior")


# -- optimizer ---------------------------------------------------------------------

STEP_MIN = 1e-10
MAX_ITERS = 20_000
SUPPORT_TOL = 1e-4
MIX_ITERS = 8


def _densities_and_grads(z, r, s):
    # z interleaves x_1, y_1, ..., x_k, y_k
    k = len(z) // 2
    x, y = z[0::2], z[1::2]
    X = sum(x)
    Y = sum(y)
    # T[i] = sum_{j > i} x_j ; U[i] = sum_{j >= i} y_j
    T = [0.0] * k
    U = [0.0] * k
    acc = 0.0
    for i in range(k - 1, -1, -1):
        T[i] = acc
        acc += x[i]
    acc = 0.0
    for i in range(k - 1, -1, -1):
        acc += y[i]
        U[i] = acc
    p = X ** s + s * sum(y[i] * T[i] ** (s - 1) for i in range(k - 1))
    q = Y ** r + r * sum(x[i] * U[i] ** (r - 1) for i in range(k))
    gp = [0.0] * (2 * k)
    gq = [0.0] * (2 * k)
    run = 0.0  # s(s-1) sum_{i < l} y_i T_i^(s-2)
    base = s * X ** (s - 1)
    for l in range(k):
        gp[2 * l] = base + run
        if l < k - 1:
            gp[2 * l + 1] = s * T[l] ** (s - 1)
            run += s * (s - 1) * y[l] * T[l] ** (s - 2)
    run = 0.0  # r(r-1) sum_{i <= l} x_i U_i^(r-2)
    base = r * Y ** (r - 1)
    for l in range(k):
        gq[2 * l] = r * U[l] ** (r - 1)
        run += r * (r - 1) * x[l] * U[l] ** (r - 2)
        gq[2 * l + 1] = base + run
    return p, q, gp, gq


def project_simplex(v):
    """Euclidean projection onto the probability simplex (sort-and-threshold)."""
    u = sorted(v, reverse=True)
    css = 0.0
    theta = 0.0
    for i, ui in enumerate(u):
        css += ui
        t = (css - 1.0) / (i + 1)
        if ui - t > 0:
            theta = t
    return [max(vi - theta, 0.0) for vi in v]


def _tangent(g, z, eps=0.0):
    # projection of g onto the tangent cone of the simplex at z; coordinates
    # within eps of zero count as active
    free = [True] * len(g)
    while True:
        idx = [i for i in range(len(g)) if free[i]]
        if not idx:
            return [0.0] * len(g)
        mean = sum(g[i] for i in idx) / len(idx)
        d = [(g[i] - mean) if free[i] else 0.0 for i in range(len(g))]
        blocked = [i for i in idx if z[i] <= eps and d[i] < 0]
        if not blocked:
            return d
        for i in blocked:
            free[i] = False


def _restricted(g, free):
    idx = [i for i, f in enumerate(free) if f]
    mean = sum(g[i] for i in idx) / len(idx) if idx else 0.0
    return [(g[i] - mean) if f else 0.0 for i, f in enumerate(free)]


def _norm(d):
    return math.sqrt(sum(v * v for v in d))


def _directions(gA, gB, z, eps=0.0):
    # both projected gradients, then the steepest common ascent direction:
    # the mixture of gA, gB whose projection (active set within eps) is shortest
    out = [_tangent(gA, z), _tangent(gB, z)]

    def mixed(lam):
        return _tangent([lam * u + (1 - lam) * v for u, v in zip(gA, gB)], z, eps)

    # the norm is piecewise quadratic in lam; solve on the active set of the
    # current mixture and repeat until that set settles
    lam = 0.5
    for _ in range(MIX_ITERS):
        free = [abs(v) > 0 or not z[i] <= eps for i, v in enumerate(mixed(lam))]
        pa, pb = _restricted(gA, free), _restricted(gB, free)
        diff = [u - v for u, v in zip(pa, pb)]
        dd = sum(v * v for v in diff)
        new = min(max(-sum(u * v for u, v in zip(diff, pb)) / dd, 0.0), 1.0) if dd > 0 else lam
        if new == lam:
            break
        lam = new
    out.append(mixed(lam))
    return [d for d in out if _norm(d) > 0]


@dataclass
class LocalRun:
    z: list
    value: float
    iterations: int
    converged: bool


def local_maximize(z, a, b, r, s, step=0.05) -> LocalRun:
    """Projected ascent on ``min(a p, b q)`` from ``z``.

    Each iteration tries the tangent-cone gradients of both terms and their
    min-norm mixture; the best improving trial point is taken and the step
    grows, otherwise the step halves.  Stops once the step drops below
    ``STEP_MIN``.
    """
    p, q, gp, gq = _densities_and_grads(z, r, s)
    val = min(a * p, b * q)
    for it in range(MAX_ITERS):
        if step < STEP_MIN:
            return LocalRun(z, val, it, True)
        dirs = _directions([a * v for v in gp], [b * v for v in gq], z, step)
        best = None
        for d in dirs:
            nd = _norm(d)
            trial = project_simplex([zi + step * di / nd for zi, di in zip(z, d)])
            tp, tq, tgp, tgq = _densities_and_grads(trial, r, s)
            tval = min(a * tp, b * tq)
            if tval > val and (best is None or tval > best[0]):
                best = (tval, trial, tp, tq, tgp, tgq)
        if best is None:
            step *= 0.5
            continue
        val, z, p, q, gp, gq = best
        step = min(step * 2.0, 0.5)
    return LocalRun(z, val, MAX_ITERS, False)


def support_family(P: Profile, tol: float = SUPPORT_TOL) -> str | None:
    """``Q`` if the mass sits on x_1, y_1; ``Qbar`` if on y_1, x_2 (within ``tol``)."""
    z = P.blocks()
    outside_q = sum(z) - z[0] - z[1]
    outside_qbar = sum(z) - z[1] - (z[2] if len(z) > 2 else 0.0)
    if outside_q <= tol:
        return Q
    if outside_qbar <= tol:
        return QBAR
    return None


@dataclass
class OptimizeResult:
    profile: Profile
    value: float
    reduced: Profile
    support: str | None
    gap: float
    bound: float
    converged: bool
    starts: int
    converged_starts: int

    @property
    def reached_bound(self) -> bool:
        return abs(self.value - self.bound) <= 1e-6

    def to_json(self) -> dict:
        return {
            "value": self.value,
            "profile": self.profile.to_json(),
            "reduced": self.reduced.to_json(),
            "support": self.support,
            "gap": self.gap,
            "bound": self.bound,
            "reached_bound": self.reached_bound,
            "converged": self.converged,
            "starts": self.starts,
            "converged_starts": self.converged_starts,
        }


def start_point(seed: int, index: int, k: int) -> list[float]:
    """Uniform random point of W_k; depends only on ``(seed, index)``."""
    rng = np.random.default_rng([seed, index])
    return [float(v) for v in rng.dirichlet(np.ones(2 * k))]


def optimize_profile(a: float, b: float, r: int, s: int, k: int, starts: int = 64,
                     seed: int = 0, initial: Profile | None = None) -> OptimizeResult:
    """Multistart maximization of ``min(a p_s, b q_r)`` over W_k.

    ``initial`` (a profile with ``k`` blocks) is run as an extra first start.
    The analytic optimum from :func:`phi_max` is recorded as ``bound`` for
    comparison; it plays no part in the search.
    """
    if not 1 <= k <= 5:
        raise SolverError("k must be in 1..5")
    if starts < 1:
        raise SolverError("need at least one start")
    if a <= 0 or b <= 0:
        raise SolverError("a and b must be positive")
    if initial is not None and initial.k != k:
        raise SolverError(f"initial profile has {initial.k} blocks, expected {k}")
    points = [start_point(seed, i, k) for i in range(starts)]
    if initial is not None:
        points.insert(0, initial.blocks())
    best = None
    n_conv = 0
    for z0 in points:
        run = local_maximize(z0, a, b, r, s)
        n_conv += run.converged
        if best is None or run.value > best.value:
            best = run
    z = best.z
    mass = sum(z)
    P = Profile.from_blocks([v / mass for v in z])
    reduced = reduce_nondegenerate(P, SUPPORT_TOL)
    gap = abs(a * p_density(P, s) - b * q_density(P, r))
    bound = phi_max(a, b, r, s).value if r >= 3 and s >= 3 else float("nan")
    return OptimizeResult(P, min(a * p_density(P, s), b * q_density(P, r)), reduced,
                          support_family(reduced), gap, bound, best.converged, len(points), n_conv)
