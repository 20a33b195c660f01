"""Pliss-type time selection and backward-contraction checks along orbits.

Index convention
----------------
A time ``n`` qualifies with exponent ``c`` when every backward window
anchored at ``n`` shows cumulative expansion: the product of inverse
derivative norms over the ``j`` points ``f^n(x), f^{n-1}(x), ...,
f^{n-j+1}(x)`` is at most ``exp(-c j)`` for every ``1 <= j <= n``.  Note
the window *includes the derivative at the time-n point itself*; part of
the literature anchors the window one step earlier instead.  That shifted
variant is available as ``convention="preceding"`` and differs from the
default by exactly one index.

With ``a_i = -log ||Df(f^{i-1}(x))^{-1}||`` the default convention makes
``n`` qualify iff the excess sums ``S_t = a_1 + ... + a_t - c t`` satisfy
``S_{n+1} >= S_k`` for every ``1 <= k <= n``; the Pliss selection proper
(:func:`pliss_times`) additionally requires ``S_t >= S_0 = 0``.  Both are
found by one linear pass against the running maximum of ``S``.

The convention matters for backward contraction: pulling a point back from
time ``n`` composes inverse branches whose derivatives sit at the
*preimages* ``f^{n-1}(x), ..., f^{n-j}(x)``.  Those are exactly the factors
certified by the ``"preceding"`` convention; the default certificate is
shifted by one and leaves a single uncancelled step of expansion, so
contraction probes should be anchored at preceding-convention times.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import ndimage

from . import orbits, torus
from .errors import InverseBranchLost

__all__ = [
    "PlissResult",
    "HyperbolicTimeReport",
    "pliss_times",
    "hyperbolic_times",
    "hyperbolic_times_from_logs",
    "verify_certificate",
    "contraction_check",
    "contraction_check_many",
    "estimate_eps0",
]


@dataclass(frozen=True)
class PlissResult:
    """Selected times, the density bound ``d0 = (c2-c1)/(A-c1)``, and the
    precondition flag (mean of the sequence at least ``c2``).  When the
    precondition fails the certificate is empty but the object is still a
    valid report."""

    indices: np.ndarray
    d0: float
    n: int
    precondition_ok: bool


@dataclass(frozen=True)
class HyperbolicTimeReport:
    """Detected times with exponent ``c`` along one orbit.

    ``density_liminf_proxy`` is the minimum running density over the final
    half of the trace, a finite-orbit stand-in for the asymptotic density.
    ``eps0`` is filled by callers that also ran :func:`estimate_eps0`.
    """

    times: np.ndarray
    density_liminf_proxy: float
    c: float
    d0: float
    sup_a: float
    precondition_ok: bool
    eps0: float = None


def _excess_sums(a: np.ndarray, c1: float) -> np.ndarray:
    """S_t = sum(a[:t]) - c1 * t for t = 1..n (S_0 = 0 kept implicit)."""
    return np.cumsum(a) - c1 * np.arange(1, len(a) + 1)


def pliss_times(a, A: float, c1: float, c2: float) -> PlissResult:
    """Times ``t`` whose every backward tail average is at least ``c1``.

    Parameters
    ----------
    a : sequence of reals, each at most ``A``
    A, c1, c2 : reals with ``A >= c2 > c1 > 0``

    Returns
    -------
    PlissResult
        Indices are 1-based: ``t`` qualifies iff
        ``sum(a[k:t]) >= c1 * (t - k)`` for every ``0 <= k < t``.  When the
        sequence mean is at least ``c2`` their count exceeds
        ``d0 * n`` with ``d0 = (c2 - c1)/(A - c1)``.
    """
    a = np.asarray(a, dtype=float)
    if not (A >= c2 > c1 > 0):
        raise ValueError("need A >= c2 > c1 > 0")
    if a.size == 0:
        raise ValueError("empty sequence")
    if a.max() > A:
        raise ValueError("sequence exceeds the bound A")
    n = len(a)
    d0 = (c2 - c1) / (A - c1) if A > c1 else 1.0
    ok = bool(a.sum() >= c2 * n)
    if not ok:
        return PlissResult(indices=np.empty(0, dtype=np.int64), d0=d0, n=n,
                           precondition_ok=False)
    S = _excess_sums(a, c1)
    prev_max = np.empty(n)
    prev_max[0] = 0.0
    np.maximum.accumulate(np.maximum(S, 0.0)[:-1], out=prev_max[1:])
    sel = S >= prev_max
    return PlissResult(indices=np.nonzero(sel)[0] + 1, d0=d0, n=n,
                       precondition_ok=True)


def hyperbolic_times_from_logs(neg_log_inv, c: float,
                               convention: str = "endpoint") -> HyperbolicTimeReport:
    """Detect times with exponent ``c`` from the per-step values
    ``a_i = -log ||Df(f^{i-1}(x))^{-1}||``.

    Runs the Pliss selection with ``c1 = c`` and ``c2 = 3c/2`` against the
    supremum of the sequence.  ``convention="endpoint"`` (default) anchors
    backward windows at the time-n point itself; ``"preceding"`` anchors
    them one step earlier (see the module docstring).
    """
    if c <= 0:
        raise ValueError("c must be positive")
    if convention not in ("endpoint", "preceding"):
        raise ValueError("convention must be 'endpoint' or 'preceding'")
    a = np.asarray(neg_log_inv, dtype=float)
    N = len(a)
    A = float(a.max())
    c1, c2 = c, 1.5 * c
    d0 = (c2 - c1) / (A - c1) if A > c1 else 1.0
    ok = bool(A >= c2 and a.sum() >= c2 * N)
    if not ok:
        return HyperbolicTimeReport(times=np.empty(0, dtype=np.int64),
                                    density_liminf_proxy=0.0, c=c, d0=d0,
                                    sup_a=A, precondition_ok=False)
    S = _excess_sums(a, c1)
    if convention == "preceding":
        prev_max = np.empty(N)
        prev_max[0] = 0.0
        np.maximum.accumulate(np.maximum(S, 0.0)[:-1], out=prev_max[1:])
        times = np.nonzero(S >= prev_max)[0] + 1
        horizon = N
    else:
        # windows exclude the k = 0 full sum; times are shifted down by one
        prev_max = np.empty(N)
        prev_max[0] = -np.inf
        np.maximum.accumulate(S[:-1], out=prev_max[1:])
        sel = S >= prev_max
        sel[0] = False  # t = 1 would be time 0, which has no window
        times = np.nonzero(sel)[0]  # n = t - 1 with t 1-based == index here
        horizon = N - 1
    running = np.cumsum(np.bincount(times, minlength=horizon + 1)[1:])
    ms = np.arange(1, horizon + 1)
    half = ms >= math.ceil(horizon / 2)
    density = float((running[half] / ms[half]).min()) if half.any() else 0.0
    return HyperbolicTimeReport(times=times, density_liminf_proxy=density,
                                c=c, d0=d0, sup_a=A, precondition_ok=True)


def hyperbolic_times(trace: orbits.OrbitTrace, c: float,
                     convention: str = "endpoint") -> HyperbolicTimeReport:
    """Hyperbolic times of an orbit trace (see module docstring)."""
    return hyperbolic_times_from_logs(-trace.log_inv_norm, c, convention)


def verify_certificate(a, times, c1: float, convention: str = "endpoint") -> np.ndarray:
    """Exhaustively re-check every reported time against the prefix sums.

    Zero tolerance: the comparisons are exact on the accumulated sums.
    Returns one boolean per time.
    """
    a = np.asarray(a, dtype=float)
    pre = np.concatenate([[0.0], np.cumsum(a)])
    out = np.empty(len(times), dtype=bool)
    for idx, t in enumerate(np.asarray(times, dtype=int)):
        if convention == "endpoint":
            kk = np.arange(1, t + 1)
            tt = t + 1
        else:
            kk = np.arange(0, t)
            tt = t
        out[idx] = bool(np.all(pre[tt] - pre[kk] >= c1 * (tt - kk)))
    return out


# ---------------------------------------------------------------------------
# backward contraction through inverse branches
# ---------------------------------------------------------------------------

def _inverse_step(f: torus.TorusMap, z: np.ndarray, guide: np.ndarray) -> np.ndarray:
    """Preimages of the rows of ``z`` under ``f``, taking the branch nearest
    the corresponding row of ``guide`` (which must be an actual preimage of
    a point close to ``z``)."""
    w = np.empty_like(z)
    for i in range(1, f.n):
        lam = float(f.eigenvalues[i])
        off = np.mod(z[:, i] - lam * guide[:, i] + 0.5, 1.0) - 0.5
        if np.any(np.abs(off) >= 0.5 - 1e-12):
            raise InverseBranchLost("transverse preimage is ambiguous")
        w[:, i] = guide[:, i] + off / lam
    lam1 = float(f.eigenvalues[0])
    if not f.deformed:
        off = np.mod(z[:, 0] - lam1 * guide[:, 0] + 0.5, 1.0) - 0.5
        w[:, 0] = guide[:, 0] + off / lam1
        return w
    th = f.theta.value(torus.recenter(w[:, 1])) if f.n == 2 else 1.0
    g1 = guide[:, 0]
    lift_guide = lam1 * g1 + th * f.alpha.deviation(torus.recenter(g1))
    delta = np.mod(z[:, 0] - lift_guide + 0.5, 1.0) - 0.5
    target = lift_guide + delta
    w1 = g1.copy()
    for _ in range(8):
        xi = torus.recenter(w1)
        val = lam1 * w1 + th * f.alpha.deviation(xi)
        slope = lam1 + th * (f.alpha.derivative(xi) - lam1)
        step = (val - target) / slope
        w1 -= step
        if np.abs(step).max() < 1e-15:
            break
    else:
        raise InverseBranchLost("weak-direction branch solve did not converge")
    if np.any(np.abs(w1 - g1) >= 0.5 / lam1):
        raise InverseBranchLost("weak-direction preimage left its branch cell")
    w[:, 0] = w1
    return w


def _euclid_wrap(x, y):
    # the contraction certificate multiplies Euclidean operator norms, so
    # the distances it controls are Euclidean ones; the max norm used for
    # dynamical balls differs by up to sqrt(dim) and would leak that factor
    # into the ratios
    d = np.mod(np.asarray(x) - np.asarray(y) + 0.5, 1.0) - 0.5
    return np.sqrt(np.sum(d * d, axis=-1))


def _pullback_ratios(f: torus.TorusMap, points_stack: np.ndarray,
                     orbit_idx: np.ndarray, times: np.ndarray, eps0: float,
                     probes: int, seed: int, c: float) -> np.ndarray:
    """Backward-contraction statistic for ``(orbit, time)`` pairs, all
    probes of all pairs advancing as parallel lanes.  ``points_stack`` has
    shape ``(orbits, N + 1, dim)``."""
    pairs = times.size
    lanes = pairs * probes
    n_lane = np.repeat(times, probes)
    o_lane = np.repeat(orbit_idx, probes)
    x_end = points_stack[o_lane, n_lane]
    rng = np.random.default_rng(seed)
    offs = rng.uniform(-eps0, eps0, size=(lanes, f.n))
    # probes too close to the center make the denominator float noise
    degenerate = np.sqrt((offs * offs).sum(axis=1)) < 0.2 * eps0
    offs[degenerate] = 0.5 * eps0
    z = np.mod(x_end + offs, 1.0)
    d_end = _euclid_wrap(z, x_end)
    ratios = np.ones(lanes)
    cur = z
    for j in range(1, int(times.max()) + 1):
        active = n_lane >= j
        guide = points_stack[o_lane[active], n_lane[active] - j]
        w = _inverse_step(f, cur[active], guide)
        cur[active] = w
        d = _euclid_wrap(w, guide)
        weight = math.exp(0.5 * c * j)
        ratios[active] = np.maximum(ratios[active], d * weight / d_end[active])
    return ratios.reshape(pairs, probes).max(axis=1)


def contraction_check_many(f: torus.TorusMap, points: np.ndarray, times,
                           eps0: float, probes: int, seed: int,
                           c: float) -> np.ndarray:
    """Max weighted backward-contraction ratio for several times of one
    orbit at once (probes of all times run as parallel lanes).

    For each time ``n``, probes ``z`` are sampled with ``f^n(z)`` uniform in
    the ``eps0``-ball around ``f^n(x)`` and pulled back along the orbit's
    inverse branches; the statistic is the max over ``j`` and probes of
    ``d(f^{n-j}(x), f^{n-j}(z)) * exp(c j / 2) / d(f^n(x), f^n(z))``.
    A value at most ``1 + tol`` certifies backward contraction numerically.
    Distances here are Euclidean (with wraparound): they are what the
    products of Euclidean operator norms in the time certificates control.
    """
    times = np.asarray(sorted(int(t) for t in times), dtype=np.int64)
    if times.size == 0:
        return np.empty(0)
    if times.min() < 1 or times.max() >= points.shape[0]:
        raise ValueError("times must lie inside the trace")
    orbit_idx = np.zeros(times.size, dtype=np.int64)
    return _pullback_ratios(f, points[None], orbit_idx, times, eps0, probes,
                            seed, c)


def contraction_check_ensemble(f: torus.TorusMap, points_stack: np.ndarray,
                               times_per_orbit, eps0: float, probes: int,
                               seed: int, c: float) -> list:
    """Contraction statistics for several orbits at once.

    ``times_per_orbit`` is a sequence (one entry per orbit in
    ``points_stack``) of time lists; returns a matching list of per-time
    ratio arrays.  All probes advance together, which keeps the numpy
    overhead of the backward sweep independent of the orbit count.
    """
    orbit_idx = []
    flat_times = []
    for s, ts in enumerate(times_per_orbit):
        for t in ts:
            orbit_idx.append(s)
            flat_times.append(int(t))
    if not flat_times:
        return [np.empty(0) for _ in times_per_orbit]
    orbit_idx = np.asarray(orbit_idx, dtype=np.int64)
    flat_times = np.asarray(flat_times, dtype=np.int64)
    ratios = _pullback_ratios(f, points_stack, orbit_idx, flat_times, eps0,
                              probes, seed, c)
    out = []
    pos = 0
    for ts in times_per_orbit:
        out.append(ratios[pos:pos + len(ts)])
        pos += len(ts)
    return out


def contraction_check(f: torus.TorusMap, trace: orbits.OrbitTrace, n: int,
                      eps0: float, probes: int, seed: int, c: float) -> float:
    """Backward-contraction statistic at one verified time ``n`` (see
    :func:`contraction_check_many`)."""
    if eps0 <= 0:
        raise ValueError("eps0 must be positive")
    out = contraction_check_many(f, trace.points, [n], eps0, probes, seed, c)
    return float(out[0])


# ---------------------------------------------------------------------------
# contraction radius from the modulus of continuity of log ||Df^{-1}||
# ---------------------------------------------------------------------------

def estimate_eps0(f: torus.TorusMap, c: float, grid: int) -> float:
    """Largest grid-certified radius within which the inverse-norm ratio
    between any two points stays below ``exp(c/2)``.

    Scans a ladder of radii using wraparound max filters of
    ``log ||Df^{-1}||`` on a ``grid``-per-axis mesh; a radius of ``m``
    cells is accepted only when the spread over ``m + 1`` cells meets the
    bound, so off-grid pairs have one cell of slack.  When even one cell
    fails, falls back to half the first-order estimate ``(c/2) / L`` with
    ``L`` the gridded Lipschitz constant.  Always returns a positive
    value; for constant-derivative maps this is the torus max-norm
    diameter 0.5.
    """
    if c <= 0:
        raise ValueError("c must be positive")
    if grid < 16:
        raise ValueError("grid must be at least 16")
    pts = torus._grid_points(f.n, grid)
    a, b = torus._jacobian_entries(f, pts)
    logs = np.log(torus._inv_norm_from_entries(f, a, b))
    shape = (grid,) * f.n
    L = logs.reshape(shape)
    h = 1.0 / grid
    bound = 0.5 * c

    lip = 0.0
    for axis in range(f.n):
        lip = max(lip, float(np.abs(L - np.roll(L, 1, axis=axis)).max()) / h)
    if lip == 0.0:
        return 0.5

    best = None
    m = 1
    max_m = grid // 2 - 1
    while m <= max_m:
        spread = ndimage.maximum_filter(L, size=2 * (m + 1) + 1, mode="wrap") - L
        if float(spread.max()) <= bound:
            best = m * h
            m = m * 2 if m > 1 else 2
        else:
            break
    if best is None:
        return min(0.5 * bound / lip, h)
    return min(best, 0.5)
