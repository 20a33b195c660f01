"""Orbit iteration, Birkhoff statistics, Lyapunov spectra, dynamical balls.

Orbit stepping is exact modular arithmetic, not float iteration.  A float
orbit of ``x -> l x mod 1`` with a power-of-two ``l`` is an exact binary
shift, so every double collapses onto the fixed point 0 after ~50 steps
and long-run statistics are garbage.  Instead, points live on the
invariant lattice ``{k / M : 0 <= k < M}`` with ``M = 2^61 - 45``, a prime
with primitive root 2 (so multiplication by 2 cycles through ~2^60 lattice
points before repeating; the orders of 3, 4 and 5 all exceed 2^58).
Integer multiplication by an eigenvalue is an exact permutation of the
lattice, no mantissa loss ever, and the deformation kick is quantized to
the nearest lattice point, an error of at most ``2^-61`` per step, below
double rounding.  Orbits computed this way are genuine orbits of the
quantized map and show Lebesgue-typical statistics.

Single orbits are carried as :class:`OrbitTrace` objects holding per-step
log inverse-derivative norms, log Jacobians and region flags.  Ensemble
variants iterate many seeds as parallel numpy lanes; a lane computes
exactly the same sequence as the scalar path, so ensemble results are
reproducible seed by seed.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass

import numpy as np

from . import torus

__all__ = [
    "OrbitTrace",
    "LyapunovEstimate",
    "iterate",
    "lyapunov_spectrum",
    "visit_fraction",
    "birkhoff_average",
    "dynamical_ball_fraction",
    "wrap_distance",
    "ensemble_window_fraction",
    "ensemble_lyapunov",
    "ensemble_logs",
    "random_points",
    "trace_to_csv",
]

LATTICE_MODULUS = (1 << 61) - 45  # prime, primitive root 2


def wrap_distance(x, y):
    """Torus max-norm distance with wraparound (dynamical balls are boxes)."""
    d = np.mod(np.asarray(x, dtype=float) - np.asarray(y, dtype=float) + 0.5, 1.0) - 0.5
    return np.max(np.abs(d), axis=-1)


# ---------------------------------------------------------------------------
# lattice stepping
# ---------------------------------------------------------------------------

def _mulmod(k: np.ndarray, lam: int) -> np.ndarray:
    """lam * k mod M by binary doubling; every intermediate fits in int64."""
    res = np.zeros_like(k)
    base = k % LATTICE_MODULUS
    while lam:
        if lam & 1:
            res = (res + base) % LATTICE_MODULUS
        base = (base + base) % LATTICE_MODULUS
        lam >>= 1
    return res


def _to_lattice(x) -> np.ndarray:
    pts = np.atleast_2d(np.asarray(x, dtype=float))
    return np.rint(np.mod(pts, 1.0) * LATTICE_MODULUS).astype(np.int64) % LATTICE_MODULUS


def _lattice_floats(k: np.ndarray) -> np.ndarray:
    return k / LATTICE_MODULUS


def _lattice_step(f: torus.TorusMap, k: np.ndarray) -> np.ndarray:
    cols = [_mulmod(k[:, i], f.eigenvalues[i]) for i in range(f.n)]
    if f.deformed:
        xi = torus.recenter(_lattice_floats(k))
        corr = f.alpha.deviation(xi[:, 0])
        if f.n == 2:
            corr = corr * f.theta.value(xi[:, 1])
        kick = np.rint(corr * LATTICE_MODULUS).astype(np.int64)
        cols[0] = (cols[0] + kick) % LATTICE_MODULUS
    return np.column_stack(cols)


# ---------------------------------------------------------------------------
# traces
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class OrbitTrace:
    """Finite orbit with per-step derivative data.

    ``points`` has ``N + 1`` rows; the logs and flags have length ``N`` and
    refer to the derivative at ``points[i]``, i.e. to the step from
    ``points[i]`` to ``points[i + 1]``.  Consecutive points are exactly one
    lattice step apart (see module docstring).
    """

    points: np.ndarray
    log_inv_norm: np.ndarray
    log_det: np.ndarray
    in_V: np.ndarray
    in_W: np.ndarray

    def __post_init__(self):
        N = len(self.log_inv_norm)
        if self.points.shape[0] != N + 1:
            raise ValueError("points must have one more row than the per-step arrays")
        for arr in (self.log_det, self.in_V, self.in_W):
            if len(arr) != N:
                raise ValueError("per-step arrays must share one length")

    @property
    def N(self) -> int:
        return len(self.log_inv_norm)


@dataclass(frozen=True)
class LyapunovEstimate:
    """Lyapunov exponents sorted descending, with a block-consistency
    diagnostic (max deviation of block means from the global mean)."""

    exponents: np.ndarray
    N: int
    per_block_drift: float


def iterate(f: torus.TorusMap, x0, N: int, delta1: float = None) -> OrbitTrace:
    """Iterate ``x0`` for ``N`` steps recording all per-step quantities.

    ``delta1`` sets the threshold of the non-expanding region flag
    (``inv_norm > 1/(1+delta1)``); when omitted the flag marks the strictly
    non-expanding region ``inv_norm > 1``.
    """
    if N < 1:
        raise ValueError("N must be >= 1")
    k = _to_lattice(x0)
    pts = np.empty((N + 1, f.n))
    for i in range(N):
        pts[i] = _lattice_floats(k)[0]
        k = _lattice_step(f, k)
    pts[N] = _lattice_floats(k)[0]
    head = pts[:-1]
    a, b = torus._jacobian_entries(f, head)
    invn = torus._inv_norm_from_entries(f, a, b)
    rest = float(np.prod(f.eigenvalues[1:])) if f.n > 1 else 1.0
    log_det = np.log(np.abs(a) * rest)
    threshold = 1.0 if delta1 is None else 1.0 / (1.0 + delta1)
    return OrbitTrace(
        points=pts,
        log_inv_norm=np.log(invn),
        log_det=log_det,
        in_V=invn > threshold,
        in_W=torus.in_window(f, head),
    )


def visit_fraction(trace: OrbitTrace, region: str) -> float:
    """Fraction of orbit steps spent in region ``"V"`` or ``"W"``."""
    if region not in ("V", "W"):
        raise ValueError("region must be 'V' or 'W'")
    flags = trace.in_V if region == "V" else trace.in_W
    return float(np.mean(flags))


def birkhoff_average(trace: OrbitTrace, observable) -> float:
    """Arithmetic mean of a per-step observable along the trace."""
    obs = np.asarray(observable, dtype=float)
    if len(obs) != trace.N:
        raise ValueError("observable must have one value per orbit step")
    return float(obs.mean())


# ---------------------------------------------------------------------------
# Lyapunov spectra via per-step QR reorthogonalization
# ---------------------------------------------------------------------------

def _qr_logs(f: torus.TorusMap, pts_head: np.ndarray) -> np.ndarray:
    """Per-step log diagonal of the R factors along one orbit (n <= 2)."""
    a, b = torus._jacobian_entries(f, pts_head)
    N = pts_head.shape[0]
    if f.n == 1:
        return np.log(np.abs(a))[:, None]
    lam2 = float(f.eigenvalues[1])
    logs = np.empty((N, 2))
    q00, q01, q10, q11 = 1.0, 0.0, 0.0, 1.0
    for i in range(N):
        m00 = a[i] * q00 + b[i] * q10
        m01 = a[i] * q01 + b[i] * q11
        m10 = lam2 * q10
        m11 = lam2 * q11
        r0 = np.hypot(m00, m10)
        cos = m00 / r0
        sin = m10 / r0
        r11 = -sin * m01 + cos * m11
        logs[i, 0] = np.log(r0)
        logs[i, 1] = np.log(abs(r11))
        q00, q01, q10, q11 = cos, -sin, sin, cos
    return logs


def lyapunov_spectrum(f: torus.TorusMap, x0, N: int, blocks: int = 10) -> LyapunovEstimate:
    """Lyapunov exponents of the orbit of ``x0``, QR-reorthogonalized at
    every step, reported sorted descending.

    The sum of the exponents always equals the Birkhoff average of
    ``log |det Df|`` up to roundoff (the cocycle preserves determinants).
    """
    if N < 1000:
        raise ValueError("N must be at least 1000 for a spectrum estimate")
    trace = iterate(f, x0, N)
    logs = _qr_logs(f, trace.points[:-1])
    exps = logs.mean(axis=0)
    edges = np.linspace(0, N, blocks + 1, dtype=int)
    drift = 0.0
    for k in range(blocks):
        blk = logs[edges[k]:edges[k + 1]].mean(axis=0)
        drift = max(drift, float(np.abs(blk - exps).max()))
    order = np.argsort(exps)[::-1]
    return LyapunovEstimate(exponents=exps[order], N=N, per_block_drift=drift)


# ---------------------------------------------------------------------------
# dynamical balls
# ---------------------------------------------------------------------------

def dynamical_ball_fraction(f: torus.TorusMap, x, n: int, eps: float,
                            samples: int, seed: int) -> float:
    """Monte Carlo volume fraction of the dynamical ball inside the
    ``eps``-ball around ``x``: the fraction of uniform samples whose first
    ``n`` iterates (indices ``0 .. n-1``) stay within ``eps`` of the orbit
    of ``x`` in the wraparound max norm.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if n < 1:
        raise ValueError("n must be >= 1")
    rng = np.random.default_rng(seed)
    x = np.atleast_1d(np.asarray(x, dtype=float))
    ys = np.mod(x[None, :] + rng.uniform(-eps, eps, size=(samples, f.n)), 1.0)
    alive = np.ones(samples, dtype=bool)
    kx = _to_lattice(x)
    ky = _to_lattice(ys)
    for _ in range(n - 1):
        kx = _lattice_step(f, kx)
        ky = _lattice_step(f, ky)
        alive &= wrap_distance(_lattice_floats(ky), _lattice_floats(kx)) <= eps
    return float(alive.mean())


# ---------------------------------------------------------------------------
# ensembles (vectorized lanes, one seed per lane)
# ---------------------------------------------------------------------------

def random_points(f: torus.TorusMap, seeds: int, seed: int) -> np.ndarray:
    """Uniform starting points, one per lane; lane ``k`` draws from the
    generator seeded ``(seed, k)`` so ensembles are reproducible lane by
    lane regardless of batching."""
    return np.stack([np.random.default_rng([seed, k]).random(f.n)
                     for k in range(seeds)])


def ensemble_window_fraction(f: torus.TorusMap, seeds: int, length: int,
                             seed: int) -> np.ndarray:
    """Per-seed fraction of time spent in the deformation window."""
    k = _to_lattice(random_points(f, seeds, seed))
    counts = np.zeros(seeds)
    for _ in range(length):
        counts += torus.in_window(f, _lattice_floats(k))
        k = _lattice_step(f, k)
    return counts / length


def ensemble_lyapunov(f: torus.TorusMap, seeds: int, length: int,
                      seed: int) -> np.ndarray:
    """Lyapunov exponents (sorted descending per row) for an ensemble of
    uniform starting points, one row per seed."""
    k = _to_lattice(random_points(f, seeds, seed))
    if f.n == 1:
        acc = np.zeros(seeds)
        for _ in range(length):
            a, _ = torus._jacobian_entries(f, _lattice_floats(k))
            acc += np.log(np.abs(a))
            k = _lattice_step(f, k)
        return (acc / length)[:, None]
    lam2 = float(f.eigenvalues[1])
    q00 = np.ones(seeds)
    q01 = np.zeros(seeds)
    q10 = np.zeros(seeds)
    q11 = np.ones(seeds)
    acc = np.zeros((seeds, 2))
    for _ in range(length):
        a, b = torus._jacobian_entries(f, _lattice_floats(k))
        m00 = a * q00 + b * q10
        m01 = a * q01 + b * q11
        m10 = lam2 * q10
        m11 = lam2 * q11
        r0 = np.hypot(m00, m10)
        cos = m00 / r0
        sin = m10 / r0
        r11 = -sin * m01 + cos * m11
        acc[:, 0] += np.log(r0)
        acc[:, 1] += np.log(np.abs(r11))
        q00, q01, q10, q11 = cos, -sin, sin, cos
        k = _lattice_step(f, k)
    exps = acc / length
    return np.sort(exps, axis=1)[:, ::-1]


def ensemble_logs(f: torus.TorusMap, seeds: int, length: int, seed: int,
                  store_points: bool = False):
    """Per-seed arrays of ``-log ||Df^{-1}||`` (shape ``(seeds, length)``)
    plus, optionally, the full orbit points (``(seeds, length + 1, n)``).
    The log arrays feed hyperbolic-time detection; the points feed the
    backward-contraction probes.
    """
    k = _to_lattice(random_points(f, seeds, seed))
    neg_log_inv = np.empty((seeds, length))
    points = np.empty((seeds, length + 1, f.n)) if store_points else None
    for i in range(length):
        xf = _lattice_floats(k)
        if store_points:
            points[:, i] = xf
        a, b = torus._jacobian_entries(f, xf)
        invn = torus._inv_norm_from_entries(f, a, b)
        neg_log_inv[:, i] = -np.log(invn)
        k = _lattice_step(f, k)
    if store_points:
        points[:, length] = _lattice_floats(k)
    return neg_log_inv, points


# ---------------------------------------------------------------------------
# export
# ---------------------------------------------------------------------------

def trace_to_csv(trace: OrbitTrace, path) -> None:
    """Write one row per orbit step: step, coordinates, logs, region flags."""
    n = trace.points.shape[1]
    header = ["step"] + [f"x{i + 1}" for i in range(n)] + \
        ["log_inv_norm", "log_det", "in_V", "in_W"]
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for i in range(trace.N):
            row = [i]
            row += [format(v, ".17g") for v in trace.points[i]]
            row += [format(trace.log_inv_norm[i], ".17g"),
                    format(trace.log_det[i], ".17g"),
                    int(trace.in_V[i]), int(trace.in_W[i])]
            writer.writerow(row)
