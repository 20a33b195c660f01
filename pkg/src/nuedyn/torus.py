"""Deformed expanding torus endomorphisms with exact Jacobians.

The model starts from an integer diagonal expanding map ``x -> (l1 x1, ...,
ln xn) mod 1`` on the 1- or 2-torus and slows the weakest direction down
inside a small window around the fixed point at the origin: the first
coordinate is rescaled by a profile ``alpha`` (slope ``s < 1`` at the
origin, exactly linear again outside ``|x1| >= eps``), and in dimension 2
the deformation is faded out radially by a bump ``theta`` supported in
``|x2| < 2r``.  Outside the window the map *is* the linear model, exactly,
not approximately.

The map is a local diffeomorphism but not uniformly expanding: at the
origin the inverse derivative norm exceeds 1.  The verifier in this module
measures, on a grid, the constants quantifying how far from uniform
expansion the map is (sup of the inverse-derivative norm, the region ``V``
where expansion fails, the pinch between log-Jacobians inside ``V`` and
outside the window) and solves the two inequalities that convert those
constants into a time-fraction exponent ``alpha_exp`` and an expansion rate
``c > 0`` used by the orbit and hyperbolic-time machinery.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import GridTooCoarse, SingularJacobian, Unsupported

__all__ = [
    "DeformationProfile",
    "BumpProfile",
    "TorusMap",
    "HypothesisReport",
    "ConstantsSolution",
    "make_linear_map",
    "make_deformed_map",
    "recenter",
    "torus_eval",
    "jacobian",
    "inv_norm",
    "log_abs_det",
    "in_window",
    "solve_constants",
    "verify_hypotheses",
]

_DET_FLOOR = 1e-14


def _smoothstep(t):
    return t * t * (3.0 - 2.0 * t)


def _smoothstep_slope(t):
    return 6.0 * t * (1.0 - t)


# ---------------------------------------------------------------------------
# profiles
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class DeformationProfile:
    """One-dimensional rescaling profile of the weak direction.

    ``value(x) = lambda1 * x`` exactly for ``|x| >= eps``.  Inside, the
    linear part is blended down to slope ``slope`` at the origin through a
    C1 cubic plateau: the blend weight is identically 1 on ``|x| <= eps/2``
    (so ``value(x) = slope * x`` there, in particular the derivative is
    below 1 on that middle half) and decays to 0 at ``|x| = eps`` through a
    cubic smoothstep with matching derivative at both ends.

    ``gamma1`` and ``gamma2`` are the requested smallness targets for the
    derivative bounds and the C0 distance to the linear map; they do not
    enter the formula (``slope`` does) and are only used by
    :meth:`condition_report`.
    """

    lambda1: float
    eps: float
    gamma1: float
    gamma2: float
    slope: float

    def __post_init__(self):
        if self.lambda1 <= 1:
            raise ValueError("lambda1 must exceed 1")
        if not 0 < self.eps < 0.25:
            raise ValueError("eps must lie in (0, 0.25)")
        if not 0 < self.slope < 1:
            raise ValueError("slope must lie in (0, 1) so the origin is not expanding")
        if self.gamma1 <= 0 or self.gamma2 <= 0:
            raise ValueError("gamma1, gamma2 must be positive")

    def _blend(self, u):
        au = np.abs(u)
        t = np.clip(2.0 * au - 1.0, 0.0, 1.0)
        return np.where(au <= 0.5, 1.0, np.where(au >= 1.0, 0.0, 1.0 - _smoothstep(t)))

    def _blend_diag(self, u):
        # d/du [u * blend(u)], the factor by which the linear slope is cut
        au = np.abs(u)
        t = np.clip(2.0 * au - 1.0, 0.0, 1.0)
        ramp = 1.0 - _smoothstep(t) - 2.0 * au * _smoothstep_slope(t)
        return np.where(au <= 0.5, 1.0, np.where(au >= 1.0, 0.0, ramp))

    def deviation(self, x):
        """``value(x) - lambda1 * x``; identically zero for ``|x| >= eps``."""
        x = np.asarray(x, dtype=float)
        u = x / self.eps
        return -(self.lambda1 - self.slope) * x * self._blend(u)

    def value(self, x):
        x = np.asarray(x, dtype=float)
        return self.lambda1 * x + self.deviation(x)

    def derivative(self, x):
        x = np.asarray(x, dtype=float)
        u = x / self.eps
        return self.lambda1 - (self.lambda1 - self.slope) * self._blend_diag(u)

    def condition_report(self, samples: int = 200001) -> dict:
        """Measured derivative/deviation extremes against the gamma targets."""
        xs = np.linspace(-self.eps, self.eps, samples)
        dv = self.derivative(xs)
        inner = np.abs(xs) < 0.5 * self.eps
        dev_sup = float(np.abs(self.deviation(xs)).max())
        d_min = float(dv.min())
        d_max = float(dv.max())
        return {
            "derivative_min": d_min,
            "derivative_max": d_max,
            "deviation_sup": dev_sup,
            "derivative_bounds_ok": bool(
                d_min >= 1.0 / (1.0 + self.gamma1) - 1e-12
                and d_max <= self.lambda1 + self.gamma2 + 1e-12
            ),
            "subunit_on_middle_half": bool(dv[inner].max() < 1.0),
            "c0_close_ok": bool(dev_sup < self.gamma2),
        }


@dataclass(frozen=True)
class BumpProfile:
    """Radial C1 fade-out of the deformation in the transverse direction.

    Identically 1 for ``|x| <= r``, identically 0 for ``|x| >= 2r`` (the
    profile is defined out to ``3r`` but is already zero past ``2r``), and a
    cubic smoothstep in between.  ``C`` is the exact maximal slope,
    ``1.5 / r``.
    """

    r: float
    C: float = field(init=False)

    def __post_init__(self):
        if not 0 < self.r < 0.125:
            raise ValueError("r must lie in (0, 0.125)")
        object.__setattr__(self, "C", 1.5 / self.r)

    def value(self, x):
        a = np.abs(np.asarray(x, dtype=float))
        t = np.clip((a - self.r) / self.r, 0.0, 1.0)
        return np.where(a <= self.r, 1.0, np.where(a >= 2.0 * self.r, 0.0, 1.0 - _smoothstep(t)))

    def slope(self, x):
        """Signed derivative d theta / dx."""
        x = np.asarray(x, dtype=float)
        a = np.abs(x)
        t = np.clip((a - self.r) / self.r, 0.0, 1.0)
        mag = np.where((a > self.r) & (a < 2.0 * self.r), _smoothstep_slope(t) / self.r, 0.0)
        return -np.sign(x) * mag


# ---------------------------------------------------------------------------
# the map
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TorusMap:
    """Expanding torus endomorphism, optionally deformed around the origin.

    ``eigenvalues`` are strictly increasing integers > 1 (so the linear
    part descends to the torus); ``alpha is None`` means the pure linear
    model.  Coordinates live in ``[0, 1)^n``; the deformation window is
    centered at the fixed point 0, i.e. it wraps around the origin.
    """

    eigenvalues: tuple
    alpha: DeformationProfile = None
    theta: BumpProfile = None

    def __post_init__(self):
        ev = tuple(int(v) for v in self.eigenvalues)
        if any(abs(v - float(w)) > 0 for v, w in zip(ev, self.eigenvalues)):
            raise Unsupported("eigenvalues must be integers so the map descends to the torus")
        if len(ev) not in (1, 2):
            raise Unsupported("only dimensions 1 and 2 are exposed")
        if any(v <= 1 for v in ev):
            raise ValueError("every eigenvalue must exceed 1")
        if list(ev) != sorted(set(ev)):
            raise ValueError("eigenvalues must be strictly increasing")
        object.__setattr__(self, "eigenvalues", ev)
        if self.alpha is not None:
            if abs(self.alpha.lambda1 - ev[0]) > 0:
                raise ValueError("profile lambda1 must equal the first eigenvalue")
            if len(ev) == 2 and self.theta is None:
                raise ValueError("dimension 2 needs a bump profile")
        if self.alpha is None and self.theta is not None:
            raise ValueError("a bump profile without a deformation profile is meaningless")

    @property
    def n(self) -> int:
        return len(self.eigenvalues)

    @property
    def deformed(self) -> bool:
        return self.alpha is not None

    @property
    def window_halfwidths(self) -> tuple:
        """Half-widths of the dynamically active window around 0.

        The transverse extent closes at ``2r`` where the bump vanishes
        identically; beyond it the map already equals the linear model.
        """
        if not self.deformed:
            return None
        if self.n == 1:
            return (2.0 * self.alpha.eps,)
        return (2.0 * self.alpha.eps, 2.0 * self.theta.r)


def make_linear_map(eigenvalues) -> TorusMap:
    """Pure integer diagonal expanding map."""
    return TorusMap(eigenvalues=tuple(eigenvalues))


def make_deformed_map(eigenvalues, eps: float, r: float = None,
                      gamma1: float = 0.05, gamma2: float = 0.06,
                      slope: float = None) -> TorusMap:
    """Deformed map with the weak direction slowed to ``slope`` at 0.

    ``slope`` defaults to ``1 / (1 + gamma1)``, the never-too-contracting
    bound requested through ``gamma1``; pass it explicitly to decouple the
    two.  ``r`` is required in dimension 2 and ignored in dimension 1.
    """
    ev = tuple(int(v) for v in eigenvalues)
    if slope is None:
        slope = 1.0 / (1.0 + gamma1)
    alpha = DeformationProfile(lambda1=float(ev[0]), eps=eps, gamma1=gamma1,
                               gamma2=gamma2, slope=slope)
    theta = None
    if len(ev) == 2:
        if r is None:
            raise ValueError("dimension 2 needs the bump radius r")
        theta = BumpProfile(r=r)
    return TorusMap(eigenvalues=ev, alpha=alpha, theta=theta)


# ---------------------------------------------------------------------------
# evaluation, Jacobian, norms (array-native; scalars go through 1-row arrays)
# ---------------------------------------------------------------------------

def recenter(x):
    """Shift torus coordinates to the fundamental domain [-0.5, 0.5)."""
    return np.mod(np.asarray(x, dtype=float) + 0.5, 1.0) - 0.5


def _as_points(x, n):
    pts = np.asarray(x, dtype=float)
    squeeze = pts.ndim == 1
    pts = np.atleast_2d(pts)
    if pts.shape[1] != n:
        raise ValueError(f"points must have {n} coordinates")
    return pts, squeeze


def _mod1(y):
    out = np.mod(y, 1.0)
    out[out >= 1.0] = 0.0
    return out


def torus_eval(f: TorusMap, x):
    """Image of point(s) ``x`` under the map; exact linear outside the window."""
    pts, squeeze = _as_points(x, f.n)
    ev = f.eigenvalues
    out = np.empty_like(pts)
    xi = recenter(pts)
    if f.deformed:
        corr = f.alpha.deviation(xi[:, 0])
        if f.n == 2:
            corr = corr * f.theta.value(xi[:, 1])
        out[:, 0] = _mod1(ev[0] * pts[:, 0] + corr)
    else:
        out[:, 0] = _mod1(ev[0] * pts[:, 0])
    for i in range(1, f.n):
        out[:, i] = _mod1(ev[i] * pts[:, i])
    return out[0] if squeeze else out


def _jacobian_entries(f: TorusMap, pts: np.ndarray):
    """Diagonal entry ``a`` of the weak direction and (in 2D) the
    off-diagonal ``b = d f1 / d x2``; the rest of the Jacobian is the
    constant diagonal of integer eigenvalues.
    """
    xi = recenter(pts)
    if not f.deformed:
        a = np.full(pts.shape[0], float(f.eigenvalues[0]))
        b = np.zeros(pts.shape[0]) if f.n == 2 else None
        return a, b
    if f.n == 1:
        return f.alpha.derivative(xi[:, 0]), None
    th = f.theta.value(xi[:, 1])
    a = f.eigenvalues[0] + th * (f.alpha.derivative(xi[:, 0]) - f.eigenvalues[0])
    b = f.alpha.deviation(xi[:, 0]) * f.theta.slope(xi[:, 1])
    return a, b


def jacobian(f: TorusMap, x):
    """Jacobian matrix (or matrices) at ``x``.

    In dimension 2 the matrix is upper triangular: the first row is
    ``(a, b)`` with ``a`` the blended weak-direction derivative and ``b``
    the deviation times the bump slope, and the second row is ``(0, l2)``.
    """
    pts, squeeze = _as_points(x, f.n)
    a, b = _jacobian_entries(f, pts)
    m = pts.shape[0]
    J = np.zeros((m, f.n, f.n))
    J[:, 0, 0] = a
    for i in range(1, f.n):
        J[:, i, i] = f.eigenvalues[i]
    if f.n == 2:
        J[:, 0, 1] = b
    return J[0] if squeeze else J


def _inv_norm_from_entries(f: TorusMap, a, b):
    if f.n == 1:
        det = np.abs(a)
        if np.any(det < _DET_FLOOR):
            raise SingularJacobian("Jacobian determinant below 1e-14")
        return 1.0 / det
    lam2 = float(f.eigenvalues[1])
    det = np.abs(a * lam2)
    if np.any(det < _DET_FLOOR):
        raise SingularJacobian("Jacobian determinant below 1e-14")
    T = a * a + b * b + lam2 * lam2
    disc = np.sqrt(np.maximum(T * T - 4.0 * det * det, 0.0))
    smax = np.sqrt(0.5 * (T + disc))
    return smax / det


def inv_norm(f: TorusMap, x):
    """Operator norm of the inverse Jacobian (reciprocal smallest singular
    value), computed in closed form for the 1x1 / 2x2 cases."""
    pts, squeeze = _as_points(x, f.n)
    a, b = _jacobian_entries(f, pts)
    out = _inv_norm_from_entries(f, a, b)
    return float(out[0]) if squeeze else out


def log_abs_det(f: TorusMap, x):
    """log |det Df| at ``x``; the determinant is the weak-direction entry
    times the product of the remaining eigenvalues."""
    pts, squeeze = _as_points(x, f.n)
    a, _b = _jacobian_entries(f, pts)
    det = np.abs(a) * float(np.prod(f.eigenvalues[1:])) if f.n > 1 else np.abs(a)
    if np.any(det < _DET_FLOOR):
        raise SingularJacobian("Jacobian determinant below 1e-14")
    out = np.log(det)
    return float(out[0]) if squeeze else out


def in_window(f: TorusMap, x):
    """Membership in the (open) deformation window around 0."""
    pts, squeeze = _as_points(x, f.n)
    if not f.deformed:
        out = np.zeros(pts.shape[0], dtype=bool)
        return bool(out[0]) if squeeze else out
    hw = f.window_halfwidths
    xi = recenter(pts)
    out = np.abs(xi[:, 0]) < hw[0]
    if f.n == 2:
        out &= np.abs(xi[:, 1]) < hw[1]
    return bool(out[0]) if squeeze else out


# ---------------------------------------------------------------------------
# constants: the two inequalities tying the verified bounds together
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ConstantsSolution:
    """Outcome of :func:`solve_constants`.  ``feasible=False`` is a
    legitimate report, not an error."""

    feasible: bool
    alpha_exp: float = None
    c: float = None
    margin: float = None
    detail: str = ""


def solve_constants(delta0: float, delta1: float, m1, m2, M1: float, M2: float,
                    gamma0: float, l: int, margin: float = 1e-9) -> ConstantsSolution:
    """Solve for the time-fraction exponent and expansion rate.

    Searches for the largest ``alpha_exp`` in ``(gamma0, 1)`` such that,
    with margin at least ``margin``,

    * ``(1+delta0)^alpha * (1+delta1)^(alpha-1) < 1`` (so the rate
      ``c = -0.5 * log(...)`` of that expression is positive), and
    * ``alpha*m2 + (1-alpha)*M2 < gamma0*m1 + (1-gamma0)*M1 - l*log(1+delta0)``
      (the entropy-budget inequality pinning high-entropy measures to the
      expanding region).

    ``m1``/``m2`` may be ``None`` when the non-expanding region is empty;
    the second inequality is then vacuous.  Returns an infeasible solution
    (never raises) when no admissible ``alpha_exp`` exists.
    """
    if delta0 <= 0 or delta1 <= 0:
        raise ValueError("delta0 and delta1 must be positive")
    if not 0.0 < gamma0 < 1.0:
        raise ValueError("gamma0 must lie in (0, 1)")
    a0 = math.log1p(delta0)
    D = math.log1p(delta1)
    slack = -math.log1p(-margin)
    alpha_hi = (D - slack) / (a0 + D)
    alpha_lo = gamma0
    if m1 is not None and m2 is not None:
        rhs = gamma0 * m1 + (1.0 - gamma0) * M1 - l * a0
        coef = M2 - m2
        if coef > 0:
            alpha_lo = max(alpha_lo, (M2 - rhs + margin) / coef)
        elif coef < 0:
            alpha_hi = min(alpha_hi, (rhs - margin - M2) / (m2 - M2))
        elif M2 > rhs - margin:
            return ConstantsSolution(False, detail="budget inequality unsatisfiable: "
                                     f"M2={M2:.6g} exceeds budget {rhs:.6g}")
    alpha = min(alpha_hi, 1.0 - 1e-9)
    if not alpha > alpha_lo:
        return ConstantsSolution(False, detail=f"empty window: alpha_hi={alpha_hi:.6g} "
                                 f"<= alpha_lo={alpha_lo:.6g}")
    c = -0.5 * (alpha * a0 - (1.0 - alpha) * D)
    return ConstantsSolution(True, alpha_exp=alpha, c=c, margin=alpha - alpha_lo)


# ---------------------------------------------------------------------------
# hypothesis verification on a grid
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class HypothesisReport:
    """Grid-verified constants and pass/fail flags for a torus map.

    ``passed`` holds four booleans: ``expansion`` (the non-expanding region
    ``V`` stays inside the window), ``volume`` (minimal Jacobian exceeds the
    bad-cover count ``q``), ``det_pinch`` (log-Jacobian supremum on ``V``
    below the infimum off the window), and ``constants`` (the inequalities
    of :func:`solve_constants` are feasible).
    """

    n: int
    grid_per_axis: int
    q: int
    delta0: float
    delta1: float
    sigma1: float
    beta: float
    m1: float
    m2: float
    M1: float
    M2: float
    M1_vc: float
    M2_vc: float
    v_cells: int
    v_fraction: float
    v_bbox: tuple
    gamma0: float
    gamma0_source: str
    alpha_exp: float
    c: float
    feasibility_margin: float
    min_abs_det: float
    coarse_variation: float
    passed: dict
    profile_conditions: dict

    @property
    def all_passed(self) -> bool:
        return all(self.passed.values())

    def to_dict(self) -> dict:
        out = {}
        for name in self.__dataclass_fields__:
            val = getattr(self, name)
            if isinstance(val, np.ndarray):
                val = val.tolist()
            out[name] = val
        out["all_passed"] = self.all_passed
        return out


def _grid_points(n: int, grid_per_axis: int) -> np.ndarray:
    axis = (np.arange(grid_per_axis) + 0.5) / grid_per_axis
    if n == 1:
        return axis[:, None]
    X, Y = np.meshgrid(axis, axis, indexing="ij")
    return np.column_stack([X.ravel(), Y.ravel()])


def _adjacent_variation(values: np.ndarray, n: int, grid_per_axis: int) -> float:
    if n == 1:
        return float(np.abs(values - np.roll(values, 1)).max())
    V = values.reshape(grid_per_axis, grid_per_axis)
    dx = np.abs(V - np.roll(V, 1, axis=0)).max()
    dy = np.abs(V - np.roll(V, 1, axis=1)).max()
    return float(max(dx, dy))


def _estimate_gamma0(f: TorusMap, seeds: int, length: int, seed: int) -> float:
    from . import orbits

    fractions = orbits.ensemble_window_fraction(f, seeds=seeds, length=length, seed=seed)
    return float(fractions.max())


def verify_hypotheses(f: TorusMap, grid_per_axis: int, gamma0: float = None,
                      ensemble_seeds: int = 1000, ensemble_len: int = 100000,
                      ensemble_seed: int = 20240, coarse_cap: float = 0.75,
                      tol: float = 1e-12) -> HypothesisReport:
    """Verify the expansion/volume/pinch hypotheses of ``f`` on a grid.

    Evaluates the inverse-derivative norm and log-Jacobian at the centers
    of a uniform ``grid_per_axis``-per-axis grid, derives the constants
    (``delta0`` from the global norm supremum; ``delta1`` scanned over
    candidates, keeping the one that leaves the constant inequalities the
    widest feasibility margin), and solves for ``(alpha_exp, c)``.

    ``gamma0`` (the Lebesgue time fraction spent in the window) is taken
    as given when supplied, otherwise estimated as the maximum empirical
    window fraction over an ensemble of random orbits; the estimate is a
    Monte Carlo proxy, not a certified bound.

    Raises ``GridTooCoarse`` when the log-Jacobian varies by more than
    ``coarse_cap`` between adjacent cells, which would make the inf/sup
    estimates untrustworthy.
    """
    if grid_per_axis < 64:
        raise ValueError("grid_per_axis must be at least 64")
    pts = _grid_points(f.n, grid_per_axis)
    a, b = _jacobian_entries(f, pts)
    invn = _inv_norm_from_entries(f, a, b)
    rest = float(np.prod(f.eigenvalues[1:])) if f.n > 1 else 1.0
    absdet = np.abs(a) * rest
    logdet = np.log(absdet)

    variation = _adjacent_variation(logdet, f.n, grid_per_axis)
    if variation > coarse_cap:
        raise GridTooCoarse(
            f"log|det| varies by {variation:.3g} between adjacent cells "
            f"(cap {coarse_cap:g}); refine the grid"
        )

    w_mask = in_window(f, pts)
    outside = ~w_mask
    M1 = float(logdet[outside].min())
    M2 = float(logdet[outside].max())
    sigma1 = float(absdet.min())
    delta0 = max(float(invn.max()) - 1.0, 1e-12)
    q = 1 if f.deformed else 0

    if gamma0 is None:
        if f.deformed:
            g0 = _estimate_gamma0(f, ensemble_seeds, ensemble_len, ensemble_seed)
            gamma0_source = "estimated"
        else:
            g0 = 0.0
            gamma0_source = "empty window"
    else:
        g0 = float(gamma0)
        gamma0_source = "supplied"
    g0 = min(max(g0, 1e-6), 1.0 - 1e-6)

    lam1 = float(f.eigenvalues[0])
    candidates = (lam1 - 1.0) * np.linspace(0.02, 1.0 - 1e-9, 50)
    best = None
    for d1 in candidates:
        v_mask = invn > 1.0 / (1.0 + d1)
        if (v_mask & outside).any():
            continue  # non-expanding cells outside the window: not usable
        if v_mask.any():
            m1 = float(logdet[v_mask].min())
            m2 = float(logdet[v_mask].max())
        else:
            m1 = m2 = None
        pinch_ok = m2 is None or M1 > m2
        sol = solve_constants(delta0, float(d1), m1, m2, M1, M2, g0, f.n)
        margin = sol.margin if sol.feasible else -math.inf
        key = (sol.feasible and pinch_ok, margin, d1)
        if best is None or key > best[0]:
            best = (key, float(d1), v_mask, m1, m2, sol, pinch_ok)

    _key, delta1, v_mask, m1, m2, sol, pinch_ok = best
    if v_mask.any():
        M1_vc = float(logdet[~v_mask].min())
        M2_vc = float(logdet[~v_mask].max())
        xi = recenter(pts[v_mask])
        bbox = tuple((float(xi[:, i].min()), float(xi[:, i].max())) for i in range(f.n))
    else:
        M1_vc, M2_vc = M1, M2
        bbox = ()
    beta = None if m2 is None else (m2 - m1) * (1.0 + 1e-6) + 1e-12

    passed = {
        "expansion": bool(not (v_mask & outside).any()),
        "volume": bool(sigma1 > q),
        "det_pinch": bool(pinch_ok),
        "constants": bool(sol.feasible),
    }
    profile = f.alpha.condition_report() if f.deformed else None

    return HypothesisReport(
        n=f.n,
        grid_per_axis=grid_per_axis,
        q=q,
        delta0=delta0,
        delta1=delta1,
        sigma1=sigma1,
        beta=beta,
        m1=m1,
        m2=m2,
        M1=M1,
        M2=M2,
        M1_vc=M1_vc,
        M2_vc=M2_vc,
        v_cells=int(v_mask.sum()),
        v_fraction=float(v_mask.mean()),
        v_bbox=bbox,
        gamma0=g0,
        gamma0_source=gamma0_source,
        alpha_exp=sol.alpha_exp,
        c=sol.c,
        feasibility_margin=sol.margin,
        min_abs_det=sigma1,
        coarse_variation=variation,
        passed=passed,
        profile_conditions=profile,
    )
