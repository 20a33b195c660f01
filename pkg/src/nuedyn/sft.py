"""Thermodynamic formalism on subshifts of finite type.

Everything here works with a 0/1 transition matrix ``A`` (states ``0..d-1``,
``A[i, j] = 1`` iff the word ``ij`` is admissible) and locally constant
potentials given by their values on admissible words.  Spectral data of
nonnegative matrices is computed by two-sided power iteration, which is all
these small dense matrices need: topological entropy, the Parry (maximal
entropy) measure, pressure and equilibrium Markov measures for depth-1
potentials, and higher-block recoding so deeper potentials reduce to the
depth-1 code path.

Conventions
-----------
* ``0 * log 0 = 0`` in every entropy formula.
* Perron eigenvectors: ``right`` is sup-norm normalized, ``left`` is scaled
  so that ``left @ right = 1``.
* Power-iteration residuals are measured relative to ``max(1, lambda)`` so
  that potentials with large values do not make the absolute residual
  unattainable in double precision.
"""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

import numpy as np

from .errors import DepthMismatch, NoConvergence, NotIrreducible

__all__ = [
    "TransitionMatrix",
    "PerronData",
    "MarkovMeasure",
    "LocallyConstantPotential",
    "full_shift",
    "golden_mean_shift",
    "admissible_words",
    "perron",
    "topological_entropy",
    "parry_measure",
    "markov_entropy",
    "pressure",
    "equilibrium_markov",
    "integral",
    "recode",
    "low_variation_check",
    "sample_compatible",
    "stationary_vector",
    "variational_gap",
    "variational_gap_sample",
    "cylinder_measure",
]

_POWER_ITERATION_CAP = 10**6
_DEFAULT_TOL = 1e-12


# ---------------------------------------------------------------------------
# domain types
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TransitionMatrix:
    """0/1 admissibility matrix of a subshift of finite type.

    Parameters
    ----------
    entries : array_like
        Square matrix with entries in {0, 1}.  Every row and every column
        must contain at least one 1 (no dead states).  Irreducibility is
        *not* assumed here; it is checked by reachability closure before
        any Perron computation.
    """

    entries: np.ndarray

    def __init__(self, entries) -> None:
        mat = np.asarray(entries, dtype=np.int64)
        if mat.ndim != 2 or mat.shape[0] != mat.shape[1]:
            raise ValueError(f"transition matrix must be square, got shape {mat.shape}")
        if not np.isin(mat, (0, 1)).all():
            raise ValueError("transition matrix entries must be 0 or 1")
        if (mat.sum(axis=1) == 0).any():
            raise ValueError("transition matrix has an all-zero row (dead state)")
        if (mat.sum(axis=0) == 0).any():
            raise ValueError("transition matrix has an all-zero column (unreachable state)")
        mat.setflags(write=False)
        object.__setattr__(self, "entries", mat)

    @property
    def d(self) -> int:
        """Number of states."""
        return self.entries.shape[0]

    def is_irreducible(self) -> bool:
        """True iff the transition digraph is strongly connected."""
        fwd = _reachable_from(self.entries, 0)
        bwd = _reachable_from(self.entries.T, 0)
        return bool(fwd.all() and bwd.all())

    def period(self) -> int:
        """gcd of cycle lengths of the (irreducible) transition digraph."""
        if not self.is_irreducible():
            raise NotIrreducible("period is only defined for irreducible matrices")
        dist = _bfs_levels(self.entries, 0)
        g = 0
        rows, cols = np.nonzero(self.entries)
        for u, v in zip(rows, cols):
            g = math.gcd(g, int(dist[u]) + 1 - int(dist[v]))
        return abs(g) if g != 0 else 1


@dataclass(frozen=True)
class PerronData:
    """Spectral radius and positive eigenvectors of a nonnegative matrix.

    ``right`` is sup-norm normalized; ``left`` satisfies ``left @ right = 1``.
    ``tol`` records the achieved residual (relative to ``max(1, lam)``).
    """

    lam: float
    right: np.ndarray
    left: np.ndarray
    tol: float


@dataclass(frozen=True)
class MarkovMeasure:
    """Stationary Markov measure on an SFT: stochastic matrix plus its
    stationary row vector.

    ``P[i, j] > 0`` is only allowed on admissible transitions of the
    underlying matrix, ``pi @ P = pi`` and every row of ``P`` sums to 1
    (both within ``1e-9``).  ``states`` optionally labels the states, e.g.
    with the words of a higher-block recoding.
    """

    P: np.ndarray
    pi: np.ndarray
    states: tuple = field(default=None, compare=False)

    def __init__(self, P, pi, states=None) -> None:
        P = np.asarray(P, dtype=float)
        pi = np.asarray(pi, dtype=float)
        d = P.shape[0]
        if P.shape != (d, d) or pi.shape != (d,):
            raise ValueError("shape mismatch between stochastic matrix and stationary vector")
        if (P < 0).any() or (pi < -1e-15).any():
            raise ValueError("stochastic data must be nonnegative")
        if np.abs(P.sum(axis=1) - 1.0).max() > 1e-9:
            raise ValueError("rows of P must sum to 1")
        if abs(pi.sum() - 1.0) > 1e-9:
            raise ValueError("stationary vector must sum to 1")
        if np.abs(pi @ P - pi).max() > 1e-9:
            raise ValueError("pi is not stationary for P")
        P.setflags(write=False)
        pi.setflags(write=False)
        object.__setattr__(self, "P", P)
        object.__setattr__(self, "pi", pi)
        object.__setattr__(self, "states", tuple(states) if states is not None else None)

    @property
    def d(self) -> int:
        return self.P.shape[0]

    def compatible_with(self, A: TransitionMatrix) -> bool:
        """True iff P places positive mass only on admissible transitions."""
        return bool(((self.P > 0) <= (A.entries == 1)).all())


@dataclass(frozen=True)
class LocallyConstantPotential:
    """Potential depending on finitely many coordinates of a shift point.

    ``values`` maps admissible words of length ``depth`` (tuples of state
    indices) to reals.  The domain must be exactly the admissible words of
    the matrix the potential is used with; this is enforced by the
    operations, not the constructor, so a potential can be built before its
    matrix.
    """

    depth: int
    values: dict

    def __init__(self, depth: int, values: dict) -> None:
        if depth < 1:
            raise ValueError("potential depth must be >= 1")
        cleaned = {}
        for word, val in values.items():
            w = tuple(int(s) for s in word)
            if len(w) != depth:
                raise ValueError(f"word {w} has length {len(w)}, expected depth {depth}")
            cleaned[w] = float(val)
        object.__setattr__(self, "depth", int(depth))
        object.__setattr__(self, "values", cleaned)

    @classmethod
    def constant(cls, d: int, value: float) -> "LocallyConstantPotential":
        """Depth-1 potential identically equal to ``value`` on ``d`` states."""
        return cls(1, {(i,): value for i in range(d)})

    @classmethod
    def zero(cls, d: int) -> "LocallyConstantPotential":
        return cls.constant(d, 0.0)

    def max_value(self) -> float:
        return max(self.values.values())

    def __call__(self, word) -> float:
        return self.values[tuple(word)]


def full_shift(d: int) -> TransitionMatrix:
    """Full shift on ``d`` symbols (all transitions admissible)."""
    return TransitionMatrix(np.ones((d, d), dtype=int))


def golden_mean_shift() -> TransitionMatrix:
    """Two states, the word ``11`` forbidden."""
    return TransitionMatrix([[1, 1], [1, 0]])


# ---------------------------------------------------------------------------
# digraph utilities
# ---------------------------------------------------------------------------

def _reachable_from(mat: np.ndarray, start: int) -> np.ndarray:
    d = mat.shape[0]
    seen = np.zeros(d, dtype=bool)
    seen[start] = True
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for v in np.nonzero(mat[u])[0]:
            if not seen[v]:
                seen[v] = True
                queue.append(int(v))
    return seen


def _bfs_levels(mat: np.ndarray, start: int) -> np.ndarray:
    d = mat.shape[0]
    dist = np.full(d, -1, dtype=np.int64)
    dist[start] = 0
    queue = deque([start])
    while queue:
        u = queue.popleft()
        for v in np.nonzero(mat[u])[0]:
            if dist[v] < 0:
                dist[v] = dist[u] + 1
                queue.append(int(v))
    return dist


def admissible_words(A: TransitionMatrix, k: int) -> list[tuple[int, ...]]:
    """All admissible words of length ``k`` in lexicographic order."""
    if k < 1:
        raise ValueError("word length must be >= 1")
    words = [(i,) for i in range(A.d)]
    ent = A.entries
    for _ in range(k - 1):
        words = [w + (j,) for w in words for j in range(A.d) if ent[w[-1], j]]
    return words


def _check_potential_domain(A: TransitionMatrix, phi: LocallyConstantPotential) -> None:
    expected = set(admissible_words(A, phi.depth))
    got = set(phi.values.keys())
    if got != expected:
        missing = sorted(expected - got)[:5]
        extra = sorted(got - expected)[:5]
        raise DepthMismatch(
            f"potential domain does not match admissible {phi.depth}-words "
            f"(missing {missing}, extra {extra})"
        )


# ---------------------------------------------------------------------------
# Perron data by power iteration
# ---------------------------------------------------------------------------

def _power_perron(mat: np.ndarray, tol: float, cap: int = _POWER_ITERATION_CAP):
    """Two-sided power iteration for a nonnegative matrix with irreducible
    sparsity pattern.  Iterates the shifted operator ``mat/s + I`` (primitive
    whenever the pattern is irreducible, so periodic matrices converge too)
    and reads the eigenvalue off the two-sided Rayleigh quotient.
    """
    d = mat.shape[0]
    if d == 1:
        lam = float(mat[0, 0])
        one = np.ones(1)
        return lam, one.copy(), one.copy(), 0.0

    scale = float(mat.sum(axis=1).max())
    shifted = mat / scale + np.eye(d)
    x = np.ones(d)
    y = np.ones(d)
    for _ in range(cap):
        x = shifted @ x
        x /= x.max()
        y = y @ shifted
        y /= y.max()
        lam = float((y @ (mat @ x)) / (y @ x))
        denom = max(1.0, abs(lam))
        res_r = np.abs(mat @ x - lam * x).max() / denom
        res_l = np.abs(y @ mat - lam * y).max() / denom
        if res_r <= tol and res_l <= tol:
            return lam, x, y, max(res_r, res_l)
    raise NoConvergence(
        f"power iteration did not reach residual {tol:g} within {cap} iterations"
    )


def perron(A: TransitionMatrix, tol: float = _DEFAULT_TOL) -> PerronData:
    """Spectral radius and positive left/right eigenvectors of ``A``.

    Parameters
    ----------
    A : TransitionMatrix
        Must be irreducible; this is checked and ``NotIrreducible`` is
        raised otherwise.
    tol : float
        Target residual, relative to ``max(1, lambda)``.

    Returns
    -------
    PerronData
        With ``right`` sup-normalized and ``left @ right = 1``; ``tol``
        holds the achieved residual.
    """
    if tol <= 0:
        raise ValueError("tol must be positive")
    if not A.is_irreducible():
        raise NotIrreducible("transition matrix is not strongly connected")
    lam, x, y, res = _power_perron(A.entries.astype(float), tol)
    right = x / x.max()
    left = y / (y @ right)
    return PerronData(lam=lam, right=right, left=left, tol=res)


def _weighted_perron(A: TransitionMatrix, phi: LocallyConstantPotential,
                     tol: float = _DEFAULT_TOL):
    """Perron data of ``B[i, j] = A[i, j] * exp(phi(i))`` for a depth-1
    potential, computed on the matrix rescaled by ``exp(-max phi)`` so the
    iteration stays well conditioned.  Returns ``(log lam_B, x, y, B_scaled)``.
    """
    if phi.depth != 1:
        raise DepthMismatch("weighted matrix needs a depth-1 potential; recode first")
    _check_potential_domain(A, phi)
    if not A.is_irreducible():
        raise NotIrreducible("transition matrix is not strongly connected")
    phimax = phi.max_value()
    weights = np.array([math.exp(phi((i,)) - phimax) for i in range(A.d)])
    B = A.entries * weights[:, None]
    lam, x, y, _res = _power_perron(B, tol)
    return phimax + math.log(lam), x, y, B


# ---------------------------------------------------------------------------
# entropy, Parry measure, pressure, equilibrium states
# ---------------------------------------------------------------------------

def topological_entropy(A: TransitionMatrix, tol: float = _DEFAULT_TOL) -> float:
    """log of the spectral radius of ``A``."""
    return math.log(perron(A, tol).lam)


def parry_measure(A: TransitionMatrix, tol: float = _DEFAULT_TOL) -> MarkovMeasure:
    """The unique maximal-entropy Markov measure of an irreducible SFT.

    Built from the Perron eigendata: ``P[i, j] = A[i, j] right[j] /
    (lambda right[i])`` and ``pi[i]`` proportional to ``left[i] right[i]``.
    Its entropy equals ``topological_entropy(A)`` up to the eigensolver
    tolerance.
    """
    pd = perron(A, tol)
    return _markov_from_eigendata(A.entries.astype(float), pd.lam, pd.right, pd.left)


def _markov_from_eigendata(B: np.ndarray, lam: float, right: np.ndarray,
                           left: np.ndarray, states=None) -> MarkovMeasure:
    P = B * right[None, :] / (lam * right[:, None])
    P /= P.sum(axis=1, keepdims=True)  # absorb eigensolver roundoff
    pi = left * right
    pi = pi / pi.sum()
    return MarkovMeasure(P=P, pi=pi, states=states)


def markov_entropy(mu: MarkovMeasure) -> float:
    """Entropy rate ``-sum_i pi_i sum_j P_ij log P_ij`` with 0 log 0 = 0."""
    P = mu.P
    with np.errstate(divide="ignore", invalid="ignore"):
        plogp = np.where(P > 0, P * np.log(np.where(P > 0, P, 1.0)), 0.0)
    return float(-(mu.pi @ plogp.sum(axis=1)))


def pressure(A: TransitionMatrix, phi: LocallyConstantPotential,
             tol: float = _DEFAULT_TOL) -> float:
    """Topological pressure of a locally constant potential.

    For depth-1 potentials this is the log spectral radius of the weighted
    matrix ``B[i, j] = A[i, j] exp(phi(i))``.  Deeper potentials are reduced
    to depth 1 on the higher-block presentation first (see :func:`recode`);
    pressure is invariant under that recoding.
    """
    if phi.depth > 1:
        A2, phi2 = recode(A, phi)
        return pressure(A2, phi2, tol)
    logs, _x, _y, _B = _weighted_perron(A, phi, tol)
    return logs


def equilibrium_markov(A: TransitionMatrix, phi: LocallyConstantPotential,
                       tol: float = _DEFAULT_TOL) -> MarkovMeasure:
    """Equilibrium Markov measure of a locally constant potential.

    The measure built from the Perron data of the weighted matrix; it
    satisfies ``markov_entropy(mu) + integral(mu, phi) = pressure(A, phi)``
    up to the eigensolver tolerance.  For ``depth > 1`` the returned measure
    lives on the higher-block states (labels in ``mu.states``).
    """
    if phi.depth > 1:
        A2, phi2 = recode(A, phi)
        mu = equilibrium_markov(A2, phi2, tol)
        return mu
    _logs, x, y, B = _weighted_perron(A, phi, tol)
    lamB = float((y @ (B @ x)) / (y @ x))
    left = y / (y @ x)
    states = getattr(A, "_word_states", None)
    return _markov_from_eigendata(B, lamB, x, left, states=states)


def integral(mu: MarkovMeasure, phi: LocallyConstantPotential) -> float:
    """``sum_w mu([w]) phi(w)`` over admissible words of the potential depth.

    For depth-1 potentials this is ``sum_i pi_i phi(i)``.  Raises
    ``DepthMismatch`` when the potential mentions states the measure does
    not have, or is missing a word the measure charges.
    """
    d = mu.d
    for w in phi.values:
        if any(s < 0 or s >= d for s in w):
            raise DepthMismatch(f"potential word {w} uses states outside 0..{d - 1}")
    if phi.depth == 1:
        try:
            vals = np.array([phi((i,)) for i in range(d)])
        except KeyError as exc:
            raise DepthMismatch(f"potential missing word {exc}") from exc
        return float(mu.pi @ vals)
    total = 0.0
    for word, m in cylinder_measure(mu, phi.depth):
        if m == 0.0:
            continue
        try:
            total += m * phi(word)
        except KeyError as exc:
            raise DepthMismatch(f"potential missing word {exc}") from exc
    return total


def cylinder_measure(mu: MarkovMeasure, k: int):
    """Yield ``(word, mu([word]))`` for all length-``k`` words charged by mu."""
    d = mu.d
    stack = [((i,), float(mu.pi[i])) for i in range(d) if mu.pi[i] > 0]
    while stack:
        word, m = stack.pop()
        if len(word) == k:
            yield word, m
            continue
        i = word[-1]
        for j in range(d):
            p = mu.P[i, j]
            if p > 0:
                stack.append((word + (j,), m * float(p)))


def recode(A: TransitionMatrix, phi: LocallyConstantPotential):
    """Higher-block presentation turning a depth-k potential into depth 1.

    States of the new SFT are the admissible k-words of ``A``; a transition
    ``w -> w'`` is admissible iff ``w[1:] == w'[:-1]``.  The new potential
    assigns each word-state its old value.  Depth-1 input is returned
    unchanged.  Pressure and topological entropy are invariant under this
    recoding (a tested property, not an assumption).
    """
    if phi.depth == 1:
        return A, phi
    _check_potential_domain(A, phi)
    words = admissible_words(A, phi.depth)
    index = {w: i for i, w in enumerate(words)}
    m = len(words)
    ent = np.zeros((m, m), dtype=int)
    for w, i in index.items():
        for j in range(A.d):
            w2 = w[1:] + (j,)
            if w2 in index:
                ent[i, index[w2]] = 1
    A2 = TransitionMatrix(ent)
    object.__setattr__(A2, "_word_states", tuple(words))
    phi2 = LocallyConstantPotential(1, {(i,): phi(w) for w, i in index.items()})
    return A2, phi2


def low_variation_check(phi: LocallyConstantPotential, A: TransitionMatrix,
                        rho: float) -> bool:
    """True iff ``max phi < pressure(A, phi) - rho * topological_entropy(A)``.

    This is the admissibility margin separating the potential's peak value
    from the pressure; constants always satisfy it for any ``rho < 1`` on a
    shift with positive entropy.
    """
    if not 0.0 < rho < 1.0:
        raise ValueError("rho must lie in (0, 1)")
    return phi.max_value() < pressure(A, phi) - rho * topological_entropy(A)


# ---------------------------------------------------------------------------
# sampling compatible Markov measures / variational gaps
# ---------------------------------------------------------------------------

def stationary_vector(P: np.ndarray, tol: float = 1e-14,
                      cap: int = _POWER_ITERATION_CAP) -> np.ndarray:
    """Stationary row vector of an irreducible stochastic matrix by power
    iteration on the transpose (shift-averaged so periodic chains converge).
    """
    d = P.shape[0]
    pi = np.full(d, 1.0 / d)
    for _ in range(cap):
        nxt = 0.5 * (pi @ P + pi)
        nxt /= nxt.sum()
        if np.abs(nxt @ P - nxt).max() <= tol:
            return nxt
        pi = nxt
    raise NoConvergence(f"stationary vector did not converge to {tol:g}")


def sample_compatible(A: TransitionMatrix, rng: np.random.Generator) -> MarkovMeasure:
    """Random A-compatible Markov measure.

    Each row is a symmetric Dirichlet (all concentrations 1) over the
    allowed entries of that row, giving full support over the compatible
    simplex; the stationary vector comes from :func:`stationary_vector`.
    """
    d = A.d
    P = np.zeros((d, d))
    for i in range(d):
        allowed = np.nonzero(A.entries[i])[0]
        P[i, allowed] = rng.dirichlet(np.ones(len(allowed)))
    pi = stationary_vector(P)
    return MarkovMeasure(P=P, pi=pi)


def variational_gap(A: TransitionMatrix, phi: LocallyConstantPotential,
                    mu: MarkovMeasure, tol: float = _DEFAULT_TOL) -> float:
    """``pressure(A, phi) - (markov_entropy(mu) + integral(mu, phi))``.

    Nonnegative for every A-compatible stationary Markov measure, zero
    exactly at the equilibrium measure.
    """
    return pressure(A, phi, tol) - (markov_entropy(mu) + integral(mu, phi))


def variational_gap_sample(A: TransitionMatrix, phi: LocallyConstantPotential,
                           trials: int, seed: int) -> np.ndarray:
    """Gaps of ``trials`` random compatible Markov measures.

    Each trial uses its own generator seeded by ``(seed, trial)``, so the
    result is reproducible independently of any parallel execution order.
    """
    if trials < 1:
        raise ValueError("trials must be >= 1")
    P = pressure(A, phi)
    gaps = np.empty(trials)
    for t in range(trials):
        rng = np.random.default_rng([seed, t])
        mu = sample_compatible(A, rng)
        gaps[t] = P - (markov_entropy(mu) + integral(mu, phi))
    return gaps
