"""Markov partitions on the 1- and 2-torus and the itinerary coding.

For the integer diagonal models the partition cells are uniform product
boxes with rational endpoints, so the Markov property and the induced
transition matrix are verified by exact arithmetic.  Deformed maps reuse
the linear model's partition: the grid is shifted by half a cell so the
deformation window sits strictly inside one rectangle (labeled last), and
since the map equals the linear model outside that window the induced
matrix is unchanged.  Cylinders are exact rational boxes for linear maps
and outward-rounded float enclosures for deformed ones.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from . import sft, torus
from .errors import BoundaryHit, DepthMismatch, EmptyCylinder, Unsupported

__all__ = [
    "MarkovPartition",
    "ItineraryMap",
    "CylinderBox",
    "build_partition",
    "build_itinerary_map",
    "locate",
    "itinerary",
    "cylinder_box",
    "gibbs_scan_rows",
    "gibbs_ratio_scan",
    "check_transitivity",
    "empirical_measure",
    "partition_to_json",
]

_BOUNDARY_RESOLUTION = 1e-12


@dataclass(frozen=True)
class MarkovPartition:
    """Uniform product partition of the torus into half-open boxes.

    Axis ``i`` is cut into ``counts[i]`` cells of width ``1/counts[i]``
    starting at the rational ``offsets[i]``; a cell is the product of one
    interval per axis.  ``cells`` lists the per-axis index tuples in label
    order (states ``0..d-1`` of the induced shift); for deformed maps the
    cell containing the origin is labeled last.
    """

    offsets: tuple
    counts: tuple
    cells: tuple

    @property
    def n(self) -> int:
        return len(self.counts)

    @property
    def d(self) -> int:
        return len(self.cells)

    def axis_interval(self, axis: int, index: int):
        """Half-open interval of cell ``index`` on ``axis``, in lift
        coordinates (left endpoint in [-1/2, 1); only the origin-centered
        cell of a shifted grid starts below 0)."""
        lo = self.offsets[axis] + Fraction(index, self.counts[axis])
        return lo, lo + Fraction(1, self.counts[axis])

    def rectangles(self):
        """Boxes in label order as per-axis (lo, hi) Fraction pairs."""
        return [tuple(self.axis_interval(ax, cell[ax]) for ax in range(self.n))
                for cell in self.cells]


@dataclass(frozen=True)
class ItineraryMap:
    """A Markov partition together with its induced transition matrix and
    the map it codes."""

    partition: MarkovPartition
    A: sft.TransitionMatrix
    f: torus.TorusMap


@dataclass(frozen=True)
class CylinderBox:
    """Product enclosure of a cylinder: per-axis (lo, hi) intervals in
    canonical lift coordinates.  ``exact`` marks rational (linear-model)
    boxes; deformed maps give float enclosures rounded outward by 1e-9."""

    intervals: tuple
    exact: bool

    def diameter(self) -> float:
        """Max-norm diameter (largest axis width, capped by the torus)."""
        return min(max(float(hi - lo) for lo, hi in self.intervals), 1.0)


# ---------------------------------------------------------------------------
# construction
# ---------------------------------------------------------------------------

def build_partition(f: torus.TorusMap) -> MarkovPartition:
    """Markov partition of the linear model underlying ``f``.

    Linear maps get the standard grid ``[k/l, (k+1)/l)`` per axis.  For a
    deformed map the grid is shifted by half a cell so the origin (the
    deformed fixed point) is a cell center, and the deformation window must
    fit strictly inside that cell; subdividing cells only shrinks them, so
    when the window does not fit the construction reports ``Unsupported``
    rather than refining.
    """
    ev = f.eigenvalues
    if not f.deformed:
        offsets = tuple(Fraction(0) for _ in ev)
        cells = _cell_order(ev, center_last=False)
        return MarkovPartition(offsets=offsets, counts=tuple(ev), cells=cells)
    offsets = tuple(Fraction(-1, 2 * lam) for lam in ev)
    hw = f.window_halfwidths
    for axis, lam in enumerate(ev):
        if not Fraction(hw[axis]) < Fraction(1, 2 * lam):
            raise Unsupported(
                f"deformation window half-width {hw[axis]} does not fit inside "
                f"a 1/{lam} cell; shrink eps or r"
            )
    cells = _cell_order(ev, center_last=True)
    return MarkovPartition(offsets=offsets, counts=tuple(ev), cells=cells)


def _cell_order(counts, center_last: bool):
    idx = [()]
    for cnt in counts:
        idx = [t + (k,) for t in idx for k in range(cnt)]
    if center_last:
        center = tuple(0 for _ in counts)
        idx = [t for t in idx if t != center] + [center]
    return tuple(idx)


def _induced_matrix(partition: MarkovPartition, f: torus.TorusMap) -> sft.TransitionMatrix:
    """Exact induced transition matrix of the linear model on the partition.

    Verifies the Markov property on the way: the image of every axis
    interval must be an exact union of axis intervals (rational endpoint
    arithmetic), otherwise the partition is not Markov for the map.
    """
    per_axis = []
    for axis, lam in enumerate(f.eigenvalues):
        cnt = partition.counts[axis]
        targets = []
        for k in range(cnt):
            lo, hi = partition.axis_interval(axis, k)
            width = lam * (hi - lo)
            if width % 1 != 0 and (lam * lo - partition.offsets[axis]) * cnt % 1 != 0:
                raise Unsupported("partition is not Markov for the linear model")
            if width >= 1:
                targets.append(set(range(cnt)))
                continue
            start = lam * lo
            covered = set()
            pos = start
            while pos < lam * hi:
                j = int(((pos - partition.offsets[axis]) % 1) * cnt)
                covered.add(j)
                _lo2, hi2 = partition.axis_interval(axis, j)
                pos = pos + (hi2 - _lo2)
            targets.append(covered)
        per_axis.append(targets)
    d = partition.d
    ent = np.zeros((d, d), dtype=int)
    for i, ci in enumerate(partition.cells):
        for j, cj in enumerate(partition.cells):
            ent[i, j] = int(all(cj[ax] in per_axis[ax][ci[ax]] for ax in range(partition.n)))
    return sft.TransitionMatrix(ent)


def build_itinerary_map(f: torus.TorusMap) -> ItineraryMap:
    """Partition plus induced matrix for ``f``.

    The matrix is computed exactly for the linear model; a deformed map
    inherits it because the deformation is confined to the interior of one
    rectangle and is a monotone reparametrization there (the rectangle's
    image is unchanged as a set).
    """
    partition = build_partition(f)
    A = _induced_matrix(partition, f)
    return ItineraryMap(partition=partition, A=A, f=f)


# ---------------------------------------------------------------------------
# locating points / itineraries
# ---------------------------------------------------------------------------

def locate(partition: MarkovPartition, x) -> int:
    """Label of the cell containing ``x``; ``BoundaryHit`` within 1e-12 of
    a face."""
    x = np.atleast_1d(np.asarray(x, dtype=float))
    key = []
    for axis in range(partition.n):
        cnt = partition.counts[axis]
        t = (x[axis] - float(partition.offsets[axis])) % 1.0
        scaled = t * cnt
        k = int(math.floor(scaled)) % cnt
        frac = scaled - math.floor(scaled)
        if min(frac, 1.0 - frac) < cnt * _BOUNDARY_RESOLUTION:
            raise BoundaryHit(f"coordinate {axis} is within 1e-12 of a partition face")
        key.append(k)
    return partition.cells.index(tuple(key))


def itinerary(im: ItineraryMap, f: torus.TorusMap, x, n: int) -> tuple:
    """First ``n`` symbols of the itinerary of ``x``."""
    if n < 1:
        raise ValueError("n must be >= 1")
    word = []
    pt = np.atleast_1d(np.asarray(x, dtype=float))
    for _ in range(n):
        word.append(locate(im.partition, pt))
        pt = torus.torus_eval(f, pt)
    return tuple(word)


# ---------------------------------------------------------------------------
# cylinders
# ---------------------------------------------------------------------------

def _interval_intersect(a_lo, a_hi, b_lo, b_hi):
    """Intersection of two lift intervals, trying unit translates of the
    second; empty -> None."""
    for shift in (-1, 0, 1):
        lo = max(a_lo, b_lo + shift)
        hi = min(a_hi, b_hi + shift)
        if lo < hi:
            return lo, hi
    return None


def _linear_axis_pullback(lam, cell_lo, cell_hi, tgt_lo, tgt_hi):
    """Exact hull of (x -> lam x)^{-1}(target) inside the cell.

    A target interval can straddle the cut point of the cell's image (the
    shifted grids used for deformed maps do this), in which case the
    preimage splits into two fragments at the cell ends; the hull of all
    fragments in the cell's lift is returned so the result is always an
    enclosure.  On cut-aligned grids (the standard partition of a linear
    model) only one branch ever meets the cell and the result is exact.
    """
    width = tgt_hi - tgt_lo
    lo_best, hi_best = None, None
    for m in range(int(math.floor(lam * cell_lo - float(tgt_lo))) - 1,
                   int(math.ceil(lam * cell_hi - float(tgt_lo))) + 2):
        lo = (tgt_lo + m) / lam
        hi = (tgt_lo + m + width) / lam
        got = _interval_intersect(cell_lo, cell_hi, lo, hi)
        if got is not None:
            if lo_best is None:
                lo_best, hi_best = got
            else:
                lo_best = min(lo_best, got[0])
                hi_best = max(hi_best, got[1])
    if lo_best is None:
        return None
    return lo_best, hi_best


def _weak_lift(f: torus.TorusMap, w, th):
    xi = torus.recenter(np.array([w]))[0]
    return f.eigenvalues[0] * w + th * float(f.alpha.deviation(np.array([xi]))[0])


def _weak_solve(f: torus.TorusMap, target: float, th: float, lo: float, hi: float) -> float:
    """Monotone solve of the lifted weak-direction map on [lo, hi]."""
    a, b = lo, hi
    fa = _weak_lift(f, a, th) - target
    fb = _weak_lift(f, b, th) - target
    if fa > 0 or fb < 0:
        return a if fa > 0 else b
    for _ in range(200):
        mid = 0.5 * (a + b)
        if _weak_lift(f, mid, th) - target <= 0:
            a = mid
        else:
            b = mid
        if b - a < 1e-15:
            break
    return 0.5 * (a + b)


def _deformed_axis_pullback(f, cell_lo, cell_hi, tgt_lo, tgt_hi, th_lo, th_hi):
    """Float enclosure of the weak-axis preimage of the target inside the
    cell: hull over all branches and over the extreme bump weights, with
    outward rounding 1e-9."""
    lam = float(f.eigenvalues[0])
    dev_sup = (lam - f.alpha.slope) * f.alpha.eps
    lo_best, hi_best = None, None
    for m in range(int(math.floor(lam * cell_lo - tgt_hi - dev_sup)) - 1,
                   int(math.ceil(lam * cell_hi - tgt_lo + dev_sup)) + 2):
        sols_lo = [_weak_solve(f, tgt_lo + m, th, cell_lo, cell_hi) for th in (th_lo, th_hi)]
        sols_hi = [_weak_solve(f, tgt_hi + m, th, cell_lo, cell_hi) for th in (th_lo, th_hi)]
        lo, hi = min(sols_lo), max(sols_hi)
        if hi - lo <= 1e-13:
            continue
        if lo_best is None:
            lo_best, hi_best = lo, hi
        else:
            lo_best = min(lo_best, lo)
            hi_best = max(hi_best, hi)
    if lo_best is None:
        return None
    return max(lo_best - 1e-9, cell_lo), min(hi_best + 1e-9, cell_hi)


def cylinder_box(im: ItineraryMap, word) -> CylinderBox:
    """Enclosure of the cylinder of an admissible word.

    Pulls the final rectangle back through the inverse branches dictated by
    the word.  Exact rational box for the linear model; for a deformed map
    the weak axis is enclosed by monotone solves at the extreme bump values
    with outward rounding 1e-9, so the box may strictly contain the (then
    non-product) cylinder.  Raises ``EmptyCylinder`` on inadmissible words.
    """
    word = tuple(int(s) for s in word)
    if len(word) == 0:
        raise ValueError("word must be nonempty")
    part = im.partition
    ent = im.A.entries
    for s in word:
        if not 0 <= s < part.d:
            raise EmptyCylinder(f"symbol {s} is not a state")
    for u, v in zip(word, word[1:]):
        if not ent[u, v]:
            raise EmptyCylinder(f"transition {u}->{v} is inadmissible")
    f = im.f
    exact = not f.deformed

    cur = list(part.axis_interval(ax, part.cells[word[-1]][ax]) for ax in range(part.n))
    for j in range(len(word) - 2, -1, -1):
        cell = part.cells[word[j]]
        nxt = []
        for axis in range(part.n):
            lam = f.eigenvalues[axis]
            c_lo, c_hi = part.axis_interval(axis, cell[axis])
            deformed_axis = f.deformed and axis == 0
            if not deformed_axis:
                got = _linear_axis_pullback(lam, c_lo, c_hi, cur[axis][0], cur[axis][1])
            else:
                if part.n == 2:
                    th_lo, th_hi = _theta_range_for_cell(f, part, cell[1])
                else:
                    th_lo = th_hi = 1.0
                got = _deformed_axis_pullback(f, float(c_lo), float(c_hi),
                                              float(cur[axis][0]), float(cur[axis][1]),
                                              th_lo, th_hi)
            if got is None:
                raise EmptyCylinder("pullback intersection is empty")
            nxt.append(got)
        cur = nxt
    intervals = tuple((lo, hi) if exact else (float(lo), float(hi)) for lo, hi in cur)
    return CylinderBox(intervals=intervals, exact=exact)


def _theta_range_for_cell(f: torus.TorusMap, part: MarkovPartition, cell_index: int):
    """Bump range over the current cell's transverse interval: the correct
    weak-axis pullback weight is set by where the preimage sits, which is
    inside this cell."""
    lo, hi = part.axis_interval(1, cell_index)
    lo_f, hi_f = float(lo), float(hi)
    amin = 0.0 if lo_f <= 0.0 <= hi_f else min(abs(lo_f), abs(hi_f))
    amax = max(abs(lo_f), abs(hi_f))
    th_hi = float(f.theta.value(np.array([amin]))[0])
    th_lo = float(f.theta.value(np.array([amax]))[0])
    return th_lo, th_hi


# ---------------------------------------------------------------------------
# transitivity / Gibbs comparison / empirical measures
# ---------------------------------------------------------------------------

def check_transitivity(A: sft.TransitionMatrix):
    """(transitive, mixing, period) of the transition digraph."""
    transitive = A.is_irreducible()
    if not transitive:
        return False, False, 0
    period = A.period()
    return True, period == 1, period


def gibbs_scan_rows(A: sft.TransitionMatrix, mu: sft.MarkovMeasure,
                    phi: sft.LocallyConstantPotential, P: float, max_len: int,
                    word_cap: int = 1_000_000):
    """Yield ``(word, mu(cylinder), S_n(phi), ratio)`` over all admissible
    words of length 1..max_len, where ``ratio = mu([w]) / exp(S - n P)``."""
    if phi.depth != 1:
        raise DepthMismatch("gibbs scan expects a depth-1 potential; recode first")
    total = 0
    ent = A.entries
    stack = [((i,), float(mu.pi[i]), phi((i,))) for i in range(A.d - 1, -1, -1)]
    while stack:
        word, m, s = stack.pop()
        total += 1
        if total > word_cap:
            raise ValueError("too many admissible words; lower max_len")
        n = len(word)
        yield word, m, s, m / math.exp(s - n * P)
        if n == max_len:
            continue
        i = word[-1]
        for j in range(A.d - 1, -1, -1):
            if ent[i, j]:
                stack.append((word + (j,), m * float(mu.P[i, j]), s + phi((j,))))


def gibbs_ratio_scan(A: sft.TransitionMatrix, mu: sft.MarkovMeasure,
                     phi: sft.LocallyConstantPotential, P: float,
                     max_len: int):
    """Extremes of ``mu([w]) / exp(S_n(phi) - n P)`` over cylinders up to
    ``max_len``; a bounded interval is the weak Gibbs certificate."""
    lo, hi = math.inf, -math.inf
    for _w, _m, _s, ratio in gibbs_scan_rows(A, mu, phi, P, max_len):
        lo = min(lo, ratio)
        hi = max(hi, ratio)
    return lo, hi


def empirical_measure(A: sft.TransitionMatrix, word) -> sft.MarkovMeasure:
    """Markov estimate from an observed itinerary: transition frequencies
    row-normalized (rows never visited fall back to uniform over the
    admissible entries), with the stationary vector of that empirical
    matrix."""
    word = np.asarray(word, dtype=int)
    d = A.d
    counts = np.zeros((d, d))
    np.add.at(counts, (word[:-1], word[1:]), 1.0)
    P = np.zeros((d, d))
    for i in range(d):
        tot = counts[i].sum()
        if tot > 0:
            P[i] = counts[i] / tot
        else:
            allowed = A.entries[i].astype(float)
            P[i] = allowed / allowed.sum()
    pi = sft.stationary_vector(P)
    return sft.MarkovMeasure(P=P, pi=pi)


# ---------------------------------------------------------------------------
# export
# ---------------------------------------------------------------------------

def partition_to_json(partition: MarkovPartition) -> str:
    """Rectangles in label order with rational endpoints as [num, den]."""
    recs = []
    for box in partition.rectangles():
        recs.append([[[iv[0].numerator, iv[0].denominator],
                      [iv[1].numerator, iv[1].denominator]] for iv in box])
    return json.dumps({"d": partition.d, "n": partition.n, "rectangles": recs},
                      sort_keys=True)
