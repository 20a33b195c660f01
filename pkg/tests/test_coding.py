import math
from fractions import Fraction

import numpy as np
import pytest

from nuedyn import coding, orbits, sft, torus
from nuedyn.errors import BoundaryHit, EmptyCylinder, Unsupported

GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0


@pytest.fixture(scope="module")
def flagship():
    return torus.make_deformed_map((2, 4), eps=0.05, r=0.05, gamma1=0.05,
                                   gamma2=0.06, slope=0.9)


@pytest.fixture(scope="module")
def doubling():
    return torus.make_linear_map((2,))


# ---------------------------------------------------------------------------
# partitions
# ---------------------------------------------------------------------------

def test_partition_doubling_standard_cells(doubling):
    part = coding.build_partition(doubling)
    assert part.rectangles() == [((Fraction(0), Fraction(1, 2)),),
                                 ((Fraction(1, 2), Fraction(1)),)]
    im = coding.build_itinerary_map(doubling)
    assert np.array_equal(im.A.entries, np.ones((2, 2), dtype=int))


def test_partition_linear24_is_full_8_shift():
    im = coding.build_itinerary_map(torus.make_linear_map((2, 4)))
    assert im.partition.d == 8
    assert np.array_equal(im.A.entries, np.ones((8, 8), dtype=int))


def test_partition_flagship_window_in_last_cell(flagship):
    im = coding.build_itinerary_map(flagship)
    part = im.partition
    assert part.d == 8
    # the origin-centered cell is labeled last and contains the window
    lo1, hi1 = part.axis_interval(0, part.cells[-1][0])
    lo2, hi2 = part.axis_interval(1, part.cells[-1][1])
    hw = flagship.window_halfwidths
    assert lo1 < -Fraction(hw[0]) and Fraction(hw[0]) < hi1
    assert lo2 < -Fraction(hw[1]) and Fraction(hw[1]) < hi2
    # the deformation does not change the induced matrix
    assert np.array_equal(im.A.entries, np.ones((8, 8), dtype=int))


def test_partition_rejects_oversized_window():
    f = torus.make_deformed_map((2, 4), eps=0.05, r=0.07, gamma1=0.05, gamma2=0.06)
    with pytest.raises(Unsupported):
        coding.build_partition(f)


def test_induced_matrix_matches_dense_sampling(flagship):
    im = coding.build_itinerary_map(flagship)
    rng = np.random.default_rng(0)
    pts = rng.random((4000, 2))
    seen = np.zeros((8, 8), dtype=int)
    for x in pts:
        try:
            i = coding.locate(im.partition, x)
            j = coding.locate(im.partition, torus.torus_eval(flagship, x))
        except BoundaryHit:
            continue
        seen[i, j] = 1
    assert ((seen == 1) <= (im.A.entries == 1)).all()
    assert seen.sum() == 64  # full shift: every transition observed


# ---------------------------------------------------------------------------
# itineraries
# ---------------------------------------------------------------------------

def test_itinerary_period_two_point(doubling):
    im = coding.build_itinerary_map(doubling)
    word = coding.itinerary(im, doubling, np.array([1.0 / 3.0]), 8)
    assert word == (0, 1, 0, 1, 0, 1, 0, 1)


def test_itinerary_fixed_point_is_constant_last_symbol(flagship):
    im = coding.build_itinerary_map(flagship)
    word = coding.itinerary(im, flagship, np.zeros(2), 10)
    assert word == (7,) * 10


def test_itinerary_matches_binary_digits(doubling):
    im = coding.build_itinerary_map(doubling)
    rng = np.random.default_rng(1)
    for x in rng.random(200):
        word = coding.itinerary(im, doubling, np.array([x]), 30)
        digits = tuple(int(math.floor(x * 2 ** (j + 1))) % 2 for j in range(30))
        assert word == digits


def test_itinerary_boundary_hit(doubling):
    im = coding.build_itinerary_map(doubling)
    with pytest.raises(BoundaryHit):
        coding.itinerary(im, doubling, np.array([0.5]), 3)


def test_semiconjugacy_shift_property(flagship):
    im = coding.build_itinerary_map(flagship)
    rng = np.random.default_rng(2)
    for x in rng.random((50, 2)):
        w = coding.itinerary(im, flagship, x, 12)
        w_shift = coding.itinerary(im, flagship, torus.torus_eval(flagship, x), 11)
        assert w[1:] == w_shift


# ---------------------------------------------------------------------------
# cylinders
# ---------------------------------------------------------------------------

def test_cylinder_doubling_binary_interval(doubling):
    im = coding.build_itinerary_map(doubling)
    box = coding.cylinder_box(im, (0, 1))
    assert box.exact
    assert box.intervals[0] == (Fraction(1, 4), Fraction(1, 2))


@pytest.mark.parametrize("n", [1, 3, 6, 10])
def test_cylinder_doubling_width(doubling, n):
    im = coding.build_itinerary_map(doubling)
    box = coding.cylinder_box(im, (0,) * n)
    assert box.diameter() == pytest.approx(2.0 ** -n)


def test_cylinder_inadmissible_word_raises():
    gm_map = torus.make_linear_map((2,))
    im = coding.build_itinerary_map(gm_map)
    with pytest.raises(EmptyCylinder):
        coding.cylinder_box(im, (0, 2))


def test_cylinder_enclosure_contains_samples(flagship):
    im = coding.build_itinerary_map(flagship)
    rng = np.random.default_rng(3)
    hits = 0
    for x in rng.random((300, 2)):
        try:
            w = coding.itinerary(im, flagship, x, 5)
        except BoundaryHit:
            continue
        box = coding.cylinder_box(im, w)
        xi = torus.recenter(x)
        for axis, (lo, hi) in enumerate(box.intervals):
            lo, hi = float(lo), float(hi)
            v = xi[axis]
            ok = (lo - 1e-9 <= v <= hi + 1e-9) or (lo - 1e-9 <= v + 1.0 <= hi + 1e-9)
            assert ok, (w, axis, v, lo, hi)
        hits += 1
    assert hits > 250


def test_cylinder_diameters_do_not_vanish_at_neutral_cell(flagship):
    # repeated passes through the window cell keep a macroscopic weak-axis
    # extent: the itinerary does not separate points near the fixed point
    im = coding.build_itinerary_map(flagship)
    diams = [coding.cylinder_box(im, (7,) * n).diameter() for n in (2, 8, 16, 24)]
    assert min(diams) > 0.05
    assert abs(diams[-1] - diams[-2]) < 1e-4  # stabilized, not shrinking


def test_cylinder_enclosures_stay_within_first_cell(flagship):
    im = coding.build_itinerary_map(flagship)
    rng = np.random.default_rng(4)
    for x in rng.random((40, 2)):
        try:
            w = coding.itinerary(im, flagship, x, 6)
        except BoundaryHit:
            continue
        box = coding.cylinder_box(im, w)
        cell = im.partition.cells[w[0]]
        for axis, (lo, hi) in enumerate(box.intervals):
            c_lo, c_hi = im.partition.axis_interval(axis, cell[axis])
            assert float(c_lo) - 1e-9 <= float(lo)
            assert float(hi) <= float(c_hi) + 1e-9


# ---------------------------------------------------------------------------
# transitivity / Gibbs ratios
# ---------------------------------------------------------------------------

def test_check_transitivity_examples():
    assert coding.check_transitivity(sft.full_shift(3)) == (True, True, 1)
    cyc = sft.TransitionMatrix([[0, 1], [1, 0]])
    assert coding.check_transitivity(cyc) == (True, False, 2)
    assert coding.check_transitivity(sft.golden_mean_shift()) == (True, True, 1)


def test_gibbs_full_shift_ratios_exactly_one():
    A = sft.full_shift(2)
    mu = sft.parry_measure(A)
    phi = sft.LocallyConstantPotential.zero(2)
    lo, hi = coding.gibbs_ratio_scan(A, mu, phi, math.log(2.0), 10)
    assert lo == pytest.approx(1.0, abs=1e-12)
    assert hi == pytest.approx(1.0, abs=1e-12)


def test_gibbs_weighted_full_shift_ratios_exactly_one():
    A = sft.full_shift(2)
    phi = sft.LocallyConstantPotential(1, {(0,): math.log(2.0), (1,): 0.0})
    mu = sft.equilibrium_markov(A, phi)
    P = sft.pressure(A, phi)
    lo, hi = coding.gibbs_ratio_scan(A, mu, phi, P, 10)
    assert lo == pytest.approx(1.0, abs=1e-10)
    assert hi == pytest.approx(1.0, abs=1e-10)


def test_gibbs_golden_mean_eigenvector_bounds():
    A = sft.golden_mean_shift()
    mu = sft.parry_measure(A)
    htop = sft.topological_entropy(A)
    pd = sft.perron(A)
    lo, hi = coding.gibbs_ratio_scan(A, mu, sft.LocallyConstantPotential.zero(2),
                                     htop, 12)
    # ratio of a cylinder [i0..in] is lam * left[i0] * right[i_last]
    expected = sorted(pd.lam * pd.left[i] * pd.right[j]
                      for i in range(2) for j in range(2))
    assert lo == pytest.approx(expected[0], abs=1e-10)
    assert hi == pytest.approx(expected[-1], abs=1e-10)
    C = max(hi, 1.0 / lo)  # eigenvector-extreme Gibbs constant
    assert 1.0 / C - 1e-12 <= lo and hi <= C + 1e-12


def test_gibbs_extremes_stabilize_with_length():
    A = sft.golden_mean_shift()
    mu = sft.parry_measure(A)
    phi = sft.LocallyConstantPotential.zero(2)
    htop = sft.topological_entropy(A)
    lo8, hi8 = coding.gibbs_ratio_scan(A, mu, phi, htop, 8)
    lo12, hi12 = coding.gibbs_ratio_scan(A, mu, phi, htop, 12)
    assert abs(lo12 - lo8) / lo8 < 0.05
    assert abs(hi12 - hi8) / hi8 < 0.05


def test_cylinder_measures_sum_to_one():
    for A in (sft.golden_mean_shift(), sft.full_shift(3)):
        mu = sft.parry_measure(A)
        for k in (1, 4, 8):
            total = sum(m for _w, m in sft.cylinder_measure(mu, k))
            assert total == pytest.approx(1.0, abs=1e-10)


# ---------------------------------------------------------------------------
# empirical measures
# ---------------------------------------------------------------------------

def test_empirical_measure_from_doubling_orbit(doubling):
    im = coding.build_itinerary_map(doubling)
    tr = orbits.iterate(doubling, np.array([0.1234567]), 20000)
    word = [coding.locate(im.partition, p) for p in tr.points]
    mu = coding.empirical_measure(im.A, word)
    assert np.abs(mu.P - 0.5).max() < 0.05
    assert np.abs(mu.pi - 0.5).max() < 0.05
    assert mu.compatible_with(im.A)


def test_empirical_entropy_below_sampled_exponents(flagship):
    # entropy estimates must respect the exponent budget along orbits
    im = coding.build_itinerary_map(flagship)
    x0 = np.array([0.456, 0.789])
    tr = orbits.iterate(flagship, x0, 20000)
    word = []
    for p in tr.points:
        try:
            word.append(coding.locate(im.partition, p))
        except BoundaryHit:
            word.append(word[-1] if word else 0)
    mu = coding.empirical_measure(im.A, word)
    h_emp = sft.markov_entropy(mu)
    exps = orbits.lyapunov_spectrum(flagship, x0, 20000).exponents
    assert h_emp <= exps[exps > 0].sum() + 0.05


def test_partition_json_rational_endpoints(flagship):
    import json

    part = coding.build_partition(flagship)
    doc = json.loads(coding.partition_to_json(part))
    assert doc["d"] == 8
    rec = doc["rectangles"][-1]
    # last rectangle is the origin-centered cell [-1/4, 1/4) x [-1/8, 1/8)
    assert rec[0] == [[-1, 4], [1, 4]]
    assert rec[1] == [[-1, 8], [1, 8]]
