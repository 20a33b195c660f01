import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from nuedyn import sft
from nuedyn.errors import DepthMismatch, NotIrreducible

from oracles import pressure_enumeration, pressure_partition_dp

GOLDEN = (1.0 + math.sqrt(5.0)) / 2.0


def quadratic_root(b, c):
    # largest root of x^2 - b x - c, solved independently of any eigensolver
    return 0.5 * (b + math.sqrt(b * b + 4.0 * c))


# ---------------------------------------------------------------------------
# transition matrices / perron data
# ---------------------------------------------------------------------------

def test_matrix_validation():
    with pytest.raises(ValueError):
        sft.TransitionMatrix([[1, 0], [0, 0]])  # dead row
    with pytest.raises(ValueError):
        sft.TransitionMatrix([[0, 1], [0, 1]])  # dead column
    with pytest.raises(ValueError):
        sft.TransitionMatrix([[2, 0], [0, 1]])


def test_perron_full_2_shift():
    pd = sft.perron(sft.full_shift(2))
    assert pd.lam == pytest.approx(2.0, abs=1e-13)
    assert np.allclose(pd.right, [1.0, 1.0])
    assert np.allclose(pd.left, [0.5, 0.5])
    assert pd.left @ pd.right == pytest.approx(1.0, abs=1e-12)


def test_perron_golden_mean_matches_quadratic_root():
    pd = sft.perron(sft.golden_mean_shift())
    assert pd.lam == pytest.approx(quadratic_root(1.0, 1.0), abs=1e-12)


def test_perron_reducible_raises():
    with pytest.raises(NotIrreducible):
        sft.perron(sft.TransitionMatrix([[1, 0], [0, 1]]))


def test_perron_residuals_within_tol():
    for A in (sft.full_shift(3), sft.golden_mean_shift(),
              sft.TransitionMatrix([[0, 1, 1], [1, 0, 0], [1, 1, 0]])):
        pd = sft.perron(A, tol=1e-12)
        scale = max(1.0, pd.lam)
        assert np.abs(A.entries @ pd.right - pd.lam * pd.right).max() <= 1e-12 * scale
        assert np.abs(pd.left @ A.entries - pd.lam * pd.left).max() <= 1e-11 * scale


def test_period_and_irreducibility():
    cyc = sft.TransitionMatrix([[0, 1], [1, 0]])
    assert cyc.is_irreducible()
    assert cyc.period() == 2
    assert sft.golden_mean_shift().period() == 1


# ---------------------------------------------------------------------------
# entropy / Parry measure
# ---------------------------------------------------------------------------

@pytest.mark.parametrize("k", [2, 3, 4])
def test_topological_entropy_full_shifts(k):
    assert sft.topological_entropy(sft.full_shift(k)) == pytest.approx(math.log(k), abs=1e-13)


def test_topological_entropy_golden_mean():
    assert sft.topological_entropy(sft.golden_mean_shift()) == pytest.approx(
        math.log(quadratic_root(1.0, 1.0)), abs=1e-12)


def test_parry_full_shifts():
    mu2 = sft.parry_measure(sft.full_shift(2))
    assert np.allclose(mu2.P, 0.5, atol=1e-12)
    assert np.allclose(mu2.pi, 0.5, atol=1e-12)
    mu3 = sft.parry_measure(sft.full_shift(3))
    assert np.allclose(mu3.P, 1.0 / 3.0, atol=1e-12)


def test_parry_golden_mean_from_eigenvector():
    # right eigenvector is proportional to (phi, 1)
    mu = sft.parry_measure(sft.golden_mean_shift())
    assert mu.P[0, 0] == pytest.approx(1.0 / GOLDEN, abs=1e-12)
    assert mu.P[0, 1] == pytest.approx(1.0 / GOLDEN ** 2, abs=1e-12)
    assert mu.P[1, 0] == pytest.approx(1.0, abs=1e-12)
    assert mu.pi[0] == pytest.approx(GOLDEN ** 2 / (1.0 + GOLDEN ** 2), abs=1e-12)


def test_markov_entropy_examples():
    assert sft.markov_entropy(sft.parry_measure(sft.full_shift(2))) == pytest.approx(
        math.log(2.0), abs=1e-12)
    cycle = sft.MarkovMeasure(P=[[0.0, 1.0], [1.0, 0.0]], pi=[0.5, 0.5])
    assert sft.markov_entropy(cycle) == 0.0
    gm = sft.golden_mean_shift()
    assert sft.markov_entropy(sft.parry_measure(gm)) == pytest.approx(
        sft.topological_entropy(gm), abs=1e-11)


# ---------------------------------------------------------------------------
# pressure / equilibrium measures
# ---------------------------------------------------------------------------

def test_pressure_zero_potential_is_entropy():
    A = sft.full_shift(2)
    assert sft.pressure(A, sft.LocallyConstantPotential.zero(2)) == pytest.approx(
        math.log(2.0), abs=1e-12)


def test_pressure_weighted_full_shift_closed_form_and_oracle():
    w0, w1 = 2.0, 1.0
    A = sft.full_shift(2)
    phi = sft.LocallyConstantPotential(1, {(0,): math.log(w0), (1,): math.log(w1)})
    P = sft.pressure(A, phi)
    assert P == pytest.approx(math.log(w0 + w1), abs=1e-12)
    # brute-force cylinder sums converge to the same value
    for n in (4, 8):
        assert pressure_enumeration(A, phi, n) == pytest.approx(
            pressure_partition_dp(A, phi, n), abs=1e-12)
    errs = [abs(pressure_partition_dp(A, phi, n) - P) for n in (8, 12, 16)]
    assert errs[0] >= errs[1] >= errs[2]
    assert errs[-1] < 0.01


def test_pressure_golden_mean_characteristic_polynomial():
    t = 0.7
    A = sft.golden_mean_shift()
    phi = sft.LocallyConstantPotential(1, {(0,): t, (1,): 0.0})
    # weighted matrix [[e^t, e^t], [1, 0]]: largest root of x^2 - e^t x - e^t
    assert sft.pressure(A, phi) == pytest.approx(
        math.log(quadratic_root(math.exp(t), math.exp(t))), abs=1e-12)


def test_equilibrium_zero_potential_equals_parry():
    A = sft.golden_mean_shift()
    eq = sft.equilibrium_markov(A, sft.LocallyConstantPotential.zero(2))
    parry = sft.parry_measure(A)
    assert np.abs(eq.P - parry.P).max() < 1e-12
    assert np.abs(eq.pi - parry.pi).max() < 1e-12


def test_equilibrium_weighted_full_shift_is_bernoulli():
    A = sft.full_shift(2)
    phi = sft.LocallyConstantPotential(1, {(0,): math.log(2.0), (1,): 0.0})
    mu = sft.equilibrium_markov(A, phi)
    assert np.allclose(mu.P, [[2 / 3, 1 / 3], [2 / 3, 1 / 3]], atol=1e-12)
    assert np.allclose(mu.pi, [2 / 3, 1 / 3], atol=1e-12)
    lhs = sft.markov_entropy(mu) + sft.integral(mu, phi)
    assert lhs == pytest.approx(math.log(3.0), abs=1e-12)


def test_equilibrium_attains_pressure_golden_mean():
    A = sft.golden_mean_shift()
    phi = sft.LocallyConstantPotential(1, {(0,): 1.0, (1,): 0.0})
    mu = sft.equilibrium_markov(A, phi)
    attained = sft.markov_entropy(mu) + sft.integral(mu, phi)
    assert abs(attained - sft.pressure(A, phi)) < 1e-10


# ---------------------------------------------------------------------------
# integrals
# ---------------------------------------------------------------------------

def test_integral_examples():
    A = sft.full_shift(2)
    parry = sft.parry_measure(A)
    const = sft.LocallyConstantPotential.constant(2, 3.25)
    assert sft.integral(parry, const) == pytest.approx(3.25, abs=1e-14)
    ind = sft.LocallyConstantPotential(1, {(0,): 1.0, (1,): 0.0})
    assert sft.integral(parry, ind) == pytest.approx(0.5, abs=1e-12)
    gm_parry = sft.parry_measure(sft.golden_mean_shift())
    assert sft.integral(gm_parry, ind) == pytest.approx(gm_parry.pi[0], abs=1e-14)


def test_integral_depth_mismatch():
    parry = sft.parry_measure(sft.full_shift(2))
    bad = sft.LocallyConstantPotential(1, {(0,): 1.0, (1,): 0.0, (2,): 5.0})
    with pytest.raises(DepthMismatch):
        sft.integral(parry, bad)


def test_integral_depth_two_matches_cylinder_sum():
    A = sft.full_shift(2)
    mu = sft.parry_measure(A)
    phi = sft.LocallyConstantPotential(2, {(0, 0): 1.0, (0, 1): 2.0,
                                           (1, 0): 4.0, (1, 1): 8.0})
    # all four 2-cylinders have measure 1/4 under the fair Bernoulli measure
    assert sft.integral(mu, phi) == pytest.approx((1 + 2 + 4 + 8) / 4.0, abs=1e-12)


# ---------------------------------------------------------------------------
# recoding
# ---------------------------------------------------------------------------

def test_recode_depth_one_is_identity():
    A = sft.full_shift(2)
    phi = sft.LocallyConstantPotential.zero(2)
    A2, phi2 = sft.recode(A, phi)
    assert A2 is A and phi2 is phi


def test_recode_full_shift_depth_two_structure():
    A = sft.full_shift(2)
    phi = sft.LocallyConstantPotential(2, {(a, b): 0.0 for a in (0, 1) for b in (0, 1)})
    A2, _ = sft.recode(A, phi)
    assert A2.d == 4
    words = A2._word_states
    for i, w in enumerate(words):
        for j, w2 in enumerate(words):
            assert A2.entries[i, j] == (1 if w[1:] == w2[:-1] else 0)


def test_recode_pressure_and_entropy_invariance():
    A = sft.golden_mean_shift()
    phi = sft.LocallyConstantPotential(2, {(0, 0): 0.3, (0, 1): -0.2, (1, 0): 0.5})
    A2, phi2 = sft.recode(A, phi)
    assert abs(sft.topological_entropy(A2) - sft.topological_entropy(A)) < 1e-10
    assert abs(sft.pressure(A2, phi2) - sft.pressure(A, phi)) < 1e-10


@settings(max_examples=25, deadline=None)
@given(st.lists(st.floats(-1.0, 1.0), min_size=3, max_size=3))
def test_recode_invariance_random_golden_potentials(vals):
    A = sft.golden_mean_shift()
    phi = sft.LocallyConstantPotential(2, {(0, 0): vals[0], (0, 1): vals[1],
                                           (1, 0): vals[2]})
    A2, phi2 = sft.recode(A, phi)
    assert abs(sft.pressure(A2, phi2) - sft.pressure(A, phi)) < 1e-10


# ---------------------------------------------------------------------------
# low variation
# ---------------------------------------------------------------------------

def test_low_variation_constant_potential():
    A = sft.full_shift(2)
    assert sft.low_variation_check(sft.LocallyConstantPotential.zero(2), A, 0.9)


def test_low_variation_examples():
    A = sft.full_shift(2)
    high = sft.LocallyConstantPotential(1, {(0,): 10.0, (1,): 0.0})
    low = sft.LocallyConstantPotential(1, {(0,): 0.1, (1,): 0.0})
    assert not sft.low_variation_check(high, A, 0.5)
    assert sft.low_variation_check(low, A, 0.5)


# ---------------------------------------------------------------------------
# sampling and the variational inequality
# ---------------------------------------------------------------------------

def test_gap_of_injected_equilibrium_is_zero():
    A = sft.golden_mean_shift()
    phi = sft.LocallyConstantPotential(1, {(0,): 1.0, (1,): 0.0})
    mu = sft.equilibrium_markov(A, phi)
    assert abs(sft.variational_gap(A, phi, mu)) < 1e-10


def test_gap_of_deterministic_cycle_is_entropy():
    A = sft.full_shift(2)
    phi = sft.LocallyConstantPotential.zero(2)
    cycle = sft.MarkovMeasure(P=[[0.0, 1.0], [1.0, 0.0]], pi=[0.5, 0.5])
    assert sft.variational_gap(A, phi, cycle) == pytest.approx(math.log(2.0), abs=1e-12)


def test_sampled_gaps_nonnegative_golden_mean():
    A = sft.golden_mean_shift()
    phi = sft.LocallyConstantPotential(1, {(0,): 1.0, (1,): 0.0})
    gaps = sft.variational_gap_sample(A, phi, trials=300, seed=42)
    assert gaps.min() >= -1e-10
    assert gaps.min() < 0.05  # samples do approach the equilibrium value


def test_sampled_gaps_deterministic_in_seed():
    A = sft.golden_mean_shift()
    phi = sft.LocallyConstantPotential.zero(2)
    g1 = sft.variational_gap_sample(A, phi, trials=50, seed=9)
    g2 = sft.variational_gap_sample(A, phi, trials=50, seed=9)
    assert np.array_equal(g1, g2)


def test_entropy_maximality_of_sampled_measures():
    rng = np.random.default_rng(5)
    A = sft.TransitionMatrix([[1, 1, 0], [0, 1, 1], [1, 0, 1]])
    htop = sft.topological_entropy(A)
    parry = sft.parry_measure(A)
    measures = [sft.sample_compatible(A, rng) for _ in range(400)]
    measures.append(parry)
    for mu in measures:
        h = sft.markov_entropy(mu)
        assert h <= htop + 1e-10
        if h >= htop - 1e-8:
            assert np.abs(mu.P - parry.P).max() <= 1e-6


def test_pressure_oracle_fitted_constant():
    # error of the finite-word estimate decays like C/n
    A = sft.golden_mean_shift()
    phi = sft.LocallyConstantPotential(1, {(0,): 0.4, (1,): -0.1})
    P = sft.pressure(A, phi)
    errs = {n: abs(pressure_partition_dp(A, phi, n) - P) for n in (4, 6, 8, 10, 12, 14, 16)}
    C = 1.02 * max(n * e for n, e in errs.items() if n <= 10)
    for n in (12, 14, 16):
        assert errs[n] <= C / n + 1e-12
