import numpy as np
import pytest
from hypothesis import given, strategies as st

from shvqe.clifford import CliffordCircuit, graph_circuit, random_clifford
from shvqe.layer import SingleQubitLayer
from shvqe.measurement import (
    CSV_COLUMNS,
    STRATEGIES,
    HeisenbergTransform,
    allocate,
    allocation_fractions,
    estimator_variance,
    overhead_experiment,
    shots_required,
    simulate_estimator,
    write_csv,
)
from shvqe.pauli import PauliString
from shvqe.statevector import expectation, haar_state, variance

from conftest import dense_sum


def test_shots_required_basic():
    assert shots_required(1.0, 0.1) == 100
    assert shots_required(0.0, 0.1) == 1
    assert shots_required(1.0, 0.3) == 12
    with pytest.raises(ValueError):
        shots_required(1.0, 0.0)
    with pytest.raises(ValueError):
        shots_required(-0.1, 0.1)


@given(st.floats(0.0, 1.0), st.floats(1e-3, 0.5))
def test_shots_reach_target_error(var, eps):
    n = shots_required(var, eps)
    assert var / n <= eps**2 * (1 + 1e-8)
    assert n == 1 or var / (n - 1) > eps**2 * (1 - 1e-8)


def test_allocation_fractions_examples():
    c = [1 / np.sqrt(2), -1 / np.sqrt(2)]
    for s in STRATEGIES:
        assert np.allclose(allocation_fractions(c, s), [0.5, 0.5])
    assert np.allclose(allocation_fractions([0.8, 0.6], "abs_coeff"), [4 / 7, 3 / 7])
    assert np.allclose(allocation_fractions([0.8, 0.6], "squared_coeff"), [0.64, 0.36])
    with pytest.raises(ValueError):
        allocation_fractions([0.0, 0.0], "uniform")
    with pytest.raises(ValueError):
        allocation_fractions([1.0], "greedy")


@given(st.lists(st.floats(-2, 2).filter(lambda x: abs(x) > 1e-6), min_size=1, max_size=9),
       st.integers(9, 5000), st.sampled_from(STRATEGIES))
def test_rounding_conserves_budget(coeffs, total, strategy):
    plan = allocate(coeffs, strategy=strategy, total=total)
    assert plan.shots.sum() == total
    assert plan.shots.min() >= 1


def test_allocation_needs_one_shot_per_term():
    with pytest.raises(ValueError):
        allocate([1.0, 1.0, 1.0], total=2)


def test_tiny_coefficient_gets_floor_shot():
    plan = allocate([1.0, 1e-9], strategy="squared_coeff", total=10)
    assert list(plan.shots) == [9, 1]


@given(st.lists(st.floats(0.01, 3), min_size=2, max_size=8))
def test_abs_coeff_is_optimal_for_equal_variances(coeffs):
    v = np.ones(len(coeffs))
    best = estimator_variance(coeffs, v, allocation_fractions(coeffs, "abs_coeff"), 1000)
    for s in ("uniform", "squared_coeff"):
        assert best <= estimator_variance(coeffs, v, allocation_fractions(coeffs, s), 1000) * (1 + 1e-12)
    # Cauchy-Schwarz bound attained: (sum |c|)**2 / N
    assert best == pytest.approx(np.sum(np.abs(coeffs)) ** 2 / 1000)


def test_abs_coeff_strictly_better_for_unequal_coefficients():
    c, v = [0.9, 0.3, 0.1], np.ones(3)
    abs_var = estimator_variance(c, v, allocation_fractions(c, "abs_coeff"), 600)
    assert abs_var < estimator_variance(c, v, allocation_fractions(c, "uniform"), 600)
    assert abs_var < estimator_variance(c, v, allocation_fractions(c, "squared_coeff"), 600)


def test_simulated_estimator_variance_matches_formula():
    c = np.array([0.8, -0.5, 0.3])
    exps = np.array([0.2, -0.6, 0.9])
    plan = allocate(c, strategy="abs_coeff", total=900)
    est = simulate_estimator(c, exps, plan.shots, trials=3000, seed=5)
    want = float(np.sum(c**2 * (1 - exps**2) / plan.shots))
    assert est.mean() == pytest.approx(float(c @ exps), abs=4 * np.sqrt(want / 3000))
    assert est.var(ddof=1) == pytest.approx(want, rel=0.1)


def _random_layer(n, seed):
    return SingleQubitLayer(n, np.random.default_rng(seed).uniform(-np.pi, np.pi, (n, 3)))


def test_transform_expansion_matches_dense():
    n = 3
    t = HeisenbergTransform(random_clifford(n, 15, 2), _random_layer(n, 2))
    p = PauliString.from_label("XZI")
    psi = haar_state(n, 8)
    # <psi| T^dag P T |psi> computed two ways
    assert expectation(psi, t.expand(p)) == pytest.approx(expectation(t.apply_to_state(psi), p), abs=1e-12)
    m = dense_sum(n, [(c, q.label) for q, c in t.expand(p).items()])
    assert np.allclose(m, m.conj().T)
    assert np.allclose(m @ m, np.eye(2**n), atol=1e-10)


@pytest.mark.parametrize("seed", range(4))
def test_variance_is_transform_invariant(seed):
    n = 4
    t = HeisenbergTransform(graph_circuit("11", n), _random_layer(n, seed))
    p = PauliString.from_label("ZIXI")
    psi = haar_state(n, (seed, 1))
    assert variance(t.apply_to_state(psi), p) == pytest.approx(variance(psi, t.expand(p)), abs=1e-12)


def test_identity_transform_has_unit_overhead():
    r = overhead_experiment(PauliString.from_label("XII"), HeisenbergTransform.identity(3), haar_state(3, 0),
                            epsilon=0.02, seed=1)
    assert r.m_h == 1
    # same observable on the same state; only the independent shot streams differ
    assert abs(r.ratio - 1.0) < 0.05


def test_three_term_expansion_costs_about_three_times():
    n = 6
    t = HeisenbergTransform(CliffordCircuit(n), _random_layer(n, 7))
    r = overhead_experiment(PauliString.from_label("X" + "I" * (n - 1)), t, haar_state(n, 3), epsilon=0.01, seed=2)
    assert r.m_h == 3
    assert 2.25 <= r.ratio <= 3.75
    assert np.sum(r.coeffs**2) == pytest.approx(1.0, abs=1e-10)
    rows = [r.row(s) for s in STRATEGIES]
    text = write_csv(rows)
    assert text.splitlines()[0] == ",".join(CSV_COLUMNS)
    assert len(text.splitlines()) == 4


def test_overhead_is_deterministic():
    t = HeisenbergTransform(graph_circuit("1", 2), _random_layer(2, 1))
    args = (PauliString.from_label("XI"), t, haar_state(2, 4))
    a = overhead_experiment(*args, epsilon=0.05, seed=3, trials=5, shots_per_trial=200)
    b = overhead_experiment(*args, epsilon=0.05, seed=3, trials=5, shots_per_trial=200)
    assert (a.n1, a.n2) == (b.n1, b.n2)
    assert np.array_equal(a.var_terms, b.var_terms)
