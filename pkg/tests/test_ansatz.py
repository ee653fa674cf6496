import numpy as np
import pytest
from hypothesis import given, strategies as st

from shvqe.ansatz import (
    ArchLogits,
    HardwareEfficientAnsatz,
    brick_pairs,
    build_schrodinger,
    pattern_distribution,
    pattern_probs,
    patterns_from_uniforms,
    prepare_state,
    prepare_state_reference,
    sample_pattern,
)

from conftest import dense_circuit, dense_euler, kron_all


def test_brick_layout_even_ring():
    assert brick_pairs(6, 1) == [(1, 2), (3, 4), (5, 0)]
    assert brick_pairs(6, 2) == [(0, 1), (2, 3), (4, 5)]


def test_brick_layout_odd_and_small():
    assert brick_pairs(5, 1) == [(1, 2), (3, 4)]
    assert brick_pairs(5, 2) == [(0, 1), (2, 3)]
    assert brick_pairs(2, 1) == []
    assert brick_pairs(2, 2) == [(0, 1)]


@given(st.integers(2, 10), st.integers(1, 6))
def test_bricks_are_disjoint(n, layer):
    qubits = [q for pair in brick_pairs(n, layer) for q in pair]
    assert len(qubits) == len(set(qubits))


def test_parameter_shape():
    a = HardwareEfficientAnsatz.zeros(4, 3)
    assert a.theta.shape == (4, 4, 3)
    assert HardwareEfficientAnsatz.parameter_count(4, 3) == 48


def test_zero_angles_give_zero_state():
    psi = prepare_state(HardwareEfficientAnsatz.zeros(5, 3))
    assert abs(psi.amplitudes[0] - 1) < 1e-12


@pytest.mark.parametrize("n,depth", [(3, 2), (4, 3), (6, 4)])
def test_fast_path_matches_reference(n, depth):
    theta = np.random.default_rng(n * 10 + depth).uniform(-np.pi, np.pi, (depth + 1, n, 3))
    a = HardwareEfficientAnsatz(n, depth, theta)
    assert np.allclose(prepare_state(a).amplitudes, prepare_state_reference(a).amplitudes, atol=1e-12)


def test_reference_matches_dense_unitary():
    n, depth = 4, 2
    theta = np.random.default_rng(0).uniform(-np.pi, np.pi, (depth + 1, n, 3))
    u = kron_all([dense_euler(*theta[0, q]) for q in range(n)])
    for layer in range(1, depth + 1):
        u = dense_circuit(n, [("CZ", p) for p in brick_pairs(n, layer)]) @ u
        u = kron_all([dense_euler(*theta[layer, q]) for q in range(n)]) @ u
    psi = prepare_state(HardwareEfficientAnsatz(n, depth, theta))
    assert np.allclose(psi.amplitudes, u[:, 0], atol=1e-12)
    assert len(build_schrodinger(HardwareEfficientAnsatz(n, depth, theta))) == 4 + 2 + 4 + 2 + 4


def test_softmax_probabilities():
    p = pattern_probs(np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1000.0]]))
    assert p[0] == pytest.approx(0.5)
    assert p[1] == pytest.approx(1 / (1 + np.exp(-1)))
    assert p[2] == pytest.approx(0.0)
    assert np.allclose(pattern_probs(ArchLogits.saturated("10")), [1, 0])


@given(st.lists(st.floats(0, 1), min_size=1, max_size=5))
def test_pattern_distribution_sums_to_one(probs):
    d = pattern_distribution(np.array(probs))
    assert d.sum() == pytest.approx(1.0)
    assert np.all(d >= 0)


def test_patterns_from_uniforms_bit_order():
    probs = np.array([1.0, 0.0, 1.0, 0.0])
    idx = patterns_from_uniforms(probs, np.full((3, 4), 0.5))
    assert list(idx) == [0b1010] * 3


def test_sampling_frequencies_match_distribution():
    logits = ArchLogits(np.array([[0.3, -0.2], [1.0, 0.5]]))
    probs = pattern_probs(logits)
    rng = np.random.default_rng(0)
    counts = np.bincount(patterns_from_uniforms(probs, rng.random((20000, 2))), minlength=4) / 20000
    assert np.abs(counts - pattern_distribution(probs)).max() < 0.015


def test_sample_pattern_reproducible():
    logits = ArchLogits.uniform(8)
    assert sample_pattern(logits, 8, 4) == sample_pattern(logits, 8, 4)
    assert len(sample_pattern(logits, 8, 4).bits) == 4
