import numpy as np
import pytest
from hypothesis import given, strategies as st

from shvqe.clifford import graph_circuit
from shvqe.errors import DimensionError
from shvqe.hamiltonians import build_xxz
from shvqe.layer import SingleQubitLayer, conjugate_layer, euler_gate, euler_gates, layer_table, transform_hamiltonian
from shvqe.pauli import PauliString, PauliSum, to_dense

from conftest import dense_circuit, dense_euler, kron_all

angle = st.floats(-np.pi, np.pi, allow_nan=False)
triples = st.tuples(angle, angle, angle)


@given(triples)
def test_euler_gate_matches_expm(t):
    assert np.abs(euler_gate(*t) - dense_euler(*t)).max() < 1e-12


def test_euler_gates_vectorized():
    a = np.random.default_rng(0).uniform(-3, 3, (5, 3))
    assert np.allclose(euler_gates(a), [euler_gate(*row) for row in a])


@given(triples)
def test_rotation_table_is_orthogonal(t):
    r = layer_table(SingleQubitLayer(1, np.array([t])))[0]
    assert np.allclose(r @ r.T, np.eye(3), atol=1e-12)
    assert np.isclose(np.linalg.det(r), 1.0)


def test_layer_copies_input():
    a = np.zeros((2, 3))
    layer = SingleQubitLayer(2, a)
    a[0, 0] = 1.0
    assert layer.angles[0, 0] == 0.0
    with pytest.raises(ValueError):
        SingleQubitLayer(3, a)


@given(st.integers(1, 3).flatmap(lambda n: st.tuples(
    st.just(n),
    st.text("IXYZ", min_size=n, max_size=n),
    st.lists(triples, min_size=n, max_size=n),
)))
def test_conjugate_layer_matches_dense(args):
    n, label, angles = args
    h = PauliSum.from_terms(n, [(0.7, label)])
    layer = SingleQubitLayer(n, np.array(angles))
    g = kron_all([dense_euler(*a) for a in angles])
    want = g.conj().T @ to_dense(h) @ g
    got = conjugate_layer(layer, h)
    assert np.abs(to_dense(got) - want).max() < 1e-12
    k = PauliString.from_label(label).weight()
    assert got.term_count() <= 3**k
    assert all(w == k for w in got.weights())
    assert np.isclose(sum(c * c for _, c in got.items()), 0.49, atol=1e-10)


def test_identity_layer_is_noop():
    h = build_xxz(5, 0.3)
    assert conjugate_layer(SingleQubitLayer.identity(5), h).isclose(h)


def test_layer_size_mismatch():
    with pytest.raises(DimensionError):
        conjugate_layer(SingleQubitLayer.identity(3), build_xxz(4, 1.0))


def test_transform_order_layer_outermost():
    # T = L . C acts as C first; H_T = C^dag L^dag H L C
    rng = np.random.default_rng(3)
    n = 4
    angles = rng.uniform(-np.pi, np.pi, (n, 3))
    h = build_xxz(n, 0.5)
    c = graph_circuit("11", n)
    u_c = dense_circuit(n, [(g.kind, g.qubits) for g in c.gates])
    u_l = kron_all([dense_euler(*a) for a in angles])
    t = u_l @ u_c
    want = t.conj().T @ to_dense(h) @ t
    got = transform_hamiltonian(c, SingleQubitLayer(n, angles), h)
    assert np.abs(to_dense(got) - want).max() < 1e-12
