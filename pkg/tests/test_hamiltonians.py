import math
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, strategies as st

from shvqe.errors import CapacityError, HamiltonianParseError, SchemaError
from shvqe.hamiltonians import (
    build_xxz,
    exact_ground,
    fixture_path,
    format_hamiltonian,
    ground_space,
    load_hamiltonian,
    parse_hamiltonian,
    read_hamiltonian_file,
    save_hamiltonian,
    spectrum,
)
from shvqe.pauli import PauliSum, to_dense

from conftest import dense_xxz

# ground energy of the n=8 Heisenberg ring in Pauli units; equals 4 * (-3.651093408937...)
# for the spin-1/2 (S.S) normalization known from the Bethe ansatz
XXZ_8_GROUND = -14.6043736357487


def test_xxz_term_structure():
    h = build_xxz(4, 1.0)
    assert h.term_count() == 12
    assert set(h.weights()) == {2}
    assert build_xxz(5, 0.0).term_count() == 10


def test_xxz_small_ring_rejected():
    with pytest.raises(ValueError):
        build_xxz(2, 1.0)


@pytest.mark.parametrize("n,delta", [(3, 0.4), (4, 1.0), (6, -0.7)])
def test_xxz_matches_dense(n, delta):
    assert np.abs(to_dense(build_xxz(n, delta)) - dense_xxz(n, delta)).max() < 1e-12


@given(st.integers(3, 9), st.floats(-2, 2, allow_nan=False), st.integers(1, 8))
def test_xxz_cyclic_invariance(n, delta, shift):
    h = build_xxz(n, delta)
    rotated = PauliSum.from_terms(n, [(c, p.label[shift % n:] + p.label[:shift % n]) for p, c in h.items()])
    assert rotated == h


def test_round_trip_is_exact(tmp_path):
    h = build_xxz(6, 0.5)
    path = tmp_path / "h.ham"
    save_hamiltonian(h, path, {"name": "ring"})
    assert load_hamiltonian(path) == h
    assert read_hamiltonian_file(path).metadata == {"name": "ring"}


def test_round_trip_random_coefficients():
    rng = np.random.default_rng(0)
    h = PauliSum.from_terms(3, [(float(c), l) for c, l in zip(rng.normal(size=4), ["XYZ", "ZZI", "IIX", "YYY"])])
    assert parse_hamiltonian(format_hamiltonian(h)).to_sum() == h


def test_round_trip_spectrum(tmp_path):
    h = build_xxz(5, 0.3)
    save_hamiltonian(h, tmp_path / "a.ham")
    assert np.allclose(spectrum(load_hamiltonian(tmp_path / "a.ham")), spectrum(h), atol=1e-10)


def test_duplicate_keys_merge():
    h = parse_hamiltonian("n 2\n0.5 XX\n0.25 XX\n1 ZI\n").to_sum()
    assert h.coefficient("XX") == 0.75


@pytest.mark.parametrize(
    "text,line",
    [
        ("n 2\n1.0 XQ\n", 2),
        ("n 2\nabc XX\n", 2),
        ("n 2\n1.0\n", 2),
        ("0.5 XX\n", 1),
        ("n two\n", 1),
        ("n 2\n1.0 XX\nnan ZZ\n", 3),
    ],
)
def test_parse_errors_carry_line(text, line):
    with pytest.raises(HamiltonianParseError) as exc:
        parse_hamiltonian(text)
    assert exc.value.line == line


def test_length_mismatch_is_schema_error():
    with pytest.raises(SchemaError):
        parse_hamiltonian("n 3\n1.0 XX\n")


def test_exact_ground_single_z():
    e, v = exact_ground(PauliSum.from_terms(1, [(1.0, "Z")]))
    assert e == pytest.approx(-1.0)
    assert abs(abs(v.amplitudes[1]) - 1) < 1e-12


def test_exact_ground_residual_and_dense_check():
    h = build_xxz(4, 1.0)
    e, v = exact_ground(h)
    m = to_dense(h)
    assert np.linalg.norm(m @ v.amplitudes - e * v.amplitudes) < 1e-8
    assert e == pytest.approx(np.linalg.eigvalsh(dense_xxz(4, 1.0))[0], abs=1e-10)


def test_xxz8_ground_energy_regression():
    e, _ = exact_ground(build_xxz(8, 1.0))
    assert e == pytest.approx(XXZ_8_GROUND, abs=1e-9)
    meta = read_hamiltonian_file(fixture_path("xxz_n8_d1.ham")).metadata
    assert float(meta["ground_energy"]) == pytest.approx(XXZ_8_GROUND, abs=1e-12)


def test_ground_space_degeneracy():
    # Z0 + Z1 on 3 qubits: ground space spanned by |11x>, dimension 2
    h = PauliSum.from_terms(3, [(1.0, "ZII"), (1.0, "IZI")])
    e, basis = ground_space(h)
    assert e == pytest.approx(-2.0)
    assert basis.shape == (8, 2)
    assert np.allclose(basis.conj().T @ basis, np.eye(2))


def test_exact_capacity():
    with pytest.raises(CapacityError):
        exact_ground(PauliSum.from_terms(13, [(1.0, "Z" * 13)]))


@pytest.mark.parametrize("name", ["xxz_n4_d1.ham", "xxz_n6_d0.5.ham", "xxz_n8_d1.ham"])
def test_xxz_fixtures_match_builder(name):
    hf = read_hamiltonian_file(fixture_path(name))
    n = hf.n
    delta = 0.5 if "d0.5" in name else 1.0
    assert hf.to_sum() == build_xxz(n, delta)
    assert exact_ground(hf.to_sum())[0] == pytest.approx(float(hf.metadata["ground_energy"]), abs=1e-10)


def test_molecular_fixture_locality_and_energy():
    hf = read_hamiltonian_file(fixture_path("h4_bk.ham"))
    h = hf.to_sum()
    assert h.n == 8
    hist = Counter(h.weights())
    # weight histogram of the bundled fixture, frozen from the generator output
    assert dict(hist) == {0: 1, 1: 6, 2: 10, 3: 26, 4: 26, 5: 72, 6: 32, 7: 12}
    # Jordan-Wigner strings of the same integrals reach the full width n = 8
    assert max(hist) == 7 <= math.ceil(math.log2(8)) + 4
    e, _ = exact_ground(h)
    assert e == pytest.approx(float(hf.metadata["fci_energy"]), abs=1e-9)
