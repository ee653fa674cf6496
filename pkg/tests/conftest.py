"""Dense-matrix oracles built from raw numpy, independent of the package internals."""

from __future__ import annotations

import functools

import numpy as np
import pytest
from hypothesis import settings

settings.register_profile("default", deadline=None, max_examples=60)
settings.load_profile("default")

I2 = np.eye(2, dtype=complex)
X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
Z = np.array([[1, 0], [0, -1]], dtype=complex)
PAULI = {"I": I2, "X": X, "Y": Y, "Z": Z}
HAD = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
PHASE = np.diag([1, 1j])
PHASES = {"+": 1, "+i": 1j, "-": -1, "-i": -1j}


def kron_all(mats):
    return functools.reduce(np.kron, mats, np.eye(1, dtype=complex))


def dense_label(label: str, phase: complex = 1) -> np.ndarray:
    """Qubit 0 is the leftmost (most significant) tensor factor."""
    return phase * kron_all([PAULI[c] for c in label])


def embed_1q(n: int, q: int, g: np.ndarray) -> np.ndarray:
    return kron_all([g if k == q else I2 for k in range(n)])


def projector_embed(n: int, q: int, p0: np.ndarray, p1: np.ndarray, a: int, b: int) -> np.ndarray:
    """``|0><0|_a (x) p0_b + |1><1|_a (x) p1_b``."""
    zero = np.diag([1, 0]).astype(complex)
    one = np.diag([0, 1]).astype(complex)
    left = kron_all([zero if k == a else (p0 if k == b else I2) for k in range(n)])
    right = kron_all([one if k == a else (p1 if k == b else I2) for k in range(n)])
    return left + right


def dense_gate(n: int, kind: str, qubits) -> np.ndarray:
    if kind == "H":
        return embed_1q(n, qubits[0], HAD)
    if kind == "S":
        return embed_1q(n, qubits[0], PHASE)
    if kind == "CNOT":
        return projector_embed(n, 0, I2, X, *qubits)
    if kind == "CZ":
        return projector_embed(n, 0, I2, Z, *qubits)
    raise ValueError(kind)


def dense_circuit(n: int, gates) -> np.ndarray:
    """Unitary of ``(kind, qubits)`` gates listed in application order."""
    u = np.eye(2**n, dtype=complex)
    for kind, qubits in gates:
        u = dense_gate(n, kind, qubits) @ u
    return u


def dense_euler(tx, ty, tz) -> np.ndarray:
    from scipy.linalg import expm

    return expm(-1j * tx * X) @ expm(-1j * ty * Y) @ expm(-1j * tz * Z)


def dense_sum(n: int, terms) -> np.ndarray:
    out = np.zeros((2**n, 2**n), dtype=complex)
    for c, label in terms:
        out += c * dense_label(label)
    return out


def dense_xxz(n: int, delta: float) -> np.ndarray:
    h = np.zeros((2**n, 2**n), dtype=complex)
    for i in range(n):
        j = (i + 1) % n
        for op, c in ((X, 1.0), (Y, 1.0), (Z, delta)):
            h += c * kron_all([op if k in (i, j) else I2 for k in range(n)])
    return h


def decompose(mat: np.ndarray, n: int) -> dict[str, complex]:
    """Pauli coefficients ``Tr(P M) / 2**n`` by brute force over all labels."""
    import itertools

    out = {}
    for chars in itertools.product("IXYZ", repeat=n):
        label = "".join(chars)
        c = np.trace(dense_label(label) @ mat) / 2**n
        if abs(c) > 1e-12:
            out[label] = c
    return out


# acceptance criteria report: one line per criterion, shown after the test summary
_ACCEPTANCE: list[str] = []


@pytest.fixture
def acceptance():
    def record(label: str, ok: bool, detail: str) -> bool:
        line = f"criterion {label}: {'PASS' if ok else 'FAIL'} ({detail})"
        print(line, flush=True)
        _ACCEPTANCE.append(line)
        return ok
    return record


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in _ACCEPTANCE:
            terminalreporter.write_line(line)
