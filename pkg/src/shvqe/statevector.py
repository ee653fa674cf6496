"""Dense statevector simulation.

Basis index convention: qubit 0 is the most significant bit, matching the
``kron`` ordering of :func:`shvqe.pauli.to_dense` and the left-to-right text
form of Pauli strings.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Sequence

import numpy as np

from .clifford import CliffordCircuit, CliffordGate
from .errors import CapacityError, DimensionError, NumericalIntegrityError
from .pauli import PauliString, PauliSum
from .rng import stream

MAX_QUBITS = 16
UNITARY_ATOL = 1e-10
_CHUNK = 1 << 22

_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
_S = np.diag([1, 1j])
_CNOT = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
_CZ = np.diag([1, 1, 1, -1]).astype(complex)
CLIFFORD_MATRICES = {"H": _H, "S": _S, "CNOT": _CNOT, "CZ": _CZ}


def _check_capacity(n: int) -> None:
    if n > MAX_QUBITS:
        raise CapacityError(f"statevector simulation limited to {MAX_QUBITS} qubits, got {n}")


@dataclass(frozen=True)
class GateOp:
    """A 2x2 unitary on one qubit or a 4x4 unitary on an ordered qubit pair.

    For pairs the first listed qubit is the more significant bit of the
    4x4 matrix's basis.
    """

    matrix: np.ndarray
    qubits: tuple[int, ...]

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=complex)
        k = len(self.qubits)
        if k not in (1, 2) or m.shape != (2**k, 2**k):
            raise ValueError(f"gate on {k} qubit(s) needs a {2**k}x{2**k} matrix, got {m.shape}")
        if k == 2 and self.qubits[0] == self.qubits[1]:
            raise ValueError(f"two-qubit gate needs distinct qubits, got {self.qubits}")
        if np.abs(m.conj().T @ m - np.eye(2**k)).max() > UNITARY_ATOL:
            raise ValueError("gate matrix is not unitary")
        object.__setattr__(self, "matrix", m)
        object.__setattr__(self, "qubits", tuple(int(q) for q in self.qubits))


def clifford_gate_op(g: CliffordGate) -> GateOp:
    return GateOp(CLIFFORD_MATRICES[g.kind], g.qubits)


class StateVector:
    """``2**n`` complex amplitudes; gates update them in place."""

    def __init__(self, n: int, amplitudes: np.ndarray | None = None):
        _check_capacity(n)
        self.n = n
        if amplitudes is None:
            amplitudes = np.zeros(2**n, dtype=complex)
            amplitudes[0] = 1.0
        else:
            amplitudes = np.array(amplitudes, dtype=complex).reshape(-1)
            if amplitudes.size != 2**n:
                raise DimensionError(f"{amplitudes.size} amplitudes for {n} qubits")
        self.amplitudes = amplitudes

    @classmethod
    def zero(cls, n: int) -> StateVector:
        return cls(n)

    @classmethod
    def basis(cls, n: int, bits: str) -> StateVector:
        amps = np.zeros(2**n, dtype=complex)
        amps[int(bits, 2)] = 1.0
        return cls(n, amps)

    def copy(self) -> StateVector:
        return StateVector(self.n, self.amplitudes.copy())

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def apply(self, gate: GateOp) -> StateVector:
        return apply(self, gate)

    def __repr__(self) -> str:
        return f"StateVector(n={self.n})"


def apply(state: StateVector, gate: GateOp) -> StateVector:
    n = state.n
    if any(q < 0 or q >= n for q in gate.qubits):
        raise ValueError(f"gate qubits {gate.qubits} out of range for {n} qubits")
    psi = state.amplitudes
    if len(gate.qubits) == 1:
        q = gate.qubits[0]
        view = psi.reshape(1 << q, 2, 1 << (n - q - 1))
        view[:] = np.einsum("ij,ajb->aib", gate.matrix, view)
    else:
        a, b = gate.qubits
        tensor = psi.reshape((2,) * n)
        u = gate.matrix.reshape(2, 2, 2, 2)
        out = np.tensordot(u, tensor, axes=([2, 3], [a, b]))
        state.amplitudes = np.moveaxis(out, [0, 1], [a, b]).reshape(-1).copy()
    return state


def apply_all(state: StateVector, gates: Iterable[GateOp]) -> StateVector:
    for g in gates:
        apply(state, g)
    return state


def apply_clifford(state: StateVector, circuit: CliffordCircuit) -> StateVector:
    if circuit.n != state.n:
        raise DimensionError(f"circuit has {circuit.n} qubits, state has {state.n}")
    for g in circuit.gates:
        apply(state, clifford_gate_op(g))
    return state


def simulate(n: int, gates: Iterable[GateOp]) -> StateVector:
    """Run ``gates`` on ``|0...0>``."""
    return apply_all(StateVector(n), gates)


@lru_cache(maxsize=None)
def _index_tables(n: int) -> tuple[np.ndarray, np.ndarray]:
    idx = np.arange(2**n, dtype=np.int64)
    parity = np.zeros(2**n, dtype=np.int8)
    for q in range(n):
        parity ^= ((idx >> q) & 1).astype(np.int8)
    return idx, parity


@lru_cache(maxsize=None)
def _reverse_table(n: int) -> np.ndarray:
    idx = np.arange(2**n, dtype=np.int64)
    rev = np.zeros_like(idx)
    for q in range(n):
        rev |= ((idx >> q) & 1) << (n - 1 - q)
    return rev


def _to_index_masks(n: int, masks: np.ndarray) -> np.ndarray:
    """Qubit-bit masks (bit q = qubit q) to basis-index masks (qubit 0 = MSB)."""
    if n <= 16:
        return _reverse_table(n)[masks]
    raise CapacityError(f"statevector simulation limited to {MAX_QUBITS} qubits, got {n}")


def pauli_expectations(state: StateVector, x_masks, z_masks) -> np.ndarray:
    """Complex ``<psi| X^x Z^z |psi>`` times ``i**|x&z|`` (literal strings), per term."""
    n = state.n
    x = _to_index_masks(n, np.asarray(x_masks, dtype=np.int64))
    z = _to_index_masks(n, np.asarray(z_masks, dtype=np.int64))
    idx, parity = _index_tables(n)
    psi = state.amplitudes
    ylike = np.array([bin(int(v)).count("1") for v in (x & z)], dtype=np.int64) % 4
    out = np.empty(len(x), dtype=complex)
    step = max(1, _CHUNK // psi.size)
    for lo in range(0, len(x), step):
        xs, zs = x[lo:lo + step, None], z[lo:lo + step, None]
        sign = 1 - 2 * parity[idx[None, :] & zs]
        out[lo:lo + step] = np.sum(psi[idx[None, :] ^ xs].conj() * sign * psi[None, :], axis=1)
    return out * (1j ** ylike)


def apply_pauli_sum(state: StateVector, h: PauliSum) -> np.ndarray:
    """Amplitudes of ``h|psi>`` (not normalized)."""
    if h.n != state.n:
        raise DimensionError(f"operator has {h.n} qubits, state has {state.n}")
    n = state.n
    idx, parity = _index_tables(n)
    psi = state.amplitudes
    out = np.zeros_like(psi)
    for p, c in h.items():
        x = int(_reverse_table(n)[p.x_mask])
        z = int(_reverse_table(n)[p.z_mask])
        phase = 1j ** (bin(x & z).count("1") % 4)
        # (X^x Z^z psi)[b ^ x] = (-1)^{|z & b|} psi[b]
        out[idx ^ x] += c * phase * (1 - 2 * parity[idx & z]) * psi
    return out


def variance(state: StateVector, h: PauliSum | PauliString) -> float:
    """``<h^2> - <h>^2``."""
    if isinstance(h, PauliString):
        h = PauliSum(h.n).add_term(h, 1.0)
    hv = apply_pauli_sum(state, h)
    mean = float(np.vdot(state.amplitudes, hv).real)
    return float(np.vdot(hv, hv).real) - mean**2


def expectation_terms(state: StateVector, h: PauliSum) -> tuple[np.ndarray, np.ndarray]:
    """Per-term real expectations and coefficients, in ``h.arrays()`` order."""
    if h.n != state.n:
        raise DimensionError(f"operator has {h.n} qubits, state has {state.n}")
    x, z, c = h.arrays()
    vals = pauli_expectations(state, x, z)
    if vals.size and np.abs(vals.imag).max() > 1e-10:
        raise NumericalIntegrityError("Pauli expectation has a non-negligible imaginary part")
    return vals.real, c


def expectation(state: StateVector, h: PauliSum | PauliString) -> float:
    """``sum_i g_i <psi|P_i|psi>``; raises if the imaginary residue exceeds 1e-10."""
    if isinstance(h, PauliString):
        if h.n != state.n:
            raise DimensionError(f"operator has {h.n} qubits, state has {state.n}")
        val = pauli_expectations(state, [h.x_mask], [h.z_mask])[0] * 1j**h.phase_exp
        if abs(val.imag) > 1e-10:
            raise NumericalIntegrityError(f"<{h}> has imaginary part {val.imag:.3g}")
        return float(val.real)
    vals, c = expectation_terms(state, h)
    return float(vals @ c)


def reduced_density_matrix(state: StateVector, n_keep: int | None = None) -> np.ndarray:
    """Reduced state of the first ``n_keep`` qubits (default: first half)."""
    n = state.n
    k = n // 2 if n_keep is None else n_keep
    m = state.amplitudes.reshape(2**k, 2 ** (n - k))
    return m @ m.conj().T


def reduced_spectrum(state: StateVector) -> np.ndarray:
    """Eigenvalues of the half-system reduced density matrix."""
    n = state.n
    if n % 2:
        raise ValueError(f"half-system cut needs an even qubit count, got {n}")
    rho = reduced_density_matrix(state)
    return np.clip(np.linalg.eigvalsh(rho), 0.0, 1.0)


def reduced_moments(state: StateVector, t_max: int) -> np.ndarray:
    """``[Tr(rho**t) for t in 1..t_max]`` for the first ``n/2`` qubits."""
    lam = reduced_spectrum(state)
    t = np.arange(1, t_max + 1)[:, None]
    return np.minimum(np.sum(lam[None, :] ** t, axis=1), 1.0)


def _rng(seed) -> np.random.Generator:
    if isinstance(seed, np.random.Generator):
        return seed
    if isinstance(seed, (tuple, list)):
        return stream(*seed)
    return stream(seed)


def haar_state(n: int, seed) -> StateVector:
    _check_capacity(n)
    rng = _rng(seed)
    v = rng.standard_normal(2**n) + 1j * rng.standard_normal(2**n)
    return StateVector(n, v / np.linalg.norm(v))


def haar_unitary(dim: int, seed) -> np.ndarray:
    """Haar unitary from the QR decomposition of a complex Ginibre matrix."""
    rng = _rng(seed)
    z = (rng.standard_normal((dim, dim)) + 1j * rng.standard_normal((dim, dim))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def haar_unitary4(seed) -> np.ndarray:
    return haar_unitary(4, seed)


def fidelity(a: StateVector, b: StateVector) -> float:
    if a.n != b.n:
        raise DimensionError(f"states have {a.n} and {b.n} qubits")
    return float(min(1.0, abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2))


def subspace_fidelity(state: StateVector, basis: np.ndarray) -> float:
    """Weight of ``state`` inside the span of the orthonormal columns of ``basis``."""
    overlaps = basis.conj().T @ state.amplitudes
    return float(min(1.0, np.sum(np.abs(overlaps) ** 2)))


def sample_pauli(state: StateVector, p: PauliString, shots: int, seed) -> tuple[float, float]:
    """Simulate ``shots`` +/-1 measurements of ``p``; return sample mean and variance."""
    if shots < 1:
        raise ValueError("shots must be at least 1")
    exp = expectation(state, p)
    return sample_outcomes(exp, shots, _rng(seed))


def sample_outcomes(exp: float, shots: int, rng: np.random.Generator) -> tuple[float, float]:
    p_plus = min(1.0, max(0.0, 0.5 * (1.0 + exp)))
    k = int(rng.binomial(shots, p_plus))
    mean = (2 * k - shots) / shots
    if shots == 1:
        return mean, 0.0
    var = (4.0 * k * (shots - k) / shots) / (shots - 1)
    return mean, var


def gate_list_unitary(n: int, gates: Sequence[GateOp]) -> np.ndarray:
    """Dense unitary of a gate list (column-by-column simulation, small ``n`` only)."""
    if n > 10:
        raise CapacityError("dense circuit unitaries limited to 10 qubits")
    cols = []
    for k in range(2**n):
        amps = np.zeros(2**n, dtype=complex)
        amps[k] = 1.0
        cols.append(apply_all(StateVector(n, amps), gates).amplitudes)
    return np.array(cols).T
