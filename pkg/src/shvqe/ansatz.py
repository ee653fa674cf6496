"""Hardware-efficient Schrödinger circuit and the graph-architecture distribution."""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .clifford import GraphPattern
from .layer import euler_gate, euler_gates
from .rng import stream
from .statevector import CLIFFORD_MATRICES, GateOp, StateVector, simulate


@dataclass(frozen=True)
class HardwareEfficientAnsatz:
    """Initial Euler layer plus ``depth`` rounds of (CZ bricks, Euler layer).

    ``theta`` has shape ``(depth + 1, n, 3)``; row ``l`` holds the
    ``(tx, ty, tz)`` angles of the ``l``-th single-qubit layer.
    """

    n: int
    depth: int
    theta: np.ndarray

    def __post_init__(self):
        if self.depth < 0:
            raise ValueError("depth must be non-negative")
        t = np.asarray(self.theta, dtype=float).reshape(self.depth + 1, self.n, 3)
        object.__setattr__(self, "theta", t)

    @staticmethod
    def parameter_count(n: int, depth: int) -> int:
        return 3 * n * (depth + 1)

    @classmethod
    def zeros(cls, n: int, depth: int) -> HardwareEfficientAnsatz:
        return cls(n, depth, np.zeros((depth + 1, n, 3)))


def brick_pairs(n: int, layer: int) -> list[tuple[int, int]]:
    """CZ pairs of brick layer ``layer`` (1-based).

    Even layers pair (0,1), (2,3), ...; odd layers pair (1,2), (3,4), ...
    and close the ring with (n-1, 0) when n is even and larger than 2.
    """
    start = 0 if layer % 2 == 0 else 1
    pairs = [(i, i + 1) for i in range(start, n - 1, 2)]
    if start == 1 and n % 2 == 0 and n > 2:
        pairs.append((n - 1, 0))
    return pairs


@lru_cache(maxsize=None)
def _cz_op(a: int, b: int) -> GateOp:
    return GateOp(CLIFFORD_MATRICES["CZ"], (a, b))


def build_schrodinger(ansatz: HardwareEfficientAnsatz) -> list[GateOp]:
    n = ansatz.n
    ops = [GateOp(euler_gate(*ansatz.theta[0, q]), (q,)) for q in range(n)]
    for layer in range(1, ansatz.depth + 1):
        ops.extend(_cz_op(a, b) for a, b in brick_pairs(n, layer))
        ops.extend(GateOp(euler_gate(*ansatz.theta[layer, q]), (q,)) for q in range(n))
    return ops


@lru_cache(maxsize=None)
def _brick_phase(n: int, layer: int) -> np.ndarray:
    idx = np.arange(2**n)
    phase = np.ones(2**n)
    for a, b in brick_pairs(n, layer):
        both = ((idx >> (n - 1 - a)) & 1) & ((idx >> (n - 1 - b)) & 1)
        phase[both == 1] *= -1
    phase.setflags(write=False)
    return phase


def apply_single_qubit_layer(psi: np.ndarray, n: int, angles: np.ndarray) -> np.ndarray:
    """Apply one Euler gate per qubit to raw amplitudes; returns a new array."""
    for q, g in enumerate(euler_gates(angles)):
        psi = np.matmul(g, psi.reshape(1 << q, 2, 1 << (n - q - 1))).reshape(-1)
    return psi


def prepare_state(ansatz: HardwareEfficientAnsatz) -> StateVector:
    """``U(theta)|0...0>``; same circuit as :func:`build_schrodinger`, with the CZ
    bricks applied as precomputed diagonal phases."""
    n = ansatz.n
    psi = np.zeros(2**n, dtype=complex)
    psi[0] = 1.0
    psi = apply_single_qubit_layer(psi, n, ansatz.theta[0])
    for layer in range(1, ansatz.depth + 1):
        psi = apply_single_qubit_layer(psi * _brick_phase(n, layer), n, ansatz.theta[layer])
    return StateVector(n, psi)


def prepare_state_reference(ansatz: HardwareEfficientAnsatz) -> StateVector:
    return simulate(ansatz.n, build_schrodinger(ansatz))


@dataclass
class ArchLogits:
    """Per elementary graph ``j`` a logit pair ``(on, off)``; shape ``(n // 2, 2)``."""

    alpha: np.ndarray

    def __post_init__(self):
        self.alpha = np.asarray(self.alpha, dtype=float).reshape(-1, 2)

    @classmethod
    def uniform(cls, n: int) -> ArchLogits:
        return cls(np.zeros((n // 2, 2)))

    @classmethod
    def saturated(cls, bits: str, strength: float = 20.0) -> ArchLogits:
        """Logits that pin ``bits`` (probabilities within ~e**-2s of 0/1)."""
        a = np.array([[strength, -strength] if b == "1" else [-strength, strength] for b in bits])
        return cls(a.reshape(-1, 2))

    def __len__(self) -> int:
        return len(self.alpha)


def pattern_probs(logits: ArchLogits | np.ndarray) -> np.ndarray:
    """Two-logit softmax: ``p_j = e^{on_j} / (e^{on_j} + e^{off_j})``."""
    a = logits.alpha if isinstance(logits, ArchLogits) else np.asarray(logits, dtype=float).reshape(-1, 2)
    shifted = a - a.max(axis=1, keepdims=True)
    e = np.exp(shifted)
    return e[:, 0] / e.sum(axis=1)


def patterns_from_uniforms(probs: np.ndarray, uniforms: np.ndarray) -> np.ndarray:
    """Bernoulli draws ``uniforms < probs``; returns pattern indices (bit 1 is leftmost)."""
    on = np.asarray(uniforms) < probs[None, :]
    m = len(probs)
    weights = 1 << np.arange(m - 1, -1, -1)
    return on.astype(np.int64) @ weights


def pattern_distribution(probs: np.ndarray) -> np.ndarray:
    """Exact probability of each of the ``2**m`` patterns, indexed like :class:`GraphPattern`."""
    m = len(probs)
    out = np.ones(2**m)
    for k in range(2**m):
        for j in range(m):
            bit = (k >> (m - 1 - j)) & 1
            out[k] *= probs[j] if bit else 1.0 - probs[j]
    return out


def sample_pattern(logits: ArchLogits, n: int, seed) -> GraphPattern:
    rng = seed if isinstance(seed, np.random.Generator) else stream(seed)
    probs = pattern_probs(logits)
    index = int(patterns_from_uniforms(probs, rng.random((1, len(probs))))[0])
    return GraphPattern.from_index(n, index)
