"""Conjugation of Pauli sums by a layer of parametrized single-qubit gates.

Each qubit carries ``G = exp(-i tx X) exp(-i ty Y) exp(-i tz Z)``. Under
``G^dagger (.) G`` the Pauli vector rotates by an SO(3) matrix ``R`` with
``G^dagger s_a G = sum_b R[a, b] s_b``, so a weight-k string expands into at
most ``3**k`` strings of the same weight.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .clifford import CliffordCircuit, CliffordTableau, transform_sum
from .errors import DimensionError
from .pauli import PauliSum

_PAULI_MATS = np.array(
    [
        [[0, 1], [1, 0]],
        [[0, -1j], [1j, 0]],
        [[1, 0], [0, -1]],
    ],
    dtype=complex,
)
# (x bit, z bit) of X, Y, Z
_BITS = ((1, 0), (1, 1), (0, 1))
_INDEX = {(1, 0): 0, (1, 1): 1, (0, 1): 2}


def euler_gate(tx: float, ty: float, tz: float) -> np.ndarray:
    """``exp(-i tx X) exp(-i ty Y) exp(-i tz Z)`` as a 2x2 matrix."""
    eye = np.eye(2, dtype=complex)
    gx = np.cos(tx) * eye - 1j * np.sin(tx) * _PAULI_MATS[0]
    gy = np.cos(ty) * eye - 1j * np.sin(ty) * _PAULI_MATS[1]
    gz = np.cos(tz) * eye - 1j * np.sin(tz) * _PAULI_MATS[2]
    return gx @ gy @ gz


def euler_gates(angles: np.ndarray) -> np.ndarray:
    """Vectorized :func:`euler_gate` over rows of ``angles`` (shape ``(k, 3)``)."""
    a = np.asarray(angles, dtype=float).reshape(-1, 3)
    c, s = np.cos(a), np.sin(a)
    eye = np.eye(2, dtype=complex)
    g = [c[:, i, None, None] * eye - 1j * s[:, i, None, None] * _PAULI_MATS[i] for i in range(3)]
    return g[0] @ g[1] @ g[2]


@dataclass(frozen=True)
class SingleQubitLayer:
    n: int
    angles: np.ndarray  # shape (n, 3): (tx, ty, tz) per qubit

    def __post_init__(self):
        a = np.array(self.angles, dtype=float).reshape(-1, 3)
        if a.shape != (self.n, 3):
            raise ValueError(f"expected {self.n} angle triples, got shape {np.shape(self.angles)}")
        a.setflags(write=False)
        object.__setattr__(self, "angles", a)

    @classmethod
    def identity(cls, n: int) -> SingleQubitLayer:
        return cls(n, np.zeros((n, 3)))

    def gates(self) -> np.ndarray:
        return euler_gates(self.angles)


def layer_table(layer: SingleQubitLayer) -> np.ndarray:
    """Per-qubit rotation matrices, shape ``(n, 3, 3)``, ``R[q, a, b] = Tr(s_b G^dag s_a G) / 2``."""
    g = layer.gates()[:, None]
    rotated = np.swapaxes(g.conj(), -1, -2) @ _PAULI_MATS[None] @ g
    return 0.5 * np.einsum("bij,qaji->qab", _PAULI_MATS, rotated).real


def _expand(n: int, x: int, z: int, coeff: float, table: np.ndarray) -> dict[tuple[int, int], float]:
    partial = {(0, 0): coeff}
    for q in range(n):
        a = _INDEX.get(((x >> q) & 1, (z >> q) & 1))
        if a is None:
            continue
        row = table[q, a]
        nxt: dict[tuple[int, int], float] = {}
        for (px, pz), val in partial.items():
            for b, (xb, zb) in enumerate(_BITS):
                r = row[b]
                if r != 0.0:
                    key = (px | (xb << q), pz | (zb << q))
                    nxt[key] = val * r
        partial = nxt
    return partial


def conjugate_layer(layer: SingleQubitLayer, h: PauliSum, table: np.ndarray | None = None) -> PauliSum:
    """``L^dagger h L`` with ``L`` the tensor product of the layer's gates."""
    if layer.n != h.n:
        raise DimensionError(f"layer has {layer.n} qubits, operator has {h.n}")
    if table is None:
        table = layer_table(layer)
    out = PauliSum(h.n, prune=h.prune)
    merged: dict[tuple[int, int], float] = {}
    for (x, z), c in h.terms.items():
        for key, val in _expand(h.n, x, z, c, table).items():
            merged[key] = merged.get(key, 0.0) + val
    for key, val in merged.items():
        if abs(val) >= out.prune:
            out._terms[key] = val
    return out


def transform_hamiltonian(
    t_clifford: CliffordCircuit | CliffordTableau,
    t_layer: SingleQubitLayer,
    h: PauliSum,
) -> PauliSum:
    """``H_T = T^dagger H T`` for ``T = layer . clifford``.

    The Clifford part acts on the state first and the single-qubit layer
    second, so the layer is folded into ``H`` first and the Clifford
    circuit after it.
    """
    return transform_sum(t_clifford, conjugate_layer(t_layer, h))
