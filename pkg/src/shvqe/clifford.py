"""Heisenberg-picture conjugation of Pauli operators by {H, S, CNOT, CZ} circuits.

``conjugate_pauli(circuit, p)`` returns ``T^dagger p T`` where ``T`` is the
unitary of ``circuit`` (gates listed in the order they act on a state). The
gates are therefore folded into the operator last-gate-first, each step
applying ``g^dagger P g``:

=========  ==========================================
gate       ``g^dagger P g``
=========  ==========================================
H(q)       X -> Z, Z -> X, Y -> -Y
S(q)       X -> -Y, Y -> X, Z -> Z
CNOT(c,t)  X_c -> X_c X_t, Z_t -> Z_c Z_t (X_t, Z_c fixed)
CZ(a,b)    X_a -> X_a Z_b, X_b -> Z_a X_b, Z fixed
=========  ==========================================
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import DimensionError
from .pauli import PauliString, PauliSum, multiply, popcount
from .rng import stream

GATE_KINDS = ("H", "S", "CNOT", "CZ")


@dataclass(frozen=True)
class CliffordGate:
    kind: str
    qubits: tuple[int, ...]

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown Clifford gate {self.kind!r}")
        arity = 1 if self.kind in ("H", "S") else 2
        if len(self.qubits) != arity:
            raise ValueError(f"{self.kind} takes {arity} qubit(s), got {self.qubits}")
        if arity == 2 and self.qubits[0] == self.qubits[1]:
            raise ValueError(f"{self.kind} needs distinct qubits, got {self.qubits}")

    def __str__(self) -> str:
        return f"{self.kind}({','.join(map(str, self.qubits))})"


def H(q: int) -> CliffordGate:
    return CliffordGate("H", (q,))


def S(q: int) -> CliffordGate:
    return CliffordGate("S", (q,))


def CNOT(c: int, t: int) -> CliffordGate:
    return CliffordGate("CNOT", (c, t))


def CZ(a: int, b: int) -> CliffordGate:
    return CliffordGate("CZ", (a, b))


@dataclass(frozen=True)
class CliffordCircuit:
    n: int
    gates: tuple[CliffordGate, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        for g in self.gates:
            if any(q < 0 or q >= self.n for q in g.qubits):
                raise ValueError(f"gate {g} out of range for {self.n} qubits")

    def __len__(self) -> int:
        return len(self.gates)

    def then(self, other: CliffordCircuit) -> CliffordCircuit:
        """Circuit applying ``self`` first and ``other`` second."""
        if other.n != self.n:
            raise DimensionError(f"qubit counts differ: {self.n} vs {other.n}")
        return CliffordCircuit(self.n, self.gates + other.gates)


@dataclass(frozen=True)
class GraphPattern:
    """On/off code over the ``n // 2`` translation-invariant elementary graphs.

    Character ``j - 1`` of ``bits`` is ``'1'`` when elementary graph ``j``
    (qubit ``i`` joined to ``i + j mod n``) is switched on.
    """

    n: int
    bits: str

    def __post_init__(self):
        if self.n < 2:
            raise ValueError("graph patterns need at least 2 qubits")
        if len(self.bits) != self.n // 2 or set(self.bits) - {"0", "1"}:
            raise ValueError(f"pattern must be {self.n // 2} characters of 0/1, got {self.bits!r}")

    @classmethod
    def from_index(cls, n: int, index: int) -> GraphPattern:
        """Pattern whose bit string, read left to right, is ``index`` in binary."""
        m = n // 2
        return cls(n, format(index, f"0{m}b") if m else "")

    @classmethod
    def all(cls, n: int) -> list[GraphPattern]:
        return [cls.from_index(n, k) for k in range(2 ** (n // 2))]

    def active(self) -> list[int]:
        return [j + 1 for j, b in enumerate(self.bits) if b == "1"]

    def __str__(self) -> str:
        return self.bits


def _conjugate_masks(n: int, gates: Iterable[CliffordGate], x: int, z: int, phase: int):
    for g in gates:
        if g.kind == "H":
            q = g.qubits[0]
            xb, zb = (x >> q) & 1, (z >> q) & 1
            if xb != zb:
                x ^= 1 << q
                z ^= 1 << q
            elif xb:
                phase += 2
        elif g.kind == "S":
            q = g.qubits[0]
            if (x >> q) & 1:
                if not (z >> q) & 1:
                    phase += 2
                z ^= 1 << q
        elif g.kind == "CNOT":
            c, t = g.qubits
            xc, zc = (x >> c) & 1, (z >> c) & 1
            xt, zt = (x >> t) & 1, (z >> t) & 1
            if xc and zt and not (xt ^ zc):
                phase += 2
            x ^= xc << t
            z ^= zt << c
        else:
            a, b = g.qubits
            xa, za = (x >> a) & 1, (z >> a) & 1
            xb, zb = (x >> b) & 1, (z >> b) & 1
            if xa and xb and (za ^ zb):
                phase += 2
            z ^= xa << b
            z ^= xb << a
    return x, z, phase


def _check(circuit: CliffordCircuit, n: int) -> None:
    if circuit.n != n:
        raise DimensionError(f"circuit has {circuit.n} qubits, operator has {n}")


def conjugate_pauli(circuit: CliffordCircuit, p: PauliString) -> PauliString:
    """``T^dagger p T`` for the circuit unitary ``T``; always a single signed Pauli."""
    _check(circuit, p.n)
    x, z, phase = _conjugate_masks(p.n, reversed(circuit.gates), p.x_mask, p.z_mask, p.phase_exp)
    return PauliString(p.n, x, z, phase)


@dataclass
class CliffordTableau:
    """Images of every ``X_q`` and ``Z_q`` under ``T^dagger (.) T``.

    Conjugation is a group homomorphism, so once these ``2n`` images are known
    any Pauli maps with at most ``2n`` multiplications instead of a pass over
    the whole gate list.
    """

    n: int
    x_images: list[PauliString] = field(default_factory=list)
    z_images: list[PauliString] = field(default_factory=list)

    @classmethod
    def from_circuit(cls, circuit: CliffordCircuit) -> CliffordTableau:
        n = circuit.n
        return cls(
            n,
            [conjugate_pauli(circuit, PauliString(n, 1 << q, 0)) for q in range(n)],
            [conjugate_pauli(circuit, PauliString(n, 0, 1 << q)) for q in range(n)],
        )

    def conjugate(self, p: PauliString) -> PauliString:
        _check(self, p.n)
        # literal string = i**|x&z| * prod(X_q^x_q) * prod(Z_q^z_q)
        out = PauliString(p.n, 0, 0, p.phase_exp + popcount(p.x_mask & p.z_mask))
        for q in range(p.n):
            if (p.x_mask >> q) & 1:
                out = multiply(out, self.x_images[q])
        for q in range(p.n):
            if (p.z_mask >> q) & 1:
                out = multiply(out, self.z_images[q])
        return out

    def _image_arrays(self):
        if not hasattr(self, "_cache"):
            imgs = self.x_images + self.z_images
            self._cache = (
                np.array([p.x_mask for p in imgs], dtype=np.int64),
                np.array([p.z_mask for p in imgs], dtype=np.int64),
                np.array([p.phase_exp for p in imgs], dtype=np.int64),
            )
        return self._cache

    def conjugate_arrays(self, x: np.ndarray, z: np.ndarray, phase: np.ndarray):
        """Vectorized :meth:`conjugate` over parallel mask/phase arrays."""
        ix, iz, iph = self._image_arrays()
        out_x = np.zeros_like(x)
        out_z = np.zeros_like(z)
        out_ph = phase + np.bitwise_count(x & z)
        for g in range(2 * self.n):
            q = g % self.n
            sel = ((x if g < self.n else z) >> q) & 1 == 1
            gx, gz = ix[g], iz[g]
            nx, nz = out_x ^ gx, out_z ^ gz
            ph = (out_ph + iph[g] + np.bitwise_count(out_x & out_z) + int(popcount(gx & gz))
                  + 2 * np.bitwise_count(out_z & gx) - np.bitwise_count(nx & nz))
            out_x = np.where(sel, nx, out_x)
            out_z = np.where(sel, nz, out_z)
            out_ph = np.where(sel, ph, out_ph)
        return out_x, out_z, out_ph % 4


def transform_sum(circuit: CliffordCircuit | CliffordTableau, h: PauliSum) -> PauliSum:
    """Term-by-term ``T^dagger h T``; signs are folded into the coefficients."""
    _check(circuit, h.n)
    if isinstance(circuit, CliffordTableau):
        x, z, c = h.arrays()
        nx, nz, ph = circuit.conjugate_arrays(x, z, np.zeros_like(x))
        if np.any(ph % 2):
            raise ValueError("Clifford image of a Hermitian Pauli lost Hermiticity")
        return PauliSum.from_arrays(h.n, nx, nz, np.where(ph == 2, -c, c), prune=h.prune)
    out = PauliSum(h.n, prune=h.prune)
    for p, c in h.items():
        out.add_term(conjugate_pauli(circuit, p), c)
    return out


def graph_edges(pattern: GraphPattern) -> list[tuple[int, int]]:
    n = pattern.n
    seen: set[frozenset[int]] = set()
    edges = []
    for j in pattern.active():
        for i in range(n):
            e = (i, (i + j) % n)
            if frozenset(e) not in seen:
                seen.add(frozenset(e))
                edges.append(e)
    return edges


def graph_circuit(pattern: GraphPattern | str, n: int | None = None) -> CliffordCircuit:
    """CZ circuit for the active elementary graphs, ordered by ``j`` then ``i``."""
    if isinstance(pattern, str):
        if n is None:
            raise ValueError("qubit count required with a bare bit string")
        pattern = GraphPattern(n, pattern)
    return CliffordCircuit(pattern.n, tuple(CZ(a, b) for a, b in graph_edges(pattern)))


def random_clifford(n: int, gate_count: int, seed: int | np.random.Generator) -> CliffordCircuit:
    """I.i.d. gates: kind uniform over {H, S, CNOT}, then uniformly random (distinct) qubits."""
    if gate_count < 0:
        raise ValueError("gate_count must be non-negative")
    rng = seed if isinstance(seed, np.random.Generator) else stream(seed)
    kinds = ("H", "S", "CNOT") if n >= 2 else ("H", "S")
    gates = []
    for _ in range(gate_count):
        kind = kinds[rng.integers(len(kinds))]
        if kind == "CNOT":
            c, t = rng.choice(n, size=2, replace=False)
            gates.append(CNOT(int(c), int(t)))
        else:
            gates.append(CliffordGate(kind, (int(rng.integers(n)),)))
    return CliffordCircuit(n, tuple(gates))
