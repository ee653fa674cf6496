"""Signed multi-qubit Pauli operators and real-weighted Pauli sums.

A Pauli string on ``n`` qubits is stored symplectically as two integer bit
masks plus a global phase ``i**phase_exp``. Bit ``q`` of ``x_mask`` marks an
X factor on qubit ``q`` and bit ``q`` of ``z_mask`` a Z factor; both bits set
means a literal Y. The encoding table is

====  ======  ======
op    x bit   z bit
====  ======  ======
I     0       0
X     1       0
Z     0       1
Y     1       1
====  ======  ======

so the stored operator is ``i**phase_exp`` times the literal tensor product
of {I, X, Y, Z}. Since ``Y = iXZ`` the product rule only needs XORs of the
masks plus a phase correction, see :func:`multiply`.

Text form uses the characters ``IXYZ`` with qubit 0 leftmost.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping

import numpy as np

from .errors import CapacityError, DimensionError

PRUNE_THRESHOLD = 1e-12
DENSE_MAX_QUBITS = 12

_CHAR_TO_BITS = {"I": (0, 0), "X": (1, 0), "Z": (0, 1), "Y": (1, 1)}
_BITS_TO_CHAR = {bits: c for c, bits in _CHAR_TO_BITS.items()}
_PHASE_PREFIX = {0: "+", 1: "+i", 2: "-", 3: "-i"}

_SINGLE = {
    (0, 0): np.eye(2, dtype=complex),
    (1, 0): np.array([[0, 1], [1, 0]], dtype=complex),
    (0, 1): np.array([[1, 0], [0, -1]], dtype=complex),
    (1, 1): np.array([[0, -1j], [1j, 0]], dtype=complex),
}


def popcount(v: int) -> int:
    return bin(v).count("1")


@dataclass(frozen=True)
class PauliString:
    """One signed Pauli operator ``i**phase_exp * P_0 (x) ... (x) P_{n-1}``."""

    n: int
    x_mask: int = 0
    z_mask: int = 0
    phase_exp: int = 0

    def __post_init__(self):
        if self.n < 0:
            raise ValueError(f"qubit count must be non-negative, got {self.n}")
        full = (1 << self.n) - 1
        if self.x_mask & ~full or self.z_mask & ~full:
            raise ValueError(f"mask exceeds {self.n} qubits")
        object.__setattr__(self, "phase_exp", self.phase_exp % 4)

    @classmethod
    def identity(cls, n: int) -> PauliString:
        return cls(n)

    @classmethod
    def from_label(cls, label: str) -> PauliString:
        """Parse ``"XIYZ"`` (optionally prefixed by ``+``, ``-``, ``+i``, ``-i``)."""
        phase = 0
        body = label.strip()
        for prefix, exp in (("+i", 1), ("-i", 3), ("i", 1), ("+", 0), ("-", 2)):
            if body.startswith(prefix):
                phase = exp
                body = body[len(prefix):]
                break
        x = z = 0
        for q, c in enumerate(body):
            try:
                xb, zb = _CHAR_TO_BITS[c]
            except KeyError:
                raise ValueError(f"invalid Pauli character {c!r} in {label!r}") from None
            x |= xb << q
            z |= zb << q
        return cls(len(body), x, z, phase)

    @classmethod
    def single(cls, n: int, qubit: int, op: str) -> PauliString:
        xb, zb = _CHAR_TO_BITS[op]
        return cls(n, xb << qubit, zb << qubit)

    @property
    def key(self) -> tuple[int, int]:
        return (self.x_mask, self.z_mask)

    @property
    def label(self) -> str:
        """Unsigned ``IXYZ`` text, qubit 0 leftmost."""
        return "".join(
            _BITS_TO_CHAR[((self.x_mask >> q) & 1, (self.z_mask >> q) & 1)] for q in range(self.n)
        )

    def is_hermitian(self) -> bool:
        return self.phase_exp in (0, 2)

    @property
    def sign(self) -> int:
        """+1 or -1 for a Hermitian string."""
        if not self.is_hermitian():
            raise ValueError(f"{self} is not Hermitian")
        return 1 if self.phase_exp == 0 else -1

    def weight(self) -> int:
        return weight(self)

    def commutes(self, other: PauliString) -> bool:
        return symplectic_product(self, other) == 0

    def __mul__(self, other: PauliString) -> PauliString:
        return multiply(self, other)

    def __neg__(self) -> PauliString:
        return PauliString(self.n, self.x_mask, self.z_mask, self.phase_exp + 2)

    def __str__(self) -> str:
        return _PHASE_PREFIX[self.phase_exp] + self.label


def _check_same_size(a_n: int, b_n: int) -> None:
    if a_n != b_n:
        raise DimensionError(f"qubit counts differ: {a_n} vs {b_n}")


def multiply(a: PauliString, b: PauliString) -> PauliString:
    """Exact operator product ``a @ b``.

    Each literal factor is ``i**(x*z) X**x Z**z``; moving ``b``'s X block left
    past ``a``'s Z block costs ``(-1)**|a.z & b.x|``.
    """
    _check_same_size(a.n, b.n)
    x = a.x_mask ^ b.x_mask
    z = a.z_mask ^ b.z_mask
    phase = (
        a.phase_exp
        + b.phase_exp
        + popcount(a.x_mask & a.z_mask)
        + popcount(b.x_mask & b.z_mask)
        + 2 * popcount(a.z_mask & b.x_mask)
        - popcount(x & z)
    )
    return PauliString(a.n, x, z, phase)


def weight(p: PauliString) -> int:
    return popcount(p.x_mask | p.z_mask)


def symplectic_product(a: PauliString, b: PauliString) -> int:
    """0 if ``a`` and ``b`` commute, 1 if they anticommute."""
    _check_same_size(a.n, b.n)
    return (popcount(a.x_mask & b.z_mask) + popcount(a.z_mask & b.x_mask)) & 1


def _check_dense(n: int) -> None:
    if n > DENSE_MAX_QUBITS:
        raise CapacityError(f"dense matrices limited to {DENSE_MAX_QUBITS} qubits, got {n}")


def _dense_unsigned(n: int, x_mask: int, z_mask: int) -> np.ndarray:
    out = np.ones((1, 1), dtype=complex)
    for q in range(n):
        out = np.kron(out, _SINGLE[((x_mask >> q) & 1, (z_mask >> q) & 1)])
    return out


class PauliSum:
    """Real-weighted sum of Hermitian Pauli strings keyed by ``(x_mask, z_mask)``.

    Terms are merged on insertion and dropped once ``|coeff| < prune``.
    Treat instances as immutable once built; the transform functions always
    return fresh sums.
    """

    def __init__(self, n: int, terms: Mapping[tuple[int, int], float] | None = None,
                 prune: float = PRUNE_THRESHOLD):
        self.n = n
        self.prune = prune
        self._terms: dict[tuple[int, int], float] = {}
        if terms:
            for key, c in terms.items():
                self._merge(key, float(c))

    @classmethod
    def from_terms(cls, n: int, terms: Iterable[tuple[float, PauliString | str]]) -> PauliSum:
        s = cls(n)
        for c, p in terms:
            if isinstance(p, str):
                p = PauliString.from_label(p)
            s.add_term(p, c)
        return s

    @classmethod
    def from_arrays(cls, n: int, x: np.ndarray, z: np.ndarray, c: np.ndarray,
                    prune: float = PRUNE_THRESHOLD) -> PauliSum:
        """Build from parallel mask and real-coefficient arrays, merging duplicates."""
        out = cls(n, prune=prune)
        merged: dict[tuple[int, int], float] = {}
        for key, val in zip(zip(x.tolist(), z.tolist()), c.tolist()):
            merged[key] = merged.get(key, 0.0) + val
        out._terms = {k: v for k, v in merged.items() if abs(v) >= prune}
        return out

    def _merge(self, key: tuple[int, int], c: float) -> None:
        merged = self._terms.get(key, 0.0) + c
        if abs(merged) < self.prune:
            self._terms.pop(key, None)
        else:
            self._terms[key] = merged

    def add_term(self, p: PauliString, coeff: float) -> PauliSum:
        """Merge ``coeff * p`` in place (sign of ``p`` folded into the coefficient)."""
        _check_same_size(self.n, p.n)
        if not p.is_hermitian():
            raise ValueError(f"non-Hermitian Pauli {p} cannot enter a real PauliSum")
        self._merge(p.key, p.sign * float(coeff))
        return self

    def copy(self) -> PauliSum:
        out = PauliSum(self.n, prune=self.prune)
        out._terms = dict(self._terms)
        return out

    @property
    def terms(self) -> dict[tuple[int, int], float]:
        return dict(self._terms)

    def items(self) -> Iterator[tuple[PauliString, float]]:
        for (x, z), c in self._terms.items():
            yield PauliString(self.n, x, z), c

    def coefficient(self, p: PauliString | str) -> float:
        if isinstance(p, str):
            p = PauliString.from_label(p)
        return self._terms.get(p.key, 0.0)

    def term_count(self) -> int:
        return len(self._terms)

    def __len__(self) -> int:
        return len(self._terms)

    def max_weight(self) -> int:
        return max((popcount(x | z) for x, z in self._terms), default=0)

    def weights(self) -> list[int]:
        return [popcount(x | z) for x, z in self._terms]

    def arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """Masks and coefficients as parallel int64/float64 arrays."""
        if not self._terms:
            empty = np.zeros(0, dtype=np.int64)
            return empty, empty.copy(), np.zeros(0)
        keys = np.array(list(self._terms.keys()), dtype=np.int64)
        return keys[:, 0], keys[:, 1], np.array(list(self._terms.values()))

    def isclose(self, other: PauliSum, atol: float = 1e-10) -> bool:
        if self.n != other.n:
            return False
        keys = set(self._terms) | set(other._terms)
        return all(abs(self._terms.get(k, 0.0) - other._terms.get(k, 0.0)) <= atol for k in keys)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PauliSum):
            return NotImplemented
        return self.n == other.n and self._terms == other._terms

    def __repr__(self) -> str:
        body = " + ".join(f"{c:+.6g}*{p.label}" for p, c in list(self.items())[:6])
        more = "" if len(self) <= 6 else f" + ... ({len(self)} terms)"
        return f"PauliSum(n={self.n}, {body}{more})"


def add_term(s: PauliSum, p: PauliString, coeff: float) -> PauliSum:
    """Functional form: returns a new sum with ``coeff * p`` merged in."""
    return s.copy().add_term(p, coeff)


def to_dense(op: PauliString | PauliSum) -> np.ndarray:
    """Literal ``2**n x 2**n`` matrix, qubit 0 as the most significant tensor factor."""
    _check_dense(op.n)
    if isinstance(op, PauliString):
        return (1j ** op.phase_exp) * _dense_unsigned(op.n, op.x_mask, op.z_mask)
    out = np.zeros((2**op.n, 2**op.n), dtype=complex)
    for (x, z), c in op._terms.items():
        out += c * _dense_unsigned(op.n, x, z)
    return out
