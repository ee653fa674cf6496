"""Model Hamiltonians, the Pauli-sum text format, and exact diagonalization.

File format (line oriented)::

    # free comment
    # name: H4 chain, 1.0 A
    n 8
    -1.2345 IIIIIIII
    0.25 XXIIIIZZ

``# key: value`` comment lines before the header are kept as metadata.
Coefficients are written with 17 significant digits so a save/load round
trip is bit exact.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

import numpy as np
import scipy.linalg

from .errors import CapacityError, HamiltonianParseError, SchemaError
from .pauli import PauliString, PauliSum, to_dense
from .statevector import StateVector

EXACT_MAX_QUBITS = 12
DEGENERACY_TOL = 1e-8
_META = re.compile(r"#\s*([A-Za-z_][\w-]*)\s*:\s*(.*)$")


def build_xxz(n: int, delta: float) -> PauliSum:
    """Periodic XXZ ring ``sum_i X_i X_{i+1} + Y_i Y_{i+1} + delta Z_i Z_{i+1}``."""
    if n < 3:
        raise ValueError(f"periodic XXZ ring needs n >= 3, got {n}")
    h = PauliSum(n)
    for i in range(n):
        j = (i + 1) % n
        for op, c in (("X", 1.0), ("Y", 1.0), ("Z", delta)):
            p = PauliString.single(n, i, op) * PauliString.single(n, j, op)
            h.add_term(p, c)
    return h


@dataclass
class HamiltonianFile:
    n: int
    terms: list[tuple[float, str]]
    metadata: dict[str, str] = field(default_factory=dict)

    def to_sum(self) -> PauliSum:
        return PauliSum.from_terms(self.n, self.terms)


def parse_hamiltonian(text: str) -> HamiltonianFile:
    n = None
    terms: list[tuple[float, str]] = []
    metadata: dict[str, str] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line:
            continue
        if line.startswith("#"):
            m = _META.match(line)
            if m and n is None:
                metadata[m.group(1)] = m.group(2).strip()
            continue
        parts = line.split()
        if n is None:
            if len(parts) != 2 or parts[0] != "n":
                raise HamiltonianParseError("expected header 'n <int>'", lineno)
            try:
                n = int(parts[1])
            except ValueError:
                raise HamiltonianParseError(f"bad qubit count {parts[1]!r}", lineno) from None
            if n < 1:
                raise HamiltonianParseError("qubit count must be positive", lineno)
            continue
        if len(parts) != 2:
            raise HamiltonianParseError(f"expected '<coeff> <pauli>', got {line!r}", lineno)
        try:
            coeff = float(parts[0])
        except ValueError:
            raise HamiltonianParseError(f"bad coefficient {parts[0]!r}", lineno) from None
        if not math.isfinite(coeff):
            raise HamiltonianParseError(f"non-finite coefficient {parts[0]!r}", lineno)
        label = parts[1]
        bad = set(label) - set("IXYZ")
        if bad:
            raise HamiltonianParseError(f"invalid Pauli character(s) {sorted(bad)} in {label!r}", lineno)
        if len(label) != n:
            raise SchemaError(f"line {lineno}: Pauli string {label!r} has length {len(label)}, header says n={n}")
        terms.append((coeff, label))
    if n is None:
        raise HamiltonianParseError("missing 'n <int>' header")
    return HamiltonianFile(n, terms, metadata)


def read_hamiltonian_file(path: str | Path) -> HamiltonianFile:
    return parse_hamiltonian(Path(path).read_text())


def load_hamiltonian(path: str | Path) -> PauliSum:
    return read_hamiltonian_file(path).to_sum()


def format_hamiltonian(h: PauliSum, metadata: dict[str, str] | None = None) -> str:
    lines = [f"# {k}: {v}" for k, v in (metadata or {}).items()]
    lines.append(f"n {h.n}")
    for p, c in sorted(h.items(), key=lambda pc: pc[0].label):
        lines.append(f"{c:.17g} {p.label}")
    return "\n".join(lines) + "\n"


def save_hamiltonian(h: PauliSum, path: str | Path, metadata: dict[str, str] | None = None) -> None:
    Path(path).write_text(format_hamiltonian(h, metadata))


def fixture_path(name: str) -> Path:
    """Path of a bundled Hamiltonian file, e.g. ``fixture_path("h4_bk.ham")``."""
    return Path(str(resources.files("shvqe") / "data" / name))


def _dense(h: PauliSum) -> np.ndarray:
    if h.n > EXACT_MAX_QUBITS:
        raise CapacityError(f"exact diagonalization limited to {EXACT_MAX_QUBITS} qubits, got {h.n}")
    return to_dense(h)


def spectrum(h: PauliSum) -> np.ndarray:
    return scipy.linalg.eigh(_dense(h), eigvals_only=True)


def exact_ground(h: PauliSum) -> tuple[float, StateVector]:
    """Lowest eigenvalue and one unit-norm eigenvector of ``h``."""
    w, v = scipy.linalg.eigh(_dense(h), subset_by_index=[0, 0])
    return float(w[0]), StateVector(h.n, v[:, 0])


def ground_space(h: PauliSum, tol: float = DEGENERACY_TOL) -> tuple[float, np.ndarray]:
    """Ground energy and an orthonormal basis (columns) of the full ground eigenspace."""
    w, v = scipy.linalg.eigh(_dense(h))
    mask = w <= w[0] + tol * max(1.0, abs(w[0]))
    return float(w[0]), v[:, mask]
