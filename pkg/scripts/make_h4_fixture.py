"""Regenerate ``src/shvqe/data/h4_bk.ham``: linear H4 chain, 1.0 A spacing, STO-3G, Bravyi-Kitaev.

Needs pyscf (not a package dependency). The qubit Hamiltonian is built from
RHF molecular-orbital integrals over 8 interleaved spin orbitals
(``2 * orbital + spin``). The Bravyi-Kitaev code is treated as a linear
encoding ``b = beta f (mod 2)`` with the Fenwick-tree matrix: qubit ``j``
stores the parity of orbitals ``(j & (j + 1)) .. j``.

Run: python scripts/make_h4_fixture.py [output-path]
"""

from __future__ import annotations

import sys
from collections import defaultdict
from pathlib import Path

import numpy as np
from pyscf import ao2mo, fci, gto, scf

from shvqe.hamiltonians import exact_ground, save_hamiltonian
from shvqe.pauli import PauliString, PauliSum

N_MODES = 8
SPACING = 1.0
PRUNE = 1e-10


def fenwick_matrix(n: int) -> np.ndarray:
    beta = np.zeros((n, n), dtype=np.int64)
    for j in range(n):
        beta[j, (j & (j + 1)):j + 1] = 1
    return beta


def gf2_inverse(m: np.ndarray) -> np.ndarray:
    n = m.shape[0]
    a = np.concatenate([m % 2, np.eye(n, dtype=np.int64)], axis=1)
    for col in range(n):
        pivot = next(r for r in range(col, n) if a[r, col])
        a[[col, pivot]] = a[[pivot, col]]
        for r in range(n):
            if r != col and a[r, col]:
                a[r] ^= a[col]
    return a[:, n:]


# operators as {(x_mask, z_mask): complex} with coefficients relative to the literal label
def op_mul(a: dict, b: dict) -> dict:
    out = defaultdict(complex)
    for (xa, za), ca in a.items():
        pa = PauliString(N_MODES, xa, za, 0)
        for (xb, zb), cb in b.items():
            p = pa * PauliString(N_MODES, xb, zb, 0)
            out[(p.x_mask, p.z_mask)] += ca * cb * 1j ** p.phase_exp
    return {k: v for k, v in out.items() if abs(v) > 1e-14}


def op_add(acc: dict, a: dict, scale: complex) -> None:
    for k, v in a.items():
        acc[k] = acc.get(k, 0) + scale * v


def z_string(qubits) -> int:
    return sum(1 << int(q) for q in qubits)


def ladder_ops(n: int):
    """Creation and annihilation operators for every mode under the Fenwick encoding."""
    beta = fenwick_matrix(n)
    inv = gf2_inverse(beta)
    creators, annihilators = [], []
    for j in range(n):
        update = z_string(np.flatnonzero(beta[:, j]))
        # parity of modes below j as a function of the qubit bits
        parity = z_string(np.flatnonzero(inv[:j].sum(axis=0) % 2))
        occ = z_string(np.flatnonzero(inv[j]))
        flip = {(update, 0): 1.0}
        sign = {(0, parity): 1.0}
        empty = {(0, 0): 0.5}
        op_add(empty, {(0, occ): 0.5}, 1.0)
        create = op_mul(op_mul(flip, sign), empty)
        creators.append(create)
        annihilators.append(op_mul(op_mul(empty, sign), flip))
    return creators, annihilators


def molecule():
    atoms = "; ".join(f"H 0 0 {SPACING * k:.6f}" for k in range(4))
    mol = gto.M(atom=atoms, basis="sto-3g", unit="Angstrom", verbose=0)
    mf = scf.RHF(mol).run()
    c = mf.mo_coeff
    h1 = c.T @ mf.get_hcore() @ c
    eri = ao2mo.restore(1, ao2mo.kernel(mol, c), c.shape[1])
    e_fci = fci.FCI(mf).kernel()[0]
    return mol, h1, eri, e_fci


def qubit_hamiltonian(h1, eri, e_nuc) -> PauliSum:
    norb = h1.shape[0]
    cr, an = ladder_ops(2 * norb)
    acc = {(0, 0): complex(e_nuc)}
    for p in range(2 * norb):
        for q in range(2 * norb):
            if p % 2 == q % 2 and abs(h1[p // 2, q // 2]) > PRUNE:
                op_add(acc, op_mul(cr[p], an[q]), h1[p // 2, q // 2])
    # 1/2 sum (pq|rs) a+_p a+_r a_s a_q
    for p in range(2 * norb):
        for q in range(2 * norb):
            if p % 2 != q % 2:
                continue
            for r in range(2 * norb):
                for s in range(2 * norb):
                    if r % 2 != s % 2:
                        continue
                    v = eri[p // 2, q // 2, r // 2, s // 2]
                    if abs(v) < PRUNE or p == r or q == s:
                        continue
                    term = op_mul(op_mul(op_mul(cr[p], cr[r]), an[s]), an[q])
                    op_add(acc, term, 0.5 * v)
    terms = []
    for (x, z), v in sorted(acc.items()):
        if abs(v) < PRUNE:
            continue
        p = PauliString(2 * norb, x, z, 0)
        # literal label coefficient; a Hermitian operator has c * i^{|x&z|} real in label form
        if abs(v.imag) > 1e-9:
            raise ValueError(f"non-real coefficient {v} on {p.label}")
        terms.append((v.real, p.label))
    return PauliSum.from_terms(2 * norb, terms)


def main(out: str) -> None:
    mol, h1, eri, e_fci = molecule()
    h = qubit_hamiltonian(h1, eri, mol.energy_nuc())
    e0, _ = exact_ground(h)
    print(f"terms={h.term_count()} max_weight={h.max_weight()} E_qubit={e0:.12f} E_FCI={e_fci:.12f}")
    if abs(e0 - e_fci) > 1e-8:
        raise SystemExit("qubit ground energy disagrees with FCI")
    save_hamiltonian(h, out, {
        "name": "H4 linear chain",
        "geometry": f"H-H spacing {SPACING} Angstrom",
        "basis": "STO-3G, RHF molecular orbitals, interleaved spin orbitals",
        "mapping": "Bravyi-Kitaev (Fenwick tree)",
        "generator": "scripts/make_h4_fixture.py (pyscf)",
        "fci_energy": f"{e_fci:.12f}",
    })


if __name__ == "__main__":
    main(sys.argv[1] if len(sys.argv) > 1 else str(Path(__file__).resolve().parents[1] / "src/shvqe/data/h4_bk.ham"))
