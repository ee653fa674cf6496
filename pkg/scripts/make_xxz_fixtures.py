"""Regenerate the XXZ regression fixtures with their exact ground energies."""

from pathlib import Path

from shvqe.hamiltonians import build_xxz, exact_ground, save_hamiltonian

DATA = Path(__file__).resolve().parents[1] / "src/shvqe/data"

for n, delta in ((4, 1.0), (6, 0.5), (8, 1.0)):
    h = build_xxz(n, delta)
    e0, _ = exact_ground(h)
    save_hamiltonian(h, DATA / f"xxz_n{n}_d{delta:g}.ham", {
        "name": f"periodic XXZ ring n={n} delta={delta:g}",
        "generator": "scripts/make_xxz_fixtures.py",
        "ground_energy": f"{e0:.15f}",
    })
    print(n, delta, e0)
