"""Command-line front end.

Every subcommand prints (or writes to ``--out``) a JSON object with the
fields ``command``, ``config_echo``, ``seed``, ``results`` and ``metadata``.
Only ``metadata.timestamp`` varies between identical runs. Tables go to the
optional ``--csv`` path. ``transform`` is the exception: it emits a
Hamiltonian file.

Exit codes: 0 success, 2 usage, 3 capacity, 4 I/O.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from datetime import datetime, timezone
from importlib import metadata as importlib_metadata
from pathlib import Path

import numpy as np

from . import __version__
from .errors import CapacityError, HamiltonianParseError, SchemaError
from .hamiltonians import (
    EXACT_MAX_QUBITS,
    build_xxz,
    fixture_path,
    format_hamiltonian,
    ground_space,
    read_hamiltonian_file,
)
from .layer import SingleQubitLayer, transform_hamiltonian
from .ansatz import pattern_distribution, pattern_probs
from .clifford import CliffordCircuit, GraphPattern, graph_circuit
from .expressivity import EnsembleSpec, delta_t, write_csv as expressivity_csv
from .measurement import STRATEGIES, HeisenbergTransform, overhead_experiment, write_csv as shots_csv
from .optimizer import PICTURES, OptResult, SpsaAdamConfig, run_shvqe, run_vqe
from .pauli import PauliString, PauliSum
from .rng import stream
from .statevector import haar_state, subspace_fidelity

EXIT_OK, EXIT_USAGE, EXIT_CAPACITY, EXIT_IO = 0, 2, 3, 4
CHEMICAL_ACCURACY = 1.6e-3
ENSEMBLES = {"vqe": "none", "clifford": "clifford", "sh": "clifford+layer", "haar-self-test": "haar"}
# echoed flags that do not influence results
_NOT_ECHOED = {"out", "csv", "trace", "config", "handler"}


class UsageError(Exception):
    pass


def _version() -> str:
    try:
        return importlib_metadata.version("artifact")
    except importlib_metadata.PackageNotFoundError:
        return __version__


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text}")
    return v


def _non_negative_int(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError(f"expected a non-negative integer, got {text}")
    return v


def _positive_float(text: str) -> float:
    v = float(text)
    if not v > 0:
        raise argparse.ArgumentTypeError(f"expected a positive number, got {text}")
    return v


def _int_list(text: str) -> list[int]:
    try:
        values = [int(t) for t in text.split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None
    if not values or min(values) < 0:
        raise argparse.ArgumentTypeError(f"expected non-negative integers, got {text!r}")
    return values


def _bits(text: str) -> str:
    if not text or set(text) - {"0", "1"}:
        raise argparse.ArgumentTypeError(f"expected a bit string, got {text!r}")
    return text


def _add_common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--seed", type=_non_negative_int, default=0)
    p.add_argument("--out", help="write the JSON result here instead of stdout")
    p.add_argument("--threads", type=_positive_int, default=os.cpu_count() or 1)


def _add_optimizer(p: argparse.ArgumentParser) -> None:
    p.add_argument("--depth", type=_non_negative_int, default=4)
    p.add_argument("--restarts", type=_positive_int, default=1)
    p.add_argument("--samples", type=_positive_int, default=800, help="patterns drawn per cost evaluation")
    p.add_argument("--max-iters", type=_positive_int, default=500)
    p.add_argument("--lr", type=_positive_float, default=0.05)
    p.add_argument("--c0", type=_positive_float, default=0.1)
    p.add_argument("--gamma", type=_positive_float, default=0.101)
    p.add_argument("--window", type=_positive_int, default=50)
    p.add_argument("--tol", type=_positive_float, default=1e-6)
    p.add_argument("--opt-mode", choices=("joint", "alternating"), default="joint")
    p.add_argument("--picture", choices=PICTURES, default="auto",
                   help="evaluate pattern energies through H_T or by simulating T U|0>")
    p.add_argument("--pattern", type=_bits, help="pin the graph pattern instead of searching")
    p.add_argument("--trace", help="CSV trace of the best run")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="shvqe", description="Schrödinger-Heisenberg variational experiments")
    parser.add_argument("--config", help="key=value file of flag defaults (flags override it)")
    parser.add_argument("--version", action="version", version=f"%(prog)s {_version()}")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("expressivity", help="half-cut moment expressivity sweep")
    _add_common(p)
    p.add_argument("--n", type=_positive_int, default=8)
    p.add_argument("--depths", type=_int_list, default=[0, 2, 4])
    p.add_argument("--ensemble", choices=sorted(ENSEMBLES), default="sh")
    p.add_argument("--samples", type=_positive_int, default=300)
    p.add_argument("--haar-samples", type=_positive_int)
    p.add_argument("--t-max", type=_positive_int, default=6)
    p.add_argument("--clifford-gates", type=_positive_int, default=500)
    p.add_argument("--csv")
    p.set_defaults(handler=cmd_expressivity)

    p = sub.add_parser("xxz", help="VQE / SH-VQE on the periodic XXZ ring")
    _add_common(p)
    _add_optimizer(p)
    p.add_argument("--n", type=_positive_int, default=8)
    p.add_argument("--delta", type=float, default=1.0)
    p.add_argument("--mode", choices=("vqe", "shvqe", "graph-compare"), default="shvqe")
    p.add_argument("--csv", help="graph-compare table")
    p.set_defaults(handler=cmd_xxz)

    p = sub.add_parser("molecule", help="VQE / SH-VQE on a Hamiltonian file")
    _add_common(p)
    _add_optimizer(p)
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--hamiltonian", help="Hamiltonian text file")
    src.add_argument("--fixture", help="bundled Hamiltonian, e.g. h4_bk.ham")
    p.add_argument("--mode", choices=("vqe", "shvqe", "both"), default="both")
    p.set_defaults(handler=cmd_molecule)

    p = sub.add_parser("transform", help="print T^dag H T in the Hamiltonian format")
    p.add_argument("--hamiltonian", required=True)
    p.add_argument("--pattern", type=_bits, required=True)
    p.add_argument("--angles", help="text file with n rows of three layer angles (default: zeros)")
    p.add_argument("--out", help="output file instead of stdout")
    p.set_defaults(handler=cmd_transform)

    p = sub.add_parser("shots", help="measurement overhead of the Heisenberg expansion")
    _add_common(p)
    p.add_argument("--n", type=_positive_int, default=6, help="qubits of the Haar-random probe state")
    p.add_argument("--term", default=None, help="Pauli label to estimate (default X on qubit 0)")
    p.add_argument("--pattern", type=_bits, help="graph pattern of the Clifford part (default: none)")
    p.add_argument("--layer", choices=("random", "identity"), default="random")
    p.add_argument("--epsilon", type=_positive_float, default=0.01)
    p.add_argument("--trials", type=_positive_int, default=50)
    p.add_argument("--shots-per-trial", type=_positive_int, default=2000)
    p.add_argument("--csv")
    p.set_defaults(handler=cmd_shots)
    return parser


def _read_config(path: str) -> dict[str, str]:
    out = {}
    for lineno, raw in enumerate(Path(path).read_text().splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected key=value")
        key, value = (s.strip() for s in line.split("=", 1))
        out[key.replace("-", "_")] = value
    return out


def _apply_config(parser: argparse.ArgumentParser, argv: list[str]) -> argparse.Namespace:
    pre, _ = parser.parse_known_args(argv)
    if pre.config is None:
        return parser.parse_args(argv)
    values = _read_config(pre.config)
    sub = parser._subparsers._group_actions[0].choices[pre.command]
    actions = {a.dest: a for a in sub._actions}
    defaults = {}
    for key, text in values.items():
        if key not in actions:
            raise UsageError(f"unknown config key {key!r} for {pre.command}")
        action = actions[key]
        try:
            defaults[key] = action.type(text) if action.type else text
        except (argparse.ArgumentTypeError, ValueError) as exc:
            raise UsageError(f"config key {key}: {exc}") from None
        if action.choices is not None and defaults[key] not in action.choices:
            raise UsageError(f"config key {key}: {text!r} not in {sorted(action.choices)}")
        action.required = False
    sub.set_defaults(**defaults)
    return parser.parse_args(argv)


def _echo(args: argparse.Namespace) -> dict:
    return {k: v for k, v in sorted(vars(args).items()) if k not in _NOT_ECHOED}


def _envelope(args: argparse.Namespace, results: dict) -> dict:
    return {
        "command": args.command,
        "config_echo": _echo(args),
        "seed": args.seed,
        "results": results,
        "metadata": {"timestamp": datetime.now(timezone.utc).isoformat(), "version": _version()},
    }


def _emit(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def cmd_expressivity(args) -> dict:
    kind = ENSEMBLES[args.ensemble]
    if args.n % 2:
        raise UsageError("--n must be even for the half cut")
    rows, summary = [], []
    for d in args.depths:
        spec = EnsembleSpec(args.n, d, kind, args.clifford_gates, args.samples, args.t_max, args.seed)
        rep = delta_t(spec, haar_samples=args.haar_samples, threads=args.threads)
        rows.extend(rep.rows())
        summary.append({"depth": d, "delta_t": [float(x) for x in rep.delta],
                        "stderr": [float(x) for x in rep.stderr]})
    if args.csv:
        Path(args.csv).write_text(expressivity_csv(rows))
    return {"rows": rows, "profiles": summary}


def _config(args) -> SpsaAdamConfig:
    return SpsaAdamConfig(c0=args.c0, gamma=args.gamma, lr=args.lr, max_iters=args.max_iters,
                          samples=args.samples, seed=args.seed, restarts=args.restarts, window=args.window,
                          tol=args.tol, mode=args.opt_mode, threads=args.threads,
                          picture=args.picture)


def _exact(h: PauliSum):
    if h.n > EXACT_MAX_QUBITS:
        return None, None
    return ground_space(h)


def _summarize(res: OptResult, h: PauliSum, depth: int, exact) -> dict:
    e0, basis = exact
    out = {
        "energy": res.energy,
        "pattern": res.pattern,
        "converged": res.converged,
        "iterations": len(res.trace),
        "restart": res.restart,
        "restart_energies": res.restart_energies,
        "exact_energy": e0,
    }
    if e0 is not None:
        out["abs_error"] = abs(res.energy - e0)
        out["fidelity"] = subspace_fidelity(res.state(h.n, depth), basis)
    return out


def _write_trace(res: OptResult, m: int, path: str) -> None:
    labels = [format(i, f"0{m}b") for i in range(2**m)]
    lines = ["iteration,cost," + ",".join(f"p_{b}" for b in labels)]
    for k, (cost, probs) in enumerate(zip(res.trace.costs, res.trace.probs)):
        if probs:
            dist = pattern_distribution(np.asarray(probs))
        else:
            dist = np.zeros(2**m)
            dist[int(res.pattern, 2)] = 1.0
        lines.append(f"{k},{cost!r}," + ",".join(repr(float(p)) for p in dist))
    Path(path).write_text("\n".join(lines) + "\n")


def _solve(h: PauliSum, args, mode: str) -> OptResult:
    config = _config(args)
    if mode == "vqe":
        return run_vqe(h, args.depth, config)
    if args.pattern is not None and len(args.pattern) != h.n // 2:
        raise UsageError(f"--pattern needs {h.n // 2} bits")
    return run_shvqe(h, args.depth, config, fixed_pattern=args.pattern)


def cmd_xxz(args) -> dict:
    if args.n < 3:
        raise UsageError("--n must be at least 3 for the periodic ring")
    h = build_xxz(args.n, args.delta)
    exact = _exact(h)
    m = args.n // 2
    if args.mode == "graph-compare":
        table = []
        for bits in (format(i, f"0{m}b") for i in range(2**m)):
            res = run_shvqe(h, args.depth, _config(args), fixed_pattern=bits)
            table.append(_summarize(res, h, args.depth, exact))
        best = min(table, key=lambda r: r["energy"])
        if args.csv:
            lines = ["pattern,energy,fidelity"]
            lines += [f"{r['pattern']},{r['energy']!r},{r.get('fidelity')!r}" for r in table]
            Path(args.csv).write_text("\n".join(lines) + "\n")
        return {"table": table, "best_pattern": best["pattern"], "best_energy": best["energy"],
                "exact_energy": exact[0]}
    res = _solve(h, args, args.mode)
    out = _summarize(res, h, args.depth, exact)
    if args.trace:
        _write_trace(res, m, args.trace)
    out["trace_file"] = args.trace
    if res.logits is not None:
        out["final_probs"] = [float(p) for p in pattern_probs(res.logits)]
    return out


def _load_file(args):
    path = fixture_path(args.fixture) if args.fixture else Path(args.hamiltonian)
    return read_hamiltonian_file(path)


def cmd_molecule(args) -> dict:
    hf = _load_file(args)
    h = hf.to_sum()
    exact = _exact(h)
    out = {"n": h.n, "terms": h.term_count(), "metadata": hf.metadata, "exact_energy": exact[0],
           "chemical_accuracy_threshold": CHEMICAL_ACCURACY}
    modes = ("vqe", "shvqe") if args.mode == "both" else (args.mode,)
    for mode in modes:
        r = _summarize(_solve(h, args, mode), h, args.depth, exact)
        r["chemical_accuracy"] = chemical_accuracy(r.get("abs_error"))
        out[mode] = r
    return out


def chemical_accuracy(abs_error: float | None) -> bool | None:
    """True when the error is strictly below 1.6e-3 Hartree."""
    return None if abs_error is None else bool(abs_error < CHEMICAL_ACCURACY)


def cmd_transform(args) -> str:
    hf = read_hamiltonian_file(args.hamiltonian)
    h = hf.to_sum()
    if len(args.pattern) != h.n // 2:
        raise UsageError(f"--pattern needs {h.n // 2} bits for n={h.n}")
    angles = np.zeros((h.n, 3)) if args.angles is None else np.loadtxt(args.angles, ndmin=2)
    if angles.shape != (h.n, 3):
        raise SchemaError(f"angles file must hold {h.n} rows of 3 values, got shape {angles.shape}")
    ht = transform_hamiltonian(graph_circuit(GraphPattern(h.n, args.pattern)), SingleQubitLayer(h.n, angles), h)
    meta = {"pattern": args.pattern, "terms": str(ht.term_count()), "max_weight": str(ht.max_weight())}
    print(f"terms={ht.term_count()} max_weight={ht.max_weight()}", file=sys.stderr)
    return format_hamiltonian(ht, meta)


def cmd_shots(args) -> dict:
    n = args.n
    term = PauliString.from_label(args.term) if args.term else PauliString.single(n, 0, "X")
    if term.n != n:
        raise UsageError(f"--term must have {n} characters")
    if args.pattern and len(args.pattern) != n // 2:
        raise UsageError(f"--pattern needs {n // 2} bits")
    clifford = graph_circuit(GraphPattern(n, args.pattern)) if args.pattern else CliffordCircuit(n)
    if args.layer == "random":
        layer = SingleQubitLayer(n, stream(args.seed, 1).uniform(-np.pi, np.pi, (n, 3)))
    else:
        layer = SingleQubitLayer.identity(n)
    state = haar_state(n, stream(args.seed, 2))
    res = overhead_experiment(term, HeisenbergTransform(clifford, layer), state, args.epsilon, args.seed,
                              args.trials, args.shots_per_trial)
    rows = [res.row(s) for s in STRATEGIES]
    if args.csv:
        Path(args.csv).write_text(shots_csv(rows))
    return {"rows": rows, "var_direct": res.var_direct, "var_terms": [float(v) for v in res.var_terms],
            "coefficients": [float(c) for c in res.coeffs]}


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    argv = sys.argv[1:] if argv is None else list(argv)
    try:
        try:
            args = _apply_config(parser, argv)
        except OSError as exc:
            print(f"shvqe: cannot read config: {exc}", file=sys.stderr)
            return EXIT_IO
        result = args.handler(args)
        if isinstance(result, str):
            _emit(result, args.out)
        else:
            _emit(json.dumps(_envelope(args, result), indent=2, sort_keys=True) + "\n", args.out)
        return EXIT_OK
    except SystemExit as exc:  # argparse usage errors and --help
        return int(exc.code or 0)
    except UsageError as exc:
        print(f"shvqe: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except CapacityError as exc:
        print(f"shvqe: capacity exceeded: {exc}", file=sys.stderr)
        return EXIT_CAPACITY
    except (OSError, HamiltonianParseError, SchemaError) as exc:
        print(f"shvqe: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"shvqe: invalid argument: {exc}", file=sys.stderr)
        return EXIT_USAGE


def main_entry() -> None:
    sys.exit(main())


if __name__ == "__main__":
    main_entry()
