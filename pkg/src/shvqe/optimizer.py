"""Adam-SPSA optimization of plain and Schrödinger-Heisenberg VQE.

The SH cost for gate parameters ``(theta, phi)`` and architecture logits
``alpha`` draws ``N_s`` graph patterns from ``alpha``, transforms the
Hamiltonian by each sampled Heisenberg circuit (layer folded first, then the
graph's CZ circuit) and averages ``<0|U(theta)^dag H_T U(theta)|0>``.
Each distinct pattern is evaluated once and weighted by its sample count,
which gives exactly the same mean as evaluating every sample.

SPSA gradients use common random numbers: both perturbed evaluations of an
iteration draw the same pattern uniforms.

For high-weight Hamiltonians the layer expansion grows like ``3**weight`` per
term, so pattern energies can instead be computed as ``<T U 0|H|T U 0>``
(``picture="schrodinger"``). The two routes agree to rounding; ``"auto"``
picks the transformed Hamiltonian while its size stays below
``AUTO_EXPANSION_LIMIT`` terms.
"""

from __future__ import annotations

import hashlib
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from .ansatz import (
    HardwareEfficientAnsatz,
    apply_single_qubit_layer,
    pattern_distribution,
    pattern_probs,
    patterns_from_uniforms,
    prepare_state,
)
from .clifford import CliffordTableau, GraphPattern, graph_circuit, transform_sum
from .errors import NumericalIntegrityError
from .layer import SingleQubitLayer, conjugate_layer
from .pauli import PauliSum
from .rng import stream
from .statevector import StateVector, apply_clifford, expectation

# stream keys
_INIT_THETA, _INIT_PHI, _PATTERNS, _PERTURB = 1, 2, 3, 4
PICTURES = ("auto", "heisenberg", "schrodinger")
AUTO_EXPANSION_LIMIT = 4096


@dataclass
class SpsaAdamConfig:
    c0: float = 0.1
    gamma: float = 0.101
    lr: float = 0.05
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8
    max_iters: int = 500
    samples: int = 800
    seed: int = 0
    restarts: int = 1
    window: int = 50
    tol: float = 1e-6
    mode: str = "joint"  # or "alternating"
    alternate_every: int = 20
    threads: int = 1
    picture: str = "auto"

    def __post_init__(self):
        for name in ("c0", "gamma", "lr", "eps", "tol"):
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be positive")
        if not (0 <= self.beta1 < 1 and 0 <= self.beta2 < 1):
            raise ValueError("Adam betas must lie in [0, 1)")
        for name in ("max_iters", "samples", "restarts", "window", "alternate_every", "threads"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be at least 1")
        if self.mode not in ("joint", "alternating"):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.picture not in PICTURES:
            raise ValueError(f"picture must be one of {PICTURES}, got {self.picture!r}")


@dataclass
class OptTrace:
    costs: list[float] = field(default_factory=list)
    best_costs: list[float] = field(default_factory=list)
    param_hashes: list[str] = field(default_factory=list)
    probs: list[list[float]] = field(default_factory=list)
    grad_norms: list[float] = field(default_factory=list)

    def record(self, cost: float, params: np.ndarray, probs: np.ndarray | None, grad_norm: float):
        if not math.isfinite(cost):
            raise NumericalIntegrityError(f"non-finite cost {cost} at iteration {len(self.costs)}")
        self.costs.append(cost)
        prev = self.best_costs[-1] if self.best_costs else math.inf
        self.best_costs.append(min(prev, cost))
        self.param_hashes.append(hashlib.sha1(np.ascontiguousarray(params).tobytes()).hexdigest()[:12])
        self.probs.append([] if probs is None else [float(p) for p in probs])
        self.grad_norms.append(grad_norm)

    def __len__(self) -> int:
        return len(self.costs)


@dataclass
class OptResult:
    energy: float
    theta: np.ndarray
    phi: np.ndarray
    pattern: str
    logits: np.ndarray | None
    converged: bool
    trace: OptTrace
    restart: int = 0
    restart_energies: list[float] = field(default_factory=list)

    def state(self, n: int, depth: int) -> StateVector:
        """``T U(theta)|0>`` built on the Schrödinger side."""
        return heisenberg_state(n, depth, self.theta, self.phi, self.pattern)


def heisenberg_state(n: int, depth: int, theta: np.ndarray, phi: np.ndarray, pattern: str) -> StateVector:
    """``layer(phi) . graph(pattern) . U(theta)|0>`` simulated directly."""
    state = prepare_state(HardwareEfficientAnsatz(n, depth, theta))
    if n >= 2 and "1" in pattern:
        apply_clifford(state, graph_circuit(GraphPattern(n, pattern)))
    state.amplitudes = apply_single_qubit_layer(state.amplitudes, n, np.reshape(phi, (n, 3)))
    return state


class ShvqeObjective:
    """Pattern energies ``E_k(theta, phi)`` through the transformed Hamiltonian."""

    def __init__(self, h: PauliSum, depth: int, threads: int = 1, picture: str = "auto"):
        if picture not in PICTURES:
            raise ValueError(f"picture must be one of {PICTURES}, got {picture!r}")
        self.h = h
        self.n = h.n
        self.depth = depth
        self.m = self.n // 2
        self.threads = threads
        if picture == "auto":
            expanded = sum(3 ** w for w in h.weights())
            picture = "heisenberg" if expanded <= AUTO_EXPANSION_LIMIT else "schrodinger"
        self.picture = picture
        self._tableaus: dict[int, CliffordTableau] = {}
        self._circuits: dict[int, object] = {}

    def tableau(self, index: int) -> CliffordTableau:
        if index not in self._tableaus:
            pattern = GraphPattern.from_index(self.n, index)
            self._tableaus[index] = CliffordTableau.from_circuit(graph_circuit(pattern))
        return self._tableaus[index]

    def transformed(self, phi: np.ndarray, index: int, layered: PauliSum | None = None) -> PauliSum:
        if layered is None:
            layered = conjugate_layer(SingleQubitLayer(self.n, np.reshape(phi, (self.n, 3))), self.h)
        if index == 0:
            return layered
        return transform_sum(self.tableau(index), layered)

    def _graph(self, index: int):
        if index not in self._circuits:
            self._circuits[index] = graph_circuit(GraphPattern.from_index(self.n, index))
        return self._circuits[index]

    def _schrodinger_energy(self, state: StateVector, phi: np.ndarray | None, index: int) -> float:
        out = state.copy()
        if index:
            apply_clifford(out, self._graph(index))
        if phi is not None:
            out.amplitudes = apply_single_qubit_layer(out.amplitudes, self.n, np.reshape(phi, (self.n, 3)))
        return expectation(out, self.h)

    def pattern_energies(self, theta: np.ndarray, phi: np.ndarray | None, indices) -> dict[int, float]:
        state = prepare_state(HardwareEfficientAnsatz(self.n, self.depth, theta))
        indices = sorted(set(int(k) for k in indices))
        if self.picture == "schrodinger":
            return {k: self._schrodinger_energy(state, phi, k) for k in indices}
        if phi is None:
            layered = self.h
        else:
            layered = conjugate_layer(SingleQubitLayer(self.n, np.reshape(phi, (self.n, 3))), self.h)

        def one(k: int) -> float:
            return expectation(state, self.transformed(phi, k, layered))

        if self.threads > 1 and len(indices) > 1:
            with ThreadPoolExecutor(self.threads) as pool:
                values = list(pool.map(one, indices))
        else:
            values = [one(k) for k in indices]
        return dict(zip(indices, values))

    def sampled_cost(self, theta, phi, logits, samples: int, uniforms: np.ndarray) -> float:
        probs = pattern_probs(logits)
        drawn = patterns_from_uniforms(probs, uniforms[:samples])
        ks, counts = np.unique(drawn, return_counts=True)
        energies = self.pattern_energies(theta, phi, ks)
        return float(sum(energies[int(k)] * c for k, c in zip(ks, counts)) / samples)

    def expected_cost(self, theta, phi, logits) -> float:
        """Exact pattern average ``sum_k Pr(k) E_k`` (enumerates all ``2**m`` patterns)."""
        dist = pattern_distribution(pattern_probs(logits))
        energies = self.pattern_energies(theta, phi, range(len(dist)))
        return float(sum(dist[k] * energies[k] for k in range(len(dist))))


def shvqe_cost(theta, phi, logits, h: PauliSum, samples: int, seed: int, depth: int | None = None) -> float:
    """Mean energy over ``samples`` graph patterns drawn from ``logits``; deterministic in ``seed``."""
    theta = np.asarray(theta, dtype=float)
    n = h.n
    if depth is None:
        depth = theta.size // (3 * n) - 1
    alpha = logits.alpha if hasattr(logits, "alpha") else np.asarray(logits, dtype=float).reshape(-1, 2)
    uniforms = stream(seed, _PATTERNS).random((samples, len(alpha)))
    return ShvqeObjective(h, depth).sampled_cost(theta, phi, alpha, samples, uniforms)


def spsa_gradient(cost_fn: Callable[[np.ndarray], float], params: np.ndarray, c_k: float,
                  seed, mask: np.ndarray | None = None) -> tuple[np.ndarray, float, float]:
    """Two-evaluation SPSA estimate with a Rademacher perturbation.

    Returns ``(g, f_plus, f_minus)``. Coordinates with ``mask == False`` are
    neither perturbed nor updated (their gradient entry is 0).
    """
    if not c_k > 0:
        raise ValueError(f"perturbation scale must be positive, got {c_k}")
    rng = seed if isinstance(seed, np.random.Generator) else stream(seed)
    delta = rng.choice(np.array([-1.0, 1.0]), size=np.shape(params))
    if mask is not None:
        delta = np.where(mask, delta, 0.0)
    f_plus = cost_fn(params + c_k * delta)
    f_minus = cost_fn(params - c_k * delta)
    if not (math.isfinite(f_plus) and math.isfinite(f_minus)):
        raise NumericalIntegrityError(f"non-finite cost in SPSA step: f+={f_plus}, f-={f_minus}")
    # delta entries are +/-1 (their own inverse) or 0 for frozen coordinates
    return (f_plus - f_minus) / (2.0 * c_k) * delta, f_plus, f_minus


class Adam:
    def __init__(self, size: int, lr: float, beta1: float, beta2: float, eps: float):
        self.lr, self.beta1, self.beta2, self.eps = lr, beta1, beta2, eps
        self.m = np.zeros(size)
        self.v = np.zeros(size)
        self.t = 0

    def step(self, params: np.ndarray, grad: np.ndarray) -> np.ndarray:
        self.t += 1
        self.m = self.beta1 * self.m + (1 - self.beta1) * grad
        self.v = self.beta2 * self.v + (1 - self.beta2) * grad**2
        m_hat = self.m / (1 - self.beta1**self.t)
        v_hat = self.v / (1 - self.beta2**self.t)
        return params - self.lr * m_hat / (np.sqrt(v_hat) + self.eps)


@dataclass
class _Layout:
    n: int
    depth: int
    with_layer: bool
    with_logits: bool

    @property
    def n_theta(self) -> int:
        return HardwareEfficientAnsatz.parameter_count(self.n, self.depth)

    @property
    def n_phi(self) -> int:
        return 3 * self.n if self.with_layer else 0

    @property
    def n_alpha(self) -> int:
        return 2 * (self.n // 2) if self.with_logits else 0

    def split(self, params):
        a, b = self.n_theta, self.n_theta + self.n_phi
        theta = params[:a]
        phi = params[a:b] if self.with_layer else None
        alpha = params[b:].reshape(-1, 2) if self.with_logits else None
        return theta, phi, alpha

    def alternating_mask(self, iteration: int, every: int) -> np.ndarray:
        gate_block = (iteration // every) % 2 == 0
        size = self.n_theta + self.n_phi + self.n_alpha
        mask = np.zeros(size, dtype=bool)
        if gate_block or not self.with_logits:
            mask[: self.n_theta + self.n_phi] = True
        else:
            mask[self.n_theta + self.n_phi:] = True
        return mask


def _dominant(alpha: np.ndarray) -> str:
    return "".join("1" if p > 0.5 else "0" for p in pattern_probs(alpha))


def _run_once(objective: ShvqeObjective, layout: _Layout, config: SpsaAdamConfig, restart: int,
              fixed_pattern: str | None, init: np.ndarray | None) -> OptResult:
    n, m = layout.n, layout.n // 2
    if init is not None:
        params = np.array(init, dtype=float)
    else:
        theta0 = stream(config.seed, restart, _INIT_THETA).uniform(-np.pi, np.pi, layout.n_theta)
        phi0 = stream(config.seed, restart, _INIT_PHI).uniform(-np.pi, np.pi, layout.n_phi)
        params = np.concatenate([theta0, phi0, np.zeros(layout.n_alpha)])
    fixed_index = int(fixed_pattern, 2) if fixed_pattern else 0

    def make_cost(iteration: int) -> Callable[[np.ndarray], float]:
        if layout.with_logits:
            uniforms = stream(config.seed, restart, _PATTERNS, iteration).random((config.samples, m))

            def cost(p):
                theta, phi, alpha = layout.split(p)
                return objective.sampled_cost(theta, phi, alpha, config.samples, uniforms)
        else:
            def cost(p):
                theta, phi, _ = layout.split(p)
                return objective.pattern_energies(theta, phi, [fixed_index])[fixed_index]
        return cost

    adam = Adam(params.size, config.lr, config.beta1, config.beta2, config.eps)
    trace = OptTrace()
    best_params, best_cost = params.copy(), math.inf
    converged = False
    for k in range(config.max_iters):
        cost = make_cost(k)
        current = cost(params)
        if current < best_cost:
            best_cost, best_params = current, params.copy()
        probs = pattern_probs(layout.split(params)[2]) if layout.with_logits else None
        c_k = config.c0 / (k + 1) ** config.gamma
        mask = layout.alternating_mask(k, config.alternate_every) if config.mode == "alternating" else None
        grad, _, _ = spsa_gradient(cost, params, c_k, stream(config.seed, restart, _PERTURB, k), mask)
        trace.record(current, params, probs, float(np.linalg.norm(grad)))
        update = adam.step(params, grad)
        params = update if mask is None else np.where(mask, update, params)
        if len(trace) > config.window:
            if trace.best_costs[-config.window - 1] - trace.best_costs[-1] < config.tol:
                converged = True
                break

    # final parameters are candidates too
    final_cost = make_cost(len(trace))(params)
    if final_cost < best_cost:
        best_cost, best_params = final_cost, params.copy()
    if layout.with_logits:
        # report the most probable pattern with the gate parameters held
        candidates = []
        for p in (params, best_params):
            theta, phi, alpha = layout.split(p)
            pattern = _dominant(alpha)
            energy = objective.pattern_energies(theta, phi, [int(pattern, 2)])[int(pattern, 2)]
            candidates.append((energy, pattern, p))
        energy, pattern, chosen = min(candidates, key=lambda c: c[0])
    else:
        energy, pattern, chosen = best_cost, fixed_pattern or "0" * m, best_params
    theta, phi, alpha = layout.split(chosen)
    return OptResult(
        energy=float(energy),
        theta=np.array(theta).reshape(layout.depth + 1, n, 3),
        phi=np.zeros((n, 3)) if phi is None else np.array(phi).reshape(n, 3),
        pattern=pattern,
        logits=None if alpha is None else np.array(alpha),
        converged=converged,
        trace=trace,
        restart=restart,
    )


def run_shvqe(h: PauliSum, depth: int, config: SpsaAdamConfig, fixed_pattern: str | None = None,
              optimize_layer: bool = True, init: np.ndarray | None = None) -> OptResult:
    """Joint adam-SPSA over ``(theta, phi, alpha)``; best of ``config.restarts`` runs.

    With ``fixed_pattern`` the logits are dropped and the Heisenberg Clifford
    part is pinned to that graph; with ``optimize_layer=False`` the layer is
    pinned to the identity.
    """
    n = h.n
    if fixed_pattern is not None and len(fixed_pattern) != n // 2:
        raise ValueError(f"pattern must have {n // 2} bits, got {fixed_pattern!r}")
    layout = _Layout(n, depth, optimize_layer, fixed_pattern is None)
    objective = ShvqeObjective(h, depth, threads=config.threads, picture=config.picture)
    results = [_run_once(objective, layout, config, r, fixed_pattern, init) for r in range(config.restarts)]
    best = min(results, key=lambda r: r.energy)
    best.restart_energies = [r.energy for r in results]
    return best


def run_vqe(h: PauliSum, depth: int, config: SpsaAdamConfig, init: np.ndarray | None = None) -> OptResult:
    """Plain VQE: the Heisenberg circuit is fixed to the identity."""
    return run_shvqe(h, depth, config, fixed_pattern="0" * (h.n // 2), optimize_layer=False, init=init)
