"""Shot budgets for estimating a Pauli term before and after a Heisenberg transform.

Measuring ``P_h`` directly to standard error ``eps`` takes
``N1 = Var[P_h] / eps**2`` shots. After the transform
``T^dag P_h T = sum_i c_i P_i`` each of the ``m_h`` strings is measured
separately; with a uniform split the budget becomes
``N2 = m_h * sum_i c_i**2 Var[P_i] / eps**2``, roughly ``m_h * N1``.
Splitting shots in proportion to ``|c_i|`` minimizes the estimator variance
``sum_i c_i**2 Var[P_i] / (N p_i)`` when the term variances are equal.
"""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass

import numpy as np

from .clifford import CliffordCircuit
from .layer import SingleQubitLayer, transform_hamiltonian
from .pauli import PauliString, PauliSum
from .rng import stream
from .statevector import GateOp, StateVector, apply, apply_clifford, expectation, sample_outcomes

STRATEGIES = ("uniform", "abs_coeff", "squared_coeff")
CSV_COLUMNS = ("strategy", "m_h", "N1", "N2", "ratio", "trials")


def shots_required(variance: float, epsilon: float) -> int:
    """``ceil(variance / epsilon**2)``, at least one shot."""
    if not epsilon > 0:
        raise ValueError(f"epsilon must be positive, got {epsilon}")
    if variance < 0:
        raise ValueError(f"variance must be non-negative, got {variance}")
    # round first so 1 / 0.1**2 lands on 100, not 101
    return max(1, math.ceil(round(variance / epsilon**2, 9)))


@dataclass
class AllocationPlan:
    strategy: str
    fractions: np.ndarray
    shots: np.ndarray
    total: int


def allocation_fractions(coeffs, strategy: str) -> np.ndarray:
    c = np.abs(np.asarray(coeffs, dtype=float))
    if c.size == 0 or not np.any(c > 0):
        raise ValueError("coefficient vector must contain a non-zero entry")
    if strategy == "uniform":
        return np.full(c.size, 1.0 / c.size)
    if strategy == "abs_coeff":
        return c / c.sum()
    if strategy == "squared_coeff":
        return c**2 / np.sum(c**2)
    raise ValueError(f"unknown strategy {strategy!r}; choose from {STRATEGIES}")


def _largest_remainder(fractions: np.ndarray, total: int) -> np.ndarray:
    raw = fractions * total
    shots = np.floor(raw).astype(int)
    order = np.argsort(-(raw - shots), kind="stable")
    shots[order[: total - shots.sum()]] += 1
    # per-term floor of one shot, paid for by the largest allocations
    for i in np.flatnonzero(shots == 0):
        shots[int(np.argmax(shots))] -= 1
        shots[i] = 1
    return shots


def allocate(coeffs, variances=None, strategy: str = "abs_coeff", total: int = 1000) -> AllocationPlan:
    """Split ``total`` shots over the terms; ``variances`` is accepted for API symmetry
    but the three strategies depend on the coefficients only."""
    fractions = allocation_fractions(coeffs, strategy)
    if total < fractions.size:
        raise ValueError(f"need at least one shot per term ({fractions.size}), got {total}")
    return AllocationPlan(strategy, fractions, _largest_remainder(fractions, total), total)


def estimator_variance(coeffs, variances, fractions, total: float) -> float:
    """``sum_i c_i**2 Var_i / (N p_i)``."""
    c = np.asarray(coeffs, dtype=float)
    v = np.asarray(variances, dtype=float)
    p = np.asarray(fractions, dtype=float)
    return float(np.sum(c**2 * v / (total * p)))


def simulate_estimator(coeffs, expectations, shots, trials: int, seed: int) -> np.ndarray:
    """Shot-noise estimates of ``sum_i c_i <P_i>``, one per trial (trial ``k`` uses stream ``(seed, k)``)."""
    c = np.asarray(coeffs, dtype=float)
    out = np.empty(trials)
    for k in range(trials):
        rng = stream(seed, k)
        out[k] = sum(ci * sample_outcomes(e, int(s), rng)[0] for ci, e, s in zip(c, expectations, shots))
    return out


@dataclass
class HeisenbergTransform:
    """The virtual circuit ``T = layer . clifford`` (Clifford part acts first)."""

    clifford: CliffordCircuit
    layer: SingleQubitLayer

    @classmethod
    def identity(cls, n: int) -> HeisenbergTransform:
        return cls(CliffordCircuit(n), SingleQubitLayer.identity(n))

    def apply_to_state(self, state: StateVector) -> StateVector:
        out = apply_clifford(state.copy(), self.clifford)
        for q, g in enumerate(self.layer.gates()):
            apply(out, GateOp(g, (q,)))
        return out

    def expand(self, p: PauliString) -> PauliSum:
        """``T^dag p T`` as a Pauli sum."""
        return transform_hamiltonian(self.clifford, self.layer, PauliSum(p.n).add_term(p, 1.0))


@dataclass
class OverheadResult:
    m_h: int
    n1: int
    n2: int
    ratio: float
    var_direct: float
    var_terms: np.ndarray
    coeffs: np.ndarray
    trials: int
    shots_per_trial: int
    epsilon: float

    def n2_for(self, strategy: str) -> int:
        """Term-wise shot count when the budget is split by ``strategy``."""
        p = allocation_fractions(self.coeffs, strategy)
        return shots_required(float(np.sum(self.coeffs**2 * self.var_terms / p)), self.epsilon)

    def row(self, strategy: str = "uniform") -> dict:
        n2 = self.n2_for(strategy)
        return {"strategy": strategy, "m_h": self.m_h, "N1": self.n1, "N2": n2,
                "ratio": n2 / self.n1, "trials": self.trials}


def _pooled_variance(exp: float, shots: int, trials: int, seed: int, key: int) -> float:
    variances = [sample_outcomes(exp, shots, stream(seed, key, k))[1] for k in range(trials)]
    return float(np.mean(variances))


def overhead_experiment(h_term: PauliString, transform: HeisenbergTransform, state: StateVector,
                        epsilon: float, seed: int, trials: int = 50,
                        shots_per_trial: int = 2000) -> OverheadResult:
    """Empirical shot counts for direct versus term-wise estimation.

    ``state`` is ``U|0>``. The direct route measures ``h_term`` on ``T U|0>``;
    the term-wise route measures every string of ``T^dag h_term T`` on
    ``U|0>`` with a uniform split. Single-shot variances are pooled over
    ``trials`` simulated runs of ``shots_per_trial`` shots each and turned
    into the shot counts that reach standard error ``epsilon``.
    """
    expanded = transform.expand(h_term)
    terms = list(expanded.items())
    m_h = len(terms)
    coeffs = np.array([c for _, c in terms])

    direct_exp = expectation(transform.apply_to_state(state), h_term)
    var_direct = _pooled_variance(direct_exp, shots_per_trial, trials, seed, 0)
    var_terms = np.array([
        _pooled_variance(expectation(state, p), shots_per_trial, trials, seed, i + 1)
        for i, (p, _) in enumerate(terms)
    ])
    n1 = shots_required(var_direct, epsilon)
    n2 = shots_required(m_h * float(np.sum(coeffs**2 * var_terms)), epsilon)
    return OverheadResult(m_h, n1, n2, n2 / n1, var_direct, var_terms, coeffs, trials, shots_per_trial, epsilon)


def write_csv(rows: list[dict]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(CSV_COLUMNS), lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in r.items()})
    return buf.getvalue()
