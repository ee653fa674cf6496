"""Half-cut purity moments and the log-ratio expressivity measure.

For an ensemble of states the measure at order ``t`` is

    delta_t = log E_Haar[Tr(rho^t)] - log E_ens[Tr(rho^t)]

with ``rho`` the reduced state of the first ``n/2`` qubits and natural logs.
Both expectations are Monte Carlo averages; standard errors are jackknife
estimates of each log-mean, combined in quadrature.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from functools import lru_cache

import numpy as np

from .ansatz import brick_pairs
from .clifford import random_clifford
from .statevector import (
    GateOp,
    StateVector,
    apply,
    apply_clifford,
    haar_state,
    haar_unitary,
    reduced_moments,
)
from .rng import stream

HEISENBERG_KINDS = ("none", "clifford", "clifford+layer", "haar")
ZERO_THRESHOLD = 0.05
CSV_COLUMNS = ("n", "depth", "ensemble", "t", "E_ensemble", "E_Haar", "delta_t", "stderr", "samples", "seed")
_HAAR_KEY = 7919


@dataclass(frozen=True)
class EnsembleSpec:
    """State ensemble ``T U |0>``: Haar brickwork ``U`` plus an optional random Heisenberg part.

    ``heisenberg='haar'`` ignores the circuit fields and draws Haar states
    directly (self-comparison control).
    """

    n: int
    schrodinger_depth: int = 0
    heisenberg: str = "none"
    clifford_gates: int = 500
    sample_count: int = 300
    t_max: int = 6
    seed: int = 0

    def __post_init__(self):
        if self.n % 2:
            raise ValueError(f"half cut needs even n, got {self.n}")
        if self.sample_count < 1:
            raise ValueError("sample_count must be at least 1")
        if self.heisenberg not in HEISENBERG_KINDS:
            raise ValueError(f"heisenberg must be one of {HEISENBERG_KINDS}, got {self.heisenberg!r}")
        if self.schrodinger_depth < 0 or self.t_max < 1:
            raise ValueError("depth must be >= 0 and t_max >= 1")

    @property
    def label(self) -> str:
        return {"none": "vqe", "clifford": "sh-clifford", "clifford+layer": "sh", "haar": "haar"}[self.heisenberg]


@dataclass
class DeltaReport:
    spec: EnsembleSpec
    t: np.ndarray
    e_ensemble: np.ndarray
    e_haar: np.ndarray
    delta: np.ndarray
    stderr: np.ndarray
    stderr_ensemble: np.ndarray
    stderr_haar: np.ndarray
    haar_samples: int
    moments: np.ndarray = field(repr=False, default=None)

    def at(self, t: int) -> tuple[float, float]:
        """``(delta_t, stderr)`` for order ``t``."""
        return float(self.delta[t - 1]), float(self.stderr[t - 1])

    def is_zero(self, t: int, threshold: float = ZERO_THRESHOLD) -> bool:
        d, s = self.at(t)
        return abs(d) < max(threshold, 3 * s)

    def rows(self) -> list[dict]:
        s = self.spec
        return [
            {
                "n": s.n, "depth": s.schrodinger_depth, "ensemble": s.label, "t": int(t),
                "E_ensemble": float(e), "E_Haar": float(eh), "delta_t": float(d), "stderr": float(se),
                "samples": s.sample_count, "seed": s.seed,
            }
            for t, e, eh, d, se in zip(self.t, self.e_ensemble, self.e_haar, self.delta, self.stderr)
        ]


def _brickwork(n: int, depth: int, rng: np.random.Generator) -> list[GateOp]:
    ops = []
    for layer in range(1, depth + 1):
        for a, b in brick_pairs(n, layer):
            ops.append(GateOp(haar_unitary(4, rng), (a, b)))
    return ops


def ensemble_sample(spec: EnsembleSpec, index: int) -> StateVector:
    """Sample ``index`` of the ensemble; depends only on ``(spec.seed, index)``."""
    if not 0 <= index < spec.sample_count:
        raise IndexError(f"sample index {index} outside [0, {spec.sample_count})")
    rng = stream(spec.seed, index)
    if spec.heisenberg == "haar":
        return haar_state(spec.n, rng)
    state = StateVector(spec.n)
    for op in _brickwork(spec.n, spec.schrodinger_depth, rng):
        apply(state, op)
    if spec.heisenberg in ("clifford", "clifford+layer"):
        apply_clifford(state, random_clifford(spec.n, spec.clifford_gates, rng))
    if spec.heisenberg == "clifford+layer":
        for q in range(spec.n):
            apply(state, GateOp(haar_unitary(2, rng), (q,)))
    return state


def _map(fn, items, threads: int):
    if threads > 1:
        with ThreadPoolExecutor(threads) as pool:
            return list(pool.map(fn, items))
    return [fn(i) for i in items]


def ensemble_moments(spec: EnsembleSpec, threads: int = 1) -> np.ndarray:
    """``(sample_count, t_max)`` array of ``Tr(rho^t)``."""
    rows = _map(lambda i: reduced_moments(ensemble_sample(spec, i), spec.t_max), range(spec.sample_count), threads)
    return np.array(rows)


@lru_cache(maxsize=32)
def _haar_moments_cached(n: int, t_max: int, samples: int, seed: int) -> np.ndarray:
    out = np.array([reduced_moments(haar_state(n, stream(seed, _HAAR_KEY, i)), t_max) for i in range(samples)])
    out.setflags(write=False)
    return out


def haar_moments(n: int, t_max: int, samples: int, seed: int) -> np.ndarray:
    """Monte Carlo ``Tr(rho^t)`` for Haar-random states (independent of ensemble streams)."""
    return _haar_moments_cached(n, t_max, samples, seed)


def lubkin_purity(n: int) -> float:
    """Closed-form Haar average of ``Tr(rho^2)`` for an ``n/2 | n/2`` cut."""
    d_a = 2 ** (n // 2)
    d_b = 2 ** (n - n // 2)
    return (d_a + d_b) / (d_a * d_b + 1)


def jackknife_log_mean(x: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Log of the column means of ``x`` and its jackknife standard error."""
    x = np.asarray(x, dtype=float)
    n = x.shape[0]
    mean = x.mean(axis=0)
    if n < 2:
        return np.log(mean), np.zeros_like(mean)
    loo = np.log((x.sum(axis=0)[None, :] - x) / (n - 1))
    se = np.sqrt((n - 1) / n * np.sum((loo - loo.mean(axis=0)) ** 2, axis=0))
    return np.log(mean), se


def delta_t(spec: EnsembleSpec, haar_samples: int | None = None, haar_seed: int | None = None,
            threads: int = 1) -> DeltaReport:
    moments = ensemble_moments(spec, threads)
    hs = spec.sample_count if haar_samples is None else haar_samples
    haar = haar_moments(spec.n, spec.t_max, hs, spec.seed if haar_seed is None else haar_seed)
    log_e, se_e = jackknife_log_mean(moments)
    log_h, se_h = jackknife_log_mean(haar)
    return DeltaReport(
        spec=spec,
        t=np.arange(1, spec.t_max + 1),
        e_ensemble=np.exp(log_e),
        e_haar=np.exp(log_h),
        delta=log_h - log_e,
        stderr=np.sqrt(se_e**2 + se_h**2),
        stderr_ensemble=se_e,
        stderr_haar=se_h,
        haar_samples=hs,
        moments=moments,
    )


def is_saturated(report: DeltaReport, t_min: int = 2, threshold: float = ZERO_THRESHOLD) -> bool:
    """All ``delta_t`` for ``t_min <= t <= t_max`` indistinguishable from zero."""
    return all(report.is_zero(t, threshold) for t in range(t_min, report.spec.t_max + 1))


def saturation_depth(base: EnsembleSpec, depths, haar_samples: int | None = None, t_min: int = 2,
                     threads: int = 1) -> tuple[int | None, list[DeltaReport]]:
    """Smallest depth in ``depths`` whose profile is saturated (``None`` if none is)."""
    reports = []
    for d in depths:
        rep = delta_t(_with(base, schrodinger_depth=d), haar_samples, threads=threads)
        reports.append(rep)
        if is_saturated(rep, t_min):
            return d, reports
    return None, reports


def _with(spec: EnsembleSpec, **kw) -> EnsembleSpec:
    fields = dict(spec.__dict__)
    fields.update(kw)
    return EnsembleSpec(**fields)


def profiles_match(a: DeltaReport, b: DeltaReport, t_min: int = 2, threshold: float = ZERO_THRESHOLD) -> bool:
    """Ensemble averages agree for every ``t >= t_min`` within ``max(threshold, 3 sigma)``."""
    for t in range(t_min, min(a.spec.t_max, b.spec.t_max) + 1):
        diff = abs(a.delta[t - 1] - b.delta[t - 1])
        sigma = math.hypot(a.stderr_ensemble[t - 1], b.stderr_ensemble[t - 1])
        if diff >= max(threshold, 3 * sigma):
            return False
    return True


@dataclass
class EquivalentDepth:
    n: int
    sh_depth: int
    heisenberg: str
    vqe_depth: int | None


def equivalent_depth_sweep(n_list, sh_depths=(2, 4), vqe_depths=range(0, 41), samples: int = 300,
                           t_max: int = 6, seed: int = 0, heisenberg: str = "clifford",
                           clifford_gates: int = 500, t_min: int = 2,
                           threads: int = 1) -> list[EquivalentDepth]:
    """Smallest VQE depth whose moment profile matches each SH ensemble."""
    out = []
    for n in n_list:
        vqe_reports: dict[int, DeltaReport] = {}
        for d_sh in sh_depths:
            sh = delta_t(EnsembleSpec(n, d_sh, heisenberg, clifford_gates, samples, t_max, seed), threads=threads)
            found = None
            for d in vqe_depths:
                if d not in vqe_reports:
                    vqe_reports[d] = delta_t(EnsembleSpec(n, d, "none", clifford_gates, samples, t_max, seed),
                                             threads=threads)
                if profiles_match(vqe_reports[d], sh, t_min):
                    found = d
                    break
            out.append(EquivalentDepth(n, d_sh, heisenberg, found))
    return out


def fidelity_requirement(total_fidelity: float, depth: int, n: int) -> tuple[float, float]:
    """Per-block fidelity and infidelity for ``depth * (n // 2)`` brickwork blocks."""
    if not 0 < total_fidelity <= 1:
        raise ValueError("total fidelity must lie in (0, 1]")
    blocks = depth * (n // 2)
    if blocks < 1:
        raise ValueError("circuit has no two-qubit blocks")
    per_block = total_fidelity ** (1.0 / blocks)
    return per_block, 1.0 - per_block


def write_csv(rows: list[dict], columns=CSV_COLUMNS) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(columns), lineterminator="\n")
    writer.writeheader()
    for r in rows:
        writer.writerow({k: (repr(v) if isinstance(v, float) else v) for k, v in r.items()})
    return buf.getvalue()
