"""Cross-entropy benchmarking statistics and output-distribution diagnostics.

Covers the linear XEB estimator, its exponential (Porter-Thomas) reference
distribution with a one-sample KS goodness-of-fit, the (1-eps)^gates
fidelity prediction, Shannon/cross entropy in nats, and the stochastic
error-injection experiment that ties them together.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .circuit import Circuit
from .engine import ErrorModel, RunLog, run_circuit, sample

EULER_GAMMA = 0.5772156649015329

# Asymptotic one-sample KS critical coefficient at alpha = 0.01.
KS_COEFF_01 = 1.628


@dataclass(frozen=True)
class XebReport:
    """Linear XEB estimate over one pool of sampled-bitstring probabilities."""

    n: int
    k: int
    f_xeb: float
    std_error: float
    std_dev: float
    per_sample_values: np.ndarray | None = None


@dataclass(frozen=True)
class PtFitReport:
    n: int
    num_probabilities: int
    ks_statistic: float
    ks_critical: float
    passed: bool


@dataclass(frozen=True)
class ExperimentPlan:
    """S circuits, each sampled k times."""

    circuits: tuple
    k: int
    seeds: tuple

    def __post_init__(self):
        object.__setattr__(self, "circuits", tuple(self.circuits))
        object.__setattr__(self, "seeds", tuple(self.seeds))
        if len(self.circuits) < 1:
            raise ValueError("plan needs at least one circuit")


def linear_xeb(probs, n: int, keep_values: bool = False) -> XebReport:
    """2^n * mean(p(x_i)) - 1 with standard error of the mean.

    ``probs`` are the ideal probabilities of the sampled bitstrings.
    """
    p = np.asarray(probs, dtype=np.float64)
    if p.size == 0:
        raise ValueError("no probabilities given")
    if p.min() < 0.0 or p.max() > 1.0:
        raise ValueError("probabilities must lie in [0, 1]")
    scale = float(2**n)
    values = scale * p - 1.0
    f = float(values.mean())
    std_dev = float(values.std(ddof=1)) if p.size > 1 else 0.0
    return XebReport(
        n=n,
        k=int(p.size),
        f_xeb=f,
        std_error=std_dev / math.sqrt(p.size),
        std_dev=std_dev,
        per_sample_values=values if keep_values else None,
    )


def xeb_over_plan(plan: ExperimentPlan, per_circuit_probs) -> tuple[XebReport, list[XebReport]]:
    """Pooled estimate over all S*k samples plus one report per circuit."""
    if len(per_circuit_probs) != len(plan.circuits):
        raise ValueError(
            f"{len(per_circuit_probs)} probability lists for {len(plan.circuits)} circuits"
        )
    n = _infer_n(plan)
    per_circuit = []
    pooled = []
    for probs in per_circuit_probs:
        p = np.asarray(probs, dtype=np.float64)
        if p.size != plan.k:
            raise ValueError(f"expected k={plan.k} samples per circuit, got {p.size}")
        per_circuit.append(linear_xeb(p, n))
        pooled.append(p)
    return linear_xeb(np.concatenate(pooled), n), per_circuit


def _infer_n(plan: ExperimentPlan) -> int:
    first = plan.circuits[0]
    if isinstance(first, Circuit):
        return first.n
    if isinstance(first, int):
        return first
    raise TypeError("plan circuits must be Circuit objects or qubit counts")


def porter_thomas_pdf(p, n: int):
    """Density N * exp(-N p) of output probabilities of a chaotic state."""
    scale = float(2**n)
    return scale * np.exp(-scale * np.asarray(p, dtype=np.float64))


def porter_thomas_fit(all_probs, alpha_coeff: float = KS_COEFF_01) -> PtFitReport:
    """One-sample KS test of {N p} against the unit exponential.

    ``all_probs`` must be the complete 2^n ideal distribution.  The critical
    value is alpha_coeff / sqrt(2^n) (1.628 gives alpha = 0.01).
    """
    p = np.asarray(all_probs, dtype=np.float64)
    m = p.size
    n = m.bit_length() - 1
    if m < 2 or (1 << n) != m:
        raise ValueError(f"need all 2^n probabilities, got {m} values")
    total = float(p.sum())
    if abs(total - 1.0) > 1e-6:
        raise ValueError(f"probabilities sum to {total}, not 1")
    u = np.sort(p * m)
    cdf = 1.0 - np.exp(-u)
    steps = np.arange(1, m + 1, dtype=np.float64) / m
    d_plus = float(np.max(steps - cdf))
    d_minus = float(np.max(cdf - (steps - 1.0 / m)))
    ks = max(d_plus, d_minus)
    crit = alpha_coeff / math.sqrt(m)
    return PtFitReport(
        n=n, num_probabilities=m, ks_statistic=ks, ks_critical=crit, passed=ks < crit
    )


def fidelity_prediction(epsilon: float, num_gates: int) -> float:
    """(1 - epsilon)^num_gates: chance a circuit runs with no error event."""
    if not 0.0 <= epsilon <= 1.0:
        raise ValueError(f"epsilon must be in [0, 1], got {epsilon}")
    if num_gates < 0:
        raise ValueError(f"num_gates must be >= 0, got {num_gates}")
    return (1.0 - epsilon) ** num_gates


def shannon_entropy(probs) -> float:
    """H(P) = -sum p ln p in nats; zero-probability terms contribute 0."""
    p = _check_distribution(probs, "P")
    nz = p[p > 0.0]
    return float(-np.sum(nz * np.log(nz)))


def cross_entropy(p_dist, q_dist) -> float:
    """H(P, Q) = -sum p ln q in nats.

    Where Q vanishes on the support of P the cross entropy diverges; that
    case returns inf and raises a RuntimeWarning so callers can flag it.
    """
    p = _check_distribution(p_dist, "P")
    q = _check_distribution(q_dist, "Q")
    if p.shape != q.shape:
        raise ValueError(f"distribution shapes differ: {p.shape} vs {q.shape}")
    support = p > 0.0
    if np.any(q[support] == 0.0):
        warnings.warn("Q assigns zero probability inside P's support", RuntimeWarning)
        return math.inf
    return float(-np.sum(p[support] * np.log(q[support])))


def _check_distribution(probs, name: str) -> np.ndarray:
    p = np.asarray(probs, dtype=np.float64)
    if p.size == 0:
        raise ValueError(f"{name} is empty")
    if p.min() < 0.0:
        raise ValueError(f"{name} has negative entries")
    total = float(p.sum())
    if abs(total - 1.0) > 1e-6:
        raise ValueError(f"{name} sums to {total}, not 1")
    return p


def trajectory_seed(seed: int, trajectory: int, stream: int) -> int:
    """Stable per-trajectory Philox keys; stream 0 = errors, 1 = sampling."""
    return (seed << 32) + 2 * trajectory + stream


def error_injection_xeb(
    circuit: Circuit,
    epsilon: float,
    trajectories: int,
    k: int,
    seed: int = 0,
    fixed_error: tuple[int, int, str] | None = None,
    max_qubits: int | None = None,
) -> tuple[XebReport, float]:
    """Measure XEB of error-injected runs against the ideal state.

    Runs ``trajectories`` stochastic executions, samples k bitstrings from
    each, scores all of them with the error-free state's probabilities, and
    pools everything into one report.  Returns the report together with the
    (1-eps)^gates prediction.  ``fixed_error`` switches to the deterministic
    single-Pauli mode (one trajectory shape, epsilon forced to 0).
    """
    if trajectories < 1:
        raise ValueError("need at least one trajectory")
    kwargs = {} if max_qubits is None else {"max_qubits": max_qubits}
    ideal = run_circuit(circuit, **kwargs)
    ideal_probs = ideal.probabilities()
    pooled = np.empty(trajectories * k, dtype=np.float64)
    for t in range(trajectories):
        if fixed_error is not None:
            model = ErrorModel(0.0, fixed_error=fixed_error)
        else:
            model = ErrorModel(epsilon, seed=trajectory_seed(seed, t, 0))
        noisy = run_circuit(circuit, model, log=RunLog(), **kwargs)
        drawn = sample(noisy, k, seed=trajectory_seed(seed, t, 1))
        pooled[t * k : (t + 1) * k] = ideal_probs[drawn.bitstrings]
    predicted = fidelity_prediction(epsilon, circuit.num_gates)
    return linear_xeb(pooled, circuit.n), predicted
