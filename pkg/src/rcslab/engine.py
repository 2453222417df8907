"""Dense state-vector engine: gate kernels, sampling, Pauli error injection.

Amplitudes are complex128; index i encodes the bitstring whose bit q is the
state of qubit q (little-endian, see circuit.py).  Kernels update the array
in place via strided views and touch each amplitude exactly once per gate,
so a gate costs O(2^n).  Kernels are sequential; any future partitioning
over disjoint strides must stay bit-identical to this path.

Sampling uses streamed inverse-CDF assignment over sorted uniforms, so no
2^n-sized prefix array is ever materialized.  All randomness comes from
Philox streams keyed by caller-provided seeds, which makes every draw
reproducible across platforms and processes.
"""

from __future__ import annotations

import struct
from dataclasses import dataclass

import numpy as np

from .circuit import CapacityError, Circuit, Gate, PAULI_MATRICES, gate_matrix

DEFAULT_MAX_QUBITS = 30

BYTES_PER_AMP = 16  # complex128

_SAMPLE_CHUNK = 1 << 16


def memory_required(n: int) -> int:
    """Bytes needed for the amplitude array of an n-qubit state."""
    return BYTES_PER_AMP * (1 << n)


def _format_bytes(num: int) -> str:
    for unit in ("B", "KiB", "MiB", "GiB", "TiB"):
        if num < 1024 or unit == "TiB":
            return f"{num:.1f} {unit}" if unit != "B" else f"{num} B"
        num /= 1024
    return f"{num} B"


class StateVector:
    """2^n complex amplitudes; exclusively owned while being mutated.

    Gate kernels keep a lazily allocated scratch buffer (up to 1.25x the
    state size) on the instance so that no per-gate allocations happen;
    repeatedly mapping and faulting half-state temporaries dominates gate
    cost for large n otherwise.
    """

    __slots__ = ("n", "amps", "_scratch")

    def __init__(self, n: int, amps: np.ndarray):
        if amps.shape != (1 << n,):
            raise ValueError(f"amplitude array shape {amps.shape} does not match n={n}")
        self.n = n
        self.amps = amps
        self._scratch = None

    def scratch(self, count: int) -> np.ndarray:
        if self._scratch is None or self._scratch.size < count:
            self._scratch = np.empty(count, dtype=np.complex128)
        return self._scratch

    def norm_sq(self) -> float:
        a = self.amps
        return float(np.sum(a.real * a.real + a.imag * a.imag))

    def probabilities(self) -> np.ndarray:
        a = self.amps
        return a.real * a.real + a.imag * a.imag

    def copy(self) -> "StateVector":
        return StateVector(self.n, self.amps.copy())


@dataclass(frozen=True)
class ErrorModel:
    """Per-gate Pauli error channel.

    With probability ``epsilon``, independently for every gate, an error is
    inserted right after the gate: one Pauli chosen uniformly from {X, Y, Z}
    per target qubit of that gate.  ``fixed_error`` = (cycle_index, qubit,
    pauli) instead places exactly one deterministic Pauli after the given
    cycle; epsilon must be 0 in that mode.
    """

    epsilon: float
    seed: int = 0
    fixed_error: tuple[int, int, str] | None = None

    def __post_init__(self):
        if not 0.0 <= self.epsilon <= 1.0:
            raise ValueError(f"epsilon must be in [0, 1], got {self.epsilon}")
        if self.fixed_error is not None:
            if self.epsilon != 0.0:
                raise ValueError("fixed_error mode requires epsilon = 0")
            _, _, pauli = self.fixed_error
            if pauli not in ("x", "y", "z"):
                raise ValueError(f"fixed_error pauli must be x/y/z, got {pauli!r}")


@dataclass
class RunLog:
    """Trajectory bookkeeping filled in by run_circuit."""

    error_events: int = 0
    injected_paulis: int = 0
    insertions: list = None

    def __post_init__(self):
        if self.insertions is None:
            self.insertions = []


@dataclass(frozen=True)
class SampleSet:
    """k bitstrings drawn from a state's output distribution."""

    bitstrings: np.ndarray
    k: int
    seed: int

    def __post_init__(self):
        bits = np.asarray(self.bitstrings, dtype=np.int64)
        object.__setattr__(self, "bitstrings", bits)
        if bits.shape != (self.k,):
            raise ValueError(f"expected {self.k} bitstrings, got shape {bits.shape}")


def init_state(n: int, max_qubits: int = DEFAULT_MAX_QUBITS) -> StateVector:
    """|0...0> on n qubits."""
    if n < 1:
        raise ValueError(f"need at least one qubit, got {n}")
    if n > max_qubits:
        raise CapacityError(
            f"{n} qubits need {_format_bytes(memory_required(n))} of amplitudes; "
            f"cap is {max_qubits} qubits ({_format_bytes(memory_required(max_qubits))})"
        )
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps[0] = 1.0
    return StateVector(n, amps)


def apply_gate(state: StateVector, gate: Gate) -> None:
    """Apply one gate in place."""
    if max(gate.targets) >= state.n:
        raise ValueError(f"gate targets {gate.targets} out of range for n={state.n}")
    m = gate_matrix(gate.kind)
    if len(gate.targets) == 1:
        _apply_1q(state, m, gate.targets[0])
    else:
        _apply_2q(state, m, gate.targets[0], gate.targets[1])


def _apply_1q(state: StateVector, m: np.ndarray, q: int) -> None:
    amps = state.amps
    half = amps.size >> 1
    s = state.scratch(amps.size)
    a = amps.reshape(-1, 2, 1 << q)
    lo = a[:, 0, :]
    hi = a[:, 1, :]
    tmp = s[:half].reshape(lo.shape)
    buf = s[half : 2 * half].reshape(lo.shape)
    np.copyto(tmp, lo)
    lo *= m[0, 0]
    np.multiply(hi, m[0, 1], out=buf)
    lo += buf
    hi *= m[1, 1]
    np.multiply(tmp, m[1, 0], out=buf)
    hi += buf


_SWAP_LOCAL = np.array([0, 2, 1, 3])


def _apply_2q(state: StateVector, m: np.ndarray, t0: int, t1: int) -> None:
    hi, lo = (t0, t1) if t0 > t1 else (t1, t0)
    if t0 < t1:
        # Matrix is written with bit(t0) as the high local bit; permute so the
        # high local bit is the high qubit of the strided view.
        m = m[np.ix_(_SWAP_LOCAL, _SWAP_LOCAL)]
    amps = state.amps
    quarter = amps.size >> 2
    s = state.scratch(5 * quarter)
    a = amps.reshape(-1, 2, 1 << (hi - lo - 1), 2, 1 << lo)
    blocks = [a[:, 0, :, 0, :], a[:, 0, :, 1, :], a[:, 1, :, 0, :], a[:, 1, :, 1, :]]
    shape = blocks[0].shape
    v = [s[i * quarter : (i + 1) * quarter].reshape(shape) for i in range(4)]
    buf = s[4 * quarter : 5 * quarter].reshape(shape)
    for i in range(4):
        np.copyto(v[i], blocks[i])
    for i in range(4):
        out = blocks[i]
        np.multiply(v[0], m[i, 0], out=out)
        for j in range(1, 4):
            np.multiply(v[j], m[i, j], out=buf)
            out += buf


_PAULI_NAMES = ("x", "y", "z")


def run_circuit(
    circuit: Circuit,
    error_model: ErrorModel | None = None,
    max_qubits: int = DEFAULT_MAX_QUBITS,
    log: RunLog | None = None,
) -> StateVector:
    """Execute all cycles in order on |0...0>, optionally injecting errors.

    One call is one stochastic trajectory: error insertions are sampled from
    the model's own Philox stream, so a fixed (circuit, error_model) pair
    always yields the same trajectory.
    """
    state = init_state(max(circuit.n, 1), max_qubits=max_qubits)
    rng = None
    if error_model is not None and error_model.fixed_error is None and error_model.epsilon > 0:
        rng = np.random.Generator(np.random.Philox(key=error_model.seed))
    for ci, cycle in enumerate(circuit.cycles):
        for gate in cycle.gates:
            apply_gate(state, gate)
            if rng is not None and rng.random() < error_model.epsilon:
                paulis = rng.integers(0, 3, size=len(gate.targets))
                for q, p in zip(gate.targets, paulis):
                    name = _PAULI_NAMES[p]
                    _apply_1q(state, PAULI_MATRICES[name], q)
                    if log is not None:
                        log.injected_paulis += 1
                        log.insertions.append((ci, q, name))
                if log is not None:
                    log.error_events += 1
        if error_model is not None and error_model.fixed_error is not None:
            fc, fq, fp = error_model.fixed_error
            if fc == ci:
                _apply_1q(state, PAULI_MATRICES[fp], fq)
                if log is not None:
                    log.error_events += 1
                    log.injected_paulis += 1
                    log.insertions.append((ci, fq, fp))
    return state


def probability(state: StateVector, bitstring: int) -> float:
    """|<bitstring|state>|^2."""
    if not 0 <= bitstring < (1 << state.n):
        raise ValueError(f"bitstring {bitstring} out of range for n={state.n}")
    a = state.amps[bitstring]
    return float(a.real * a.real + a.imag * a.imag)


def sample(state: StateVector, k: int, seed: int) -> SampleSet:
    """Draw k i.i.d. bitstrings from {|amp[x]|^2}.

    Sorted uniforms are assigned in a single streaming pass over the
    amplitude array (O(2^n + k log k) time, O(k) auxiliary space), so the
    full prefix-sum array is never stored.  Deterministic in (state, k,
    seed).
    """
    if k < 1:
        raise ValueError(f"need k >= 1, got {k}")
    rng = np.random.Generator(np.random.Philox(key=seed))
    u = np.sort(rng.random(k))
    out = np.empty(k, dtype=np.int64)
    amps = state.amps
    total = 0.0
    start = 0
    last_nonzero = 0
    for base in range(0, amps.size, _SAMPLE_CHUNK):
        block = amps[base : base + _SAMPLE_CHUNK]
        p = block.real * block.real + block.imag * block.imag
        csum = np.cumsum(p)
        block_mass = csum[-1]
        if block_mass > 0.0:
            nz = np.flatnonzero(p)
            last_nonzero = base + int(nz[-1])
        stop = int(np.searchsorted(u, total + block_mass, side="right"))
        if stop > start:
            idx = np.searchsorted(csum, u[start:stop] - total, side="left")
            out[start:stop] = base + np.minimum(idx, p.size - 1)
            start = stop
        total += block_mass
        if start >= k:
            break
    if start < k:
        # Float roundoff left a few uniforms >= the accumulated total.
        out[start:] = last_nonzero
    return SampleSet(out, k, seed)


def probabilities_of(state: StateVector, samples: SampleSet) -> np.ndarray:
    """Ideal probability of each sampled bitstring, order preserved."""
    bits = samples.bitstrings
    if bits.size and (bits.min() < 0 or bits.max() >= (1 << state.n)):
        raise ValueError(f"sample out of range for n={state.n}")
    vals = state.amps[bits]
    return vals.real * vals.real + vals.imag * vals.imag


_DUMP_MAGIC = b"SVEC"


def dump_state(state: StateVector, path) -> None:
    """Debug dump: 16-byte header (magic, n, reserved), then (re, im) doubles."""
    with open(path, "wb") as fh:
        fh.write(struct.pack("<4sI8x", _DUMP_MAGIC, state.n))
        fh.write(state.amps.astype("<c16", copy=False).tobytes())


def load_state(path) -> StateVector:
    with open(path, "rb") as fh:
        header = fh.read(16)
        if len(header) != 16 or header[:4] != _DUMP_MAGIC:
            raise ValueError(f"{path}: not a state dump")
        (n,) = struct.unpack("<I", header[4:8])
        amps = np.frombuffer(fh.read(), dtype="<c16").astype(np.complex128)
    if amps.size != 1 << n:
        raise ValueError(f"{path}: truncated dump ({amps.size} amplitudes for n={n})")
    return StateVector(n, amps)
