"""Independent oracles shared by the test modules.

These deliberately avoid the library's own linear-algebra paths: gates are
embedded by explicit index arithmetic and multiplied as dense matrices.
"""

import numpy as np

from rcslab.circuit import gate_matrix


def embed_gate(mat: np.ndarray, targets, n: int) -> np.ndarray:
    """Embed a 1q/2q matrix on the given target qubits of an n-qubit space.

    Local index convention mirrors the library: targets[0] is the high bit
    of the local index.
    """
    dim = 1 << n
    kloc = len(targets)
    dloc = 1 << kloc
    full = np.zeros((dim, dim), dtype=complex)
    for c in range(dim):
        lc = 0
        for j, t in enumerate(targets):
            lc |= ((c >> t) & 1) << (kloc - 1 - j)
        for lr in range(dloc):
            r = c
            for j, t in enumerate(targets):
                bit = (lr >> (kloc - 1 - j)) & 1
                r = (r & ~(1 << t)) | (bit << t)
            full[r, c] = mat[lr, lc]
    return full


def oracle_unitary(circuit) -> np.ndarray:
    """Dense circuit unitary by per-gate embedding and matrix products."""
    u = np.eye(1 << circuit.n, dtype=complex)
    for cyc in circuit.cycles:
        for g in cyc.gates:
            u = embed_gate(gate_matrix(g.kind), g.targets, circuit.n) @ u
    return u


def phase_dist(a: np.ndarray, b: np.ndarray) -> float:
    """max |a - e^{i phi} b| with the L2-optimal global phase phi."""
    tr = np.vdot(b.ravel(), a.ravel())
    if abs(tr) < 1e-300:
        return float(np.abs(a - b).max())
    phase = tr / abs(tr)
    return float(np.abs(a - phase * b).max())


def random_state_vector(n: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    v = rng.normal(size=1 << n) + 1j * rng.normal(size=1 << n)
    return v / np.linalg.norm(v)


def random_unitary(dim: int, rng) -> np.ndarray:
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))
