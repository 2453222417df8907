"""Decompose explicit 1q/2q unitaries into U(theta,phi,lambda) and CX.

Used by the QASM emitter, which may only write those two primitives.
Global phase is dropped throughout; callers compare results phase-aligned.

The two-qubit path runs a cosine-sine decomposition (LAPACK via scipy) into
two multiplexed single-qubit operators around a multiplexed Ry, and expands
each multiplexor with two CX gates.  Not CX-optimal, but numerically robust
for any input.
"""

from __future__ import annotations

import cmath
import math

import numpy as np
from scipy.linalg import cossin, schur


def zyz_angles(m: np.ndarray) -> tuple[float, float, float]:
    """Angles with U(theta, phi, lam) proportional to the given 2x2 unitary."""
    det = m[0, 0] * m[1, 1] - m[0, 1] * m[1, 0]
    su = m / cmath.sqrt(det)
    a, b = su[0, 0], su[1, 0]
    theta = 2.0 * math.atan2(abs(b), abs(a))
    if abs(b) < 1e-12:
        # Diagonal: phi + lam is fixed, split is arbitrary.
        phi = 2.0 * cmath.phase(su[1, 1])
        lam = 0.0
    elif abs(a) < 1e-12:
        # Anti-diagonal: phi - lam is fixed.
        phi = 2.0 * cmath.phase(b)
        lam = 0.0
    else:
        # su = [[e^{-i(phi+lam)/2} c, ...], [e^{i(phi-lam)/2} s, e^{i(phi+lam)/2} c]]
        sum_ = 2.0 * cmath.phase(su[1, 1])
        diff = 2.0 * cmath.phase(su[1, 0])
        phi = (sum_ + diff) / 2.0
        lam = (sum_ - diff) / 2.0
    return theta, phi, lam


def _u(theta: float, phi: float, lam: float) -> np.ndarray:
    ct, st = math.cos(theta / 2.0), math.sin(theta / 2.0)
    return np.array(
        [
            [ct, -cmath.exp(1j * lam) * st],
            [cmath.exp(1j * phi) * st, cmath.exp(1j * (phi + lam)) * ct],
        ],
        dtype=np.complex128,
    )


# An op is ("U", (qubit,), (theta, phi, lam)) or ("CX", (control, target), ()).
Op = tuple


def _ops_1q(m: np.ndarray, qubit: int) -> list[Op]:
    theta, phi, lam = zyz_angles(m)
    return [("U", (qubit,), (theta, phi, lam))]


def _ops_rz(angle: float, qubit: int) -> list[Op]:
    if abs(angle) < 1e-14:
        return []
    return [("U", (qubit,), (0.0, 0.0, angle))]


def _ops_ry(angle: float, qubit: int) -> list[Op]:
    if abs(angle) < 1e-14:
        return []
    return [("U", (qubit,), (angle, 0.0, 0.0))]


def _multiplexed_1q(a: np.ndarray, b: np.ndarray, select: int, target: int) -> list[Op]:
    """Ops applying ``a`` on ``target`` when qubit ``select`` is |0>, else ``b``.

    Diagonalizes a b^dag = v diag(e^{i d}) v^dag, so that
    a = v D w and b = v D^dag w with D = diag(e^{i d / 2}).
    """
    m = a @ b.conj().T
    t, v = schur(m, output="complex")
    d = np.angle(np.diagonal(t))
    w = np.diag(np.exp(-1j * d / 2.0)) @ v.conj().T @ a
    mu = (d[0] + d[1]) / 4.0
    nu = (d[1] - d[0]) / 4.0
    ops = _ops_1q(w, target)
    ops += [("CX", (select, target), ())]
    ops += _ops_rz(2.0 * nu, target)
    ops += [("CX", (select, target), ())]
    ops += _ops_rz(-2.0 * mu, select)
    ops += _ops_1q(v, target)
    return ops


def _multiplexed_ry(a0: float, a1: float, select: int, target: int) -> list[Op]:
    """Ry(a0) on target when select is |0>, Ry(a1) when |1>."""
    ops: list[Op] = [("CX", (select, target), ())]
    ops += _ops_ry((a0 - a1) / 2.0, target)
    ops += [("CX", (select, target), ())]
    ops += _ops_ry((a0 + a1) / 2.0, target)
    return ops


def two_qubit_to_ops(m: np.ndarray) -> list[Op]:
    """U/CX sequence (application order) equal to ``m`` up to global phase.

    ``m`` is in the |t0 t1> basis of circuit.py: local qubit 0 is the high
    bit of the 4x4 index.
    """
    (u1, u2), theta, (v1h, v2h) = cossin(m, p=2, q=2, separate=True)
    ops: list[Op] = []
    # m = blockdiag(u1, u2) @ middle(theta) @ blockdiag(v1h, v2h); apply right first.
    ops += _multiplexed_1q(v1h, v2h, select=0, target=1)
    ops += _multiplexed_ry(2.0 * theta[0], 2.0 * theta[1], select=1, target=0)
    ops += _multiplexed_1q(u1, u2, select=0, target=1)
    return ops


def ops_to_matrix(ops: list[Op]) -> np.ndarray:
    """Dense 4x4 product of an op list, for verification."""
    cx = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
    swap = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)
    total = np.eye(4, dtype=np.complex128)
    for op, qubits, params in ops:
        if op == "CX":
            g = cx if qubits == (0, 1) else swap @ cx @ swap
        else:
            u = _u(*params)
            g = np.kron(u, np.eye(2)) if qubits[0] == 0 else np.kron(np.eye(2), u)
        total = g @ total
    return total


def phase_aligned_distance(a: np.ndarray, b: np.ndarray) -> float:
    """max |a - e^{i phase} b| with the phase chosen from the largest entry."""
    idx = np.unravel_index(np.argmax(np.abs(b)), b.shape)
    if abs(b[idx]) < 1e-300:
        return float(np.abs(a - b).max())
    phase = a[idx] / b[idx]
    mag = abs(phase)
    if mag < 1e-300:
        return float(np.abs(a - b).max())
    phase /= mag
    return float(np.abs(a - phase * b).max())
