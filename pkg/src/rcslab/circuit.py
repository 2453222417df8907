"""Circuit intermediate representation: gate matrices, cycles, device layouts.

Bit convention, used by every module downstream: qubit q is bit q of a basis
state index (little-endian), so basis index 5 = 0b101 has qubits 0 and 2 in
|1>.  A two-qubit matrix for targets (t0, t1) is written in the basis
|t0 t1>, i.e. local index = 2*bit(t0) + bit(t1).

All types here are immutable after construction and safe to share across
threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Mapping

import numpy as np

UNITARITY_TOL = 1e-12

PATTERN_LETTERS = "ABCDEFGH"


class CapacityError(RuntimeError):
    """An operation would exceed the configured qubit cap."""


def _readonly(a) -> np.ndarray:
    a = np.array(a, dtype=np.complex128, order="C")
    a.setflags(write=False)
    return a


def _check_unitary(m: np.ndarray, what: str) -> None:
    d = m.shape[0]
    dev = np.abs(m.conj().T @ m - np.eye(d)).max()
    if dev > UNITARITY_TOL:
        raise ValueError(f"{what} is not unitary (max deviation {dev:.3e})")


PAULI_MATRICES = {
    "x": _readonly([[0, 1], [1, 0]]),
    "y": _readonly([[0, -1j], [1j, 0]]),
    "z": _readonly([[1, 0], [0, -1]]),
}

# (X+Y)/sqrt(2), an involution like the Paulis.
W_MATRIX = _readonly((PAULI_MATRICES["x"] + PAULI_MATRICES["y"]) / math.sqrt(2))


def _principal_sqrt_involution(p: np.ndarray) -> np.ndarray:
    # (1+i)/2 * (I - i*P) maps eigenvalue +1 -> 1 and -1 -> i, the principal
    # branch (phases in (-pi/2, pi/2]).
    return _readonly((1 + 1j) / 2 * (np.eye(2) - 1j * p))


_NAMED_1Q = {
    "sqrt_x": _principal_sqrt_involution(PAULI_MATRICES["x"]),
    "sqrt_y": _principal_sqrt_involution(PAULI_MATRICES["y"]),
    "sqrt_w": _principal_sqrt_involution(W_MATRIX),
    "pauli_x": PAULI_MATRICES["x"],
    "pauli_y": PAULI_MATRICES["y"],
    "pauli_z": PAULI_MATRICES["z"],
}


class GateKind:
    """A concrete unitary: a named gate, a parameterized fsim, or a raw matrix.

    Instances are immutable; generic kinds own a read-only copy of their
    matrix.  Equality is structural (name, parameters, matrix entries).
    """

    __slots__ = ("name", "params", "_matrix")

    def __init__(self, name: str, params: tuple = (), matrix=None):
        object.__setattr__(self, "name", name)
        object.__setattr__(self, "params", tuple(float(p) for p in params))
        object.__setattr__(self, "_matrix", matrix)

    def __setattr__(self, *_):
        raise AttributeError("GateKind is immutable")

    @property
    def num_qubits(self) -> int:
        if self.name in ("fsim", "generic_2q"):
            return 2
        return 1

    def __eq__(self, other):
        if not isinstance(other, GateKind):
            return NotImplemented
        if self.name != other.name or self.params != other.params:
            return False
        if self._matrix is None and other._matrix is None:
            return True
        if self._matrix is None or other._matrix is None:
            return False
        return np.array_equal(self._matrix, other._matrix)

    def __hash__(self):
        h = hash((self.name, self.params))
        if self._matrix is not None:
            h ^= hash(self._matrix.tobytes())
        return h

    def __repr__(self):
        if self.params:
            args = ", ".join(f"{p:g}" for p in self.params)
            return f"GateKind({self.name}({args}))"
        return f"GateKind({self.name})"


SQRT_X = GateKind("sqrt_x")
SQRT_Y = GateKind("sqrt_y")
SQRT_W = GateKind("sqrt_w")
PAULI_X = GateKind("pauli_x")
PAULI_Y = GateKind("pauli_y")
PAULI_Z = GateKind("pauli_z")


def fsim(theta: float, phi: float) -> GateKind:
    """Two-qubit fsim gate: swap angle theta, conditional phase phi."""
    return GateKind("fsim", (theta, phi))


def generic_1q(matrix) -> GateKind:
    """Wrap an explicit 2x2 unitary."""
    m = _readonly(matrix)
    if m.shape != (2, 2):
        raise ValueError(f"expected a 2x2 matrix, got {m.shape}")
    _check_unitary(m, "generic_1q matrix")
    return GateKind("generic_1q", (), m)


def generic_2q(matrix) -> GateKind:
    """Wrap an explicit 4x4 unitary (basis |t0 t1>, index 2*bit(t0)+bit(t1))."""
    m = _readonly(matrix)
    if m.shape != (4, 4):
        raise ValueError(f"expected a 4x4 matrix, got {m.shape}")
    _check_unitary(m, "generic_2q matrix")
    return GateKind("generic_2q", (), m)


_FSIM_CACHE: dict[tuple, np.ndarray] = {}


def gate_matrix(kind: GateKind) -> np.ndarray:
    """Defining unitary of a gate kind (read-only array)."""
    if kind.name in _NAMED_1Q:
        return _NAMED_1Q[kind.name]
    if kind.name == "fsim":
        m = _FSIM_CACHE.get(kind.params)
        if m is None:
            theta, phi = kind.params
            c, s = math.cos(theta), math.sin(theta)
            m = _readonly(
                [
                    [1, 0, 0, 0],
                    [0, c, -1j * s, 0],
                    [0, -1j * s, c, 0],
                    [0, 0, 0, np.exp(-1j * phi)],
                ]
            )
            _FSIM_CACHE[kind.params] = m
        return m
    if kind.name in ("generic_1q", "generic_2q"):
        return kind._matrix
    raise ValueError(f"unknown gate kind {kind.name!r}")


@dataclass(frozen=True)
class Gate:
    """A gate kind bound to an ordered tuple of target qubits."""

    kind: GateKind
    targets: tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "targets", tuple(int(t) for t in self.targets))
        if len(self.targets) != self.kind.num_qubits:
            raise ValueError(
                f"{self.kind.name} takes {self.kind.num_qubits} target(s), "
                f"got {len(self.targets)}"
            )
        if len(set(self.targets)) != len(self.targets):
            raise ValueError(f"duplicate targets {self.targets}")
        if any(t < 0 for t in self.targets):
            raise ValueError(f"negative qubit index in {self.targets}")


@dataclass(frozen=True)
class Cycle:
    """One layer of gates; no qubit may appear in two gates of a cycle."""

    gates: tuple[Gate, ...]

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        seen: set[int] = set()
        for g in self.gates:
            for t in g.targets:
                if t in seen:
                    raise ValueError(f"qubit {t} used twice within one cycle")
                seen.add(t)

    def __len__(self):
        return len(self.gates)


_META_DEFAULTS = {"m": None, "pattern": "", "seed": None, "label": ""}


@dataclass(frozen=True)
class Circuit:
    """An ordered list of cycles over n qubits, plus generation metadata.

    ``metadata`` carries at least the keys m (algorithm cycle count, when
    known), pattern, seed and label; note that for generated circuits each
    algorithm cycle expands to two layer-cycles here (1q layer + 2q layer).
    """

    n: int
    cycles: tuple[Cycle, ...]
    metadata: Mapping = None

    def __post_init__(self):
        object.__setattr__(self, "cycles", tuple(self.cycles))
        meta = dict(_META_DEFAULTS)
        if self.metadata:
            meta.update(self.metadata)
        object.__setattr__(self, "metadata", MappingProxyType(meta))
        if self.n < 0:
            raise ValueError("negative qubit count")
        for cyc in self.cycles:
            for g in cyc.gates:
                if max(g.targets) >= self.n:
                    raise ValueError(
                        f"gate on qubit {max(g.targets)} out of range for n={self.n}"
                    )

    @property
    def num_gates(self) -> int:
        """Total gate instances, 1q and 2q counted alike."""
        return sum(len(c) for c in self.cycles)

    def all_gates(self) -> Iterable[Gate]:
        for cyc in self.cycles:
            yield from cyc.gates


def circuit_unitary(circuit: Circuit, cap: int = 10) -> np.ndarray:
    """Full 2^n x 2^n unitary of the circuit (test oracle; n <= cap only).

    Computed by contracting each gate into the row index of an identity
    matrix, cycle by cycle in application order.
    """
    if circuit.n > cap:
        raise CapacityError(f"circuit_unitary limited to {cap} qubits, got {circuit.n}")
    n = circuit.n
    dim = 1 << n
    u = np.eye(dim, dtype=np.complex128)
    t = u.reshape((2,) * n + (dim,))
    for cyc in circuit.cycles:
        for g in cyc.gates:
            t = _apply_to_tensor(t, gate_matrix(g.kind), g.targets, n)
    return t.reshape(dim, dim)


def _apply_to_tensor(tensor, mat, targets, n):
    # Row-index bit q lives on tensor axis (n-1-q).
    k = len(targets)
    axes = [n - 1 - t for t in targets]
    mt = mat.reshape((2,) * (2 * k))
    out = np.tensordot(mt, tensor, axes=(list(range(k, 2 * k)), axes))
    return np.moveaxis(out, list(range(k)), axes)


@dataclass(frozen=True)
class DeviceLayout:
    """Qubit coupling graph with edges labeled by pattern letters A-H.

    Within one letter the edges must form a matching, so that a pattern
    layer is a valid Cycle.
    """

    n: int
    edges: tuple[tuple[int, int, str], ...]
    coordinates: tuple[tuple[int, int], ...] | None = None

    def __post_init__(self):
        object.__setattr__(
            self, "edges", tuple((int(a), int(b), str(c)) for a, b, c in self.edges)
        )
        used: dict[str, set[int]] = {}
        for a, b, letter in self.edges:
            if not (0 <= a < self.n and 0 <= b < self.n) or a == b:
                raise ValueError(f"bad edge ({a}, {b}) for n={self.n}")
            if letter not in PATTERN_LETTERS:
                raise ValueError(f"pattern letter {letter!r} not in A..H")
            taken = used.setdefault(letter, set())
            if a in taken or b in taken:
                raise ValueError(f"pattern {letter} is not a matching at edge ({a}, {b})")
            taken.update((a, b))
        if self.coordinates is not None:
            coords = tuple((int(r), int(c)) for r, c in self.coordinates)
            if len(coords) != self.n:
                raise ValueError("coordinates must cover every qubit")
            object.__setattr__(self, "coordinates", coords)

    @property
    def letters(self) -> tuple[str, ...]:
        return tuple(sorted({e[2] for e in self.edges}))

    def edges_for(self, letter: str) -> tuple[tuple[int, int], ...]:
        return tuple((a, b) for a, b, c in self.edges if c == letter)


def grid_layout(rows: int, cols: int, scheme: str = "EFGH") -> DeviceLayout:
    """Rectangular grid whose nearest-neighbor edges are four-colored.

    The scheme's first two letters split the horizontal edges by the parity
    of (row + col) of the left endpoint; the last two letters do the same
    for vertical edges.  Each letter's set is a matching by construction.
    """
    if rows < 1 or cols < 1 or rows * cols < 2:
        raise ValueError(f"degenerate grid {rows}x{cols}")
    if len(scheme) != 4 or len(set(scheme)) != 4 or any(c not in PATTERN_LETTERS for c in scheme):
        raise ValueError(f"scheme must be 4 distinct letters from A..H, got {scheme!r}")

    def q(r, c):
        return r * cols + c

    edges = []
    for r in range(rows):
        for c in range(cols - 1):
            letter = scheme[(r + c) % 2]
            edges.append((q(r, c), q(r, c + 1), letter))
    for r in range(rows - 1):
        for c in range(cols):
            letter = scheme[2 + (r + c) % 2]
            edges.append((q(r, c), q(r + 1, c), letter))
    coords = tuple((r, c) for r in range(rows) for c in range(cols))
    return DeviceLayout(rows * cols, tuple(edges), coords)


def parse_layout(text: str) -> DeviceLayout:
    """Parse the line-oriented layout format.

    Header ``layout n=<int>``, then one edge per line ``<q1> <q2> <letter>``;
    ``#`` starts a comment.
    """
    n = None
    edges = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if n is None:
            parts = line.split()
            if len(parts) != 2 or parts[0] != "layout" or not parts[1].startswith("n="):
                raise ValueError(f"line {lineno}: expected header 'layout n=<int>'")
            try:
                n = int(parts[1][2:])
            except ValueError:
                raise ValueError(f"line {lineno}: bad qubit count in header") from None
            continue
        parts = line.split()
        if len(parts) != 3:
            raise ValueError(f"line {lineno}: expected '<q1> <q2> <letter>'")
        try:
            a, b = int(parts[0]), int(parts[1])
        except ValueError:
            raise ValueError(f"line {lineno}: bad qubit index") from None
        edges.append((a, b, parts[2]))
    if n is None:
        raise ValueError("missing 'layout n=<int>' header")
    return DeviceLayout(n, tuple(edges))


def format_layout(layout: DeviceLayout) -> str:
    lines = [f"layout n={layout.n}"]
    lines += [f"{a} {b} {c}" for a, b, c in layout.edges]
    return "\n".join(lines) + "\n"
