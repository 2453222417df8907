"""Random circuit generation: alternating 1q layers and patterned fsim layers.

Each algorithm cycle j contributes two layer-cycles to the circuit: first a
layer of single-qubit gates drawn uniformly from {sqrt_x, sqrt_y, sqrt_w} on
every qubit, then fsim gates on every edge carrying the letter
schedule[j mod len(schedule)].

Gate choices come from Philox streams keyed by the config seed with the
counter set to (layer, qubit), so editing the layout or qubit count never
reshuffles the choices of unrelated (layer, qubit) slots.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .circuit import Circuit, Cycle, DeviceLayout, Gate, GateKind, SQRT_W, SQRT_X, SQRT_Y, fsim

ONE_QUBIT_KINDS = (SQRT_X, SQRT_Y, SQRT_W)

DEFAULT_FSIM_THETA = math.pi / 2
DEFAULT_FSIM_PHI = math.pi / 6


@dataclass(frozen=True)
class RcsConfig:
    layout: DeviceLayout
    m: int
    schedule: str = "EFGH"
    seed: int = 0
    fsim_theta: float = DEFAULT_FSIM_THETA
    fsim_phi: float = DEFAULT_FSIM_PHI
    no_repeat_rule: bool = False

    def __post_init__(self):
        if self.m < 0:
            raise ValueError(f"cycle count must be >= 0, got {self.m}")
        if not self.schedule:
            raise ValueError("empty schedule")
        missing = sorted(set(self.schedule) - set(self.layout.letters))
        if missing:
            raise ValueError(
                f"schedule letters {missing} have no edges in the layout "
                f"(available: {list(self.layout.letters)})"
            )

    @property
    def label(self) -> str:
        return (
            f"rcs_n{self.layout.n}_m{self.m}_{self.schedule}_s{self.seed}"
        )


def _draw_1q_kind(seed: int, layer: int, qubit: int, exclude) -> GateKind:
    rng = np.random.Generator(np.random.Philox(key=seed, counter=[0, 0, layer, qubit]))
    if exclude is None:
        return ONE_QUBIT_KINDS[rng.integers(0, 3)]
    choices = [k for k in ONE_QUBIT_KINDS if k != exclude]
    return choices[rng.integers(0, 2)]


def generate(config: RcsConfig) -> Circuit:
    """Deterministically generate the configured random circuit."""
    n = config.layout.n
    prev = [None] * n
    cycles = []
    for j in range(config.m):
        ones = []
        for q in range(n):
            exclude = prev[q] if config.no_repeat_rule else None
            kind = _draw_1q_kind(config.seed, j, q, exclude)
            prev[q] = kind
            ones.append(Gate(kind, (q,)))
        cycles.append(Cycle(tuple(ones)))
        letter = config.schedule[j % len(config.schedule)]
        twos = tuple(
            Gate(fsim(config.fsim_theta, config.fsim_phi), (a, b))
            for a, b in sorted(config.layout.edges_for(letter))
        )
        cycles.append(Cycle(twos))
    meta = {
        "m": config.m,
        "pattern": config.schedule,
        "seed": config.seed,
        "label": config.label,
    }
    return Circuit(n, tuple(cycles), meta)


def gate_count(config: RcsConfig) -> int:
    """Total gates of generate(config) without generating it."""
    n = config.layout.n
    per_letter = {c: len(config.layout.edges_for(c)) for c in set(config.schedule)}
    two_q = sum(per_letter[config.schedule[j % len(config.schedule)]] for j in range(config.m))
    return config.m * n + two_q
