import math

import numpy as np
import pytest

from rcslab.circuit import (
    CapacityError,
    Circuit,
    Cycle,
    DeviceLayout,
    Gate,
    PAULI_MATRICES,
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    SQRT_W,
    SQRT_X,
    SQRT_Y,
    W_MATRIX,
    circuit_unitary,
    format_layout,
    fsim,
    gate_matrix,
    generic_1q,
    generic_2q,
    grid_layout,
    parse_layout,
)
from rcslab.rcs import RcsConfig, generate

from helpers import oracle_unitary, random_unitary

ALL_NAMED = [SQRT_X, SQRT_Y, SQRT_W, PAULI_X, PAULI_Y, PAULI_Z]


@pytest.mark.parametrize("kind", ALL_NAMED + [fsim(0.3, 1.1), fsim(math.pi / 2, math.pi / 6)])
def test_every_kind_is_unitary(kind):
    m = gate_matrix(kind)
    dev = np.abs(m.conj().T @ m - np.eye(m.shape[0])).max()
    assert dev <= 1e-12


@pytest.mark.parametrize(
    "root,target",
    [
        (SQRT_X, PAULI_MATRICES["x"]),
        (SQRT_Y, PAULI_MATRICES["y"]),
        (SQRT_W, W_MATRIX),
    ],
)
def test_square_roots_square_to_their_axes(root, target):
    m = gate_matrix(root)
    assert np.abs(m @ m - target).max() <= 1e-12


def test_w_axis_matrix():
    expect = np.array([[0, 1 - 1j], [1 + 1j, 0]]) / math.sqrt(2)
    assert np.abs(W_MATRIX - expect).max() <= 1e-12
    m = gate_matrix(SQRT_W)
    assert np.abs(m @ m - expect).max() <= 1e-12


@pytest.mark.parametrize("kind", [SQRT_X, SQRT_Y, SQRT_W])
def test_principal_branch_eigenphases(kind):
    phases = np.angle(np.linalg.eigvals(gate_matrix(kind)))
    assert np.all(phases > -math.pi / 2 - 1e-12)
    assert np.all(phases <= math.pi / 2 + 1e-12)


def test_fsim_zero_angles_is_identity():
    assert np.abs(gate_matrix(fsim(0.0, 0.0)) - np.eye(4)).max() <= 1e-12


def test_fsim_matrix_entries():
    theta, phi = 0.7, -0.4
    m = gate_matrix(fsim(theta, phi))
    assert m[0, 0] == 1.0
    assert abs(m[1, 1] - math.cos(theta)) <= 1e-15
    assert abs(m[1, 2] - (-1j * math.sin(theta))) <= 1e-15
    assert abs(m[2, 1] - (-1j * math.sin(theta))) <= 1e-15
    assert abs(m[3, 3] - np.exp(-1j * phi)) <= 1e-15


def test_generic_requires_unitary():
    with pytest.raises(ValueError):
        generic_1q([[1, 0], [0, 2]])
    with pytest.raises(ValueError):
        generic_2q(np.eye(4) * 0.5)
    with pytest.raises(ValueError):
        generic_1q(np.eye(4))  # wrong shape


def test_gate_validation():
    with pytest.raises(ValueError):
        Gate(SQRT_X, (0, 1))  # wrong arity
    with pytest.raises(ValueError):
        Gate(fsim(0.1, 0.2), (3, 3))  # duplicate targets
    with pytest.raises(ValueError):
        Gate(SQRT_X, (-1,))


def test_cycle_rejects_qubit_reuse():
    with pytest.raises(ValueError):
        Cycle((Gate(SQRT_X, (0,)), Gate(SQRT_Y, (0,))))
    with pytest.raises(ValueError):
        Cycle((Gate(fsim(0.1, 0.2), (0, 1)), Gate(SQRT_X, (1,))))
    # disjoint targets are fine
    Cycle((Gate(fsim(0.1, 0.2), (0, 1)), Gate(SQRT_X, (2,))))


def test_circuit_validates_qubit_range():
    with pytest.raises(ValueError):
        Circuit(1, (Cycle((Gate(SQRT_X, (1,)),)),))
    c = Circuit(2, (Cycle((Gate(SQRT_X, (1,)),)),))
    assert c.num_gates == 1


def test_circuit_unitary_empty():
    c = Circuit(2, ())
    assert np.abs(circuit_unitary(c) - np.eye(4)).max() == 0.0


def test_circuit_unitary_sqrt_x_twice_is_x_on_qubit0():
    cycles = (Cycle((Gate(SQRT_X, (0,)),)), Cycle((Gate(SQRT_X, (0,)),)))
    u = circuit_unitary(Circuit(2, cycles))
    # little-endian: qubit 0 is the low factor
    expect = np.kron(np.eye(2), PAULI_MATRICES["x"])
    assert np.abs(u - expect).max() <= 1e-12


def test_circuit_unitary_is_unitary_for_generated_circuit():
    c = generate(RcsConfig(grid_layout(2, 2, "EFGH"), m=4, seed=3))
    u = circuit_unitary(c)
    assert np.abs(u.conj().T @ u - np.eye(1 << c.n)).max() <= 1e-10


def test_circuit_unitary_cap():
    with pytest.raises(CapacityError):
        circuit_unitary(Circuit(11, ()))
    circuit_unitary(Circuit(11, ()), cap=11)


def test_circuit_unitary_matches_kron_oracle():
    rng = np.random.default_rng(7)
    for n in (2, 3, 4, 5, 6):
        # a 1-row grid only has horizontal letters; schedule what exists
        lay = grid_layout(1, n, "EFGH")
        cfg = RcsConfig(lay, m=2, schedule="".join(lay.letters), seed=int(n))
        circ = generate(cfg)
        # splice in explicit generic gates for coverage
        extra = Cycle(
            (
                Gate(generic_1q(random_unitary(2, rng)), (0,)),
                Gate(generic_2q(random_unitary(4, rng)), (1, n - 1) if n > 2 else (1, 0)),
            )
            if n > 2
            else (Gate(generic_1q(random_unitary(2, rng)), (0,)),)
        )
        circ = Circuit(n, circ.cycles + (extra,), circ.metadata)
        assert np.abs(circuit_unitary(circ) - oracle_unitary(circ)).max() <= 1e-9


def test_gate_kind_equality_and_hash():
    assert fsim(0.1, 0.2) == fsim(0.1, 0.2)
    assert fsim(0.1, 0.2) != fsim(0.1, 0.3)
    assert SQRT_X == SQRT_X
    assert SQRT_X != SQRT_Y
    u = np.eye(2)
    assert generic_1q(u) == generic_1q(u)
    assert len({fsim(0.1, 0.2), fsim(0.1, 0.2), SQRT_X}) == 2


# ---------------------------------------------------------------------------
# Layouts


def test_grid_1x2_single_edge():
    lay = grid_layout(1, 2, "EFGH")
    assert lay.n == 2
    assert lay.edges == ((0, 1, "E"),)
    assert lay.letters == ("E",)
    for letter in "FGH":
        assert lay.edges_for(letter) == ()


def test_grid_2x2_partition():
    lay = grid_layout(2, 2, "EFGH")
    assert len(lay.edges) == 4
    per = {c: lay.edges_for(c) for c in "EFGH"}
    assert all(len(v) == 1 for v in per.values())
    union = {e for v in per.values() for e in v}
    assert union == {(0, 1), (2, 3), (0, 2), (1, 3)}


@pytest.mark.parametrize("scheme", ["EFGH", "ABCD"])
def test_grid_4x4_letters_form_valid_cycles(scheme):
    lay = grid_layout(4, 4, scheme)
    assert len(lay.edges) == 24  # 4*3 horizontal rows + 3*4 vertical
    for letter in scheme:
        edges = lay.edges_for(letter)
        assert edges
        # a letter layer must be a valid cycle: Cycle() itself asserts this
        Cycle(tuple(Gate(fsim(0.5, 0.2), e) for e in edges))
    assert sum(len(lay.edges_for(c)) for c in scheme) == 24


def test_grid_rejects_degenerate_and_bad_scheme():
    with pytest.raises(ValueError):
        grid_layout(1, 1, "EFGH")
    with pytest.raises(ValueError):
        grid_layout(2, 2, "EEFF")
    with pytest.raises(ValueError):
        grid_layout(2, 2, "EFGX")


def test_device_layout_rejects_non_matching():
    with pytest.raises(ValueError):
        DeviceLayout(3, ((0, 1, "A"), (1, 2, "A")))
    DeviceLayout(3, ((0, 1, "A"), (1, 2, "B")))
    with pytest.raises(ValueError):
        DeviceLayout(2, ((0, 2, "A"),))
    with pytest.raises(ValueError):
        DeviceLayout(2, ((0, 0, "A"),))


def test_layout_file_round_trip():
    lay = grid_layout(3, 4, "ABCD")
    again = parse_layout(format_layout(lay))
    assert again.n == lay.n
    assert set(again.edges) == set(lay.edges)


def test_layout_parse_errors():
    with pytest.raises(ValueError, match="header"):
        parse_layout("0 1 A\n")
    with pytest.raises(ValueError, match="line 3"):
        parse_layout("layout n=4\n0 1 A\n0 1\n")
    with pytest.raises(ValueError, match="line 2"):
        parse_layout("layout n=4\nx y A\n")
    lay = parse_layout("# comment\nlayout n=2\n0 1 E # trailing\n")
    assert lay.edges == ((0, 1, "E"),)
