"""rcslab: random-circuit-sampling simulation and XEB verification toolkit.

A dense state-vector simulator plus the surrounding experiment machinery:
random circuit generation on patterned coupler grids, OpenQASM 2.0
ingestion/emission, bitstring sampling, linear cross-entropy benchmarking,
Porter-Thomas goodness-of-fit, Pauli error injection, and a benchmark
harness that persists CSV/JSON reports and figures.
"""

from .circuit import (
    CapacityError,
    Circuit,
    Cycle,
    DeviceLayout,
    Gate,
    GateKind,
    PAULI_X,
    PAULI_Y,
    PAULI_Z,
    SQRT_W,
    SQRT_X,
    SQRT_Y,
    circuit_unitary,
    format_layout,
    fsim,
    gate_matrix,
    generic_1q,
    generic_2q,
    grid_layout,
    parse_layout,
)
from .engine import (
    DEFAULT_MAX_QUBITS,
    ErrorModel,
    RunLog,
    SampleSet,
    StateVector,
    apply_gate,
    dump_state,
    init_state,
    load_state,
    memory_required,
    probabilities_of,
    probability,
    run_circuit,
    sample,
)
from .qasm import (
    Diagnostic,
    ParseResult,
    QasmError,
    emit_qasm,
    lower_to_circuit,
    parse_qasm,
)
from .rcs import RcsConfig, gate_count, generate
from .xeb import (
    ExperimentPlan,
    PtFitReport,
    XebReport,
    cross_entropy,
    error_injection_xeb,
    fidelity_prediction,
    linear_xeb,
    porter_thomas_fit,
    porter_thomas_pdf,
    shannon_entropy,
    xeb_over_plan,
)

__version__ = "0.1.0"
