"""CNOT reduction for Ry/CX state-preparation circuits using don't-care conditions."""
from .circuit import CX, MCRy, Circuit, Ry, X, cleanup, count_cnots, count_single_qubit, multiplexed_ry
from .frontend import synthesize_initial
from .pipeline import OptimizeConfig, Report, VerificationError, optimize, run_benchmark, verify
from .qasm import QasmError, from_qasm, to_qasm
from .simulator import SparseState, ground_state, simulate, states_equal, states_equal_up_to_sign
from .states import StateSpec

__version__ = "0.1.0"

__all__ = [
    "CX", "MCRy", "Circuit", "Ry", "X", "cleanup", "count_cnots", "count_single_qubit", "multiplexed_ry",
    "synthesize_initial", "OptimizeConfig", "Report", "VerificationError", "optimize", "run_benchmark",
    "verify", "QasmError", "from_qasm", "to_qasm", "SparseState", "ground_state", "simulate",
    "states_equal", "states_equal_up_to_sign", "StateSpec",
]
