"""Lindblad dynamics of dissipative interacting qubits.

Steady states, correlation blockade, quantum-synchronization measures and
the spin-1 counterexample, with a compiled integrator core and a numpy
fallback.
"""

__version__ = "0.1.0"

from .kernels import BACKEND
from .liouville import (
    EvolutionTrace,
    IntegrationError,
    Liouvillian,
    SteadyStateError,
    SteadyStateResult,
    algebra_closure_dim,
    apply_liouvillian,
    build_superoperator,
    evolve,
    nogo_residual,
    operator_algebra_dim,
    steady_state,
)
from .model import (
    InteractionTerm,
    QubitParams,
    StateInit,
    SystemSpec,
    build_hamiltonian,
    ghz_state,
    initial_state,
    magnetization,
    product_steady_state,
    random_pure_state,
    rates_for_magnetization,
    xxz_spec,
)
from .observables import (
    CorrelationReport,
    connected_correlation,
    correlation_sums,
    expectation,
    fidelity,
    max_connected_correlation,
)
from .operators import embed, herm_sqrt, kron, partial_trace, pauli, spin1_op
from .spin1 import Spin1Spec, spin1_commutator, spin1_limit_cycle, spin1_steady_state
from .sync import (
    SyncReport,
    TwoQubitAnalyticParams,
    flip_flop,
    husimi_q_pair,
    husimi_q_single,
    s_function_single,
    s_rel_analytic,
    s_rel_quadrature,
    sync_report,
    two_qubit_analytic,
)

__all__ = [
    "BACKEND",
    "CorrelationReport",
    "EvolutionTrace",
    "IntegrationError",
    "InteractionTerm",
    "Liouvillian",
    "QubitParams",
    "Spin1Spec",
    "StateInit",
    "SteadyStateError",
    "SteadyStateResult",
    "SyncReport",
    "SystemSpec",
    "TwoQubitAnalyticParams",
    "algebra_closure_dim",
    "apply_liouvillian",
    "build_hamiltonian",
    "build_superoperator",
    "connected_correlation",
    "correlation_sums",
    "embed",
    "evolve",
    "expectation",
    "fidelity",
    "flip_flop",
    "ghz_state",
    "herm_sqrt",
    "husimi_q_pair",
    "husimi_q_single",
    "initial_state",
    "kron",
    "magnetization",
    "max_connected_correlation",
    "nogo_residual",
    "operator_algebra_dim",
    "partial_trace",
    "pauli",
    "product_steady_state",
    "random_pure_state",
    "rates_for_magnetization",
    "s_function_single",
    "s_rel_analytic",
    "s_rel_quadrature",
    "spin1_commutator",
    "spin1_limit_cycle",
    "spin1_op",
    "spin1_steady_state",
    "steady_state",
    "sync_report",
    "two_qubit_analytic",
    "xxz_spec",
]
