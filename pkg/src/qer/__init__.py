"""Optimum quantum error recovery by semidefinite programming."""

from .channel import (
    ChoiOperator,
    DensityOperator,
    KrausChannel,
    amplitude_damping,
    apply,
    choi_to_kraus,
    compose_choi,
    is_cptp,
    kraus_to_choi,
    tensor_power,
)
from .codes import CodeIsometry, StabilizerCode, five_qubit_code, leung4_code, logical_states, spreading_transform
from .fidelity import data_matrix, entanglement_fidelity, state_fidelity
from .recovery import optimal_recovery, stabilizer_qec_recovery
from .sdp import SdpProblem, SdpSolution, solve

__version__ = "0.1.0"

__all__ = [
    "ChoiOperator", "DensityOperator", "KrausChannel", "amplitude_damping", "apply",
    "choi_to_kraus", "compose_choi", "is_cptp", "kraus_to_choi", "tensor_power",
    "CodeIsometry", "StabilizerCode", "five_qubit_code", "leung4_code", "logical_states",
    "spreading_transform", "data_matrix", "entanglement_fidelity", "state_fidelity",
    "optimal_recovery", "stabilizer_qec_recovery", "SdpProblem", "SdpSolution", "solve",
]
