"""Fock-space simulation of linear-optics quantum gates, teleportation and
the Z-measurement code."""
from .fock import (CapacityError, FockState, basis_dimension, enumerate_basis, fidelity,
                   fock_basis_state, inner_product, tensor, vacuum)
from .optics import (BeamSplitter, DetectorSpec, MeasurementOutcome, OpticalCircuit,
                     PhaseShifter, PhotonNumberViolation, apply_elements, apply_mode_unitary,
                     apply_mode_unitary_permanent, measure_modes, post_select, run_circuit)
from .reck import DecompositionPlan, compile_to_elements, decompose, reconstruct
from .gates import (DualRailQubit, GateResult, csign_klm, csign_knill_2_27, encode_dual_rail,
                    ns_gate)
from .teleport import success_probability, teleport_rail, teleported_csign

__version__ = "0.1.0"

__all__ = [
    "CapacityError", "FockState", "basis_dimension", "enumerate_basis", "fidelity",
    "fock_basis_state", "inner_product", "tensor", "vacuum",
    "BeamSplitter", "DetectorSpec", "MeasurementOutcome", "OpticalCircuit", "PhaseShifter",
    "PhotonNumberViolation", "apply_elements", "apply_mode_unitary",
    "apply_mode_unitary_permanent", "measure_modes", "post_select", "run_circuit",
    "DecompositionPlan", "compile_to_elements", "decompose", "reconstruct",
    "DualRailQubit", "GateResult", "csign_klm", "csign_knill_2_27", "encode_dual_rail", "ns_gate",
    "success_probability", "teleport_rail", "teleported_csign",
]
