"""Leading-order entanglement harvesting on the 1+1D Einstein cylinder, zero mode included.

Two pointlike Unruh-DeWitt detectors (qubits or harmonic oscillators) with
Gaussian switching couple to a massless scalar field on a circle of
circumference L.  The field's zero mode is kept as a separate Gaussian
quantum-mechanical degree of freedom so its effect can be switched on and off.
"""
from .assembly import (JointState, MatrixElements, Part, assemble_elements,
                       assemble_oscillator_state, assemble_qubit_state, assemble_state,
                       negativity_exact, negativity_leading_order)
from .config import (Coupling, DetectorKind, DetectorParams, FieldConfig, HarvestConfig,
                     Separation, ZeroModeState, symmetric_config, validate)
from .errors import ConfigError, ZMHarvestError
from .sweep import SweepSpec, run_point, run_sweep

__version__ = "0.1.0"

__all__ = [
    "Coupling", "DetectorKind", "DetectorParams", "FieldConfig", "HarvestConfig", "Separation",
    "ZeroModeState", "symmetric_config", "validate", "Part", "MatrixElements", "JointState",
    "assemble_elements", "assemble_qubit_state", "assemble_oscillator_state", "assemble_state",
    "negativity_leading_order", "negativity_exact", "SweepSpec", "run_point", "run_sweep",
    "ConfigError", "ZMHarvestError",
]
