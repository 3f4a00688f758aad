"""Eigenvalue and eigenspace anholonomy in recursively built N-qubit circuits."""
from .circuit import (
    CircuitSpec,
    OutOfRange,
    anholonomic_family,
    build_circuit,
    controlled_y,
    d_op,
    ket_y,
    phase_shift,
)
from .holonomy import (
    GaugeConnection,
    connection_analytic,
    connection_fd,
    gamma_mp_from_holonomy,
    holonomy_analytic,
    holonomy_numeric,
)
from .qmatrix import EigenSystem, NoConvergence, NotHermitian, NotUnitary, eig_unitary, expm_skew, kron
from .spectrum import (
    Label,
    PermutationRecord,
    eigenangle,
    eigenvector,
    permutation_record,
    predict_gamma_mp,
    sigma_phase,
    successor,
)
from .tracker import (
    AmbiguousMatch,
    CycleResult,
    DegeneracyEncountered,
    NonBijective,
    SpectralFlow,
    extract_cycle,
    negative_control,
    sweep,
)

__version__ = "0.1.0"
