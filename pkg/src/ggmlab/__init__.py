"""Genuine multimode entanglement of continuous-variable pure states.

Gaussian states are handled exactly through the symplectic spectra of their
reduced covariance matrices; photon-added and photon-subtracted states go
through truncated Fock-space linear algebra.
"""

from ._backend import BACKEND
from .bipartition import GgmResult, ModeBipartition, canonical_bipartitions
from .canonical import ggm_fock, max_eigenvalue_rdm, schmidt_spectrum
from .errors import (
    CapacityError,
    DimensionError,
    EmptyStateError,
    GgmError,
    InvalidSpectrumError,
    NumericalError,
    PrecisionWarning,
    PurityError,
    PurityWarning,
    TruncationError,
)
from .fock import (
    FockState,
    PhotonOp,
    ReducedDensityMatrix,
    apply_photon_op,
    build_added_crystal,
    build_added_fmsv,
    build_crystal_fock,
    build_fmsv_fock,
    build_subtracted_crystal,
    build_subtracted_fmsv,
    covariance_from_fock,
    reduced_density_matrix,
)
from .gaussian import (
    CrystalParams,
    crystal_cm,
    crystal_occupations,
    detect_kinks,
    fmsv_cm,
    ggm_gaussian,
    tritter_cm,
)
from .nongauss import delta_ng, fractional_enhancement
from .symplectic import (
    gaussian_entropy,
    max_eigenvalue_from_spectrum,
    partial_trace_cm,
    symplectic_eigenvalues,
    validate_cm,
)

__version__ = "0.1.0"
