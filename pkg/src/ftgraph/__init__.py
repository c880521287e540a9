"""Scattering, spectra and level statistics for scale-invariant point defects on a line."""
from .errors import (
    ArgumentError,
    CapacityError,
    DegeneracyError,
    DegenerateSignalError,
    FTGraphError,
    IncompleteSpectrumError,
)
from .model import (
    Coupling,
    DefectArray,
    ScatteringAmplitudes,
    fig3_box_halflength,
    fig3_geometry,
    prime_sequence,
    sqrt_prime_positions,
)
from .scattering import (
    ClosedFormTerms,
    amplitude_arrays,
    closed_form_amplitudes,
    enumerate_frequencies,
    recursive_amplitudes,
    single_defect_amplitudes,
    transfer_matrix_amplitudes,
)
from .spectrum import (
    SpectralProblem,
    Spectrum,
    find_spectrum,
    level_count,
    oracle_spectrum,
    residual_eq19,
    spectral_function,
)
from .statistics import (
    Autocorrelation,
    DistributionComparison,
    SpacingSample,
    compare,
    count_local_extrema,
    ks_distance,
    poisson_pdf,
    transmission_autocorrelation,
    unfold,
    wigner_pdf,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
