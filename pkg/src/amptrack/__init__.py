"""amptrack: make one quantum system reproduce another's optical response.

A proportional amplifier loop drives a quantum system so that the time
derivative of a chosen observable follows a prescribed reference signal.
Two platforms are implemented end to end: a 1D soft-core atom on a grid
(momentum tracking, high-harmonic responses) and a periodically driven
Fermi-Hubbard ring (many-body current tracking), plus the intensity
matching rules and spectral analysis that connect the two pictures.
"""

import os as _os

# AMPTRACK_MAX_THREADS caps the BLAS/FFT thread pools.  The standard
# variables must be set before the numerics libraries first load, so this
# runs ahead of every numpy import below; it covers any process whose
# first numpy import happens through this package (the CLI in particular).
_cap = _os.environ.get("AMPTRACK_MAX_THREADS")
if _cap:
    for _var in ("OMP_NUM_THREADS", "OPENBLAS_NUM_THREADS", "MKL_NUM_THREADS"):
        _os.environ.setdefault(_var, _cap)
del _cap, _os

from .exceptions import (
    AmptrackError,
    CalibrationError,
    ConfigError,
    ConvergenceError,
    DetectionError,
    GridMismatchError,
    InfeasibleTargetError,
    SectorMismatchError,
    StepSizeError,
)
from .series import RunRecord, TimeSeries
from .pulses import (
    AtomSpec,
    PulseSpec,
    StrongFieldScales,
    ati_matched_field,
    evaluate_tl_field,
    hhg_cutoff,
    hhg_matched_field,
    peierls_phase,
    peierls_phase_series,
    ponderomotive_energy,
    strong_field_scales,
)
from .grid import (
    AbsorberSpec,
    AtomNumerics,
    AtomSystem,
    Grid1D,
    atom_for_ip,
    calibrate_softening,
    run_atom_reference,
)
from .lattice import (
    HubbardSystem,
    LatticeModel,
    LatticeNumerics,
    ManyBodyState,
    SectorBasis,
    build_sector_basis,
    lanczos_ground_state,
    run_hubbard_reference,
)
from .feedback import (
    FeedbackConfig,
    TrackingResult,
    atom_control_field,
    hubbard_control_field,
    run_open_loop,
    run_tracking,
    tracking_residual,
)
from .spectral import (
    OrderPeak,
    Spectrum,
    SpectrumComparison,
    compare_spectra,
    detect_cutoff,
    detect_cutoff_order,
    harmonic_peaks,
    power_spectrum,
)
from .config import ExperimentConfig, build_system, parse_config
from .units import (
    intensity_to_au_field,
    mv_cm_to_au,
    thz_to_au_angular,
    wavelength_nm_to_au_angular,
)

__version__ = "0.1.0"
