"""tunnelsplit: 1-D scattering split into transmission and reflection.

Library for decomposing wave-packet tunneling through static 1-D
potentials into two causally independent components, with the
characteristic times, effective barrier widths and average starting
points that the decomposition defines.

Modules
-------
model       units (nm / fs / eV), grids, complex field container
potentials  rectangular / point / layered barrier descriptions
scattering  transfer matrices, tunneling parameters, ODE oracle
splitting   stationary reflection and transmission wave functions
packets     Gaussian spectra, time evolution, k-space moments
timing      exact and asymptotic characteristic times
cli         scenario configs, presets and the command-line frontend
"""

from .model import (
    CONSTANTS,
    HBAR,
    ELECTRON_MASS,
    Constants,
    KGrid,
    WaveField,
    XGrid,
    flux,
    mean_position,
    norm,
)
from .potentials import (
    Delta,
    PiecewiseConstant,
    PotentialSpec,
    Rectangular,
    geometry,
    is_symmetric,
)
from .scattering import (
    AmplitudeSet,
    ParamsTable,
    TransferMatrix,
    TunnelingParams,
    auxiliary_amplitudes,
    ode_oracle,
    oracle_table,
    params_table,
    scattering_amplitudes,
    transfer_matrix,
    tunneling_params,
)
from .splitting import (
    SplitAmplitudes,
    StationaryTriple,
    select_odd_branch,
    split_amplitudes,
    stationary_triple,
)
from .packets import (
    GridLeakageError,
    KTables,
    Propagator,
    SpectralProfile,
    default_kgrid,
    default_xgrid,
    gaussian_profile,
    interference_density,
    k_tables,
    out_asymptote_moments,
    split_in_asymptote_moments,
    synthesize,
)
from .timing import (
    TimingReport,
    asymptotic_times,
    cm_trajectory,
    delta_closed_forms,
    effective_widths,
    exact_times,
    rect_closed_forms,
    swpa_phase_times,
    timing_report,
)

__version__ = "0.1.0"
