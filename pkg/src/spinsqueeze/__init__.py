"""Spin-squeezed free-electron interferometry.

An N-electron batch in a two-arm interferometer is a collective spin N/2.
This package propagates such batches through the interferometer, squeezes
them either with capacitive one-axis twisting or with a Gaussian
quantum-non-demolition measurement, and evaluates the resulting phase
uncertainties.

>>> from spinsqueeze import optimize_chi
>>> round(optimize_chi(40, "interaction").delta_phi_w_min, 3)
0.055
"""

from .dicke import (
    DickeState,
    SpinMoments,
    axis_vector,
    basis_state,
    coherent_state,
    m_values,
    moments,
    number_distribution,
    overlap,
    phase_shift,
    polar_state,
    rotate,
    rotation_matrix,
    spin_matrices,
)
from .exceptions import (
    ContractError,
    DegenerateOutcomeError,
    DomainError,
    GeometryError,
    MeanSpinDegenerateError,
    NumericalIntegrationError,
    OptimizerBracketError,
    SpinSqueezeError,
    UninformativeReadoutError,
    UnsupportedSizeError,
)
from .interferometer import (
    Calibration,
    MonteCarloResult,
    MZISpec,
    ShotRecord,
    calibrate,
    estimator_arcsin,
    monte_carlo,
    parity_expectation,
    parity_fringe,
    parity_phase_uncertainty,
    run_pipeline,
    write_shots_csv,
)
from .metrology import (
    MetricsRow,
    OptimumReport,
    analytic_meas_fisher,
    heisenberg,
    meas_metrics,
    none_metrics,
    oat_metrics,
    optimize_chi,
    qfi,
    scaling_fit,
    sql,
    wineland_metrics,
)
from .squeezers import (
    MeasConfig,
    MeasOutcome,
    OATConfig,
    ghz_axis,
    ghz_fidelity,
    h_quadrature,
    kraus_apply,
    oat_alignment_angle,
    oat_apply,
    oat_tilt_delta,
    outcome_density,
    sample_outcome,
)
from .wigner import SphereGrid, multipoles, tensor_operator, wigner_function

__version__ = "0.1.0"
