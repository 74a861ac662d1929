"""Numerical spectral theory of the Hill operator ``-y'' + q y`` with a
1-periodic complex potential, aimed at PT-symmetric ``q``.

The package computes the discriminant and monodromy of the equation, traces
the Bloch eigenvalue curves ``lambda_n(t)``, assembles bands with their
nonreal tails, evaluates asymptotic reality criteria, and locates multiple
eigenvalues.
"""

from ._common import DEFAULT_TOLERANCES, Tolerances, Verdict
from .asymptotics import (
    CriterionRecord,
    FiniteGapVerdicts,
    SeriesValue,
    band_reality_criterion,
    compute_Pn,
    criterion_record,
    d_equation_residual,
    finite_gap_tests,
    reality_criterion_D,
    series_terms,
)
from .bands import (
    Band,
    ComplexationPoint,
    SpectrumReport,
    TestOutcome,
    build_band,
    build_spectrum,
    conjugation_symmetry_check,
    detect_complexation_points,
    half_line_test,
    real_gaps,
    real_spectrum_test,
)
from .bloch import (
    DEFAULT_LOCALIZATION,
    BandTracker,
    BlochCurve,
    BlochEigenvalue,
    LocalizationConfig,
    default_t_grid,
    eigenvalues_in_region,
    matrix_oracle,
    multiplicity_of,
    number_eigenvalues,
)
from .errors import *  # noqa: F401,F403
from .monodromy import (
    DEFAULT_CONFIG,
    DiscriminantSample,
    IntegratorConfig,
    discriminant,
    discriminant_derivatives,
    evaluate,
    solution_path,
    solve_basis,
)
from .potential import (
    FourierTable,
    Piece,
    PotentialSpec,
    SpVerdict,
    antiderivative_coefficients,
    check_pt_symmetry,
    fourier_coefficient,
    real_imag_split,
    sp_membership,
)
from .presets import PRESETS, make_preset
from .singularities import (
    MathieuSpectrality,
    SingularityRecord,
    SpectralityVerdict,
    all_real_and_simple,
    asymptotic_spectrality_verdict,
    mathieu_isospectrality_check,
    mathieu_spectrality,
    projection_norm_diagnostic,
    sets_coincide,
    singularity_scan,
    singularity_sets,
)

__version__ = "0.1.0"
