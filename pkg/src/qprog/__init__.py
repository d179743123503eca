"""Finite-field harmonic analysis for quadratic progressions.

Fields of odd characteristic with dense tables, additive and multiplicative
characters with both norm conventions, closed-form kernels of the quadratic
averaging operator with exhaustive brute-force equivalence checks, sliced
operator norms, mixed character-sum scans, and certified progression-free
set constructions -- all at desk scale (q up to ~1e4).
"""

from .field import (
    DESK_CAP,
    FieldCtx,
    SubfieldEmbedding,
    build_field,
    cubic_min_poly,
    field_from_descriptor,
    get_field,
    prime_power,
    subfield_embed,
)
from .characters import (
    ComplexFn,
    GaussSumInfo,
    additive_char,
    fourier,
    fourier_inverse,
    gauss_sum,
    mult_char,
    mult_fourier,
    mult_fourier_inverse,
    quadratic_char,
    random_fn,
)
from .kernels import (
    KernelCase,
    classify_pair,
    classify_quad,
    pair_kernel_brute,
    pair_kernel_closed,
    pair_kernel_coeffs,
    quad_kernel,
    quad_kernel_brute,
    ratio_kernel,
    twisted_pair_kernel,
    twisted_prefactor,
)
from .operators import (
    ChainReport,
    DeviationReport,
    SlicedNormReport,
    ThresholdResult,
    averaging_apply,
    averaging_apply_fourier,
    count_progressions,
    density_threshold,
    deviation_norm,
    deviation_scan,
    sliced_norm_scan,
    sliced_operator_apply,
    sliced_operator_norm,
    sliced_square_form,
    triple_average_chain,
)
from .weil import (
    WeilScanReport,
    mixed_char_sum,
    ratio_char_sum,
    substitution_identity,
    weil_scan,
)
from .constructions import (
    ElementSet,
    Plane,
    PlaneCensus,
    enumerate_planes,
    greedy_progression_free,
    is_bad_plane,
    is_progression_free,
    plane_census,
    quadratic_extension_line,
)

__version__ = "0.1.0"
