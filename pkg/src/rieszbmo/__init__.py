"""Riesz transforms, dyadic BMO / A_p weights and the factorization
``f = (g1 / g2) ** alpha`` with ``|R_j g_i| <= c g_i`` on periodic grids."""

from .construction import (
    ConstructionConfig,
    ConstructionResult,
    FactorizationError,
    OperatorNormEstimates,
    SeriesDivergenceError,
    apply_S,
    build_factorization,
    certify_factorization,
    estimate_operator_norms,
)
from .grid import (
    DyadicCube,
    GridSpec,
    NormSpec,
    ScalarField,
    cube_average,
    dyadic_cubes,
    field_compose,
    generate_field,
    make_grid,
    norm,
)
from .reports import VerificationReport, emit_profile
from .rfld import read_rfld, write_rfld
from .transforms import (
    ConjugateSystem,
    SpectralField,
    analyze,
    conjugate_system,
    hilbert_circle,
    maximal_dyadic,
    poisson_extend,
    riesz,
    synthesize,
    system_magnitude_power,
)
from .verification import (
    check_key_inequality,
    check_majorization,
    check_subharmonicity,
    check_sufficiency,
    default_epsilon,
    phi_tail_norm,
    roundtrip,
)
from .weights import (
    AlphaDecomposition,
    AlphaSearchError,
    CubeSupremumReport,
    ap_characteristic,
    bmo_norm,
    find_alpha,
    reverse_holder_constant,
)

__version__ = "0.1.0"
