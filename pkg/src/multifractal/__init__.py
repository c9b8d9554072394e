"""Moment scaling and dimension spectra of self-similar measures.

A model is a pair (ratios, probabilities) defining a weighted iterated
function system under strong separation.  The library computes the analytic
moment exponent tau(q), its optimizer path and asymptotes, the concave
conjugate machinery, the dimension spectrum f(alpha), and validates every
analytic value against brute-force oracles: composition-grid minimization,
section/type-class enumeration, and exact geometric ball measures.
"""

from .duality import (
    NEG_INF,
    ConcaveFunction,
    SubdifferentialInterval,
    asymptotic_slopes,
    concave_conjugate,
    is_neg_inf,
    subdifferential,
)
from .exceptions import (
    DomainError,
    InfiniteCrossEntropyError,
    IntegrityError,
    RangeCapError,
    ResourceLimitError,
    SSCViolationError,
    ValidationError,
)
from .geometry import (
    CoarseCount,
    Geometric1D,
    ball_bracket_constants,
    ball_measure,
    ball_measure_bracket,
    certified_radius,
    certify_ssc,
    coarse_spectrum,
    local_dimension_estimate,
    project,
    sample_point,
    sample_points,
)
from .ifs import (
    IFSModel,
    ProbabilityVector,
    cross_entropy,
    entropy,
    kl_divergence,
    load_model,
    lyapunov,
    model_from_dict,
    normalize,
    save_model,
    word_stats,
)
from .lq import (
    AsymptoteData,
    CompositionGrid,
    GridMinimum,
    LqSolution,
    asymptotes,
    composition_count,
    compositions,
    psi,
    similarity_dimension,
    tau,
    tau_prime,
    tau_value,
    variational_objective,
    variational_tau_grid,
)
from .spectrum import (
    CurveSample,
    SpectrumCurve,
    constrained_variational_grid,
    dim_attractor,
    dim_measure,
    f_alpha,
    spectrum_curve,
)
from .types_oracle import (
    Section,
    TypeClass,
    empirical_tau,
    enumerate_section,
    enumerate_types,
    log_multinomial,
    multinomial,
    type_class_for,
    type_entropy_check,
)

__version__ = "0.1.0"
