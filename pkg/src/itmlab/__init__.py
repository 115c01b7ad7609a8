"""itmlab: simulation and computational certification of a two-parameter
family of interval translation maps -- renormalization dynamics, the induced
substitution subshifts, linear recurrence, stable directions, and weak-mixing
criteria, with exact integer/rational cores and certified high-precision
floats."""

__version__ = "0.1.0"

from .errors import (
    DomainError,
    InvariantViolation,
    MultipleRootsInInterval,
    NoRootInInterval,
    ParseError,
    PrecisionExhausted,
)
from .kseq import KSeqSpec, parse_kseq
from .numkernel import (
    Cubic,
    DEFAULT_PRECISION,
    HighFloat,
    Mat3,
    hilbert_rho,
    make_matrix,
    mat_product,
    matrix_invariants,
    real_root_in_unit,
)
from .itmsim import (
    IntervalSet,
    Params,
    attractor_cover,
    first_return,
    itinerary,
    itm_eval,
    push_forward,
    renorm_conjugacy_residual,
)
from .renorm import (
    RasterConfig,
    TypeVerdict,
    fixed_params,
    g_inverse_branch,
    g_step,
    k_sequence,
    params_from_kseq,
    raster_omega,
)
from .sadic import (
    LRVerdict,
    Substitution,
    aperiodicity_scan,
    chi,
    compose_chain,
    desubstitute,
    frequency_ratio,
    lr_verdict,
    return_gap_stats,
    rho_prefix,
    telescope_blocks,
)
from .certificates import (
    ABDomination,
    EdgeWord,
    LyapReport,
    ab_domination,
    cex_sequence,
    host_telescope_inequality,
    loop_sum_check,
    lyapunov_report,
    path_weight,
    state_machine_run,
)
from .spectral import (
    HostReport,
    StableDir,
    WMVerdict,
    h_forward,
    h_inverse,
    h_vector,
    host_sums,
    line_residual,
    line_search,
    locate_delta_k,
    rational_descent,
    simplex_itinerary,
    slope_check,
    stable_dir_periodic_exact,
    stable_direction,
    uv_from_xi,
    wm_verdict,
    xi_from_line,
)
