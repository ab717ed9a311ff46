"""ruinlab: a computational laboratory for the ruin probability of the
double-after-win / halve-after-loss gambling strategy.

Exact engines (step functions, memoized pointwise recursion,
polynomials in p), certified deep-horizon evaluation, exact-arithmetic
path simulation, and the analysis reports built on them.
"""

from .errors import (
    RuinLabError,
    BudgetError,
    ExponentCapExceeded,
    BreakpointBudgetExceeded,
    MemoBudgetExceeded,
    BlockCapExceeded,
    NonConvergent,
    AmbiguousDigit,
    DegenerateSlope,
    InvalidStepFunction,
    CacheVersionError,
    CacheCorruptError,
    VerificationFailed,
)
from .dyadic import (
    BigRational,
    DyadicRational,
    dy_add,
    map_win,
    map_lose,
    premap_win,
    premap_lose,
    digit_window,
    parse_dyadic,
    parse_rational,
    set_exponent_cap,
    get_exponent_cap,
)
from .stepfn import StepFunction, refine_step, iterate_step, eval_step, sup_diff
from .recursion import MemoTable, pointwise_fn, gap_sequence, fit_tail_ratio
from .poly import poly_fn, poly_eval
from .deepfield import EnvelopeGrid, HybridValue, forward_measure, hybrid_eval
from .rng import Stream
from .sim import (
    PathState,
    PathOutcome,
    BlockSample,
    ZChainSample,
    init_path,
    step,
    run_path,
    mc_ruin_by_n,
    mc_eventual,
    verify_closed_form,
    verify_block_sums,
    verify_z_chain,
    sample_blocks,
    digit_from_blocks,
    z_from_blocks,
    digit_sample,
    z_chain,
    coupled_pair,
    coupled_run,
    generalized_run,
    threshold_scan,
    post_doom_ruin,
)
from .analysis import (
    PlateauEstimate,
    ExponentFit,
    SandwichResult,
    DigitHistogram,
    plateau_estimate_f,
    plateau_many,
    residual_report,
    holder_exponent,
    sandwich_check,
    digit_report,
    monotonicity_report,
    convergence_report,
    tail_ratio_report,
)
from .cache import cache_store, cache_load, cached_iterate, default_cache_dir
from .config import RunConfig, SCHEMA_VERSION
from .backend import KERNEL_IMPL

__version__ = "0.1.0"
