"""
Soft-decision decoding of binary linear block codes with local constraints,
plus the random-coding machinery to predict and tune its performance.

The pipeline: sort positions by reliability (with rank repair), eliminate
the permuted parity-check matrix into a block form, and search reliable-part
error patterns in non-decreasing soft weight under the local constraints,
re-encoding each candidate cheaply.  Pattern generation is served either by
a serial list Viterbi algorithm over the syndrome trellis or by a two-way
flipping-pattern-tree merge; tailored stopping rules cut the average search
count by orders of magnitude without measurable loss.
"""

from .errors import (
    DimensionMismatch,
    InvalidCurve,
    MissingTrace,
    ParseError,
    RankDeficient,
    UnreachableTarget,
)
from .gf2 import (
    BitMatrix,
    LinearCode,
    Permutation,
    eliminate_block,
    enumerate_codewords,
    load_alist,
    nullspace_basis,
    random_code,
    rank,
    save_alist,
    syndrome,
)
from .channel import (
    ChannelFrame,
    frame_from_observations,
    magnitude_cdf,
    magnitude_pdf,
    order_statistic_pdf,
    quantile_alpha,
    reliability_cdf,
    reliability_pdf,
    sigma_from_ebn0,
    transmit,
)
from .preprocess import (
    Candidate,
    PreprocessedInstance,
    get_permutation,
    preprocess,
    reconstruct,
    soft_weight,
)
from .slva import SlvaSession
from .fpt import FptSession, TfptSession, precedes
from .decoder import (
    DecodeResult,
    DecoderConfig,
    delta_gamma,
    lc_osd,
    mld_error_indicator,
    tau_dai,
    tau_sai,
)
from .analysis import (
    ListFerCurve,
    SaddlepointSolution,
    TimeModel,
    cardinality_ccdf,
    conditional_rank,
    count_lighter,
    decode_time,
    fer_upper_bound,
    list_fer,
    min_list_size,
    rank_statistics,
    saddlepoint_cardinality,
    sample_cardinalities,
    sample_mrb_llrs,
)
from .sim import (
    ListRankRecord,
    SimRecord,
    count_list_rank,
    mean_left_soft_weight,
    run_fer_grid,
    run_fer_point,
    run_list_rank_point,
)

__version__ = "0.1.0"

__all__ = [name for name in dir() if not name.startswith("_")]
