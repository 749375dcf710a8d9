"""Coded beam training for RIS-assisted links.

Steering models, block-coded beam patterns, relaxed GS codeword synthesis,
training protocols, and Monte-Carlo evaluation.
"""

from .arrays import (
    AngleGrid,
    ArrayGeometry,
    bs_angle_grid,
    make_angle_grid,
    ris_angle_grid,
    ula_steering,
    upa_steering,
    upa_steering_uw,
)
from .blockcode import (
    BlockCode,
    build_plain_code,
    build_reduced_code,
    decode,
    encode,
    min_distance,
    redundancy_length,
    syndrome,
)
from .channel import (
    ChannelRealization,
    SnrSpec,
    effective_gain,
    measure_power,
    normalize_channel,
    sample_channel,
)
from .codebook import (
    BeamPatternMatrix,
    DesignedCodebook,
    GsConfig,
    beam_pattern_matrix,
    build_codebooks,
    classification_margin,
    design_bs_codeword,
    design_ris_codeword_gs,
)
from .experiments import (
    ExperimentConfig,
    ResultSet,
    export_results,
    import_results,
    run_sweep,
    success_rate,
)
from .training import (
    HierarchicalBeamProvider,
    ProtocolSpec,
    TrainingOutcome,
    achievable_rate,
    run_coded,
    run_exhaustive,
    run_hierarchical,
    training_overhead,
)

__all__ = [name for name in dir() if not name.startswith("_")]
__version__ = "0.1.0"
