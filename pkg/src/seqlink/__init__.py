"""seqlink: sequential and offline InSAR phase linking by covariance fitting.

The package estimates per-date phases from a stack of SAR images by fitting
a structured covariance model to a data-driven plug-in estimate, either over
the whole stack at once (offline) or for a block of newly acquired images
given already-estimated past phases (sequential), at a fraction of the cost.
"""

from .bench import (
    CSV_HEADER,
    MODES,
    MULTIBLOCK_ARMS,
    ExperimentConfig,
    MseRow,
    mc_mse_experiment,
    multiblock_experiment,
    phase_diff_error,
    rows_to_csv,
    timing_experiment,
    trial_errors,
)
from .config import (
    SimulateJob,
    build_experiment,
    build_plugin,
    build_simulate_job,
    build_simulation,
    load_experiments,
    load_simulate_job,
    parse_config,
    parse_regularizer_token,
)
from .costs import (
    frob_cost_block,
    frob_cost_full,
    kl_cost_block,
    kl_cost_full,
    quad_form,
)
from .errors import ConfigError, NonConvergence, NotPositiveDefinite, SeqlinkError
from .linalg import (
    DEFAULT_JITTER,
    BlockCov,
    SchurFactors,
    abs_entrywise,
    assemble_block_inverse,
    hadamard,
    hermitize,
    largest_eigenvalue,
    partition,
    pd_inverse,
    reassemble,
    schur_factors,
)
from .plugins import (
    PluginSpec,
    estimate,
    phase_only,
    scm,
    shrink_to_identity,
    taper,
    unit_phasors,
)
from .raster import (
    DISTANCES,
    ImageStack,
    PhaseRaster,
    interferogram,
    noiseless_raster,
    process_stack_offline,
    process_stack_sequential,
    sliding_window_extract,
    window_area,
    wrap_angle,
)
from .simulate import (
    DISTRIBUTIONS,
    SimulationConfig,
    build_true_covariance,
    ground_truth,
    linear_phase_ramp,
    noiseless_stack,
    sample_gaussian,
    sample_scaled_gaussian,
    sample_stack,
    toeplitz_coherence,
)
from .solvers import (
    MMConfig,
    SolveReport,
    anchor_reference,
    phase_project,
    solve_offline_frob,
    solve_offline_kl,
    solve_seq_frob,
    solve_seq_kl,
)
from .stackio import (
    MAGIC,
    STACK_VERSION,
    append_manifest,
    manifest_path_for,
    read_manifest,
    read_phase_raster,
    read_stack,
    read_truth_csv,
    stack_file_dtype,
    write_manifest,
    write_phase_raster_binary,
    write_phase_raster_csv,
    write_stack,
    write_truth_csv,
)

__version__ = "0.1.0"

__all__ = [
    "abs_entrywise",
    "anchor_reference",
    "append_manifest",
    "assemble_block_inverse",
    "BlockCov",
    "build_experiment",
    "build_plugin",
    "build_simulate_job",
    "build_simulation",
    "build_true_covariance",
    "ConfigError",
    "CSV_HEADER",
    "DEFAULT_JITTER",
    "DISTANCES",
    "DISTRIBUTIONS",
    "estimate",
    "ExperimentConfig",
    "frob_cost_block",
    "frob_cost_full",
    "ground_truth",
    "hadamard",
    "hermitize",
    "ImageStack",
    "interferogram",
    "kl_cost_block",
    "kl_cost_full",
    "largest_eigenvalue",
    "linear_phase_ramp",
    "load_experiments",
    "load_simulate_job",
    "MAGIC",
    "manifest_path_for",
    "mc_mse_experiment",
    "MMConfig",
    "MODES",
    "MseRow",
    "MULTIBLOCK_ARMS",
    "multiblock_experiment",
    "noiseless_raster",
    "noiseless_stack",
    "NonConvergence",
    "NotPositiveDefinite",
    "parse_config",
    "parse_regularizer_token",
    "partition",
    "pd_inverse",
    "phase_diff_error",
    "phase_only",
    "phase_project",
    "PhaseRaster",
    "PluginSpec",
    "process_stack_offline",
    "process_stack_sequential",
    "quad_form",
    "read_manifest",
    "read_phase_raster",
    "read_stack",
    "read_truth_csv",
    "reassemble",
    "rows_to_csv",
    "sample_gaussian",
    "sample_scaled_gaussian",
    "sample_stack",
    "schur_factors",
    "SchurFactors",
    "scm",
    "SeqlinkError",
    "shrink_to_identity",
    "SimulateJob",
    "SimulationConfig",
    "sliding_window_extract",
    "solve_offline_frob",
    "solve_offline_kl",
    "solve_seq_frob",
    "solve_seq_kl",
    "SolveReport",
    "stack_file_dtype",
    "STACK_VERSION",
    "taper",
    "timing_experiment",
    "toeplitz_coherence",
    "trial_errors",
    "unit_phasors",
    "window_area",
    "wrap_angle",
    "write_manifest",
    "write_phase_raster_binary",
    "write_phase_raster_csv",
    "write_stack",
    "write_truth_csv",
    "__version__",
]
