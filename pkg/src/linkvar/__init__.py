"""linkvar: temporal link prediction with jointly estimated VAR feature
dynamics, solved by generalized forward-backward splitting."""

from .baselines import (
    METHOD_NAMES,
    ScoreMatrix,
    autoregressive_score,
    cumulative,
    nn_score,
    score_method,
    static_fit,
)
from .bench import RunResult, SweepGrid, aggregate, run_experiment, sweep_phase
from .config import ExperimentSpec, parse_experiment_config, parse_experiment_dict
from .data import GraphSequence, SyntheticDataset, TruthRecord, load_sequence, save_dataset
from .errors import (
    ConfigError,
    DimensionError,
    LinkvarError,
    MatrixMarketError,
    SingleClassError,
    SolverError,
)
from .features import (
    OmegaList,
    RightProjection,
    adjoint,
    apply,
    feature_stack,
    sequence_variance,
    svd_feature_map,
    variance_terms,
)
from .generator import GeneratorParams, generate, sparse_noise
from .metrics import auc
from .mmio import read_matrix, write_matrix
from .objective import (
    Penalties,
    ProblemData,
    build_problem_data,
    error_metric,
    lipschitz,
    loss,
    quad_gradient,
    quad_loss,
)
from .prox import Svd, deterministic_svd, project_nonneg, prox_l1, prox_trace, subspace_projectors
from .solver import FitResult, SolverConfig, gfb_minimize, optimality_residual
from .tuning import (
    ConcentrationReport,
    concentration_check,
    cross_validate,
    estimate_sigma,
    theorem3_params,
)

__version__ = "0.1.0"
