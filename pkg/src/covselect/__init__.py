"""Coverage-maximizing subset selection for low-budget active learning on embeddings."""

from .coverage import CoverageState, estimate_impurity
from .clustering import KMeansResult, kmeans, typicality
from .errors import (
    ConfigError,
    CovselectError,
    DataError,
    DomainError,
    FormatError,
    StateError,
)
from .evalloop import LoopConfig, RunRecord, nn1_predict, run_loop, soft_nn_probs, split_store
from .features import (
    FeatureStore,
    ImbalanceSpec,
    MixtureComponent,
    MixtureSpec,
    generate_mixture,
    load_features,
    load_labels,
    make_longtail,
    normalize_rows,
    save_features,
    save_labels,
)
from .kernels import Kernel, pairwise_to_set
from .kmedoids import MedoidState, select_kmedoids, swap_delta
from .purity import PuritySweep, blob_purity, choose_delta, choose_lengthscale
from .selectors import (
    LabeledPool,
    ProbMatrix,
    SelectionBatch,
    select_coreset,
    select_kernelherding,
    select_maxherding,
    select_probcover_graph,
    select_random,
    select_typiclust,
    select_uncertain,
)

__version__ = "0.1.0"

__all__ = [
    "CoverageState",
    "estimate_impurity",
    "KMeansResult",
    "kmeans",
    "typicality",
    "ConfigError",
    "CovselectError",
    "DataError",
    "DomainError",
    "FormatError",
    "StateError",
    "LoopConfig",
    "RunRecord",
    "nn1_predict",
    "run_loop",
    "soft_nn_probs",
    "split_store",
    "FeatureStore",
    "ImbalanceSpec",
    "MixtureComponent",
    "MixtureSpec",
    "generate_mixture",
    "load_features",
    "load_labels",
    "make_longtail",
    "normalize_rows",
    "save_features",
    "save_labels",
    "Kernel",
    "pairwise_to_set",
    "MedoidState",
    "select_kmedoids",
    "swap_delta",
    "PuritySweep",
    "blob_purity",
    "choose_delta",
    "choose_lengthscale",
    "LabeledPool",
    "ProbMatrix",
    "SelectionBatch",
    "select_coreset",
    "select_kernelherding",
    "select_maxherding",
    "select_probcover_graph",
    "select_random",
    "select_typiclust",
    "select_uncertain",
    "__version__",
]
