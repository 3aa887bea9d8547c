"""Multi-view ensemble classification by feature-set partitioning."""

from .collab import CollabConfig, PairErrors, collab_matrix, collab_value, pair_errors
from .dataset import (
    Dataset,
    DatasetError,
    SplitSpec,
    SyntheticSpec,
    generate_blocks,
    generate_synthetic,
    load_csv,
    project,
    split,
    write_csv,
)
from .ensemble import BoostConfig, EnsembleModel, evaluate, predict_ensemble, train_ensemble
from .interaction import DiscretizationConfig, interaction_gain_matrix
from .learner import LinearModel, TrainConfig, cv_error, predict, train, weighted_error
from .matrices import FeatureMatrix, read_matrix
from .views import (
    CommunityConfig,
    FeatureGraph,
    ViewPartition,
    build_graph,
    detect_views,
    enumerate_partitions,
    exhaustive_view_search,
)

__version__ = "0.1.0"

__all__ = [
    "BoostConfig",
    "CollabConfig",
    "CommunityConfig",
    "Dataset",
    "DatasetError",
    "DiscretizationConfig",
    "EnsembleModel",
    "FeatureGraph",
    "FeatureMatrix",
    "LinearModel",
    "PairErrors",
    "SplitSpec",
    "SyntheticSpec",
    "TrainConfig",
    "ViewPartition",
    "build_graph",
    "collab_matrix",
    "collab_value",
    "cv_error",
    "detect_views",
    "enumerate_partitions",
    "evaluate",
    "exhaustive_view_search",
    "generate_blocks",
    "generate_synthetic",
    "interaction_gain_matrix",
    "load_csv",
    "pair_errors",
    "predict",
    "predict_ensemble",
    "project",
    "read_matrix",
    "split",
    "train",
    "train_ensemble",
    "weighted_error",
    "write_csv",
]
