"""Fuzzy c-means + Minimerror-S hybrid classification toolkit."""

from .annealing import AnnealingConfig, TrainDiagnostics, TrainingError
from .dataset import (
    PRESETS,
    Attribute,
    AttributeSchema,
    Dataset,
    DatasetError,
    SplitSpec,
    StandardizationParams,
    class_mean_diff,
    from_arrays,
    generate_synthetic,
    load_csv,
    select_attributes,
    split,
    standardize,
)
from .evaluation import EvalReport, PipelineConfig, TrialResult, export_curve, run_learning_curve, score
from .fcm import FcmConfig, FcmError, FcmModel, fcm_fit, fcm_objective, harden, update_centroids, update_memberships
from .growing import ClusterModel, GrowingConfig, grow_clusters, prune
from .hybrid import HybridModel, hybrid_fit, hybrid_predict, map_clusters_to_labels
from .minimerror import Hyperplane, hebb_init, train_minimerror
from .sphere import SphereSeparator, sphere_predict, spherical_stability, train_minimerror_s

__version__ = "0.1.0"
