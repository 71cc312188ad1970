# Domain entities package
from densefit.domain.entities.annotations import AnnotationBundle, SparseKeypointSet
from densefit.domain.entities.body_model import BodyModel, FullParams, MeshInstance
from densefit.domain.entities.camera import CameraParams, ImageFrame
from densefit.domain.entities.correspondence import (
    DenseAnchor,
    DenseKeypoint,
    IUVMap,
    KeypointPartTable,
    UVAtlas,
)
from densefit.domain.entities.experiment import (
    ExperimentConfig,
    ResultRow,
    SceneOutcome,
    SupervisionMix,
    SweepSpec,
    SyntheticScene,
)
from densefit.domain.entities.fitting import FitConfig, FitResult
from densefit.domain.entities.objectives import LossBreakdown, LossTerm, LossWeights, MetricReport

__all__ = [
    "AnnotationBundle",
    "BodyModel",
    "CameraParams",
    "DenseAnchor",
    "DenseKeypoint",
    "ExperimentConfig",
    "FitConfig",
    "FitResult",
    "FullParams",
    "ImageFrame",
    "IUVMap",
    "KeypointPartTable",
    "LossBreakdown",
    "LossTerm",
    "LossWeights",
    "MeshInstance",
    "MetricReport",
    "ResultRow",
    "SceneOutcome",
    "SparseKeypointSet",
    "SupervisionMix",
    "SweepSpec",
    "SyntheticScene",
    "UVAtlas",
]
