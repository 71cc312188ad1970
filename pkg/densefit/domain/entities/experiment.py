import math
from dataclasses import dataclass, field
from typing import Dict, FrozenSet, List, Optional, Tuple

from densefit.domain.entities.annotations import SOURCES, AnnotationBundle
from densefit.domain.entities.body_model import FullParams
from densefit.domain.entities.camera import ImageFrame
from densefit.domain.entities.correspondence import IUVMap, KeypointPartTable
from densefit.domain.entities.fitting import FitConfig
from densefit.domain.entities.objectives import METRIC_NAMES, LossWeights, MetricReport

SWEEP_AXES = ("none", "noise", "keep_fraction", "refinement")


@dataclass(frozen=True, eq=False)
class SyntheticScene:
    """Ground truth parameters and the annotations rendered from them"""

    scene_id: int
    seed: int
    gt_params: FullParams
    annotations: AnnotationBundle
    iuv_map: IUVMap
    frame: ImageFrame
    dense_count: int
    sample_seed: int


@dataclass(frozen=True)
class SupervisionMix:
    """Named subset of annotation sources plus pose/shape toggles"""

    name: str
    sources: FrozenSet[str]
    use_pose: bool = True
    use_shape: bool = True
    three_d_fraction: float = 1.0

    def __post_init__(self) -> None:
        object.__setattr__(self, "sources", frozenset(self.sources))
        unknown = self.sources - set(SOURCES)
        if unknown:
            raise ValueError(f"unknown supervision source(s): {sorted(unknown)}")
        if not self.sources:
            raise ValueError(f"mix {self.name!r} names no source")
        if not 0.0 <= self.three_d_fraction <= 1.0:
            raise ValueError("three_d_fraction must lie in [0, 1]")


@dataclass(frozen=True)
class SweepSpec:
    axis: str = "none"
    values: Tuple[float, ...] = (0.0,)

    def __post_init__(self) -> None:
        if self.axis not in SWEEP_AXES:
            raise ValueError(f"unknown sweep axis {self.axis!r}")
        if not self.values:
            raise ValueError("sweep needs at least one value")


@dataclass(frozen=True)
class ExperimentConfig:
    """Scenes, supervision mixes and sweep of one ablation run"""

    mixes: Tuple[SupervisionMix, ...]
    scene_count: int = 20
    seed: int = 0
    sweep: SweepSpec = field(default_factory=SweepSpec)
    fit: FitConfig = field(default_factory=FitConfig)
    weights: Optional[LossWeights] = None
    frame: ImageFrame = field(default_factory=ImageFrame)
    align_root: bool = True
    workers: int = 1
    output_dir: str = "results"
    # None derives the table from the model's skinning layout
    part_table: Optional[KeypointPartTable] = None

    def __post_init__(self) -> None:
        if not self.mixes:
            raise ValueError("experiment needs at least one supervision mix")
        names = [mix.name for mix in self.mixes]
        if len(set(names)) != len(names):
            raise ValueError("supervision mix names must be unique")
        if self.scene_count <= 0:
            raise ValueError("scene_count must be positive")
        if self.workers < 1:
            raise ValueError("workers must be at least 1")


@dataclass(frozen=True)
class SceneOutcome:
    scene_id: int
    metrics: Optional[MetricReport] = None
    iterations: int = 0
    converged: bool = False
    error: Optional[str] = None

    @property
    def failed(self) -> bool:
        return self.metrics is None


def _mean_std(values: List[float]) -> Tuple[Optional[float], Optional[float]]:
    if not values:
        return None, None
    mean = math.fsum(values) / len(values)
    variance = math.fsum((v - mean) ** 2 for v in values) / len(values)
    return mean, math.sqrt(variance)


@dataclass(frozen=True)
class ResultRow:
    """Per-scene metrics of one (mix, sweep value) cell and their ensemble statistics"""

    mix: str
    sweep_axis: str
    sweep_value: float
    outcomes: Tuple[SceneOutcome, ...]

    @property
    def failed_count(self) -> int:
        return sum(1 for outcome in self.outcomes if outcome.failed)

    @property
    def scene_count(self) -> int:
        return len(self.outcomes)

    def values(self, metric: str) -> List[float]:
        return [getattr(o.metrics, metric) for o in self.outcomes if o.metrics is not None]

    def statistics(self) -> Dict[str, Tuple[Optional[float], Optional[float]]]:
        """Mean and population std per metric over the successful scenes"""
        return {name: _mean_std(self.values(name)) for name in METRIC_NAMES}

    def mean(self, metric: str) -> Optional[float]:
        return _mean_std(self.values(metric))[0]
