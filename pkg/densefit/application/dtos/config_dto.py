from typing import Dict, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from densefit.domain.entities.camera import ImageFrame
from densefit.domain.entities.correspondence import KeypointPartTable
from densefit.domain.entities.experiment import ExperimentConfig, SupervisionMix, SweepSpec
from densefit.domain.entities.fitting import FitConfig
from densefit.domain.entities.objectives import LossWeights
from densefit import settings

SourceName = Literal["gt_params", "joints3d", "sparse2d", "dense"]
SweepAxis = Literal["none", "noise", "keep_fraction", "refinement"]


class FrameDTO(BaseModel):
    """DTO for the image frame size"""

    model_config = ConfigDict(extra="forbid")

    width: int = Field(settings.FRAME_WIDTH, gt=0)
    height: int = Field(settings.FRAME_HEIGHT, gt=0)

    def to_entity(self) -> ImageFrame:
        return ImageFrame(width=self.width, height=self.height)


class LossWeightsDTO(BaseModel):
    """DTO for loss balance weights and pose/shape toggles"""

    model_config = ConfigDict(extra="forbid")

    lambda_3d: float = Field(settings.LAMBDA_3D, ge=0)
    lambda_2d: float = Field(settings.LAMBDA_2D, ge=0)
    lambda_dense: float = Field(settings.LAMBDA_DENSE, ge=0)
    use_pose: bool = True
    use_shape: bool = True

    def to_entity(self) -> LossWeights:
        return LossWeights(**self.model_dump())


class FitConfigDTO(BaseModel):
    """DTO for optimizer settings"""

    model_config = ConfigDict(extra="forbid")

    max_iters: int = Field(settings.MAX_ITERS, gt=0)
    step_size: float = Field(settings.STEP_SIZE, gt=0)
    beta1: float = Field(settings.BETA1, gt=0, lt=1)
    beta2: float = Field(settings.BETA2, gt=0, lt=1)
    tolerance: float = Field(settings.TOLERANCE, gt=0)
    window: int = Field(settings.CONVERGENCE_WINDOW, gt=0)
    step_decay: float = Field(settings.STEP_DECAY, gt=0, le=1)
    staged: bool = False
    seed: int = 0
    weights: Optional[LossWeightsDTO] = None
    log_every: int = Field(settings.LOG_EVERY, ge=0)

    def to_entity(self) -> FitConfig:
        values = self.model_dump(exclude={"weights"})
        return FitConfig(weights=self.weights.to_entity() if self.weights else None, **values)


class SupervisionMixDTO(BaseModel):
    """DTO for a named supervision mix"""

    model_config = ConfigDict(extra="forbid")

    name: str = Field(min_length=1)
    sources: List[SourceName] = Field(min_length=1)
    use_pose: bool = True
    use_shape: bool = True
    three_d_fraction: float = Field(1.0, ge=0, le=1)

    def to_entity(self) -> SupervisionMix:
        return SupervisionMix(
            name=self.name,
            sources=frozenset(self.sources),
            use_pose=self.use_pose,
            use_shape=self.use_shape,
            three_d_fraction=self.three_d_fraction,
        )


class SweepDTO(BaseModel):
    """DTO for the swept perturbation; omitted values take the axis defaults"""

    model_config = ConfigDict(extra="forbid")

    axis: SweepAxis = "none"
    values: Optional[List[float]] = None

    @model_validator(mode="after")
    def check_values(self) -> "SweepDTO":
        defaults = {
            "none": [0.0],
            "noise": list(settings.NOISE_SIGMAS),
            "keep_fraction": list(settings.KEEP_FRACTIONS),
            "refinement": [0.0, 1.0],
        }
        if self.values is None:
            self.values = defaults[self.axis]
        if not self.values:
            raise ValueError(f"sweep '{self.axis}' needs at least one value")
        if self.axis == "noise" and min(self.values) < 0:
            raise ValueError("noise sigmas must be non-negative")
        if self.axis == "keep_fraction" and not all(0 <= v <= 1 for v in self.values):
            raise ValueError("keep fractions must lie in [0, 1]")
        if self.axis == "refinement" and not set(self.values) <= {0.0, 1.0}:
            raise ValueError("refinement values must be 0 (raw) or 1 (refined)")
        return self

    def to_entity(self) -> SweepSpec:
        return SweepSpec(axis=self.axis, values=tuple(self.values or ()))


class KeypointPartTableDTO(BaseModel):
    """DTO for the keypoint id -> allowed part ids table"""

    model_config = ConfigDict(extra="forbid")

    allowed: Dict[int, List[int]]

    @classmethod
    def from_entity(cls, table: KeypointPartTable) -> "KeypointPartTableDTO":
        return cls(allowed={k: list(v) for k, v in table.as_dict().items()})

    def to_entity(self) -> KeypointPartTable:
        return KeypointPartTable.from_pairs(self.allowed)


class ExperimentConfigDTO(BaseModel):
    """DTO for an ablation experiment configuration file"""

    model_config = ConfigDict(extra="forbid", protected_namespaces=())

    model_path: Optional[str] = None
    model_seed: int = settings.MINI_MODEL_SEED
    scene_count: int = Field(20, gt=0)
    seed: int = 0
    frame: FrameDTO = Field(default_factory=FrameDTO)
    mixes: List[SupervisionMixDTO] = Field(min_length=1)
    sweep: SweepDTO = Field(default_factory=SweepDTO)
    weights: Optional[LossWeightsDTO] = None
    fit: FitConfigDTO = Field(default_factory=FitConfigDTO)
    align_root: bool = True
    workers: int = Field(1, ge=1)
    output_dir: str = "results"
    # a JSON file path or an inline table; omitted derives it from the model
    part_table: Optional[Union[str, KeypointPartTableDTO]] = None

    @field_validator("mixes")
    @classmethod
    def unique_names(cls, mixes: List[SupervisionMixDTO]) -> List[SupervisionMixDTO]:
        names = [mix.name for mix in mixes]
        if len(set(names)) != len(names):
            raise ValueError("supervision mix names must be unique")
        return mixes

    def to_entity(self) -> ExperimentConfig:
        return ExperimentConfig(
            mixes=tuple(mix.to_entity() for mix in self.mixes),
            scene_count=self.scene_count,
            seed=self.seed,
            sweep=self.sweep.to_entity(),
            fit=self.fit.to_entity(),
            weights=self.weights.to_entity() if self.weights else None,
            frame=self.frame.to_entity(),
            align_root=self.align_root,
            workers=self.workers,
            output_dir=self.output_dir,
            part_table=self.part_table.to_entity() if isinstance(self.part_table, KeypointPartTableDTO) else None,
        )
