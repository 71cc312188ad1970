from dataclasses import dataclass, field, replace
from typing import Dict

import numpy as np

from densefit.settings import LAMBDA_2D, LAMBDA_3D, LAMBDA_DENSE, LAMBDA_REDUCED


@dataclass(frozen=True)
class LossWeights:
    """Balance weights of the 3D, sparse 2D and dense terms plus pose/shape toggles"""

    lambda_3d: float = LAMBDA_3D
    lambda_2d: float = LAMBDA_2D
    lambda_dense: float = LAMBDA_DENSE
    use_pose: bool = True
    use_shape: bool = True

    def __post_init__(self) -> None:
        if min(self.lambda_3d, self.lambda_2d, self.lambda_dense) < 0:
            raise ValueError("loss weights must be non-negative")

    @classmethod
    def balanced(
        cls, has_3d: bool, has_2d: bool, has_dense: bool, use_pose: bool = True, use_shape: bool = True
    ) -> "LossWeights":
        """10/1/10 when all three terms are active, 10 for every term otherwise"""
        if has_3d and has_2d and has_dense:
            return cls(LAMBDA_3D, LAMBDA_2D, LAMBDA_DENSE, use_pose, use_shape)
        return cls(LAMBDA_REDUCED, LAMBDA_REDUCED, LAMBDA_REDUCED, use_pose, use_shape)

    def scaled(self, factor: float) -> "LossWeights":
        return replace(
            self,
            lambda_3d=self.lambda_3d * factor,
            lambda_2d=self.lambda_2d * factor,
            lambda_dense=self.lambda_dense * factor,
        )


@dataclass(frozen=True, eq=False)
class LossTerm:
    """Value of one loss with its gradient w.r.t. the loss inputs"""

    value: float
    gradient: np.ndarray
    components: Dict[str, float] = field(default_factory=dict)
    extra_gradients: Dict[str, np.ndarray] = field(default_factory=dict)


@dataclass(frozen=True, eq=False)
class LossBreakdown:
    """Per-term values of the weighted objective and its gradient w.r.t. FullParams"""

    l3d_joints: float
    l_smpl: float
    l2d: float
    l_dense: float
    total: float
    gradient: np.ndarray

    def as_dict(self) -> Dict[str, float]:
        return {
            "l3d_joints": self.l3d_joints,
            "l_smpl": self.l_smpl,
            "l2d": self.l2d,
            "l_dense": self.l_dense,
            "total": self.total,
        }


METRIC_NAMES = ("pve", "mpjpe", "pve_t", "dkd")


@dataclass(frozen=True)
class MetricReport:
    """Mesh errors in model units and dense keypoint distance in pixels"""

    pve: float
    mpjpe: float
    pve_t: float
    dkd: float

    def __post_init__(self) -> None:
        if min(self.pve, self.mpjpe, self.pve_t, self.dkd) < 0:
            raise ValueError("metrics must be non-negative")

    def as_dict(self) -> Dict[str, float]:
        return {name: getattr(self, name) for name in METRIC_NAMES}
