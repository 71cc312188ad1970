from dataclasses import dataclass, field
from typing import Tuple

import numpy as np

from densefit.domain.errors import ModelValidationError

NORMALIZATION_TOLERANCE = 1e-6


def _frozen(array: np.ndarray, dtype) -> np.ndarray:
    out = np.array(array, dtype=dtype, copy=True)
    out.flags.writeable = False
    return out


@dataclass(frozen=True, eq=False)
class BodyModel:
    """Parametric body model: shape blend shapes, skeleton and per-vertex IUV atlas"""

    template_vertices: np.ndarray  # V x 3
    faces: np.ndarray  # F x 3
    shape_dirs: np.ndarray  # V x 3 x B
    joint_regressor: np.ndarray  # K x V
    skin_weights: np.ndarray  # V x K
    parents: np.ndarray  # K, parents[0] == -1
    vertex_iuv: np.ndarray  # V x 3 (part, u, v)
    part_count: int
    joint_names: Tuple[str, ...] = field(default=())
    part_names: Tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        object.__setattr__(self, "template_vertices", _frozen(self.template_vertices, np.float64))
        object.__setattr__(self, "faces", _frozen(self.faces, np.int64))
        object.__setattr__(self, "shape_dirs", _frozen(self.shape_dirs, np.float64))
        object.__setattr__(self, "joint_regressor", _frozen(self.joint_regressor, np.float64))
        object.__setattr__(self, "skin_weights", _frozen(self.skin_weights, np.float64))
        object.__setattr__(self, "parents", _frozen(self.parents, np.int64))
        object.__setattr__(self, "vertex_iuv", _frozen(self.vertex_iuv, np.float64))
        object.__setattr__(self, "joint_names", tuple(self.joint_names))
        object.__setattr__(self, "part_names", tuple(self.part_names))

    @property
    def vertex_count(self) -> int:
        return int(self.template_vertices.shape[0])

    @property
    def joint_count(self) -> int:
        return int(self.parents.shape[0])

    @property
    def shape_dim(self) -> int:
        return int(self.shape_dirs.shape[2])

    @property
    def face_count(self) -> int:
        return int(self.faces.shape[0])

    @property
    def param_dim(self) -> int:
        return 3 * self.joint_count + self.shape_dim + 3

    @property
    def vertex_parts(self) -> np.ndarray:
        return self.vertex_iuv[:, 0].astype(np.int64)

    def validate(self) -> None:
        """Check every structural invariant, raising ModelValidationError on the first violation"""
        V, K, B = self.vertex_count, self.joint_count, self.shape_dim

        if self.template_vertices.ndim != 2 or self.template_vertices.shape[1] != 3:
            raise ModelValidationError("template_vertices must be V x 3", field="template_vertices")
        if self.faces.ndim != 2 or self.faces.shape[1] != 3:
            raise ModelValidationError("faces must be F x 3", field="faces")
        if self.shape_dirs.ndim != 3 or self.shape_dirs.shape[:2] != (V, 3):
            raise ModelValidationError("shape_dirs must be V x 3 x B", field="shape_dirs")
        if self.joint_regressor.shape != (K, V):
            raise ModelValidationError("joint_regressor must be K_total x V", field="joint_regressor")
        if self.skin_weights.shape != (V, K):
            raise ModelValidationError("skin_weights must be V x K_total", field="skin_weights")
        if self.vertex_iuv.shape != (V, 3):
            raise ModelValidationError("vertex_iuv must be V x 3", field="vertex_iuv")
        if B < 0 or K < 1:
            raise ModelValidationError("model needs at least one joint", field="parents")

        if self.faces.size and (self.faces.min() < 0 or self.faces.max() >= V):
            raise ModelValidationError("face index out of range", field="faces")

        if self.parents[0] != -1:
            raise ModelValidationError("root joint must have no parent", field="parents")
        for child in range(1, K):
            parent = int(self.parents[child])
            if parent < 0 or parent >= child:
                raise ModelValidationError(
                    "kinematic tree not topologically ordered", field="parents"
                )

        if (self.skin_weights < 0).any():
            raise ModelValidationError("skin_weights must be non-negative", field="skin_weights")
        if np.abs(self.skin_weights.sum(axis=1) - 1.0).max(initial=0.0) > NORMALIZATION_TOLERANCE:
            raise ModelValidationError("skin_weights row not normalized", field="skin_weights")
        if np.abs(self.joint_regressor.sum(axis=1) - 1.0).max(initial=0.0) > NORMALIZATION_TOLERANCE:
            raise ModelValidationError("joint_regressor row not normalized", field="joint_regressor")

        parts = self.vertex_iuv[:, 0]
        if (parts != np.round(parts)).any() or parts.min(initial=1) < 1 or parts.max(initial=1) > self.part_count:
            raise ModelValidationError("vertex part id outside 1..P", field="vertex_iuv")
        uv = self.vertex_iuv[:, 1:]
        if uv.size and (uv.min() < 0 or uv.max() > 255):
            raise ModelValidationError("vertex uv outside [0, 255]", field="vertex_iuv")

        face_parts = parts[self.faces]
        if (face_parts != face_parts[:, :1]).any():
            raise ModelValidationError("faces straddle parts", field="faces")

        if self.joint_names and len(self.joint_names) != K:
            raise ModelValidationError("joint_names length differs from K_total", field="joint_names")
        if self.part_names and len(self.part_names) != self.part_count:
            raise ModelValidationError("part_names length differs from P", field="part_names")


@dataclass(frozen=True, eq=False)
class FullParams:
    """Optimization vector: axis-angle pose, shape coefficients and weak-perspective camera"""

    pose: np.ndarray  # 3 * K
    shape: np.ndarray  # B
    camera: np.ndarray  # (f, t_x, t_y)

    def __post_init__(self) -> None:
        object.__setattr__(self, "pose", _frozen(np.ravel(self.pose), np.float64))
        object.__setattr__(self, "shape", _frozen(np.ravel(self.shape), np.float64))
        object.__setattr__(self, "camera", _frozen(np.ravel(self.camera), np.float64))
        if self.pose.size % 3:
            raise ValueError("pose length must be a multiple of 3")
        if self.camera.shape != (3,):
            raise ValueError("camera must hold (f, t_x, t_y)")
        if not self.camera[0] > 0:
            raise ValueError("camera focal must be positive")

    @property
    def joint_count(self) -> int:
        return self.pose.size // 3

    @property
    def dim(self) -> int:
        return self.pose.size + self.shape.size + 3

    def to_vector(self) -> np.ndarray:
        return np.concatenate([self.pose, self.shape, self.camera])

    @classmethod
    def from_vector(cls, vector: np.ndarray, joint_count: int, shape_dim: int) -> "FullParams":
        vector = np.asarray(vector, dtype=np.float64).ravel()
        expected = 3 * joint_count + shape_dim + 3
        if vector.size != expected:
            raise ValueError(f"parameter vector has {vector.size} entries, expected {expected}")
        pose_end = 3 * joint_count
        return cls(
            pose=vector[:pose_end],
            shape=vector[pose_end:pose_end + shape_dim],
            camera=vector[pose_end + shape_dim:],
        )

    def with_pose(self, pose: np.ndarray) -> "FullParams":
        return FullParams(pose=pose, shape=self.shape, camera=self.camera)

    def with_shape(self, shape: np.ndarray) -> "FullParams":
        return FullParams(pose=self.pose, shape=shape, camera=self.camera)

    def check_against(self, model: BodyModel) -> None:
        if self.pose.size != 3 * model.joint_count or self.shape.size != model.shape_dim:
            raise ValueError(
                f"parameters ({self.pose.size} pose, {self.shape.size} shape) do not match model "
                f"({3 * model.joint_count} pose, {model.shape_dim} shape)"
            )


@dataclass(frozen=True, eq=False)
class MeshInstance:
    """Posed mesh and its regressed joints"""

    vertices: np.ndarray  # V x 3
    joints3d: np.ndarray  # K x 3

    def __post_init__(self) -> None:
        object.__setattr__(self, "vertices", _frozen(self.vertices, np.float64))
        object.__setattr__(self, "joints3d", _frozen(self.joints3d, np.float64))
