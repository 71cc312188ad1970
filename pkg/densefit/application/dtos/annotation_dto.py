from typing import List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from densefit.application.dtos.config_dto import FrameDTO
from densefit.domain.entities.annotations import AnnotationBundle, SparseKeypointSet
from densefit.domain.entities.body_model import FullParams
from densefit.domain.entities.camera import ImageFrame
from densefit.domain.entities.correspondence import DenseKeypoint
from densefit.domain.errors import AnnotationError


class ParamsDTO(BaseModel):
    """DTO for a full parameter vector split into pose, shape and camera"""

    model_config = ConfigDict(extra="forbid")

    pose: List[float]
    shape: List[float]
    camera: Tuple[float, float, float]

    @model_validator(mode="after")
    def check_entries(self) -> "ParamsDTO":
        if len(self.pose) % 3:
            raise ValueError("pose length must be a multiple of 3")
        if self.camera[0] <= 0:
            raise ValueError("camera focal must be positive")
        return self

    @classmethod
    def from_entity(cls, params: FullParams) -> "ParamsDTO":
        return cls(pose=params.pose.tolist(), shape=params.shape.tolist(), camera=tuple(params.camera.tolist()))

    def to_entity(self) -> FullParams:
        return FullParams(pose=np.array(self.pose), shape=np.array(self.shape), camera=np.array(self.camera))


class SparseKeypointsDTO(BaseModel):
    """DTO for sparse 2D keypoints with visibility"""

    model_config = ConfigDict(extra="forbid")

    positions: List[Tuple[float, float]]
    visible: List[bool]
    ids: List[int]

    @model_validator(mode="after")
    def same_length(self) -> "SparseKeypointsDTO":
        if not len(self.positions) == len(self.visible) == len(self.ids):
            raise ValueError("positions, visible and ids must have the same length")
        return self

    @classmethod
    def from_entity(cls, sparse: SparseKeypointSet) -> "SparseKeypointsDTO":
        return cls(
            positions=[tuple(p) for p in sparse.positions.tolist()],
            visible=sparse.visible.tolist(),
            ids=sparse.ids.tolist(),
        )

    def to_entity(self) -> SparseKeypointSet:
        return SparseKeypointSet(
            positions=np.array(self.positions, dtype=np.float64).reshape(-1, 2),
            visible=np.array(self.visible, dtype=bool),
            ids=np.array(self.ids, dtype=np.int64),
        )


class DenseKeypointDTO(BaseModel):
    """DTO for one dense keypoint"""

    model_config = ConfigDict(extra="forbid")

    x: float
    y: float
    i: int = Field(ge=1)
    u: float = Field(ge=0, le=255)
    v: float = Field(ge=0, le=255)

    @classmethod
    def from_entity(cls, kp: DenseKeypoint) -> "DenseKeypointDTO":
        return cls(x=kp.x, y=kp.y, i=kp.part, u=kp.u, v=kp.v)

    def to_entity(self) -> DenseKeypoint:
        return DenseKeypoint(x=self.x, y=self.y, part=self.i, u=self.u, v=self.v)


class AnnotationFileDTO(BaseModel):
    """DTO for an annotation file; absent sources are omitted or null"""

    model_config = ConfigDict(extra="forbid")

    frame: FrameDTO = Field(default_factory=FrameDTO)
    gt_params: Optional[ParamsDTO] = None
    gt_joints3d: Optional[List[Tuple[float, float, float]]] = None
    sparse2d: Optional[SparseKeypointsDTO] = None
    dense: Optional[List[DenseKeypointDTO]] = None

    @classmethod
    def from_entity(cls, ann: AnnotationBundle) -> "AnnotationFileDTO":
        return cls(
            frame=FrameDTO(width=ann.frame.width, height=ann.frame.height),
            gt_params=ParamsDTO.from_entity(ann.gt_params) if ann.gt_params is not None else None,
            gt_joints3d=[tuple(j) for j in ann.gt_joints3d.tolist()] if ann.gt_joints3d is not None else None,
            sparse2d=SparseKeypointsDTO.from_entity(ann.sparse2d) if ann.sparse2d is not None else None,
            dense=[DenseKeypointDTO.from_entity(kp) for kp in ann.dense] if ann.dense is not None else None,
        )

    def to_entity(self) -> AnnotationBundle:
        frame: ImageFrame = self.frame.to_entity()
        dense = None
        if self.dense is not None:
            dense = []
            for index, kp in enumerate(self.dense):
                if not frame.contains(kp.x, kp.y):
                    raise AnnotationError(
                        f"dense keypoint {index} at ({kp.x}, {kp.y}) lies outside the frame", field="dense"
                    )
                dense.append(kp.to_entity())
        return AnnotationBundle(
            frame=frame,
            gt_params=self.gt_params.to_entity() if self.gt_params is not None else None,
            gt_joints3d=np.array(self.gt_joints3d) if self.gt_joints3d is not None else None,
            sparse2d=self.sparse2d.to_entity() if self.sparse2d is not None else None,
            dense=tuple(dense) if dense is not None else None,
        )

