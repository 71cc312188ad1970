from dataclasses import dataclass
from typing import Optional, Tuple

import numpy as np

from densefit.domain.entities.body_model import FullParams
from densefit.domain.entities.camera import ImageFrame
from densefit.domain.entities.correspondence import DenseKeypoint
from densefit.domain.errors import AnnotationError


@dataclass(frozen=True, eq=False)
class SparseKeypointSet:
    """Sparse 2D keypoints in pixels with visibility flags"""

    positions: np.ndarray  # J x 2
    visible: np.ndarray  # J, bool
    ids: np.ndarray  # J, int

    def __post_init__(self) -> None:
        positions = np.array(self.positions, dtype=np.float64, copy=True).reshape(-1, 2)
        visible = np.array(self.visible, dtype=bool, copy=True).ravel()
        ids = np.array(self.ids, dtype=np.int64, copy=True).ravel()
        if not positions.shape[0] == visible.shape[0] == ids.shape[0]:
            raise AnnotationError("sparse keypoint arrays differ in length", field="sparse2d")
        for array in (positions, visible, ids):
            array.flags.writeable = False
        object.__setattr__(self, "positions", positions)
        object.__setattr__(self, "visible", visible)
        object.__setattr__(self, "ids", ids)

    def __len__(self) -> int:
        return int(self.ids.shape[0])

    @property
    def visible_count(self) -> int:
        return int(self.visible.sum())


SOURCES = ("gt_params", "joints3d", "sparse2d", "dense")


@dataclass(frozen=True, eq=False)
class AnnotationBundle:
    """Whatever supervision one image carries; absent sources are None"""

    frame: ImageFrame
    gt_params: Optional[FullParams] = None
    gt_joints3d: Optional[np.ndarray] = None
    sparse2d: Optional[SparseKeypointSet] = None
    dense: Optional[Tuple[DenseKeypoint, ...]] = None

    def __post_init__(self) -> None:
        if self.dense is not None:
            dense = tuple(self.dense)
            object.__setattr__(self, "dense", dense if dense else None)
        if self.gt_joints3d is not None:
            joints = np.array(self.gt_joints3d, dtype=np.float64, copy=True).reshape(-1, 3)
            joints.flags.writeable = False
            object.__setattr__(self, "gt_joints3d", joints)
        if not self.sources:
            raise AnnotationError("annotation bundle carries no supervision source")

    @property
    def sources(self) -> Tuple[str, ...]:
        present = []
        if self.gt_params is not None:
            present.append("gt_params")
        if self.gt_joints3d is not None:
            present.append("joints3d")
        if self.sparse2d is not None:
            present.append("sparse2d")
        if self.dense is not None:
            present.append("dense")
        return tuple(present)

    @property
    def has_3d(self) -> bool:
        return self.gt_params is not None or self.gt_joints3d is not None

    @property
    def has_2d(self) -> bool:
        return self.sparse2d is not None

    @property
    def has_dense(self) -> bool:
        return self.dense is not None

    def restricted_to(self, sources) -> Optional["AnnotationBundle"]:
        """Copy keeping only the named sources, or None when nothing is left"""
        keep = set(sources)
        candidate = dict(
            gt_params=self.gt_params if "gt_params" in keep else None,
            gt_joints3d=self.gt_joints3d if "joints3d" in keep else None,
            sparse2d=self.sparse2d if "sparse2d" in keep else None,
            dense=self.dense if "dense" in keep else None,
        )
        if all(value is None for value in candidate.values()):
            return None
        return AnnotationBundle(frame=self.frame, **candidate)

    def with_dense(self, dense) -> Optional["AnnotationBundle"]:
        dense = tuple(dense) if dense is not None else None
        if not dense and not (self.has_3d or self.has_2d):
            return None
        return AnnotationBundle(
            frame=self.frame,
            gt_params=self.gt_params,
            gt_joints3d=self.gt_joints3d,
            sparse2d=self.sparse2d,
            dense=dense or None,
        )
