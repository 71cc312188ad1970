"""Synthetic scenes: random ground truth rendered into every annotation source"""

import logging
from typing import Optional

import numpy as np

from densefit.domain.entities.annotations import AnnotationBundle, SparseKeypointSet
from densefit.domain.entities.body_model import BodyModel, FullParams
from densefit.domain.entities.camera import CameraParams, ImageFrame
from densefit.domain.entities.correspondence import UVAtlas
from densefit.domain.entities.experiment import SyntheticScene
from densefit.domain.errors import AtlasError, SceneGenerationError
from densefit.domain.services.atlas import resolve_anchors
from densefit.domain.services.kinematics import pose_mesh
from densefit.domain.services.projection import project
from densefit.domain.services.rasterizer import rasterize_iuv
from densefit.domain.services.sampling import sample_dense_keypoints
from densefit import settings

logger = logging.getLogger(__name__)


def sample_gt_params(model: BodyModel, rng: np.random.Generator) -> FullParams:
    pose = rng.uniform(-settings.JOINT_ANGLE_RANGE, settings.JOINT_ANGLE_RANGE, 3 * model.joint_count)
    pose[:3] = rng.uniform(-settings.ROOT_ANGLE_RANGE, settings.ROOT_ANGLE_RANGE, 3)
    shape = np.clip(rng.standard_normal(model.shape_dim), -settings.SHAPE_CLIP, settings.SHAPE_CLIP)
    focal = rng.uniform(*settings.FOCAL_RANGE)
    translation = rng.uniform(-settings.TRANSLATION_RANGE, settings.TRANSLATION_RANGE, 2)
    return FullParams(pose=pose, shape=shape, camera=np.array([focal, *translation]))


def generate_scene(
    model: BodyModel,
    atlas: Optional[UVAtlas],
    seed: int,
    frame: Optional[ImageFrame] = None,
    scene_id: int = 0,
) -> SyntheticScene:
    """Sample ground truth from ``seed`` and render all four annotation sources

    When ``atlas`` is given every sampled dense keypoint must resolve to a
    surface anchor.
    """
    frame = frame if frame is not None else ImageFrame()
    rng = np.random.default_rng(seed)

    for attempt in range(settings.MAX_RENDER_ATTEMPTS):
        gt = sample_gt_params(model, rng)
        cam = CameraParams.from_array(gt.camera)
        mesh = pose_mesh(model, gt)
        iuv_map = rasterize_iuv(model, mesh, cam, frame)
        if iuv_map.foreground_count == 0:
            logger.warning("Scene %d attempt %d rendered no foreground, resampling", scene_id, attempt + 1)
            continue

        low, high = settings.DENSE_COUNT_RANGE
        dense_count = int(rng.integers(low, high + 1))
        sample_seed = int(rng.integers(2**31 - 1))
        dense = sample_dense_keypoints(iuv_map, dense_count, sample_seed)
        if atlas is not None:
            try:
                resolve_anchors(atlas, dense)
            except AtlasError as exc:
                raise SceneGenerationError(
                    f"Scene {scene_id}: dense keypoint cannot be anchored: {exc.message}", field="dense"
                ) from exc

        joints2d = project(mesh.joints3d, cam, frame)
        visible = np.array([frame.contains(x, y) for x, y in joints2d])
        if not visible.all():
            logger.warning("Scene %d: %d joint(s) project outside the frame", scene_id, int((~visible).sum()))
        sparse = SparseKeypointSet(positions=joints2d, visible=visible, ids=np.arange(model.joint_count))

        annotations = AnnotationBundle(
            frame=frame,
            gt_params=gt,
            gt_joints3d=mesh.joints3d,
            sparse2d=sparse,
            dense=tuple(dense),
        )
        return SyntheticScene(
            scene_id=scene_id,
            seed=seed,
            gt_params=gt,
            annotations=annotations,
            iuv_map=iuv_map,
            frame=frame,
            dense_count=dense_count,
            sample_seed=sample_seed,
        )

    raise SceneGenerationError(
        f"scene {scene_id} (seed {seed}) rendered no foreground in {settings.MAX_RENDER_ATTEMPTS} attempts",
        field="seed",
    )
