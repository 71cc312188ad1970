"""Mesh, joint, shape-only and dense keypoint errors of a fit"""

import logging
from typing import Optional

import numpy as np

from densefit.domain.entities.body_model import BodyModel, FullParams, MeshInstance
from densefit.domain.entities.camera import CameraParams, ImageFrame
from densefit.domain.entities.correspondence import UVAtlas
from densefit.domain.entities.objectives import MetricReport
from densefit.domain.services.atlas import anchor_arrays, build_atlas, resolve_anchors
from densefit.domain.services.kinematics import pose_mesh, zero_pose_mesh
from densefit.domain.services.projection import project
from densefit.domain.services.rasterizer import rasterize_iuv
from densefit.domain.services.sampling import sample_dense_keypoints
from densefit.settings import DKD_SAMPLES, DKD_SEED

logger = logging.getLogger(__name__)


def mean_distance(a: np.ndarray, b: np.ndarray) -> float:
    return float(np.linalg.norm(a - b, axis=-1).mean())


def root_aligned(mesh: MeshInstance):
    """Vertices and joints translated so the root joint is at the origin"""
    root = mesh.joints3d[0]
    return mesh.vertices - root, mesh.joints3d - root


def dense_keypoint_distance(
    model: BodyModel,
    atlas: UVAtlas,
    pred_mesh: MeshInstance,
    pred_cam: CameraParams,
    gt_mesh: MeshInstance,
    gt_cam: CameraParams,
    frame: ImageFrame,
    samples: int = DKD_SAMPLES,
    seed: int = DKD_SEED,
) -> float:
    """Mean pixel L1 distance of a fixed dense sample projected through both fits

    The sample is drawn from the ground-truth render; each keypoint is
    anchored on the surface and located under the predicted and the
    ground-truth mesh and camera.
    """
    iuv_map = rasterize_iuv(model, gt_mesh, gt_cam, frame)
    dense = sample_dense_keypoints(iuv_map, samples, seed)
    if not dense:
        logger.warning("Ground-truth render is empty; dense keypoint distance set to 0")
        return 0.0
    vertex_ids, weights = anchor_arrays(resolve_anchors(atlas, dense))

    def located(mesh: MeshInstance, cam: CameraParams) -> np.ndarray:
        screen = project(mesh.vertices, cam, frame)
        return (weights[..., None] * screen[vertex_ids]).sum(1)

    gap = np.abs(located(pred_mesh, pred_cam) - located(gt_mesh, gt_cam)).sum(-1)
    return float(gap.mean())


def evaluate_metrics(
    model: BodyModel,
    pred: FullParams,
    gt: FullParams,
    atlas: Optional[UVAtlas] = None,
    frame: Optional[ImageFrame] = None,
    align_root: bool = True,
) -> MetricReport:
    """PVE, MPJPE, PVE-T in model units and DKD in pixels"""
    pred.check_against(model)
    gt.check_against(model)
    atlas = atlas if atlas is not None else build_atlas(model)
    frame = frame if frame is not None else ImageFrame()

    pred_mesh = pose_mesh(model, pred)
    gt_mesh = pose_mesh(model, gt)
    if align_root:
        pred_vertices, pred_joints = root_aligned(pred_mesh)
        gt_vertices, gt_joints = root_aligned(gt_mesh)
    else:
        pred_vertices, pred_joints = pred_mesh.vertices, pred_mesh.joints3d
        gt_vertices, gt_joints = gt_mesh.vertices, gt_mesh.joints3d

    # shape-only error: both meshes at zero pose, no alignment
    pve_t = mean_distance(zero_pose_mesh(model, pred.shape).vertices, zero_pose_mesh(model, gt.shape).vertices)

    return MetricReport(
        pve=mean_distance(pred_vertices, gt_vertices),
        mpjpe=mean_distance(pred_joints, gt_joints),
        pve_t=pve_t,
        dkd=dense_keypoint_distance(
            model,
            atlas,
            pred_mesh,
            CameraParams.from_array(pred.camera),
            gt_mesh,
            CameraParams.from_array(gt.camera),
            frame,
        ),
    )
