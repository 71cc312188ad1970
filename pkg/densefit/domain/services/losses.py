"""3D, sparse 2D and dense keypoint losses with exact gradients

Every loss is a plain sum written in torch; gradients come from
autograd on float64 tensors.
"""

import logging
from typing import Dict, Optional, Sequence

import numpy as np
import torch

from densefit.domain.entities.annotations import AnnotationBundle, SparseKeypointSet
from densefit.domain.entities.body_model import BodyModel, FullParams, MeshInstance
from densefit.domain.entities.camera import CameraParams, ImageFrame
from densefit.domain.entities.correspondence import DenseKeypoint, UVAtlas
from densefit.domain.entities.objectives import LossBreakdown, LossTerm, LossWeights
from densefit.domain.errors import AnnotationError
from densefit.domain.services.atlas import anchor_arrays, resolve_anchors
from densefit.domain.services.kinematics import DTYPE, batch_rodrigues, forward_mesh, model_tensors
from densefit.domain.services.projection import project

logger = logging.getLogger(__name__)

TERMS = ("l3d_joints", "l_smpl", "l2d", "l_dense")


def safe_norm(x: torch.Tensor, dims) -> torch.Tensor:
    """Euclidean norm whose subgradient at zero is zero"""
    sq = (x * x).sum(dims)
    positive = sq > 0
    root = torch.sqrt(torch.where(positive, sq, torch.ones_like(sq)))
    return torch.where(positive, root, torch.zeros_like(sq))


def gradient_of(value: torch.Tensor, inputs):
    """Gradients of a scalar w.r.t. each input; zeros where the value does not depend on it"""
    if not value.requires_grad:
        return tuple(torch.zeros_like(x) for x in inputs)
    grads = torch.autograd.grad(value, inputs, allow_unused=True)
    return tuple(torch.zeros_like(x) if g is None else g for x, g in zip(inputs, grads))


def joints3d_term(joints: torch.Tensor, target: torch.Tensor) -> torch.Tensor:
    return safe_norm(joints - target, -1).sum()


def smpl_term(
    rotations: torch.Tensor,
    target_rotations: torch.Tensor,
    shape: torch.Tensor,
    target_shape: torch.Tensor,
    use_pose: bool,
    use_shape: bool,
) -> torch.Tensor:
    total = torch.zeros((), dtype=DTYPE)
    if use_pose:
        total = total + safe_norm(rotations - target_rotations, (-2, -1)).sum()
    if use_shape:
        total = total + safe_norm(shape - target_shape, -1)
    return total


def sparse2d_term(joints2d: torch.Tensor, target: torch.Tensor, visible: torch.Tensor) -> torch.Tensor:
    return (visible.unsqueeze(-1) * (joints2d - target).abs()).sum()


def dense_term(
    vertices2d: torch.Tensor, anchor_vertices: torch.Tensor, anchor_weights: torch.Tensor, target: torch.Tensor
) -> torch.Tensor:
    predicted = (anchor_weights.unsqueeze(-1) * vertices2d[anchor_vertices]).sum(1)
    return (predicted - target).abs().sum()


class Objective:
    """Weighted objective over the full parameter vector for one annotation bundle

    Targets and dense anchors are resolved once at construction.
    """

    def __init__(self, model: BodyModel, atlas: Optional[UVAtlas], ann: AnnotationBundle, weights: LossWeights):
        self.model = model
        self.weights = weights
        self.frame = ann.frame
        self.tensors = model_tensors(model)
        K, B = model.joint_count, model.shape_dim
        self._pose_end = 3 * K
        self._shape_end = 3 * K + B

        self.target_joints3d = None
        if ann.gt_joints3d is not None:
            if ann.gt_joints3d.shape != (K, 3):
                raise AnnotationError("gt_joints3d does not match the model joints", field="gt_joints3d")
            self.target_joints3d = torch.tensor(ann.gt_joints3d, dtype=DTYPE)

        self.target_rotations = self.target_shape = None
        if ann.gt_params is not None:
            ann.gt_params.check_against(model)
            self.target_rotations = batch_rodrigues(torch.tensor(ann.gt_params.pose, dtype=DTYPE).reshape(K, 3))
            self.target_shape = torch.tensor(ann.gt_params.shape, dtype=DTYPE)

        self.target_joints2d = None
        if ann.sparse2d is not None:
            if len(ann.sparse2d) != K:
                raise AnnotationError(
                    f"{len(ann.sparse2d)} sparse keypoints for {K} model joints", field="sparse2d"
                )
            self.target_joints2d = torch.tensor(ann.sparse2d.positions, dtype=DTYPE)
            self.visible = torch.tensor(ann.sparse2d.visible, dtype=DTYPE)

        self.anchor_vertices = None
        if ann.dense is not None:
            if atlas is None:
                raise AnnotationError("dense supervision needs a UV atlas", field="dense")
            vertex_ids, vertex_weights = anchor_arrays(resolve_anchors(atlas, ann.dense))
            self.anchor_vertices = torch.tensor(vertex_ids, dtype=torch.long)
            self.anchor_weights = torch.tensor(vertex_weights, dtype=DTYPE)
            self.target_dense = torch.tensor([[kp.x, kp.y] for kp in ann.dense], dtype=DTYPE)

    def split(self, vector: torch.Tensor):
        return vector[: self._pose_end], vector[self._pose_end:self._shape_end], vector[self._shape_end:]

    def terms(self, vector: torch.Tensor) -> Dict[str, torch.Tensor]:
        """Unweighted loss terms; absent annotations give exact zeros"""
        pose, shape, camera = self.split(vector)
        vertices, joints3d, rotations = forward_mesh(self.tensors, pose, shape)
        zero = torch.zeros((), dtype=DTYPE)
        terms = dict.fromkeys(TERMS, zero)

        if self.target_joints3d is not None:
            terms["l3d_joints"] = joints3d_term(joints3d, self.target_joints3d)
        if self.target_rotations is not None:
            terms["l_smpl"] = smpl_term(
                rotations,
                self.target_rotations,
                shape,
                self.target_shape,
                self.weights.use_pose,
                self.weights.use_shape,
            )
        if self.target_joints2d is not None:
            joints2d = project(joints3d, camera, self.frame)
            terms["l2d"] = sparse2d_term(joints2d, self.target_joints2d, self.visible)
        if self.anchor_vertices is not None:
            vertices2d = project(vertices, camera, self.frame)
            terms["l_dense"] = dense_term(vertices2d, self.anchor_vertices, self.anchor_weights, self.target_dense)
        return terms

    def weighted(self, terms: Dict[str, torch.Tensor]) -> torch.Tensor:
        w = self.weights
        return (
            w.lambda_3d * (terms["l3d_joints"] + terms["l_smpl"])
            + w.lambda_2d * terms["l2d"]
            + w.lambda_dense * terms["l_dense"]
        )

    def breakdown(self, params: FullParams) -> LossBreakdown:
        params.check_against(self.model)
        vector = torch.tensor(params.to_vector(), dtype=DTYPE, requires_grad=True)
        terms = self.terms(vector)
        total = self.weighted(terms)
        (gradient,) = gradient_of(total, (vector,))
        values = {name: float(terms[name].detach()) for name in TERMS}
        w = self.weights
        return LossBreakdown(
            **values,
            total=w.lambda_3d * (values["l3d_joints"] + values["l_smpl"])
            + w.lambda_2d * values["l2d"]
            + w.lambda_dense * values["l_dense"],
            gradient=gradient.numpy(),
        )


def total_loss_and_grad(
    model: BodyModel, atlas: Optional[UVAtlas], params: FullParams, ann: AnnotationBundle, weights: LossWeights
) -> LossBreakdown:
    """Weighted sum of the 3D, sparse 2D and dense losses and its gradient over FullParams"""
    return Objective(model, atlas, ann, weights).breakdown(params)


def loss_3d(model: BodyModel, params: FullParams, ann: AnnotationBundle, weights: LossWeights) -> LossTerm:
    """Joint distance plus rotation/shape distance, gradient over FullParams"""
    if not ann.has_3d:
        raise AnnotationError("3D loss needs gt_joints3d or gt_params", field="gt_params")
    objective = Objective(model, None, ann.restricted_to(("gt_params", "joints3d")), weights)
    vector = torch.tensor(params.to_vector(), dtype=DTYPE, requires_grad=True)
    terms = objective.terms(vector)
    value = terms["l3d_joints"] + terms["l_smpl"]
    (gradient,) = gradient_of(value, (vector,))
    return LossTerm(
        value=float(value.detach()),
        gradient=gradient.numpy(),
        components={"l3d_joints": float(terms["l3d_joints"].detach()), "l_smpl": float(terms["l_smpl"].detach())},
    )


def loss_2d(pred_joints2d, keypoints: SparseKeypointSet) -> LossTerm:
    """Visibility-masked L1 keypoint distance, gradient over the predicted positions"""
    pred = torch.tensor(np.asarray(pred_joints2d, dtype=np.float64).reshape(-1, 2), requires_grad=True)
    if pred.shape[0] != len(keypoints):
        raise AnnotationError(
            f"{pred.shape[0]} predicted keypoints for {len(keypoints)} annotated", field="sparse2d"
        )
    value = sparse2d_term(
        pred,
        torch.tensor(keypoints.positions, dtype=DTYPE),
        torch.tensor(keypoints.visible, dtype=DTYPE),
    )
    (gradient,) = gradient_of(value, (pred,))
    return LossTerm(value=float(value.detach()), gradient=gradient.numpy())


def loss_dense(
    mesh: MeshInstance,
    cam: CameraParams,
    frame: ImageFrame,
    atlas: UVAtlas,
    dense: Sequence[DenseKeypoint],
) -> LossTerm:
    """L1 distance between dense keypoints and their anchored projections

    Gradient is over the mesh vertices; the camera gradient is returned
    under ``extra_gradients["camera"]``.
    """
    if not dense:
        raise AnnotationError("dense loss needs at least one keypoint", field="dense")
    vertex_ids, vertex_weights = anchor_arrays(resolve_anchors(atlas, dense))
    vertices = torch.tensor(mesh.vertices, dtype=DTYPE, requires_grad=True)
    camera = torch.tensor(cam.as_array(), dtype=DTYPE, requires_grad=True)
    value = dense_term(
        project(vertices, camera, frame),
        torch.tensor(vertex_ids, dtype=torch.long),
        torch.tensor(vertex_weights, dtype=DTYPE),
        torch.tensor([[kp.x, kp.y] for kp in dense], dtype=DTYPE),
    )
    vertex_grad, camera_grad = gradient_of(value, (vertices, camera))
    return LossTerm(
        value=float(value.detach()),
        gradient=vertex_grad.numpy(),
        extra_gradients={"camera": camera_grad.numpy()},
    )
