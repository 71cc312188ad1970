"""Shape blending, forward kinematics and linear blend skinning

The torch path is the single implementation; numpy callers go through
``pose_mesh`` which evaluates it without autograd.
"""

import logging
import weakref
from dataclasses import dataclass
from typing import List, Tuple

import numpy as np
import torch

from densefit.domain.entities.body_model import BodyModel, FullParams, MeshInstance
from densefit.settings import SMALL_ANGLE

logger = logging.getLogger(__name__)

DTYPE = torch.float64


def _skew(omega: np.ndarray) -> np.ndarray:
    x, y, z = omega
    return np.array([[0.0, -z, y], [z, 0.0, -x], [-y, x, 0.0]])


def rodrigues(omega) -> np.ndarray:
    """Axis-angle vector to 3x3 rotation matrix"""
    omega = np.asarray(omega, dtype=np.float64).reshape(3)
    theta = float(np.linalg.norm(omega))
    if theta < SMALL_ANGLE:
        # first-order series, exact identity at zero
        return np.eye(3) + _skew(omega)
    K = _skew(omega / theta)
    return np.eye(3) + np.sin(theta) * K + (1.0 - np.cos(theta)) * (K @ K)


def batch_skew(omega: torch.Tensor) -> torch.Tensor:
    zero = torch.zeros_like(omega[..., 0])
    x, y, z = omega.unbind(-1)
    return torch.stack(
        [
            torch.stack([zero, -z, y], -1),
            torch.stack([z, zero, -x], -1),
            torch.stack([-y, x, zero], -1),
        ],
        -2,
    )


def batch_rodrigues(omega: torch.Tensor) -> torch.Tensor:
    """Differentiable Rodrigues formula for ``(..., 3)`` axis-angle tensors"""
    sq = (omega * omega).sum(-1, keepdim=True)
    small = sq < SMALL_ANGLE**2
    # keep the large-angle branch finite where it is not selected
    theta = torch.sqrt(torch.where(small, torch.ones_like(sq), sq))
    K = batch_skew(omega / theta)
    sin = torch.sin(theta).unsqueeze(-1)
    cos = torch.cos(theta).unsqueeze(-1)
    eye = torch.eye(3, dtype=omega.dtype, device=omega.device).expand(K.shape)
    full = eye + sin * K + (1.0 - cos) * (K @ K)
    first_order = eye + batch_skew(omega)
    return torch.where(small.unsqueeze(-1), first_order, full)


@dataclass(frozen=True)
class ModelTensors:
    """float64 tensors of a body model, built once per model"""

    template: torch.Tensor
    shape_dirs: torch.Tensor
    joint_regressor: torch.Tensor
    skin_weights: torch.Tensor
    parents: Tuple[int, ...]


_TENSOR_CACHE: "weakref.WeakKeyDictionary[BodyModel, ModelTensors]" = weakref.WeakKeyDictionary()


def model_tensors(model: BodyModel) -> ModelTensors:
    tensors = _TENSOR_CACHE.get(model)
    if tensors is None:
        tensors = ModelTensors(
            template=torch.tensor(model.template_vertices, dtype=DTYPE),
            shape_dirs=torch.tensor(model.shape_dirs, dtype=DTYPE),
            joint_regressor=torch.tensor(model.joint_regressor, dtype=DTYPE),
            skin_weights=torch.tensor(model.skin_weights, dtype=DTYPE),
            parents=tuple(int(p) for p in model.parents),
        )
        _TENSOR_CACHE[model] = tensors
    return tensors


def shaped_template(tensors: ModelTensors, shape: torch.Tensor) -> torch.Tensor:
    return tensors.template + torch.einsum("vdb,b->vd", tensors.shape_dirs, shape)


def forward_mesh(
    tensors: ModelTensors, pose: torch.Tensor, shape: torch.Tensor
) -> Tuple[torch.Tensor, torch.Tensor, torch.Tensor]:
    """Posed vertices, regressed joints and local joint rotations

    The root rotation acts about the model origin; every other joint
    rotates its subtree about its rest position.
    """
    v_shaped = shaped_template(tensors, shape)
    J = tensors.joint_regressor @ v_shaped
    local = batch_rodrigues(pose.reshape(-1, 3))

    rotations: List[torch.Tensor] = []
    translations: List[torch.Tensor] = []
    for k, parent in enumerate(tensors.parents):
        if parent < 0:
            rotations.append(local[k])
            translations.append(local[k] @ J[k])
        else:
            rotations.append(rotations[parent] @ local[k])
            translations.append(rotations[parent] @ (J[k] - J[parent]) + translations[parent])
    G_R = torch.stack(rotations)
    G_t = torch.stack(translations)

    # Skin LBS
    t_skin = G_t - (G_R @ J.unsqueeze(-1)).squeeze(-1)
    W_R = torch.einsum("vk,kij->vij", tensors.skin_weights, G_R)
    W_t = tensors.skin_weights @ t_skin
    vertices = (W_R @ v_shaped.unsqueeze(-1)).squeeze(-1) + W_t

    joints3d = tensors.joint_regressor @ vertices
    return vertices, joints3d, local


def pose_mesh(model: BodyModel, params: FullParams) -> MeshInstance:
    """Posed mesh for ``params``; the camera entries are ignored"""
    params.check_against(model)
    tensors = model_tensors(model)
    with torch.no_grad():
        vertices, joints3d, _ = forward_mesh(
            tensors,
            torch.as_tensor(params.pose, dtype=DTYPE),
            torch.as_tensor(params.shape, dtype=DTYPE),
        )
    return MeshInstance(vertices=vertices.numpy(), joints3d=joints3d.numpy())


def shape_template(model: BodyModel, shape) -> np.ndarray:
    shape = np.asarray(shape, dtype=np.float64).ravel()
    if shape.size != model.shape_dim:
        raise ValueError(f"shape has {shape.size} coefficients, model expects {model.shape_dim}")
    return model.template_vertices + model.shape_dirs @ shape


def rest_joints(model: BodyModel, shape) -> np.ndarray:
    """Joint positions of the shaped T-pose"""
    return model.joint_regressor @ shape_template(model, shape)


def zero_pose_mesh(model: BodyModel, shape) -> MeshInstance:
    vertices = shape_template(model, shape)
    return MeshInstance(vertices=vertices, joints3d=model.joint_regressor @ vertices)
