"""Weak-perspective projection: scale, shift, drop depth, map to pixels"""

from typing import Union

import numpy as np
import torch

from densefit.domain.entities.camera import CameraParams, ImageFrame

ArrayLike = Union[np.ndarray, torch.Tensor]


def _camera_entries(cam):
    if isinstance(cam, CameraParams):
        return cam.focal, cam.tx, cam.ty
    return cam[0], cam[1], cam[2]


def to_normalized(points: ArrayLike, cam) -> ArrayLike:
    """``f * (x, y) + (t_x, t_y)``, z ignored"""
    f, tx, ty = _camera_entries(cam)
    x = f * points[..., 0] + tx
    y = f * points[..., 1] + ty
    if isinstance(points, torch.Tensor):
        return torch.stack([x, y], -1)
    return np.stack([x, y], -1)


def normalized_to_pixels(normalized: ArrayLike, frame: ImageFrame) -> ArrayLike:
    px = (normalized[..., 0] + 1.0) / 2.0 * (frame.width - 1)
    py = (normalized[..., 1] + 1.0) / 2.0 * (frame.height - 1)
    if isinstance(normalized, torch.Tensor):
        return torch.stack([px, py], -1)
    return np.stack([px, py], -1)


def project(points: ArrayLike, cam, frame: ImageFrame) -> ArrayLike:
    """Project N x 3 model points to N x 2 pixel coordinates

    Works on numpy arrays and on torch tensors (then ``cam`` may be a
    ``(f, t_x, t_y)`` tensor and the result stays differentiable).
    """
    if not isinstance(points, torch.Tensor):
        points = np.asarray(points, dtype=np.float64)
    return normalized_to_pixels(to_normalized(points, cam), frame)
