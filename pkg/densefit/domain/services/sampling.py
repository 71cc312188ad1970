"""Dense keypoint sampling and the perturbations used by the sweeps"""

import logging
from typing import List, Sequence

import numpy as np

from densefit.domain.entities.correspondence import DenseKeypoint, IUVMap

logger = logging.getLogger(__name__)


def sample_dense_keypoints(iuv_map: IUVMap, n: int, seed: int) -> List[DenseKeypoint]:
    """Uniform sample of ``n`` foreground pixels without replacement, in raster order"""
    if n < 0:
        raise ValueError("sample size must be non-negative")
    ys, xs = np.nonzero(iuv_map.parts)
    if xs.size > n:
        rng = np.random.default_rng(seed)
        chosen = np.sort(rng.choice(xs.size, size=n, replace=False))
        ys, xs = ys[chosen], xs[chosen]
    iuv = iuv_map.iuv[ys, xs]
    return [
        DenseKeypoint(x=float(x), y=float(y), part=int(p), u=float(u), v=float(v))
        for x, y, (p, u, v) in zip(xs, ys, iuv)
    ]


def add_uv_noise(kps: Sequence[DenseKeypoint], sigma: float, seed: int) -> List[DenseKeypoint]:
    """Gaussian noise on U and V, clamped to [0, 255]; part ids untouched"""
    if sigma < 0:
        raise ValueError("sigma must be non-negative")
    if not kps:
        return []
    rng = np.random.default_rng(seed)
    noise = rng.normal(0.0, sigma, size=(len(kps), 2))
    noisy = []
    for kp, (du, dv) in zip(kps, noise):
        noisy.append(
            DenseKeypoint(
                x=kp.x,
                y=kp.y,
                part=kp.part,
                u=float(np.clip(kp.u + du, 0.0, 255.0)),
                v=float(np.clip(kp.v + dv, 0.0, 255.0)),
            )
        )
    return noisy


def dropout_keypoints(kps: Sequence[DenseKeypoint], keep_fraction: float, seed: int) -> List[DenseKeypoint]:
    """Keep ``round(keep_fraction * n)`` keypoints chosen uniformly, original order preserved"""
    if not 0.0 <= keep_fraction <= 1.0:
        raise ValueError("keep_fraction must lie in [0, 1]")
    n = len(kps)
    keep = int(np.floor(keep_fraction * n + 0.5))
    if keep >= n:
        return list(kps)
    rng = np.random.default_rng(seed)
    chosen = np.sort(rng.choice(n, size=keep, replace=False))
    return [kps[i] for i in chosen]
