"""Z-buffered IUV rasterizer for synthetic ground truth"""

import logging

import numpy as np

from densefit.domain.entities.body_model import BodyModel, MeshInstance
from densefit.domain.entities.camera import CameraParams, ImageFrame
from densefit.domain.entities.correspondence import IUVMap
from densefit.domain.services.projection import project

logger = logging.getLogger(__name__)

MIN_SCREEN_AREA = 1e-12


def rasterize_iuv(
    model: BodyModel, mesh: MeshInstance, cam: CameraParams, frame: ImageFrame
) -> IUVMap:
    """Render part ids and interpolated (U, V) of the nearest face per pixel

    Pixel centres sit on integer coordinates. Smaller camera-space z is
    nearer; on equal depth the earlier face keeps the pixel.
    """
    W, H = frame.width, frame.height
    screen = project(mesh.vertices, cam, frame)
    depth = mesh.vertices[:, 2]
    vertex_uv = model.vertex_iuv[:, 1:]
    vertex_parts = model.vertex_parts

    zbuffer = np.full((H, W), np.inf)
    out = np.zeros((H, W, 3), dtype=np.uint8)
    drawn = 0

    for face_id, (a, b, c) in enumerate(model.faces):
        pa, pb, pc = screen[a], screen[b], screen[c]
        area = (pb[0] - pa[0]) * (pc[1] - pa[1]) - (pb[1] - pa[1]) * (pc[0] - pa[0])
        if abs(area) < MIN_SCREEN_AREA:
            continue

        corners = np.stack([pa, pb, pc])
        x0 = max(int(np.ceil(corners[:, 0].min())), 0)
        x1 = min(int(np.floor(corners[:, 0].max())), W - 1)
        y0 = max(int(np.ceil(corners[:, 1].min())), 0)
        y1 = min(int(np.floor(corners[:, 1].max())), H - 1)
        if x0 > x1 or y0 > y1:
            continue

        xs, ys = np.meshgrid(np.arange(x0, x1 + 1), np.arange(y0, y1 + 1))
        # edge functions normalised by the signed area
        w0 = ((pb[0] - xs) * (pc[1] - ys) - (pb[1] - ys) * (pc[0] - xs)) / area
        w1 = ((pc[0] - xs) * (pa[1] - ys) - (pc[1] - ys) * (pa[0] - xs)) / area
        w2 = 1.0 - w0 - w1
        inside = (w0 >= 0) & (w1 >= 0) & (w2 >= 0)
        if not inside.any():
            continue

        z = w0 * depth[a] + w1 * depth[b] + w2 * depth[c]
        window = zbuffer[y0:y1 + 1, x0:x1 + 1]
        wins = inside & (z < window)
        if not wins.any():
            continue

        window[wins] = z[wins]
        u = w0 * vertex_uv[a, 0] + w1 * vertex_uv[b, 0] + w2 * vertex_uv[c, 0]
        v = w0 * vertex_uv[a, 1] + w1 * vertex_uv[b, 1] + w2 * vertex_uv[c, 1]
        target = out[y0:y1 + 1, x0:x1 + 1]
        target[wins, 0] = vertex_parts[a]
        target[wins, 1] = np.clip(np.rint(u[wins]), 0, 255)
        target[wins, 2] = np.clip(np.rint(v[wins]), 0, 255)
        drawn += 1

    logger.debug("Rasterized %d of %d faces into %dx%d frame", drawn, model.face_count, W, H)
    return IUVMap(out)
