"""UV atlas over the template mesh and the surface mapping phi

Each face's UV triangle gets a precomputed inverse affine transform so a
(U, V) query solves for barycentric coordinates with one matrix product
per part.
"""

import logging
from typing import Dict, Iterable, List, Sequence, Union

import numpy as np

from densefit.domain.entities.body_model import BodyModel
from densefit.domain.entities.correspondence import DenseAnchor, DenseKeypoint, PartIndex, UVAtlas
from densefit.domain.errors import AtlasError

logger = logging.getLogger(__name__)

MIN_UV_AREA = 1e-9
INSIDE_TOLERANCE = -1e-9

Correspondence = Union[DenseKeypoint, Sequence[float]]


def build_atlas(model: BodyModel) -> UVAtlas:
    """Index every face's UV triangle by body part"""
    faces = np.array(model.faces, dtype=np.int64)
    parts = model.vertex_parts
    face_parts = parts[faces]
    straddling = np.nonzero((face_parts != face_parts[:, :1]).any(axis=1))[0]
    if straddling.size:
        raise AtlasError(f"face {int(straddling[0])} straddles parts", field="faces")
    face_parts = face_parts[:, 0]

    face_uv = model.vertex_iuv[faces][:, :, 1:]
    edges = np.stack([face_uv[:, 1] - face_uv[:, 0], face_uv[:, 2] - face_uv[:, 0]], axis=-1)
    area = 0.5 * np.abs(np.linalg.det(edges)) if len(faces) else np.zeros(0)
    degenerate = np.nonzero(area <= MIN_UV_AREA)[0]
    if degenerate.size:
        raise AtlasError(f"face {int(degenerate[0])} has a degenerate UV triangle", field="vertex_iuv")

    part_index: Dict[int, PartIndex] = {}
    for part in np.unique(face_parts):
        ids = np.nonzero(face_parts == part)[0]
        part_index[int(part)] = PartIndex(
            face_ids=ids,
            origins=face_uv[ids, 0],
            edges=edges[ids],
            inverse=np.linalg.inv(edges[ids]),
        )

    for array in (faces, face_parts, face_uv):
        array.flags.writeable = False
    logger.debug("Built UV atlas: %d faces over %d parts", len(faces), len(part_index))
    return UVAtlas(faces=faces, face_parts=face_parts, face_uv=face_uv, part_index=part_index)


def _unpack(d: Correspondence):
    if isinstance(d, DenseKeypoint):
        return int(d.part), float(d.u), float(d.v)
    part, u, v = d
    return int(part), float(u), float(v)


def _closest_on_triangles(point: np.ndarray, corners: np.ndarray):
    """Closest boundary point of each triangle as (distance, barycentric weights)"""
    n = corners.shape[0]
    best_dist = np.full(n, np.inf)
    best_weights = np.zeros((n, 3))
    for a, b in ((0, 1), (1, 2), (2, 0)):
        start = corners[:, a]
        segment = corners[:, b] - start
        length_sq = (segment * segment).sum(-1)
        t = np.clip(((point - start) * segment).sum(-1) / length_sq, 0.0, 1.0)
        closest = start + t[:, None] * segment
        dist = np.linalg.norm(point - closest, axis=-1)
        better = dist < best_dist
        best_dist[better] = dist[better]
        weights = np.zeros((n, 3))
        weights[:, a] = 1.0 - t
        weights[:, b] = t
        best_weights[better] = weights[better]
    return best_dist, best_weights


def phi_lookup(atlas: UVAtlas, d: Correspondence) -> DenseAnchor:
    """Resolve an (I, U, V) coordinate to a mesh face and barycentric weights

    Points outside every UV triangle of their part snap to the closest
    point of the nearest triangle.
    """
    part, u, v = _unpack(d)
    index = atlas.part_index.get(part)
    if index is None or index.face_ids.size == 0:
        raise AtlasError(f"part {part} has no faces", field="part")

    point = np.array([u, v])
    local = np.einsum("nij,nj->ni", index.inverse, point - index.origins)
    weights = np.column_stack([1.0 - local[:, 0] - local[:, 1], local[:, 0], local[:, 1]])
    inside = np.nonzero((weights >= INSIDE_TOLERANCE).all(axis=1))[0]
    if inside.size:
        slot = int(inside[0])
        chosen = np.clip(weights[slot], 0.0, None)
        chosen = chosen / chosen.sum()
    else:
        corners = atlas.face_uv[index.face_ids]
        dist, clamped = _closest_on_triangles(point, corners)
        slot = int(np.argmin(dist))
        chosen = clamped[slot]

    face = int(index.face_ids[slot])
    vertices = tuple(int(i) for i in atlas.faces[face])
    return DenseAnchor(face=face, vertices=vertices, weights=tuple(float(w) for w in chosen))


def resolve_anchors(atlas: UVAtlas, dense: Iterable[Correspondence]) -> List[DenseAnchor]:
    return [phi_lookup(atlas, d) for d in dense]


def anchor_arrays(anchors: Sequence[DenseAnchor]):
    """Stack anchors into (N x 3 vertex ids, N x 3 weights)"""
    if not anchors:
        return np.zeros((0, 3), dtype=np.int64), np.zeros((0, 3))
    return (
        np.array([a.vertices for a in anchors], dtype=np.int64),
        np.array([a.weights for a in anchors], dtype=np.float64),
    )
