"""IUV map cleanup driven by sparse keypoints

A keypoint whose surroundings are labelled with a body part it cannot
sit on (a right ankle surrounded by "left foot") marks a wrong
prediction: the whole connected region of that part around the keypoint
is reset to background.
"""

import logging
from collections import defaultdict
from typing import Dict, Iterable, Optional, Set, Tuple

import numpy as np
from scipy import ndimage

from densefit.domain.entities.annotations import SparseKeypointSet
from densefit.domain.entities.body_model import BodyModel
from densefit.domain.entities.camera import ImageFrame
from densefit.domain.entities.correspondence import BACKGROUND, IUVMap, KeypointPartTable
from densefit.domain.errors import AnnotationError

logger = logging.getLogger(__name__)

EIGHT_CONNECTED = ndimage.generate_binary_structure(2, 2)


def keypoint_pixel(x: float, y: float) -> Tuple[int, int]:
    """Nearest pixel centre, halves rounded up"""
    return int(np.floor(x + 0.5)), int(np.floor(y + 0.5))


def majority_part(parts: np.ndarray, col: int, row: int) -> Optional[int]:
    """Most frequent non-background part in the 3x3 window; ties go to the smaller id"""
    window = parts[max(row - 1, 0):row + 2, max(col - 1, 0):col + 2]
    labels = window[window != BACKGROUND]
    if labels.size == 0:
        return None
    return int(np.argmax(np.bincount(labels)))


def remove_region(iuv: np.ndarray, col: int, row: int, part: int) -> int:
    """Reset to background every pixel of ``part`` 8-connected to the 3x3 window; returns pixels cleared"""
    labels, _ = ndimage.label(iuv[..., 0] == part, structure=EIGHT_CONNECTED)
    window = labels[max(row - 1, 0):row + 2, max(col - 1, 0):col + 2]
    seeds = np.unique(window[window > 0])
    doomed = np.isin(labels, seeds)
    iuv[doomed] = 0
    return int(doomed.sum())


def _visible_in_order(keypoints: SparseKeypointSet, frame: ImageFrame):
    order = np.argsort(keypoints.ids, kind="stable")
    visits = []
    for idx in order:
        if not keypoints.visible[idx]:
            continue
        x, y = keypoints.positions[idx]
        if not frame.contains(x, y):
            raise AnnotationError(
                f"keypoint {int(keypoints.ids[idx])} at ({x:.2f}, {y:.2f}) lies outside the frame",
                field="sparse2d",
            )
        col, row = keypoint_pixel(x, y)
        visits.append((int(keypoints.ids[idx]), col, row))
    return visits


def refine_iuv(iuv_map: IUVMap, keypoints: SparseKeypointSet, table: KeypointPartTable) -> IUVMap:
    """Remove wrongly labelled regions under visible keypoints

    Keypoints are handled in ascending id order and passes repeat until
    nothing changes, so refining a refined map is a no-op.
    """
    visits = _visible_in_order(keypoints, ImageFrame(width=iuv_map.width, height=iuv_map.height))
    iuv = np.array(iuv_map.iuv, copy=True)

    passes = 0
    cleared_total = 0
    while True:
        passes += 1
        cleared = 0
        for keypoint_id, col, row in visits:
            part = majority_part(iuv[..., 0], col, row)
            if part is None or table.is_consistent(keypoint_id, part):
                continue
            removed = remove_region(iuv, col, row, part)
            logger.debug("Keypoint %d: removed %d pixels of part %d", keypoint_id, removed, part)
            cleared += removed
        cleared_total += cleared
        if cleared == 0:
            break

    logger.debug("Refinement cleared %d pixels in %d passes", cleared_total, passes)
    return IUVMap(iuv)


def corrupt_swap_parts(iuv_map: IUVMap, pairs: Iterable[Tuple[int, int]]) -> IUVMap:
    """Exchange the labels of each part pair, keeping U and V"""
    parts = iuv_map.parts
    iuv = np.array(iuv_map.iuv, copy=True)
    for a, b in pairs:
        iuv[..., 0][parts == a] = b
        iuv[..., 0][parts == b] = a
    return IUVMap(iuv)


def default_part_table(model: BodyModel) -> KeypointPartTable:
    """Each joint may sit on its own part, its parent's part or its children's parts

    A joint's own part is the most common part among the vertices it
    dominates in the skinning weights.
    """
    dominant = np.argmax(model.skin_weights, axis=1)
    vertex_parts = model.vertex_parts
    own: Dict[int, Optional[int]] = {}
    for k in range(model.joint_count):
        dominated = vertex_parts[dominant == k]
        own[k] = int(np.argmax(np.bincount(dominated))) if dominated.size else None

    children: Dict[int, Set[int]] = defaultdict(set)
    for k, parent in enumerate(model.parents):
        if parent >= 0:
            children[int(parent)].add(k)

    allowed = {}
    for k in range(model.joint_count):
        related = [k, *children[k]]
        if model.parents[k] >= 0:
            related.append(int(model.parents[k]))
        allowed[k] = {own[j] for j in related if own[j] is not None}
    return KeypointPartTable.from_pairs(allowed)
