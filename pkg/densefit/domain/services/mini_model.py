"""Desk-scale humanoid body model generator

Twelve joints, one tube-shaped body part per joint. Every tube is a
grid of rings x columns whose UV chart is the grid itself, so each part
is a single rectangle in UV space split into triangles.
"""

import logging
from typing import List, Sequence, Tuple

import numpy as np

from densefit.domain.entities.body_model import BodyModel
from densefit.settings import MINI_MODEL_SEED

logger = logging.getLogger(__name__)

SCALE = 0.9
COLUMNS = 8  # the last column closes the seam at the first column's position
SEAM = COLUMNS - 1
SHAPE_DIM = 4
RADIUS_JITTER = 0.06

# name, parent, rest position
JOINTS: Tuple[Tuple[str, int, Tuple[float, float, float]], ...] = (
    ("pelvis", -1, (0.0, 0.0, 0.0)),
    ("neck", 0, (0.0, 0.40, 0.0)),
    ("left_shoulder", 0, (0.14, 0.36, 0.0)),
    ("left_elbow", 2, (0.36, 0.36, 0.0)),
    ("right_shoulder", 0, (-0.14, 0.36, 0.0)),
    ("right_elbow", 4, (-0.36, 0.36, 0.0)),
    ("left_hip", 0, (0.08, -0.04, 0.0)),
    ("left_knee", 6, (0.08, -0.36, 0.0)),
    ("left_ankle", 7, (0.08, -0.66, 0.0)),
    ("right_hip", 0, (-0.08, -0.04, 0.0)),
    ("right_knee", 9, (-0.08, -0.36, 0.0)),
    ("right_ankle", 10, (-0.08, -0.66, 0.0)),
)

# part name, segment end (the segment starts at the joint of the same index), radius, rings
PARTS: Tuple[Tuple[str, Tuple[float, float, float], float, int], ...] = (
    ("torso", (0.0, 0.40, 0.0), 0.12, 8),
    ("head", (0.0, 0.60, 0.0), 0.08, 6),
    ("left_upper_arm", (0.36, 0.36, 0.0), 0.04, 4),
    ("left_forearm", (0.56, 0.36, 0.0), 0.035, 4),
    ("right_upper_arm", (-0.36, 0.36, 0.0), 0.04, 4),
    ("right_forearm", (-0.56, 0.36, 0.0), 0.035, 4),
    ("left_thigh", (0.08, -0.36, 0.0), 0.055, 5),
    ("left_shin", (0.08, -0.66, 0.0), 0.045, 5),
    ("left_foot", (0.08, -0.70, -0.14), 0.035, 7),
    ("right_thigh", (-0.08, -0.36, 0.0), 0.055, 5),
    ("right_shin", (-0.08, -0.66, 0.0), 0.045, 5),
    ("right_foot", (-0.08, -0.70, -0.14), 0.035, 7),
)

ARM_PARTS = frozenset({"left_upper_arm", "left_forearm", "right_upper_arm", "right_forearm"})

# parts whose labels get confused left/right by dense predictors
LEG_SWAPS = (("left_shin", "right_shin"), ("left_foot", "right_foot"))


def _tube_frame(direction: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    helper = np.array([0.0, 0.0, 1.0]) if abs(direction[2]) < 0.9 else np.array([1.0, 0.0, 0.0])
    e1 = np.cross(direction, helper)
    e1 /= np.linalg.norm(e1)
    e2 = np.cross(direction, e1)
    return e1, e2


def part_id(name: str) -> int:
    """1-based part id of a named mini-model part"""
    for index, (part_name, *_rest) in enumerate(PARTS):
        if part_name == name:
            return index + 1
    raise KeyError(name)


def leg_swap_pairs(part_names: Sequence[str] = ()) -> List[Tuple[int, int]]:
    """Part-id pairs of the left/right lower legs and feet

    Resolved by name when the model carries part names, otherwise by the
    mini-model layout.
    """
    if not part_names:
        return [(part_id(a), part_id(b)) for a, b in LEG_SWAPS]
    ids = {name: index + 1 for index, name in enumerate(part_names)}
    return [(ids[a], ids[b]) for a, b in LEG_SWAPS if a in ids and b in ids]


def make_mini_model(seed: int = MINI_MODEL_SEED) -> BodyModel:
    """Deterministic humanoid with V=512, K_total=12, B=4, P=12"""
    rng = np.random.default_rng(seed)
    joint_positions = np.array([pos for _, _, pos in JOINTS]) * SCALE
    parents = np.array([parent for _, parent, _ in JOINTS])
    K = len(JOINTS)

    vertices: List[np.ndarray] = []
    radial: List[np.ndarray] = []
    iuv: List[Tuple[int, float, float]] = []
    faces: List[Tuple[int, int, int]] = []
    skin_rows: List[np.ndarray] = []
    part_offsets: List[int] = []

    for k, (name, end, radius, rings) in enumerate(PARTS):
        start = joint_positions[k]
        stop = np.array(end) * SCALE
        axis = stop - start
        e1, e2 = _tube_frame(axis / np.linalg.norm(axis))
        ring_radii = radius * SCALE * (1.0 + RADIUS_JITTER * rng.uniform(-1.0, 1.0, rings))
        phase = rng.uniform(0.0, 2.0 * np.pi / SEAM)
        base = len(vertices)
        part_offsets.append(base)

        for i in range(rings):
            t = i / (rings - 1)
            centre = start + t * axis
            for j in range(COLUMNS):
                phi = 2.0 * np.pi * (j % SEAM) / SEAM + phase
                direction = np.cos(phi) * e1 + np.sin(phi) * e2
                vertices.append(centre + ring_radii[i] * direction)
                radial.append(direction)
                iuv.append((k + 1, 255.0 * j / SEAM, 255.0 * i / (rings - 1)))

                weights = np.zeros(K)
                parent = parents[k]
                if parent >= 0 and i == 0:
                    weights[k], weights[parent] = 0.5, 0.5
                elif parent >= 0 and i == 1:
                    weights[k], weights[parent] = 0.8, 0.2
                else:
                    weights[k] = 1.0
                skin_rows.append(weights)

        for i in range(rings - 1):
            for j in range(SEAM):
                a = base + i * COLUMNS + j
                b = a + 1
                c = a + COLUMNS + 1
                d = a + COLUMNS
                faces.append((a, b, c))
                faces.append((a, c, d))

    template = np.array(vertices)
    radial_dirs = np.array(radial)
    V = template.shape[0]

    # joint k sits at the centre of the first ring of part k
    regressor = np.zeros((K, V))
    for k in range(K):
        ring0 = part_offsets[k] + np.arange(SEAM)
        regressor[k, ring0] = 1.0 / SEAM

    vertex_parts = np.array([p for p, _, _ in iuv])
    shape_dirs = np.zeros((V, 3, SHAPE_DIM))
    shape_dirs[:, 1, 0] = 0.08 * template[:, 1]
    shape_dirs[:, :, 1] = 0.015 * radial_dirs
    arm_ids = [part_id(name) for name in ARM_PARTS]
    on_arm = np.isin(vertex_parts, arm_ids)
    shape_dirs[on_arm, 0, 2] = 0.06 * template[on_arm, 0]
    part_shift = rng.normal(0.0, 0.01, size=(len(PARTS), 3))
    shape_dirs[:, :, 3] = part_shift[vertex_parts - 1] + 0.008 * radial_dirs

    model = BodyModel(
        template_vertices=template,
        faces=np.array(faces),
        shape_dirs=shape_dirs,
        joint_regressor=regressor,
        skin_weights=np.array(skin_rows),
        parents=parents,
        vertex_iuv=np.array(iuv, dtype=np.float64),
        part_count=len(PARTS),
        joint_names=tuple(name for name, _, _ in JOINTS),
        part_names=tuple(name for name, _, _, _ in PARTS),
    )
    model.validate()
    logger.debug("Built mini model with seed %d: %d vertices, %d faces", seed, V, len(faces))
    return model
