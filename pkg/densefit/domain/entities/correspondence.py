from dataclasses import dataclass, field
from typing import Dict, FrozenSet, Iterable, Mapping, Optional, Tuple

import numpy as np

BACKGROUND = 0


@dataclass(frozen=True, eq=False)
class IUVMap:
    """Per-pixel dense correspondence raster, ``iuv[y, x] = (I, U, V)`` as bytes"""

    iuv: np.ndarray  # H x W x 3, uint8

    def __post_init__(self) -> None:
        data = np.array(self.iuv, copy=True)
        if data.ndim != 3 or data.shape[2] != 3:
            raise ValueError("IUV raster must be H x W x 3")
        if data.size and (data.min() < 0 or data.max() > 255):
            raise ValueError("IUV raster values must fit in a byte")
        data = data.astype(np.uint8)
        background = data[..., 0] == BACKGROUND
        if data[background][:, 1:].any():
            raise ValueError("background pixels must carry U = V = 0")
        data.flags.writeable = False
        object.__setattr__(self, "iuv", data)

    @classmethod
    def blank(cls, width: int, height: int) -> "IUVMap":
        return cls(np.zeros((height, width, 3), dtype=np.uint8))

    @property
    def width(self) -> int:
        return int(self.iuv.shape[1])

    @property
    def height(self) -> int:
        return int(self.iuv.shape[0])

    @property
    def parts(self) -> np.ndarray:
        return self.iuv[..., 0]

    @property
    def foreground_count(self) -> int:
        return int(np.count_nonzero(self.parts))

    def check_part_count(self, part_count: int) -> None:
        if self.parts.size and int(self.parts.max()) > part_count:
            raise ValueError(f"IUV raster holds part id above {part_count}")

    def same_as(self, other: "IUVMap") -> bool:
        return self.iuv.shape == other.iuv.shape and bool(np.array_equal(self.iuv, other.iuv))


@dataclass(frozen=True)
class DenseKeypoint:
    """Image position paired with a body-surface coordinate"""

    x: float
    y: float
    part: int
    u: float
    v: float

    def __post_init__(self) -> None:
        if self.part < 1:
            raise ValueError("dense keypoint part id must be >= 1")


@dataclass(frozen=True)
class DenseAnchor:
    """Mesh face and barycentric weights a surface coordinate resolves to"""

    face: int
    vertices: Tuple[int, int, int]
    weights: Tuple[float, float, float]


@dataclass(frozen=True, eq=False)
class PartIndex:
    """Faces of one part with precomputed UV barycentric transforms"""

    face_ids: np.ndarray  # n
    origins: np.ndarray  # n x 2, first UV corner
    edges: np.ndarray  # n x 2 x 2, (corner1 - corner0, corner2 - corner0)
    inverse: np.ndarray  # n x 2 x 2


@dataclass(frozen=True, eq=False)
class UVAtlas:
    """UV triangles of every face grouped by body part"""

    faces: np.ndarray  # F x 3 vertex indices
    face_parts: np.ndarray  # F
    face_uv: np.ndarray  # F x 3 x 2
    part_index: Mapping[int, PartIndex] = field(default_factory=dict)

    @property
    def face_count(self) -> int:
        return int(self.faces.shape[0])


@dataclass(frozen=True)
class KeypointPartTable:
    """Body parts a sparse keypoint may legitimately sit on"""

    allowed: Mapping[int, FrozenSet[int]]

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "allowed", {int(k): frozenset(int(p) for p in v) for k, v in self.allowed.items()}
        )

    @classmethod
    def from_pairs(cls, pairs: Mapping[int, Iterable[int]]) -> "KeypointPartTable":
        return cls(allowed={k: frozenset(v) for k, v in pairs.items()})

    def parts_for(self, keypoint_id: int) -> Optional[FrozenSet[int]]:
        return self.allowed.get(int(keypoint_id))

    def is_consistent(self, keypoint_id: int, part: int) -> bool:
        allowed = self.parts_for(keypoint_id)
        return allowed is None or part in allowed

    def check_part_count(self, part_count: int) -> None:
        for keypoint_id, parts in self.allowed.items():
            if any(p < 1 or p > part_count for p in parts):
                raise ValueError(f"part table entry {keypoint_id} lists a part outside 1..{part_count}")

    def as_dict(self) -> Dict[int, Tuple[int, ...]]:
        return {k: tuple(sorted(v)) for k, v in sorted(self.allowed.items())}
