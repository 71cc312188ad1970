from dataclasses import dataclass

import numpy as np

from densefit.settings import FRAME_HEIGHT, FRAME_WIDTH


@dataclass(frozen=True)
class CameraParams:
    """Weak-perspective camera: isotropic scale followed by an image-plane shift"""

    focal: float = 1.0
    tx: float = 0.0
    ty: float = 0.0

    def __post_init__(self) -> None:
        if not self.focal > 0:
            raise ValueError("camera focal must be positive")

    def as_array(self) -> np.ndarray:
        return np.array([self.focal, self.tx, self.ty], dtype=np.float64)

    @classmethod
    def from_array(cls, values) -> "CameraParams":
        focal, tx, ty = (float(v) for v in values)
        return cls(focal=focal, tx=tx, ty=ty)


@dataclass(frozen=True)
class ImageFrame:
    """Pixel raster the camera maps onto"""

    width: int = FRAME_WIDTH
    height: int = FRAME_HEIGHT

    def __post_init__(self) -> None:
        if self.width <= 0 or self.height <= 0:
            raise ValueError("frame width and height must be positive")

    def contains(self, x: float, y: float) -> bool:
        return 0.0 <= x <= self.width - 1 and 0.0 <= y <= self.height - 1
