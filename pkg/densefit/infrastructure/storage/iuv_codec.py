"""IUVR raster format: magic, little-endian u32 width and height, H x W x 3 bytes"""

import logging
from pathlib import Path
from typing import Union

import numpy as np

from densefit.domain.entities.correspondence import IUVMap
from densefit.domain.errors import AnnotationError

logger = logging.getLogger(__name__)

MAGIC = b"IUVR"
HEADER = np.dtype([("magic", "S4"), ("width", "<u4"), ("height", "<u4")])


def encode_iuv(iuv_map: IUVMap) -> bytes:
    header = np.array([(MAGIC, iuv_map.width, iuv_map.height)], dtype=HEADER)
    return header.tobytes() + np.ascontiguousarray(iuv_map.iuv, dtype=np.uint8).tobytes()


def decode_iuv(payload: bytes) -> IUVMap:
    if len(payload) < HEADER.itemsize:
        raise AnnotationError("IUV raster is shorter than its header", field="iuv")
    header = np.frombuffer(payload[: HEADER.itemsize], dtype=HEADER)[0]
    if bytes(header["magic"]) != MAGIC:
        raise AnnotationError("IUV raster has a bad magic number", field="iuv")
    width, height = int(header["width"]), int(header["height"])
    body = payload[HEADER.itemsize:]
    if len(body) != width * height * 3:
        raise AnnotationError(
            f"IUV raster body has {len(body)} bytes, expected {width * height * 3}", field="iuv"
        )
    try:
        return IUVMap(np.frombuffer(body, dtype=np.uint8).reshape(height, width, 3))
    except ValueError as exc:
        raise AnnotationError(str(exc), field="iuv") from exc


def write_iuv(iuv_map: IUVMap, path: Union[str, Path]) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    path.write_bytes(encode_iuv(iuv_map))
    logger.debug("Wrote %dx%d IUV raster to %s", iuv_map.width, iuv_map.height, path)
    return path


def read_iuv(path: Union[str, Path]) -> IUVMap:
    return decode_iuv(Path(path).read_bytes())
