import json
import logging
from pathlib import Path

import numpy as np
from pydantic import ValidationError

from densefit.domain.entities.body_model import BodyModel
from densefit.domain.errors import ModelValidationError
from densefit.domain.repositories.model_repository import BodyModelRepository, PathLike
from densefit.infrastructure.storage.records import MODEL_FORMAT_VERSION, BodyModelRecord

logger = logging.getLogger(__name__)

FIELD_NAMES = {"vertex_count": "V", "joint_count": "K_total", "shape_dim": "B", "part_count": "P"}


def _array(values, field: str, dtype, ndim: int) -> np.ndarray:
    try:
        array = np.array(values, dtype=dtype)
    except ValueError as exc:
        raise ModelValidationError(f"{field} is ragged or non-numeric", field=field) from exc
    if array.size == 0:
        array = array.reshape((0,) * ndim)
    if array.ndim != ndim:
        raise ModelValidationError(f"{field} must have {ndim} dimensions", field=field)
    return array


def record_to_model(record: BodyModelRecord) -> BodyModel:
    """Build and validate a BodyModel, checking the declared sizes"""
    V, K, B, P = record.vertex_count, record.joint_count, record.shape_dim, record.part_count
    template = _array(record.template_vertices, "template_vertices", np.float64, 2)
    faces = _array(record.faces, "faces", np.int64, 2)
    shape_dirs = _array(record.shape_dirs, "shape_dirs", np.float64, 3)
    regressor = _array(record.joint_regressor, "joint_regressor", np.float64, 2)
    weights = _array(record.skin_weights, "skin_weights", np.float64, 2)
    vertex_iuv = _array(record.vertex_iuv, "vertex_iuv", np.float64, 2)
    parents = np.array([-1 if p is None else p for p in record.parents], dtype=np.int64)

    expected = {
        "template_vertices": (template.shape, (V, 3)),
        "shape_dirs": (shape_dirs.shape, (V, 3, B)),
        "joint_regressor": (regressor.shape, (K, V)),
        "skin_weights": (weights.shape, (V, K)),
        "vertex_iuv": (vertex_iuv.shape, (V, 3)),
        "parents": (parents.shape, (K,)),
    }
    for field, (actual, wanted) in expected.items():
        if tuple(actual) != wanted:
            raise ModelValidationError(
                f"{field} has shape {tuple(actual)}, expected {wanted}", field=field
            )

    model = BodyModel(
        template_vertices=template,
        faces=faces.reshape(-1, 3) if faces.size == 0 else faces,
        shape_dirs=shape_dirs,
        joint_regressor=regressor,
        skin_weights=weights,
        parents=parents,
        vertex_iuv=vertex_iuv,
        part_count=P,
        joint_names=tuple(record.joint_names or ()),
        part_names=tuple(record.part_names or ()),
    )
    model.validate()
    return model


def model_to_record(model: BodyModel) -> BodyModelRecord:
    return BodyModelRecord(
        version=MODEL_FORMAT_VERSION,
        V=model.vertex_count,
        K_total=model.joint_count,
        B=model.shape_dim,
        P=model.part_count,
        template_vertices=model.template_vertices.tolist(),
        faces=model.faces.tolist(),
        shape_dirs=model.shape_dirs.tolist(),
        joint_regressor=model.joint_regressor.tolist(),
        skin_weights=model.skin_weights.tolist(),
        parents=[None if p < 0 else int(p) for p in model.parents],
        vertex_iuv=model.vertex_iuv.tolist(),
        joint_names=list(model.joint_names) or None,
        part_names=list(model.part_names) or None,
    )


class JsonModelRepository(BodyModelRepository):
    """Body models stored as a single JSON document"""

    def load(self, path: PathLike) -> BodyModel:
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise ModelValidationError(f"cannot read model file {path}: {exc.strerror}", field="path") from exc
        try:
            record = BodyModelRecord.model_validate_json(text)
        except ValidationError as exc:
            error = exc.errors()[0]
            field = str(error["loc"][0]) if error["loc"] else None
            field = FIELD_NAMES.get(field, field)
            raise ModelValidationError(f"{field}: {error['msg']}", field=field) from exc
        model = record_to_model(record)
        logger.info("Loaded body model %s: V=%d K_total=%d B=%d", path, model.vertex_count, model.joint_count, model.shape_dim)
        return model

    def save(self, model: BodyModel, path: PathLike) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        payload = model_to_record(model).model_dump(by_alias=True, exclude_none=True)
        path.write_text(json.dumps(payload), encoding="utf-8")
        logger.info("Saved body model to %s", path)
        return path


def load_model(path: PathLike) -> BodyModel:
    return JsonModelRepository().load(path)


def save_model(model: BodyModel, path: PathLike) -> Path:
    return JsonModelRepository().save(model, path)
