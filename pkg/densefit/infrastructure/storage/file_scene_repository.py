import json
import logging
from pathlib import Path
from typing import List

from pydantic import ValidationError

from densefit.application.dtos.annotation_dto import AnnotationFileDTO
from densefit.domain.entities.annotations import AnnotationBundle
from densefit.domain.entities.correspondence import IUVMap
from densefit.domain.entities.experiment import SyntheticScene
from densefit.domain.errors import AnnotationError
from densefit.domain.repositories.scene_repository import PathLike, SceneRepository
from densefit.infrastructure.storage.iuv_codec import read_iuv, write_iuv

logger = logging.getLogger(__name__)


class FileSceneRepository(SceneRepository):
    """Scenes as ``scene_NNNN.json`` annotation files plus ``scene_NNNN.iuv`` rasters"""

    def __init__(self, directory: PathLike):
        self.directory = Path(directory)

    def scene_stem(self, scene_id: int) -> Path:
        return self.directory / f"scene_{scene_id:04d}"

    def save_scene(self, scene: SyntheticScene) -> List[Path]:
        stem = self.scene_stem(scene.scene_id)
        annotations = self.save_annotations(scene.annotations, stem.with_suffix(".json"))
        raster = write_iuv(scene.iuv_map, stem.with_suffix(".iuv"))
        return [annotations, raster]

    def save_annotations(self, ann: AnnotationBundle, path: PathLike) -> Path:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        payload = AnnotationFileDTO.from_entity(ann).model_dump(exclude_none=True)
        path.write_text(json.dumps(payload, indent=2, sort_keys=True), encoding="utf-8")
        return path

    def load_annotations(self, path: PathLike) -> AnnotationBundle:
        path = Path(path)
        try:
            text = path.read_text(encoding="utf-8")
        except OSError as exc:
            raise AnnotationError(f"cannot read annotation file {path}: {exc.strerror}", field="path") from exc
        try:
            dto = AnnotationFileDTO.model_validate_json(text)
        except ValidationError as exc:
            error = exc.errors()[0]
            field = ".".join(str(part) for part in error["loc"]) or None
            raise AnnotationError(f"{field}: {error['msg']}", field=field) from exc
        return dto.to_entity()

    def load_iuv(self, path: PathLike) -> IUVMap:
        return read_iuv(path)
