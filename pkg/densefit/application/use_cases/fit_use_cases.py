import json
import logging
from pathlib import Path
from typing import Optional

from densefit.application.dtos.config_dto import FitConfigDTO
from densefit.application.dtos.result_dto import FitResultDTO
from densefit.domain.repositories.model_repository import BodyModelRepository, PathLike
from densefit.domain.repositories.scene_repository import SceneRepository
from densefit.domain.services.atlas import build_atlas
from densefit.domain.services.fitter import fit
from densefit.domain.services.metrics import evaluate_metrics

logger = logging.getLogger(__name__)


class FitAnnotationsUseCase:
    def __init__(self, model_repository: BodyModelRepository, scene_repository: SceneRepository):
        self.model_repository = model_repository
        self.scene_repository = scene_repository

    def execute(
        self,
        model_path: PathLike,
        annotations_path: PathLike,
        config: FitConfigDTO,
        out: Optional[PathLike] = None,
    ) -> FitResultDTO:
        """Fit one annotation file; metrics are included when it carries gt params"""
        model = self.model_repository.load(model_path)
        atlas = build_atlas(model)
        ann = self.scene_repository.load_annotations(annotations_path)

        logger.info("Fitting %s with sources %s", annotations_path, ", ".join(ann.sources))
        result = fit(model, atlas, ann, config.to_entity())
        metrics = None
        if ann.gt_params is not None:
            metrics = evaluate_metrics(model, result.params, ann.gt_params, atlas, ann.frame)
        dto = FitResultDTO.from_entity(result, metrics)

        if out is not None:
            out = Path(out)
            out.parent.mkdir(parents=True, exist_ok=True)
            out.write_text(json.dumps(dto.model_dump(), indent=2, sort_keys=True) + "\n", encoding="utf-8")
            logger.info("Fit result written to %s", out)
        return dto
