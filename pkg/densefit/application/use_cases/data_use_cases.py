import logging
from pathlib import Path
from typing import List

from densefit.domain.entities.camera import ImageFrame
from densefit.domain.repositories.model_repository import BodyModelRepository, PathLike
from densefit.domain.repositories.scene_repository import SceneRepository
from densefit.domain.services.atlas import build_atlas
from densefit.domain.services.scene_generator import generate_scene
from densefit.domain.services.suite import scene_seeds

logger = logging.getLogger(__name__)


class MakeDataUseCase:
    def __init__(self, model_repository: BodyModelRepository, scene_repository: SceneRepository):
        self.model_repository = model_repository
        self.scene_repository = scene_repository

    def execute(self, model_path: PathLike, scenes: int, seed: int, frame: ImageFrame = ImageFrame()) -> List[Path]:
        """Render ``scenes`` synthetic scenes; scene seeds match the experiment suite's"""
        if scenes <= 0:
            raise ValueError("scene count must be positive")
        model = self.model_repository.load(model_path)
        atlas = build_atlas(model)
        written: List[Path] = []
        for scene_id, scene_seed in enumerate(scene_seeds(seed, scenes)):
            scene = generate_scene(model, atlas, scene_seed, frame, scene_id)
            written.extend(self.scene_repository.save_scene(scene))
        logger.info("Wrote %d scenes (%d files)", scenes, len(written))
        return written
