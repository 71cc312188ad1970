import logging
from pathlib import Path
from typing import Optional

from densefit.domain.entities.body_model import BodyModel
from densefit.domain.repositories.model_repository import BodyModelRepository, PathLike
from densefit.domain.services.mini_model import make_mini_model

logger = logging.getLogger(__name__)


class MakeModelUseCase:
    def __init__(self, model_repository: BodyModelRepository):
        self.model_repository = model_repository

    def execute(self, seed: int, out: PathLike) -> Path:
        """Generate the mini model for ``seed`` and save it"""
        model = make_mini_model(seed)
        return self.model_repository.save(model, out)


class ResolveModelUseCase:
    """Load a model file, or build the mini model when no path is given"""

    def __init__(self, model_repository: BodyModelRepository):
        self.model_repository = model_repository

    def execute(self, model_path: Optional[PathLike], model_seed: int = 0) -> BodyModel:
        if model_path:
            return self.model_repository.load(model_path)
        logger.info("No model file given, using mini model with seed %d", model_seed)
        return make_mini_model(model_seed)
