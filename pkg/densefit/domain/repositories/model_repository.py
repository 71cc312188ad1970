from abc import ABC, abstractmethod
from pathlib import Path
from typing import Union

from densefit.domain.entities.body_model import BodyModel

PathLike = Union[str, Path]


class BodyModelRepository(ABC):
    """Interface for body model persistence"""

    @abstractmethod
    def load(self, path: PathLike) -> BodyModel:
        """Read and validate a body model"""
        pass

    @abstractmethod
    def save(self, model: BodyModel, path: PathLike) -> Path:
        """Write a body model, returning the written path"""
        pass
