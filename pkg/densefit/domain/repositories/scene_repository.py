from abc import ABC, abstractmethod
from pathlib import Path
from typing import List, Union

from densefit.domain.entities.annotations import AnnotationBundle
from densefit.domain.entities.correspondence import IUVMap
from densefit.domain.entities.experiment import SyntheticScene

PathLike = Union[str, Path]


class SceneRepository(ABC):
    """Interface for synthetic scene and annotation files"""

    @abstractmethod
    def save_scene(self, scene: SyntheticScene) -> List[Path]:
        """Write the scene's annotations and IUV raster"""
        pass

    @abstractmethod
    def load_annotations(self, path: PathLike) -> AnnotationBundle:
        """Read one annotation file"""
        pass

    @abstractmethod
    def save_annotations(self, ann: AnnotationBundle, path: PathLike) -> Path:
        """Write one annotation file"""
        pass

    @abstractmethod
    def load_iuv(self, path: PathLike) -> IUVMap:
        """Read an IUV raster"""
        pass
