"""On-disk record of the JSON body model format"""

from typing import List, Optional

from pydantic import BaseModel, ConfigDict, Field

MODEL_FORMAT_VERSION = 1


class BodyModelRecord(BaseModel):
    """Row-major arrays of a body model; ``parents[0]`` is null (or -1)"""

    model_config = ConfigDict(extra="forbid", populate_by_name=True)

    version: int = MODEL_FORMAT_VERSION
    vertex_count: int = Field(alias="V", ge=1)
    joint_count: int = Field(alias="K_total", ge=1)
    shape_dim: int = Field(alias="B", ge=0)
    part_count: int = Field(alias="P", ge=1)
    template_vertices: List[List[float]]
    faces: List[List[int]]
    shape_dirs: List[List[List[float]]]
    joint_regressor: List[List[float]]
    skin_weights: List[List[float]]
    parents: List[Optional[int]]
    vertex_iuv: List[List[float]]
    joint_names: Optional[List[str]] = None
    part_names: Optional[List[str]] = None
