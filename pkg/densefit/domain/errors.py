"""Domain exceptions

Every error carries an optional ``field`` so the CLI can emit a
machine-readable payload naming what went wrong.
"""

from typing import Any, Dict, Optional


class DenseFitError(Exception):
    """Root of all densefit errors"""

    def __init__(self, message: str, field: Optional[str] = None):
        super().__init__(message)
        self.message = message
        self.field = field

    def to_dict(self) -> Dict[str, Any]:
        return {"error": type(self).__name__, "message": self.message, "field": self.field}


class ModelValidationError(DenseFitError, ValueError):
    """Body model file is malformed or violates an invariant"""


class AtlasError(DenseFitError, ValueError):
    """UV atlas cannot be built or queried"""


class AnnotationError(DenseFitError, ValueError):
    """Annotations are inconsistent with the model or the frame"""


class FitDivergedError(DenseFitError, ValueError):
    """Loss or gradient became non-finite during fitting"""

    def __init__(self, term: str, iteration: int):
        super().__init__(f"non-finite {term} at iteration {iteration}", field=term)
        self.term = term
        self.iteration = iteration


class SceneGenerationError(DenseFitError, ValueError):
    """Synthetic scene could not be rendered"""


class ConfigError(DenseFitError, ValueError):
    """Configuration file failed validation"""


class ReportError(DenseFitError):
    """Report could not be written"""
