import logging
from pathlib import Path
from typing import Type, TypeVar

from pydantic import BaseModel

from densefit.domain.errors import ConfigError

logger = logging.getLogger(__name__)

DTO = TypeVar("DTO", bound=BaseModel)


def read_config(path: str, dto_class: Type[DTO]) -> DTO:
    """Parse a JSON config file; validation errors propagate to the CLI error handler"""
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc.strerror}", field="config") from exc
    return dto_class.model_validate_json(text)


def parse_values(text: str):
    """Comma-separated floats, e.g. ``0,5,10``"""
    return [float(part) for part in text.split(",") if part.strip()]
