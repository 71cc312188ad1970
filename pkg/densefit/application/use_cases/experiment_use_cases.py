import logging
from dataclasses import replace
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

from densefit.application.dtos.config_dto import ExperimentConfigDTO, KeypointPartTableDTO, SweepDTO
from densefit.application.use_cases.model_use_cases import ResolveModelUseCase
from densefit.domain.entities.correspondence import KeypointPartTable
from densefit.domain.entities.experiment import ResultRow
from densefit.domain.errors import ConfigError
from densefit.domain.repositories.model_repository import BodyModelRepository, PathLike
from densefit.domain.services.atlas import build_atlas
from densefit.domain.services.suite import run_suite
from densefit.infrastructure.reporting.report_writer import emit_report, load_rows

logger = logging.getLogger(__name__)


def resolve_part_table(source: Union[None, str, KeypointPartTableDTO]) -> Optional[KeypointPartTable]:
    """Inline table, table file, or None for the model-derived default"""
    if source is None or isinstance(source, KeypointPartTableDTO):
        return source.to_entity() if source is not None else None
    try:
        text = Path(source).read_text(encoding="utf-8")
    except OSError as exc:
        raise ConfigError(f"cannot read part table {source}: {exc.strerror}", field="part_table") from exc
    logger.info("Using keypoint part table %s", source)
    return KeypointPartTableDTO.model_validate_json(text).to_entity()


class RunExperimentUseCase:
    def __init__(self, model_repository: BodyModelRepository):
        self.model_repository = model_repository

    def execute(
        self,
        config: ExperimentConfigDTO,
        axis: Optional[str] = None,
        values: Optional[Sequence[float]] = None,
        outdir: Optional[PathLike] = None,
    ) -> Tuple[List[ResultRow], List[Path]]:
        """Run the suite, optionally forcing the sweep axis, and write the report"""
        if axis is not None and (config.sweep.axis != axis or values is not None):
            sweep = SweepDTO(axis=axis, values=list(values) if values is not None else None)
            config = config.model_copy(update={"sweep": sweep})

        model = ResolveModelUseCase(self.model_repository).execute(config.model_path, config.model_seed)
        experiment = replace(config.to_entity(), part_table=resolve_part_table(config.part_table))
        rows = run_suite(experiment, model, build_atlas(model))
        written = emit_report(rows, outdir if outdir is not None else config.output_dir)
        return rows, written


class EmitReportUseCase:
    def execute(self, indir: PathLike, outdir: PathLike) -> List[Path]:
        """Rebuild every report file from a previous run's results.json"""
        rows = load_rows(indir)
        logger.info("Rebuilding report from %d rows", len(rows))
        return emit_report(rows, outdir)
