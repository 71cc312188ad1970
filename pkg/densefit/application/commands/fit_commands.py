import json

from densefit.application.commands.common import read_config
from densefit.application.dtos.config_dto import FitConfigDTO
from densefit.application.use_cases.fit_use_cases import FitAnnotationsUseCase
from densefit.infrastructure.storage.file_scene_repository import FileSceneRepository
from densefit.infrastructure.storage.json_model_repository import JsonModelRepository


def fit_annotations(args) -> int:
    config = read_config(args.config, FitConfigDTO) if args.config else FitConfigDTO()
    use_case = FitAnnotationsUseCase(JsonModelRepository(), FileSceneRepository("."))
    result = use_case.execute(args.model, args.annotations, config, args.out)
    summary = {
        "iterations_used": result.iterations_used,
        "converged": result.converged,
        "final_loss": result.final_loss,
    }
    if result.metrics is not None:
        summary["metrics"] = result.metrics.model_dump()
    print(json.dumps(summary, sort_keys=True))
    return 0


def register(subparsers) -> None:
    parser = subparsers.add_parser("fit", help="fit the body model to one annotation file")
    parser.add_argument("--model", required=True, help="body model JSON file")
    parser.add_argument("--annotations", required=True, help="annotation JSON file")
    parser.add_argument("--config", help="fit config JSON file (defaults apply when omitted)")
    parser.add_argument("--out", help="fit result JSON file")
    parser.set_defaults(func=fit_annotations)
