from densefit.application.dtos.config_dto import FrameDTO
from densefit.application.use_cases.data_use_cases import MakeDataUseCase
from densefit.infrastructure.storage.file_scene_repository import FileSceneRepository
from densefit.infrastructure.storage.json_model_repository import JsonModelRepository


def make_data(args) -> int:
    frame = FrameDTO(width=args.width, height=args.height).to_entity()
    use_case = MakeDataUseCase(JsonModelRepository(), FileSceneRepository(args.out))
    written = use_case.execute(args.model, args.scenes, args.seed, frame)
    print(f"{len(written)} files written to {args.out}")
    return 0


def register(subparsers) -> None:
    parser = subparsers.add_parser("make-data", help="render synthetic scenes with all annotation sources")
    parser.add_argument("--model", required=True, help="body model JSON file")
    parser.add_argument("--scenes", type=int, default=20)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--out", required=True, help="output directory")
    parser.add_argument("--width", type=int, default=FrameDTO().width)
    parser.add_argument("--height", type=int, default=FrameDTO().height)
    parser.set_defaults(func=make_data)
