from densefit.application.use_cases.model_use_cases import MakeModelUseCase
from densefit.infrastructure.storage.json_model_repository import JsonModelRepository
from densefit.settings import MINI_MODEL_SEED


def make_model(args) -> int:
    path = MakeModelUseCase(JsonModelRepository()).execute(args.seed, args.out)
    print(path)
    return 0


def register(subparsers) -> None:
    parser = subparsers.add_parser("make-model", help="write the synthetic mini body model")
    parser.add_argument("--seed", type=int, default=MINI_MODEL_SEED)
    parser.add_argument("--out", required=True, help="model JSON file to write")
    parser.set_defaults(func=make_model)
