import argparse
import json
import logging
import sys
from typing import List, Optional

from pydantic import ValidationError

from densefit import settings
from densefit.application.commands import (
    data_commands,
    experiment_commands,
    fit_commands,
    model_commands,
)
from densefit.application.dtos.result_dto import ErrorDTO
from densefit.domain.errors import DenseFitError

logger = logging.getLogger("densefit")

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_USAGE = 2
EXIT_INTERNAL = 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="densefit",
        description="Fit a parametric body model to sparse, dense and 3D annotations",
    )
    parser.add_argument(
        "--log-level",
        default="INFO",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="logging verbosity on stderr",
    )
    subparsers = parser.add_subparsers(dest="command", required=True)
    for module in (model_commands, data_commands, fit_commands, experiment_commands):
        module.register(subparsers)
    return parser


def _emit_error(error: ErrorDTO) -> None:
    print(json.dumps(error.model_dump()), file=sys.stderr)


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_USAGE if exc.code else EXIT_OK

    logging.basicConfig(level=args.log_level, format=settings.LOG_FORMAT, stream=sys.stderr)

    try:
        return args.func(args)
    except DenseFitError as exc:
        logger.debug("Command failed", exc_info=True)
        _emit_error(ErrorDTO(**exc.to_dict()))
    except ValidationError as exc:
        error = exc.errors()[0]
        field = ".".join(str(part) for part in error["loc"]) or None
        _emit_error(ErrorDTO(error="ConfigError", message=error["msg"], field=field))
    except (ValueError, OSError) as exc:
        _emit_error(ErrorDTO(error=type(exc).__name__, message=str(exc)))
    except Exception as exc:
        logger.exception("Unexpected failure")
        _emit_error(ErrorDTO(error="InternalError", message=str(exc)))
        return EXIT_INTERNAL
    return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
