from densefit.application.commands.common import parse_values, read_config
from densefit.application.dtos.config_dto import ExperimentConfigDTO
from densefit.application.use_cases.experiment_use_cases import EmitReportUseCase, RunExperimentUseCase
from densefit.infrastructure.storage.json_model_repository import JsonModelRepository

SWEEP_COMMANDS = {
    "ablate": (None, "run every supervision mix with the config's sweep"),
    "noise-sweep": ("noise", "sweep Gaussian UV noise on dense keypoints"),
    "density-sweep": ("keep_fraction", "sweep the fraction of dense keypoints kept"),
    "refine-sweep": ("refinement", "compare raw and refined corrupted IUV maps"),
}


def _runner(axis):
    def run(args) -> int:
        config = read_config(args.config, ExperimentConfigDTO)
        values = parse_values(args.values) if getattr(args, "values", None) else None
        _, written = RunExperimentUseCase(JsonModelRepository()).execute(
            config, axis=axis, values=values, outdir=args.out
        )
        for path in written:
            print(path)
        return 0

    return run


def report(args) -> int:
    for path in EmitReportUseCase().execute(args.indir, args.out):
        print(path)
    return 0


def register(subparsers) -> None:
    for name, (axis, help_text) in SWEEP_COMMANDS.items():
        parser = subparsers.add_parser(name, help=help_text)
        parser.add_argument("--config", required=True, help="experiment config JSON file")
        parser.add_argument("--out", help="output directory (defaults to the config's output_dir)")
        if axis is not None:
            parser.add_argument("--values", help="comma-separated sweep values overriding the defaults")
        parser.set_defaults(func=_runner(axis))

    parser = subparsers.add_parser("report", help="rebuild report files from results.json")
    parser.add_argument("--in", dest="indir", required=True, help="directory holding results.json")
    parser.add_argument("--out", required=True, help="output directory")
    parser.set_defaults(func=report)
