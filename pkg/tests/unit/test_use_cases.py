from pathlib import Path
from typing import Dict, List

import pytest

from densefit.application.dtos.annotation_dto import AnnotationFileDTO
from densefit.application.dtos.config_dto import ExperimentConfigDTO, FitConfigDTO
from densefit.application.use_cases.data_use_cases import MakeDataUseCase
from densefit.application.use_cases.experiment_use_cases import EmitReportUseCase, RunExperimentUseCase
from densefit.application.use_cases.fit_use_cases import FitAnnotationsUseCase
from densefit.application.use_cases.model_use_cases import MakeModelUseCase, ResolveModelUseCase
from densefit.domain.entities.annotations import AnnotationBundle
from densefit.domain.entities.body_model import BodyModel
from densefit.domain.entities.correspondence import IUVMap
from densefit.domain.entities.experiment import SyntheticScene
from densefit.domain.errors import AnnotationError, ModelValidationError
from densefit.domain.repositories.model_repository import BodyModelRepository, PathLike
from densefit.domain.repositories.scene_repository import SceneRepository

pytestmark = pytest.mark.unit


class MockModelRepository(BodyModelRepository):
    """In-memory model repository for testing"""

    def __init__(self):
        self.models: Dict[str, BodyModel] = {}

    def load(self, path: PathLike) -> BodyModel:
        if str(path) not in self.models:
            raise ModelValidationError(f"no model at {path}", field="path")
        return self.models[str(path)]

    def save(self, model: BodyModel, path: PathLike) -> Path:
        self.models[str(path)] = model
        return Path(path)


class MockSceneRepository(SceneRepository):
    """In-memory scene repository for testing"""

    def __init__(self):
        self.scenes: List[SyntheticScene] = []
        self.annotations: Dict[str, AnnotationBundle] = {}

    def save_scene(self, scene: SyntheticScene) -> List[Path]:
        self.scenes.append(scene)
        stem = f"scene_{scene.scene_id:04d}"
        self.annotations[f"{stem}.json"] = scene.annotations
        return [Path(f"{stem}.json"), Path(f"{stem}.iuv")]

    def load_annotations(self, path: PathLike) -> AnnotationBundle:
        if str(path) not in self.annotations:
            raise AnnotationError(f"no annotations at {path}", field="path")
        return self.annotations[str(path)]

    def save_annotations(self, ann: AnnotationBundle, path: PathLike) -> Path:
        self.annotations[str(path)] = ann
        return Path(path)

    def load_iuv(self, path: PathLike) -> IUVMap:
        stem = Path(path).stem
        return next(s.iuv_map for s in self.scenes if f"scene_{s.scene_id:04d}" == stem)


@pytest.fixture
def model_repo(mini_model):
    repo = MockModelRepository()
    repo.save(mini_model, "mini.json")
    return repo


class TestModelUseCases:
    def test_make_model_saves_seeded_model(self):
        repo = MockModelRepository()
        path = MakeModelUseCase(repo).execute(seed=0, out="m.json")
        assert path == Path("m.json")
        assert repo.load("m.json").vertex_count == 512

    def test_resolve_prefers_file(self, model_repo, mini_model):
        assert ResolveModelUseCase(model_repo).execute("mini.json") is mini_model

    def test_resolve_falls_back_to_mini_model(self):
        model = ResolveModelUseCase(MockModelRepository()).execute(None, model_seed=0)
        assert model.joint_count == 12


class TestMakeDataUseCase:
    def test_writes_every_scene(self, model_repo):
        scene_repo = MockSceneRepository()
        written = MakeDataUseCase(model_repo, scene_repo).execute("mini.json", scenes=2, seed=11)
        assert len(written) == 4
        assert [s.scene_id for s in scene_repo.scenes] == [0, 1]

    def test_seeds_match_the_suite(self, model_repo, scenes):
        """Test that scene files and experiment scenes share ground truth for the same seed"""
        scene_repo = MockSceneRepository()
        MakeDataUseCase(model_repo, scene_repo).execute("mini.json", scenes=2, seed=11)
        for stored, shared in zip(scene_repo.scenes, scenes):
            assert (stored.gt_params.to_vector() == shared.gt_params.to_vector()).all()

    def test_non_positive_count(self, model_repo):
        with pytest.raises(ValueError):
            MakeDataUseCase(model_repo, MockSceneRepository()).execute("mini.json", scenes=0, seed=0)

    def test_missing_model(self):
        with pytest.raises(ModelValidationError):
            MakeDataUseCase(MockModelRepository(), MockSceneRepository()).execute("absent.json", 1, 0)


class TestFitAnnotationsUseCase:
    def test_fit_with_ground_truth_reports_metrics(self, model_repo, scene, tmp_path):
        scene_repo = MockSceneRepository()
        scene_repo.save_annotations(scene.annotations, "a.json")
        out = tmp_path / "fit.json"
        dto = FitAnnotationsUseCase(model_repo, scene_repo).execute(
            "mini.json", "a.json", FitConfigDTO(max_iters=3, log_every=0), out
        )
        assert dto.iterations_used == 3
        assert dto.metrics is not None
        assert dto.final_loss <= dto.initial_loss
        assert out.exists()

    def test_fit_without_ground_truth(self, model_repo, scene):
        scene_repo = MockSceneRepository()
        scene_repo.save_annotations(scene.annotations.restricted_to(("sparse2d",)), "a.json")
        dto = FitAnnotationsUseCase(model_repo, scene_repo).execute(
            "mini.json", "a.json", FitConfigDTO(max_iters=2, log_every=0)
        )
        assert dto.metrics is None
        assert len(dto.loss_trace) == 3

    def test_annotations_round_trip_through_dto(self, model_repo, scene):
        scene_repo = MockSceneRepository()
        ann = AnnotationFileDTO.from_entity(scene.annotations).to_entity()
        scene_repo.save_annotations(ann, "a.json")
        dto = FitAnnotationsUseCase(model_repo, scene_repo).execute(
            "mini.json", "a.json", FitConfigDTO(max_iters=1, log_every=0)
        )
        assert dto.breakdown.total >= 0.0


class TestExperimentUseCases:
    def test_axis_override_and_report(self, tmp_path):
        config = ExperimentConfigDTO(
            scene_count=1,
            seed=2,
            mixes=[{"name": "dense_sparse2d", "sources": ["sparse2d", "dense"]}],
            fit={"max_iters": 2, "log_every": 0},
        )
        rows, written = RunExperimentUseCase(MockModelRepository()).execute(
            config, axis="noise", values=[0.0, 20.0], outdir=tmp_path / "run"
        )
        assert [(r.sweep_axis, r.sweep_value) for r in rows] == [("noise", 0.0), ("noise", 20.0)]
        assert (tmp_path / "run" / "pve_noise.svg") in written

        rebuilt = EmitReportUseCase().execute(tmp_path / "run", tmp_path / "again")
        assert len(rebuilt) == 4
        assert (tmp_path / "again" / "results.csv").read_bytes() == (tmp_path / "run" / "results.csv").read_bytes()

    def test_axis_defaults_when_values_omitted(self, tmp_path):
        config = ExperimentConfigDTO(
            scene_count=1,
            mixes=[{"name": "sparse2d_only", "sources": ["sparse2d"]}],
            fit={"max_iters": 1, "log_every": 0},
        )
        rows, _ = RunExperimentUseCase(MockModelRepository()).execute(config, axis="refinement", outdir=tmp_path)
        assert [r.sweep_value for r in rows] == [0.0, 1.0]
