import logging

import numpy as np
import pytest

from densefit.domain.entities.body_model import BodyModel
from densefit.domain.entities.camera import ImageFrame
from densefit.domain.entities.experiment import ExperimentConfig, SupervisionMix, SweepSpec
from densefit.domain.entities.fitting import FitConfig
from densefit.domain.services.atlas import build_atlas
from densefit.domain.services.mini_model import make_mini_model
from densefit.domain.services.scene_generator import generate_scene
from densefit.domain.services.suite import scene_seeds

logging.basicConfig(level=logging.INFO)
logger = logging.getLogger(__name__)


@pytest.fixture(scope="session")
def mini_model():
    """The seed-0 mini body model shared by every test"""
    return make_mini_model(0)


@pytest.fixture(scope="session")
def atlas(mini_model):
    return build_atlas(mini_model)


@pytest.fixture(scope="session")
def scene(mini_model, atlas):
    """One synthetic scene with every annotation source"""
    return generate_scene(mini_model, atlas, seed=7)


@pytest.fixture(scope="session")
def scenes(mini_model, atlas):
    """Four paired scenes drawn the way the experiment suite draws them"""
    logger.info("Generating shared test scenes")
    return [
        generate_scene(mini_model, atlas, seed, ImageFrame(), scene_id)
        for scene_id, seed in enumerate(scene_seeds(11, 4))
    ]


@pytest.fixture
def quick_fit():
    """Few-iteration optimizer settings for plumbing tests"""
    return FitConfig(max_iters=8, log_every=0)


@pytest.fixture
def small_experiment(quick_fit):
    """Two mixes, two scenes, a two-value density sweep"""
    return ExperimentConfig(
        mixes=(
            SupervisionMix(name="dense_sparse2d", sources=frozenset({"sparse2d", "dense"})),
            SupervisionMix(name="sparse2d_only", sources=frozenset({"sparse2d"})),
        ),
        scene_count=2,
        seed=3,
        sweep=SweepSpec(axis="keep_fraction", values=(1.0, 0.0)),
        fit=quick_fit,
    )


def flat_model(vertices, faces, vertex_iuv, part_count=None) -> BodyModel:
    """Single-joint, shape-free model over explicit vertices; used for rasterizer scenarios"""
    vertices = np.asarray(vertices, dtype=np.float64)
    V = vertices.shape[0]
    vertex_iuv = np.asarray(vertex_iuv, dtype=np.float64)
    return BodyModel(
        template_vertices=vertices,
        faces=np.asarray(faces, dtype=np.int64),
        shape_dirs=np.zeros((V, 3, 0)),
        joint_regressor=np.full((1, V), 1.0 / V),
        skin_weights=np.ones((V, 1)),
        parents=np.array([-1]),
        vertex_iuv=vertex_iuv,
        part_count=part_count or int(vertex_iuv[:, 0].max()),
    )
