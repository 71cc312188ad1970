"""Fit a parametric body model to sparse 2D, dense IUV and 3D annotations"""

from densefit.domain.errors import (
    AnnotationError,
    AtlasError,
    ConfigError,
    DenseFitError,
    FitDivergedError,
    ModelValidationError,
    ReportError,
    SceneGenerationError,
)
from densefit.domain.services.atlas import build_atlas, phi_lookup
from densefit.domain.services.fitter import fit, init_mean_params
from densefit.domain.services.gradcheck import check_gradient
from densefit.domain.services.kinematics import pose_mesh, rodrigues
from densefit.domain.services.losses import loss_2d, loss_3d, loss_dense, total_loss_and_grad
from densefit.domain.services.metrics import evaluate_metrics
from densefit.domain.services.mini_model import make_mini_model
from densefit.domain.services.projection import project
from densefit.domain.services.rasterizer import rasterize_iuv
from densefit.domain.services.refinement import refine_iuv
from densefit.domain.services.sampling import add_uv_noise, dropout_keypoints, sample_dense_keypoints
from densefit.domain.services.scene_generator import generate_scene
from densefit.domain.services.suite import run_suite
from densefit.infrastructure.reporting.report_writer import emit_report
from densefit.infrastructure.storage.iuv_codec import read_iuv, write_iuv
from densefit.infrastructure.storage.json_model_repository import load_model, save_model

__version__ = "1.0.0"

__all__ = [
    "AnnotationError",
    "AtlasError",
    "ConfigError",
    "DenseFitError",
    "FitDivergedError",
    "ModelValidationError",
    "ReportError",
    "SceneGenerationError",
    "add_uv_noise",
    "build_atlas",
    "check_gradient",
    "dropout_keypoints",
    "emit_report",
    "evaluate_metrics",
    "fit",
    "generate_scene",
    "init_mean_params",
    "load_model",
    "loss_2d",
    "loss_3d",
    "loss_dense",
    "make_mini_model",
    "phi_lookup",
    "pose_mesh",
    "project",
    "rasterize_iuv",
    "read_iuv",
    "refine_iuv",
    "rodrigues",
    "run_suite",
    "sample_dense_keypoints",
    "save_model",
    "total_loss_and_grad",
    "write_iuv",
]
