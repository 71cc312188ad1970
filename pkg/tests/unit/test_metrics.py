import logging

import numpy as np
import pytest

from densefit.domain.entities.body_model import FullParams
from densefit.domain.entities.camera import CameraParams, ImageFrame
from densefit.domain.entities.objectives import MetricReport
from densefit.domain.services.kinematics import pose_mesh
from densefit.domain.services.metrics import dense_keypoint_distance, evaluate_metrics

pytestmark = pytest.mark.unit


def params(pose=None, shape=None, camera=(1.0, 0.0, 0.0)) -> FullParams:
    return FullParams(
        pose=np.zeros(36) if pose is None else np.asarray(pose, dtype=np.float64),
        shape=np.zeros(4) if shape is None else np.asarray(shape, dtype=np.float64),
        camera=np.asarray(camera, dtype=np.float64),
    )


class TestEvaluateMetrics:
    def test_identical_params_score_zero(self, mini_model, atlas, scene):
        report = evaluate_metrics(mini_model, scene.gt_params, scene.gt_params, atlas, scene.frame)
        assert report.as_dict() == {"pve": 0.0, "mpjpe": 0.0, "pve_t": 0.0, "dkd": 0.0}

    def test_pose_only_difference_leaves_pve_t_at_zero(self, mini_model, atlas):
        """Test that the shape-only error ignores pose entirely"""
        pose = np.zeros(36)
        pose[6:9] = [0.3, -0.2, 0.1]
        report = evaluate_metrics(mini_model, params(pose=pose), params(), atlas)
        assert report.pve_t == 0.0
        assert report.pve > 0.0
        assert report.mpjpe >= 0.0

    def test_unit_shape_coefficient(self, mini_model, atlas):
        """Test that beta = e1 gives PVE-T equal to the mean norm of the first shape direction"""
        shape = np.zeros(4)
        shape[0] = 1.0
        report = evaluate_metrics(mini_model, params(shape=shape), params(), atlas)
        expected = np.linalg.norm(mini_model.shape_dirs[:, :, 0], axis=1).mean()
        assert report.pve_t == pytest.approx(expected, rel=1e-12)

    def test_root_alignment_removes_translation_of_root(self, mini_model, atlas):
        """Test that a root rotation pivots on the root joint, so alignment changes nothing"""
        pose = np.zeros(36)
        pose[:3] = [0.0, 0.0, 0.5]
        aligned = evaluate_metrics(mini_model, params(pose=pose), params(), atlas, align_root=True)
        raw = evaluate_metrics(mini_model, params(pose=pose), params(), atlas, align_root=False)
        assert aligned.pve == pytest.approx(raw.pve, rel=1e-9)

    def test_dkd_tracks_camera_shift(self, mini_model, atlas):
        """Test that shifting the camera by t moves every located keypoint by t * (W - 1) / 2 pixels"""
        frame = ImageFrame()
        shifted = params(camera=(1.0, 0.1, 0.0))
        report = evaluate_metrics(mini_model, shifted, params(), atlas, frame)
        assert report.dkd == pytest.approx(0.1 * (frame.width - 1) / 2.0, rel=1e-9)
        assert report.pve == 0.0

    def test_dimension_mismatch(self, mini_model, atlas):
        bad = FullParams(pose=np.zeros(36), shape=np.zeros(10), camera=np.array([1.0, 0.0, 0.0]))
        with pytest.raises(ValueError):
            evaluate_metrics(mini_model, bad, params(), atlas)


class TestDenseKeypointDistance:
    def test_empty_render_warns_and_scores_zero(self, mini_model, atlas, caplog):
        """Test that a ground truth outside the frame gives DKD 0 with a warning"""
        mesh = pose_mesh(mini_model, params())
        away = CameraParams(focal=1.0, tx=50.0, ty=50.0)
        with caplog.at_level(logging.WARNING):
            distance = dense_keypoint_distance(mini_model, atlas, mesh, away, mesh, away, ImageFrame())
        assert distance == 0.0
        assert "empty" in caplog.text


class TestMetricReport:
    def test_negative_metric_rejected(self):
        with pytest.raises(ValueError):
            MetricReport(pve=-1.0, mpjpe=0.0, pve_t=0.0, dkd=0.0)
