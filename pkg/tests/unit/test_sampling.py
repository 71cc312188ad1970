import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy import stats

from densefit.domain.entities.correspondence import DenseKeypoint, IUVMap
from densefit.domain.services.sampling import add_uv_noise, dropout_keypoints, sample_dense_keypoints

pytestmark = pytest.mark.unit


def map_with_foreground(count: int, width: int = 20, height: int = 20, seed: int = 0) -> IUVMap:
    rng = np.random.default_rng(seed)
    iuv = np.zeros((height, width, 3), dtype=np.uint8)
    flat = rng.choice(width * height, size=count, replace=False)
    rows, cols = np.unravel_index(flat, (height, width))
    iuv[rows, cols, 0] = rng.integers(1, 13, size=count)
    iuv[rows, cols, 1] = rng.integers(0, 256, size=count)
    iuv[rows, cols, 2] = rng.integers(0, 256, size=count)
    return IUVMap(iuv)


def keypoint_row(n: int, u: float = 128.0, v: float = 128.0):
    return [DenseKeypoint(x=float(i), y=0.0, part=1, u=u, v=v) for i in range(n)]


class TestSampleDenseKeypoints:
    def test_exhausts_small_foreground(self):
        """Test that asking for more keypoints than foreground returns every pixel"""
        assert len(sample_dense_keypoints(map_with_foreground(50), 200, seed=0)) == 50

    def test_background_only_map(self):
        assert sample_dense_keypoints(IUVMap.blank(16, 16), 10, seed=0) == []

    def test_exact_count_and_values(self):
        """Test that samples carry the pixel position and its IUV triple"""
        iuv_map = map_with_foreground(120)
        sample = sample_dense_keypoints(iuv_map, 30, seed=5)
        assert len(sample) == 30
        assert len({(kp.x, kp.y) for kp in sample}) == 30
        for kp in sample:
            part, u, v = iuv_map.iuv[int(kp.y), int(kp.x)]
            assert (kp.part, kp.u, kp.v) == (part, u, v)

    def test_raster_order(self):
        sample = sample_dense_keypoints(map_with_foreground(120), 40, seed=1)
        keys = [(kp.y, kp.x) for kp in sample]
        assert keys == sorted(keys)

    @settings(max_examples=50, deadline=None)
    @given(st.integers(min_value=0, max_value=2**31 - 1), st.integers(min_value=0, max_value=80))
    def test_fixed_seed_is_reproducible(self, seed, n):
        iuv_map = map_with_foreground(60, seed=3)
        assert sample_dense_keypoints(iuv_map, n, seed) == sample_dense_keypoints(iuv_map, n, seed)

    def test_negative_count(self):
        with pytest.raises(ValueError):
            sample_dense_keypoints(map_with_foreground(5), -1, seed=0)

    def test_uniform_over_foreground(self):
        """Test single-pixel draws over 10^4 seeds against the multinomial oracle"""
        iuv_map = map_with_foreground(5, width=6, height=6, seed=9)
        ys, xs = np.nonzero(iuv_map.parts)
        index = {(float(x), float(y)): i for i, (x, y) in enumerate(zip(xs, ys))}
        counts = np.zeros(len(index))
        draws = 10_000
        for seed in range(draws):
            (kp,) = sample_dense_keypoints(iuv_map, 1, seed)
            counts[index[(kp.x, kp.y)]] += 1
        assert stats.chisquare(counts).pvalue > 1e-3
        sigma = np.sqrt(draws * 0.2 * 0.8)
        assert (np.abs(counts - draws * 0.2) < 4 * sigma).all()


class TestAddUVNoise:
    def test_zero_sigma_is_identity(self):
        kps = keypoint_row(10, u=12.5, v=240.0)
        assert add_uv_noise(kps, 0.0, seed=1) == kps

    def test_clamped_to_byte_range(self):
        """Test that large noise near the chart edge stays in [0, 255]"""
        noisy = add_uv_noise(keypoint_row(2000, u=250.0, v=3.0), 40.0, seed=2)
        us = np.array([kp.u for kp in noisy])
        vs = np.array([kp.v for kp in noisy])
        assert us.min() >= 0 and us.max() <= 255
        assert vs.min() >= 0 and vs.max() <= 255
        assert (us == 255.0).any()

    def test_monte_carlo_standard_deviation(self):
        """Test that sigma=10 perturbations have empirical std 10 +- 0.1"""
        noisy = add_uv_noise(keypoint_row(100_000), 10.0, seed=3)
        du = np.array([kp.u for kp in noisy]) - 128.0
        assert abs(du.std() - 10.0) < 0.1

    def test_positions_and_parts_untouched(self):
        kps = keypoint_row(20)
        for before, after in zip(kps, add_uv_noise(kps, 5.0, seed=4)):
            assert (before.x, before.y, before.part) == (after.x, after.y, after.part)

    def test_negative_sigma(self):
        with pytest.raises(ValueError):
            add_uv_noise(keypoint_row(3), -1.0, seed=0)


class TestDropoutKeypoints:
    def test_keep_all_is_identity(self):
        kps = keypoint_row(30)
        assert dropout_keypoints(kps, 1.0, seed=0) == kps

    def test_keep_none_is_empty(self):
        assert dropout_keypoints(keypoint_row(30), 0.0, seed=0) == []

    def test_ten_percent_of_150(self):
        """Test that 10% of 150 keeps 15 keypoints drawn from the input, in order"""
        kps = keypoint_row(150)
        kept = dropout_keypoints(kps, 0.1, seed=7)
        assert len(kept) == 15
        positions = [kps.index(kp) for kp in kept]
        assert positions == sorted(positions)

    @pytest.mark.parametrize("fraction", [-0.1, 1.5])
    def test_fraction_out_of_range(self, fraction):
        with pytest.raises(ValueError):
            dropout_keypoints(keypoint_row(5), fraction, seed=0)

    @settings(max_examples=100, deadline=None)
    @given(st.integers(min_value=0, max_value=200), st.floats(min_value=0.0, max_value=1.0))
    def test_count_is_rounded_fraction(self, n, fraction):
        kept = dropout_keypoints(keypoint_row(n), fraction, seed=0)
        assert len(kept) == min(n, int(np.floor(fraction * n + 0.5)))
