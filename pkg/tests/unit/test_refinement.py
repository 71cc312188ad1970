from collections import Counter, deque

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from densefit.domain.entities.annotations import SparseKeypointSet
from densefit.domain.entities.correspondence import IUVMap, KeypointPartTable
from densefit.domain.errors import AnnotationError
from densefit.domain.services.mini_model import leg_swap_pairs, part_id
from densefit.domain.services.refinement import (
    corrupt_swap_parts,
    default_part_table,
    keypoint_pixel,
    majority_part,
    refine_iuv,
)
from densefit.domain.services.scene_generator import generate_scene
from densefit.domain.services.suite import scene_seeds

pytestmark = pytest.mark.unit

LEFT_FOOT = part_id("left_foot")
RIGHT_SHIN = part_id("right_shin")
RIGHT_FOOT = part_id("right_foot")
RIGHT_ANKLE = 11


def make_map(parts: np.ndarray) -> IUVMap:
    parts = np.asarray(parts, dtype=np.uint8)
    iuv = np.zeros(parts.shape + (3,), dtype=np.uint8)
    iuv[..., 0] = parts
    iuv[..., 1] = np.where(parts > 0, 40, 0)
    iuv[..., 2] = np.where(parts > 0, 90, 0)
    return IUVMap(iuv)


def keypoints(entries):
    """(id, x, y, visible) tuples to a SparseKeypointSet"""
    return SparseKeypointSet(
        positions=np.array([[x, y] for _, x, y, _ in entries], dtype=np.float64).reshape(-1, 2),
        visible=np.array([vis for *_, vis in entries], dtype=bool),
        ids=np.array([kid for kid, *_ in entries], dtype=np.int64),
    )


def oracle_majority(parts, col, row):
    h, w = parts.shape
    counts = Counter(
        int(parts[r, c])
        for r in range(max(row - 1, 0), min(row + 2, h))
        for c in range(max(col - 1, 0), min(col + 2, w))
        if parts[r, c] != 0
    )
    if not counts:
        return None
    best = max(counts.values())
    return min(p for p, n in counts.items() if n == best)


def flood_fill(parts, seeds, part):
    """Breadth-first 8-connected fill over pixels labelled ``part``"""
    h, w = parts.shape
    seen = set()
    queue = deque((r, c) for r, c in seeds if parts[r, c] == part)
    seen.update(queue)
    while queue:
        r, c = queue.popleft()
        for dr in (-1, 0, 1):
            for dc in (-1, 0, 1):
                nr, nc = r + dr, c + dc
                if 0 <= nr < h and 0 <= nc < w and (nr, nc) not in seen and parts[nr, nc] == part:
                    seen.add((nr, nc))
                    queue.append((nr, nc))
    return seen


def oracle_refine(parts, visits, table):
    """Reference refinement: repeated passes of majority poll plus BFS removal"""
    parts = np.array(parts, copy=True)
    h, w = parts.shape
    changed = True
    while changed:
        changed = False
        for keypoint_id, col, row in visits:
            part = oracle_majority(parts, col, row)
            if part is None or table.is_consistent(keypoint_id, part):
                continue
            window = [
                (r, c)
                for r in range(max(row - 1, 0), min(row + 2, h))
                for c in range(max(col - 1, 0), min(col + 2, w))
            ]
            for r, c in flood_fill(parts, window, part):
                parts[r, c] = 0
                changed = True
    return parts


class TestKeypointPixel:
    @pytest.mark.parametrize(
        "x,y,expected", [(3.0, 4.0, (3, 4)), (3.5, 4.49, (4, 4)), (2.49, 0.5, (2, 1)), (0.0, 0.0, (0, 0))]
    )
    def test_halves_round_up(self, x, y, expected):
        assert keypoint_pixel(x, y) == expected

    def test_majority_ties_go_to_smaller_id(self):
        parts = np.array([[2, 2, 0], [3, 3, 0], [0, 0, 0]], dtype=np.uint8)
        assert majority_part(parts, 1, 1) == 2
        assert majority_part(np.zeros((3, 3), dtype=np.uint8), 1, 1) is None


class TestRefineIUV:
    def setup_method(self):
        self.table = KeypointPartTable.from_pairs({RIGHT_ANKLE: {RIGHT_SHIN, RIGHT_FOOT}})

    def test_wrong_foot_block_removed(self):
        """Test a right-ankle keypoint sitting on a 4x4 block labelled left foot"""
        parts = np.zeros((8, 8), dtype=np.uint8)
        parts[2:6, 2:6] = LEFT_FOOT
        parts[7, 7] = LEFT_FOOT  # separate region, not reachable from the keypoint
        iuv_map = make_map(parts)
        kps = keypoints([(RIGHT_ANKLE, 3.0, 3.0, True)])

        refined = refine_iuv(iuv_map, kps, self.table)

        expected = parts.copy()
        for r, c in flood_fill(parts, [(r, c) for r in (2, 3, 4) for c in (2, 3, 4)], LEFT_FOOT):
            expected[r, c] = 0
        assert np.array_equal(refined.parts, expected)
        assert refined.parts[2:6, 2:6].sum() == 0
        assert refined.parts[7, 7] == LEFT_FOOT
        assert not refined.iuv[refined.parts == 0].any()

    def test_consistent_majority_is_noop(self):
        """Test that a keypoint on an allowed part leaves the map untouched"""
        parts = np.zeros((8, 8), dtype=np.uint8)
        parts[2:6, 2:6] = RIGHT_FOOT
        iuv_map = make_map(parts)
        refined = refine_iuv(iuv_map, keypoints([(RIGHT_ANKLE, 3.0, 3.0, True)]), self.table)
        assert refined.same_as(iuv_map)

    def test_background_window_is_noop(self):
        """Test that a keypoint over background leaves the map untouched"""
        parts = np.zeros((8, 8), dtype=np.uint8)
        parts[5:8, 5:8] = LEFT_FOOT
        iuv_map = make_map(parts)
        refined = refine_iuv(iuv_map, keypoints([(RIGHT_ANKLE, 1.0, 1.0, True)]), self.table)
        assert refined.same_as(iuv_map)

    def test_invisible_keypoints_ignored(self):
        parts = np.zeros((8, 8), dtype=np.uint8)
        parts[2:6, 2:6] = LEFT_FOOT
        iuv_map = make_map(parts)
        refined = refine_iuv(iuv_map, keypoints([(RIGHT_ANKLE, 3.0, 3.0, False)]), self.table)
        assert refined.same_as(iuv_map)

    def test_unlisted_keypoint_is_consistent(self):
        """Test that keypoints absent from the table never trigger removal"""
        parts = np.zeros((8, 8), dtype=np.uint8)
        parts[2:6, 2:6] = LEFT_FOOT
        iuv_map = make_map(parts)
        refined = refine_iuv(iuv_map, keypoints([(4, 3.0, 3.0, True)]), self.table)
        assert refined.same_as(iuv_map)

    def test_visible_keypoint_outside_frame(self):
        parts = np.zeros((8, 8), dtype=np.uint8)
        with pytest.raises(AnnotationError):
            refine_iuv(make_map(parts), keypoints([(RIGHT_ANKLE, 9.0, 3.0, True)]), self.table)

    @pytest.mark.parametrize("x, y", [(-0.3, 3.0), (3.0, -0.4), (7.4, 3.0), (3.0, 7.2)])
    def test_visible_keypoint_rounding_into_frame_is_rejected(self, x, y):
        """Test that the frame check runs on the raw position, not the rounded pixel"""
        parts = np.zeros((8, 8), dtype=np.uint8)
        with pytest.raises(AnnotationError) as exc_info:
            refine_iuv(make_map(parts), keypoints([(RIGHT_ANKLE, x, y, True)]), self.table)
        assert exc_info.value.field == "sparse2d"

    def test_invisible_keypoint_outside_frame_is_fine(self):
        parts = np.zeros((8, 8), dtype=np.uint8)
        iuv_map = make_map(parts)
        refined = refine_iuv(iuv_map, keypoints([(RIGHT_ANKLE, 90.0, 3.0, False)]), self.table)
        assert refined.same_as(iuv_map)

    @settings(max_examples=150, deadline=None)
    @given(
        st.integers(min_value=0, max_value=2**32 - 1),
        st.lists(
            st.tuples(
                st.integers(min_value=0, max_value=5),
                st.integers(min_value=0, max_value=11),
                st.integers(min_value=0, max_value=11),
            ),
            min_size=1,
            max_size=5,
        ),
    )
    def test_matches_flood_fill_oracle(self, map_seed, entries):
        """Test random maps against the BFS reference, plus idempotence and locality"""
        rng = np.random.default_rng(map_seed)
        parts = rng.choice([0, 1, 2, 3], size=(12, 12), p=[0.4, 0.2, 0.2, 0.2]).astype(np.uint8)
        table = KeypointPartTable.from_pairs({k: {1 + k % 3} for k in range(6)})
        kps = keypoints([(kid, float(x), float(y), True) for kid, x, y in entries])
        iuv_map = make_map(parts)

        refined = refine_iuv(iuv_map, kps, table)

        order = np.argsort(kps.ids, kind="stable")
        visits = [(int(kps.ids[i]), *keypoint_pixel(*kps.positions[i])) for i in order]
        assert np.array_equal(refined.parts, oracle_refine(parts, visits, table))
        changed = refined.parts != parts
        assert (refined.parts[changed] == 0).all()
        assert np.array_equal(refined.iuv[~changed], iuv_map.iuv[~changed])
        assert refine_iuv(refined, kps, table).same_as(refined)


CORRUPTED_MAPS = 50


@pytest.fixture(scope="module")
def corrupted_scenes(mini_model, atlas):
    """Fifty rendered scenes with left and right lower legs swapped in the part channel"""
    swaps = leg_swap_pairs(mini_model.part_names)
    scenes = [
        generate_scene(mini_model, atlas, seed, scene_id=i)
        for i, seed in enumerate(scene_seeds(5, CORRUPTED_MAPS))
    ]
    return [(scene, corrupt_swap_parts(scene.iuv_map, swaps)) for scene in scenes]


class TestCorruptedFeet:
    def test_swapped_feet_match_flood_fill_on_fifty_maps(self, mini_model, corrupted_scenes):
        """Test that refinement clears exactly the reachable wrong-part pixels, nothing else, idempotently"""
        table = default_part_table(mini_model)
        cleared = 0
        for scene, corrupted in corrupted_scenes:
            sparse = scene.annotations.sparse2d
            refined = refine_iuv(corrupted, sparse, table)

            order = np.argsort(sparse.ids, kind="stable")
            visits = [
                (int(sparse.ids[i]), *keypoint_pixel(*sparse.positions[i])) for i in order if sparse.visible[i]
            ]
            expected = oracle_refine(corrupted.parts, visits, table)
            assert np.array_equal(refined.parts, expected), scene.scene_id

            changed = refined.parts != corrupted.parts
            assert (refined.parts[changed] == 0).all()
            assert np.array_equal(refined.iuv[~changed], corrupted.iuv[~changed])
            for keypoint_id, col, row in visits:
                part = majority_part(refined.parts, col, row)
                assert part is None or table.is_consistent(keypoint_id, part)
            assert refine_iuv(refined, sparse, table).same_as(refined)
            cleared += int(changed.sum())
        assert cleared > 0

    def test_swap_exchanges_labels(self):
        parts = np.array([[LEFT_FOOT, RIGHT_FOOT, 0, 1]], dtype=np.uint8)
        swapped = corrupt_swap_parts(make_map(parts), [(LEFT_FOOT, RIGHT_FOOT)])
        assert swapped.parts.tolist() == [[RIGHT_FOOT, LEFT_FOOT, 0, 1]]
        assert np.array_equal(swapped.iuv[..., 1:], make_map(parts).iuv[..., 1:])


class TestDefaultPartTable:
    def test_ankle_allows_shin_and_foot(self, mini_model):
        """Test that each ankle may sit on its own foot or its shin only"""
        table = default_part_table(mini_model)
        assert table.parts_for(RIGHT_ANKLE) == frozenset({RIGHT_SHIN, RIGHT_FOOT})
        assert not table.is_consistent(RIGHT_ANKLE, LEFT_FOOT)

    def test_pelvis_allows_torso_and_limb_roots(self, mini_model):
        table = default_part_table(mini_model)
        assert part_id("torso") in table.parts_for(0)
        assert part_id("left_thigh") in table.parts_for(0)
        table.check_part_count(mini_model.part_count)
