"""Ablation harness: paired scenes, supervision mixes and perturbation sweeps"""

import logging
from concurrent.futures import ProcessPoolExecutor
from dataclasses import replace
from typing import Dict, List, Optional, Sequence, Tuple

import numpy as np
import torch

from densefit.domain.entities.annotations import AnnotationBundle
from densefit.domain.entities.body_model import BodyModel
from densefit.domain.entities.correspondence import KeypointPartTable, UVAtlas
from densefit.domain.entities.experiment import (
    ExperimentConfig,
    ResultRow,
    SceneOutcome,
    SupervisionMix,
    SyntheticScene,
)
from densefit.domain.entities.objectives import LossWeights
from densefit.domain.errors import ConfigError, DenseFitError
from densefit.domain.services.atlas import build_atlas
from densefit.domain.services.fitter import fit
from densefit.domain.services.metrics import evaluate_metrics
from densefit.domain.services.mini_model import leg_swap_pairs
from densefit.domain.services.refinement import corrupt_swap_parts, default_part_table, refine_iuv
from densefit.domain.services.sampling import add_uv_noise, dropout_keypoints, sample_dense_keypoints
from densefit.domain.services.scene_generator import generate_scene

logger = logging.getLogger(__name__)

THREE_D_SOURCES = frozenset({"gt_params", "joints3d"})

JobKey = Tuple[int, int, int]  # (mix index, sweep value index, scene id)


def scene_seeds(seed: int, count: int) -> List[int]:
    return [int(s) for s in np.random.SeedSequence(seed).generate_state(count)]


def perturbation_seed(scene: SyntheticScene, value_index: int) -> int:
    return int(np.random.SeedSequence([scene.seed, value_index]).generate_state(1)[0])


def perturbed_annotations(
    model: BodyModel,
    scene: SyntheticScene,
    axis: str,
    value: float,
    value_index: int,
    table: Optional[KeypointPartTable] = None,
) -> AnnotationBundle:
    """Scene annotations after the sweep's perturbation; identical for every mix"""
    ann = scene.annotations
    seed = perturbation_seed(scene, value_index)
    if axis == "noise" and ann.dense is not None:
        return ann.with_dense(add_uv_noise(ann.dense, value, seed))
    if axis == "keep_fraction" and ann.dense is not None:
        return ann.with_dense(dropout_keypoints(ann.dense, value, seed))
    if axis == "refinement":
        corrupted = corrupt_swap_parts(scene.iuv_map, leg_swap_pairs(model.part_names))
        if value >= 0.5 and ann.sparse2d is not None:
            table = table if table is not None else default_part_table(model)
            corrupted = refine_iuv(corrupted, ann.sparse2d, table)
        return ann.with_dense(sample_dense_keypoints(corrupted, scene.dense_count, scene.sample_seed))
    return ann


def mix_sources(mix: SupervisionMix, scene: SyntheticScene, experiment_seed: int) -> frozenset:
    """Sources a mix uses on one scene; 3D sources survive with probability ``three_d_fraction``"""
    if mix.three_d_fraction >= 1.0 or not (mix.sources & THREE_D_SOURCES):
        return mix.sources
    rng = np.random.default_rng([experiment_seed, scene.scene_id])
    if rng.random() < mix.three_d_fraction:
        return mix.sources
    return mix.sources - THREE_D_SOURCES


def mix_weights(mix: SupervisionMix, ann: AnnotationBundle, override: Optional[LossWeights]) -> LossWeights:
    if override is not None:
        return replace(override, use_pose=mix.use_pose, use_shape=mix.use_shape)
    return LossWeights.balanced(ann.has_3d, ann.has_2d, ann.has_dense, mix.use_pose, mix.use_shape)


def run_job(
    model: BodyModel,
    atlas: UVAtlas,
    config: ExperimentConfig,
    scene: SyntheticScene,
    mix: SupervisionMix,
    value: float,
    value_index: int,
) -> SceneOutcome:
    """Fit one (mix, sweep value, scene) cell and score it against ground truth"""
    try:
        ann = perturbed_annotations(model, scene, config.sweep.axis, value, value_index, config.part_table)
        subset = ann.restricted_to(mix_sources(mix, scene, config.seed)) if ann is not None else None
        if subset is None:
            return SceneOutcome(scene_id=scene.scene_id, error="no supervision left after perturbation")
        fit_config = replace(config.fit, weights=mix_weights(mix, subset, config.weights))
        result = fit(model, atlas, subset, fit_config)
        metrics = evaluate_metrics(model, result.params, scene.gt_params, atlas, scene.frame, config.align_root)
        return SceneOutcome(
            scene_id=scene.scene_id,
            metrics=metrics,
            iterations=result.iterations_used,
            converged=result.converged,
        )
    except (DenseFitError, ValueError) as exc:
        logger.warning("Mix %s, %s=%s, scene %d failed: %s", mix.name, config.sweep.axis, value, scene.scene_id, exc)
        return SceneOutcome(scene_id=scene.scene_id, error=f"{type(exc).__name__}: {exc}")


def _init_worker() -> None:
    torch.set_num_threads(1)


def _run_packed(args) -> SceneOutcome:
    return run_job(*args)


def generate_scenes(model: BodyModel, atlas: UVAtlas, config: ExperimentConfig) -> List[Optional[SyntheticScene]]:
    scenes: List[Optional[SyntheticScene]] = []
    for scene_id, seed in enumerate(scene_seeds(config.seed, config.scene_count)):
        try:
            scenes.append(generate_scene(model, atlas, seed, config.frame, scene_id))
        except DenseFitError as exc:
            logger.warning("Scene %d could not be generated: %s", scene_id, exc)
            scenes.append(None)
    return scenes


def run_suite(
    config: ExperimentConfig,
    model: BodyModel,
    atlas: Optional[UVAtlas] = None,
    scenes: Optional[Sequence[Optional[SyntheticScene]]] = None,
) -> List[ResultRow]:
    """Run every (mix, sweep value, scene) fit and aggregate per (mix, sweep value)

    All mixes see the same scenes. Results are keyed by
    (mix, sweep value, scene id), so the schedule never changes the output.
    """
    if config.part_table is not None:
        try:
            config.part_table.check_part_count(model.part_count)
        except ValueError as exc:
            raise ConfigError(str(exc), field="part_table") from exc
    atlas = atlas if atlas is not None else build_atlas(model)
    scenes = list(scenes) if scenes is not None else generate_scenes(model, atlas, config)
    values = config.sweep.values
    logger.info(
        "Running suite: %d mixes x %d %s values x %d scenes",
        len(config.mixes),
        len(values),
        config.sweep.axis,
        len(scenes),
    )

    outcomes: Dict[JobKey, SceneOutcome] = {}
    jobs = []
    for m, mix in enumerate(config.mixes):
        for v, value in enumerate(values):
            for scene_id, scene in enumerate(scenes):
                if scene is None:
                    outcomes[(m, v, scene_id)] = SceneOutcome(scene_id=scene_id, error="scene generation failed")
                else:
                    jobs.append(((m, v, scene_id), (model, atlas, config, scene, mix, float(value), v)))

    if config.workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=config.workers, initializer=_init_worker) as pool:
            results = pool.map(_run_packed, [args for _, args in jobs])
            for (key, _), outcome in zip(jobs, results):
                outcomes[key] = outcome
    else:
        for key, args in jobs:
            outcomes[key] = run_job(*args)

    rows = []
    for m, mix in enumerate(config.mixes):
        for v, value in enumerate(values):
            row = ResultRow(
                mix=mix.name,
                sweep_axis=config.sweep.axis,
                sweep_value=float(value),
                outcomes=tuple(outcomes[(m, v, s)] for s in range(len(scenes))),
            )
            if row.failed_count:
                logger.warning("Mix %s at %s=%s: %d failed fit(s)", mix.name, row.sweep_axis, value, row.failed_count)
            rows.append(row)
    logger.info("Suite finished: %d rows", len(rows))
    return rows
