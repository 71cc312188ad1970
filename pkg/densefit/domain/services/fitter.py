"""Per-image parameter recovery by bias-corrected moment descent"""

import logging
import math
from typing import Dict, List, Optional, Sequence

import numpy as np
import torch

from densefit.domain.entities.annotations import AnnotationBundle
from densefit.domain.entities.body_model import BodyModel, FullParams
from densefit.domain.entities.correspondence import UVAtlas
from densefit.domain.entities.fitting import FitConfig, FitResult
from densefit.domain.entities.objectives import LossWeights
from densefit.domain.errors import FitDivergedError
from densefit.domain.services.kinematics import DTYPE
from densefit.domain.services.losses import TERMS, Objective, gradient_of
from densefit.settings import ADAM_EPS, STAGED_FRACTION

logger = logging.getLogger(__name__)

MIN_FOCAL = 1e-3


def init_mean_params(model: BodyModel) -> FullParams:
    """T-pose, mean shape, unit focal and centred camera"""
    return FullParams(
        pose=np.zeros(3 * model.joint_count),
        shape=np.zeros(model.shape_dim),
        camera=np.array([1.0, 0.0, 0.0]),
    )


def weights_for(ann: AnnotationBundle, config: FitConfig) -> LossWeights:
    if config.weights is not None:
        return config.weights
    return LossWeights.balanced(ann.has_3d, ann.has_2d, ann.has_dense)


def _non_finite_gradient_term(objective: Objective, x: torch.Tensor) -> str:
    """First term whose own gradient has a NaN or infinite entry"""
    for name in TERMS:
        terms = objective.terms(x)
        (gradient,) = gradient_of(terms[name], (x,))
        if not torch.isfinite(gradient).all():
            return name
    return "total"


def _evaluate(objective: Objective, x: torch.Tensor, iteration: int):
    terms = objective.terms(x)
    for name, value in terms.items():
        if not torch.isfinite(value):
            raise FitDivergedError(name, iteration)
    total = objective.weighted(terms)
    if not torch.isfinite(total):
        raise FitDivergedError("total", iteration)
    (gradient,) = gradient_of(total, (x,))
    if not torch.isfinite(gradient).all():
        raise FitDivergedError(_non_finite_gradient_term(objective, x), iteration)
    return float(total.detach()), gradient


def window_plateaued(raw_trace: Sequence[float], window: int, tolerance: float) -> bool:
    """Relative change between the means of the last two ``window``-long stretches is below ``tolerance``"""
    if len(raw_trace) < 2 * window:
        return False
    previous = math.fsum(raw_trace[-2 * window:-window]) / window
    current = math.fsum(raw_trace[-window:]) / window
    return abs(previous - current) <= tolerance * max(abs(previous), 1e-12)


def _warmup_mask(x: torch.Tensor) -> torch.Tensor:
    """1 on the global rotation and camera entries, 0 elsewhere"""
    mask = torch.zeros_like(x)
    mask[:3] = 1.0
    mask[-3:] = 1.0
    return mask


def fit(
    model: BodyModel,
    atlas: Optional[UVAtlas],
    ann: AnnotationBundle,
    config: FitConfig,
    init: Optional[FullParams] = None,
) -> FitResult:
    """Minimise the weighted objective from ``init`` (mean parameters by default)

    Returns the best parameters seen; ``loss_trace`` is the best-so-far
    total after each iteration, initial value first.
    """
    init = init if init is not None else init_mean_params(model)
    init.check_against(model)
    objective = Objective(model, atlas, ann, weights_for(ann, config))

    x = torch.tensor(init.to_vector(), dtype=DTYPE, requires_grad=True)
    optimizer = torch.optim.Adam([x], lr=config.step_size, betas=(config.beta1, config.beta2), eps=ADAM_EPS)
    scheduler = torch.optim.lr_scheduler.ExponentialLR(optimizer, gamma=config.step_decay)
    warmup = math.ceil(STAGED_FRACTION * config.max_iters) if config.staged else 0
    mask = _warmup_mask(x)

    value, gradient = _evaluate(objective, x, 0)
    best_value, best_x = value, x.detach().clone()
    raw_trace: List[float] = [value]
    loss_trace: List[float] = [value]
    converged = False
    iteration = 0

    logger.debug("Fit start: loss %.6g, sources %s", value, ",".join(ann.sources))
    for iteration in range(1, config.max_iters + 1):
        optimizer.zero_grad()
        x.grad = gradient * mask if iteration <= warmup else gradient
        optimizer.step()
        scheduler.step()
        with torch.no_grad():
            # weak perspective needs a positive scale
            x[-3].clamp_(min=MIN_FOCAL)

        value, gradient = _evaluate(objective, x, iteration)
        raw_trace.append(value)
        if value < best_value:
            best_value, best_x = value, x.detach().clone()
        loss_trace.append(best_value)

        if config.log_every and iteration % config.log_every == 0:
            logger.debug("iteration %d: loss %.6g, best %.6g", iteration, value, best_value)

        if iteration > warmup and window_plateaued(raw_trace[warmup:], config.window, config.tolerance):
            converged = True
            break

    params = FullParams.from_vector(best_x.numpy(), model.joint_count, model.shape_dim)
    breakdown = objective.breakdown(params)
    logger.debug(
        "Fit done after %d iterations (converged=%s): loss %.6g", iteration, converged, breakdown.total
    )
    return FitResult(
        params=params,
        loss_trace=tuple(loss_trace),
        raw_trace=tuple(raw_trace),
        iterations_used=iteration,
        converged=converged,
        breakdown=breakdown,
    )


def fit_summary(result: FitResult) -> Dict[str, float]:
    trace = result.loss_trace
    return {
        "initial_loss": trace[0],
        "final_loss": trace[-1],
        "iterations": float(result.iterations_used),
    }
