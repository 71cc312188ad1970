from dataclasses import dataclass, field
from typing import Optional, Tuple

from densefit.domain.entities.body_model import FullParams
from densefit.domain.entities.objectives import LossBreakdown, LossWeights
from densefit import settings


@dataclass(frozen=True)
class FitConfig:
    """Optimizer settings for one per-image fit"""

    max_iters: int = settings.MAX_ITERS
    step_size: float = settings.STEP_SIZE
    beta1: float = settings.BETA1
    beta2: float = settings.BETA2
    tolerance: float = settings.TOLERANCE
    window: int = settings.CONVERGENCE_WINDOW
    step_decay: float = settings.STEP_DECAY
    staged: bool = False
    # recorded with the run; the descent itself draws no random numbers
    seed: int = 0
    # None picks balanced weights from the annotation sources
    weights: Optional[LossWeights] = None
    log_every: int = settings.LOG_EVERY

    def __post_init__(self) -> None:
        if self.max_iters <= 0:
            raise ValueError("max_iters must be positive")
        if self.step_size <= 0:
            raise ValueError("step_size must be positive")
        if not (0 < self.beta1 < 1 and 0 < self.beta2 < 1):
            raise ValueError("moment decay rates must lie in (0, 1)")
        if self.tolerance <= 0:
            raise ValueError("tolerance must be positive")
        if self.window <= 0:
            raise ValueError("window must be positive")
        if not 0 < self.step_decay <= 1:
            raise ValueError("step_decay must lie in (0, 1]")


@dataclass(frozen=True, eq=False)
class FitResult:
    """Best parameters found and the optimization history"""

    params: FullParams
    loss_trace: Tuple[float, ...]  # best-so-far totals, initial value first
    raw_trace: Tuple[float, ...] = field(default=())
    iterations_used: int = 0
    converged: bool = False
    breakdown: Optional[LossBreakdown] = None
