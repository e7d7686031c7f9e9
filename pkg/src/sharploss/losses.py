"""Mean absolute error and the sharpness-augmented loss L1 + beta * (-Q)."""
import warnings
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .errors import ConfigError, DimensionError
from .image import as_image
from .qgrad import q_gradient
from .qmetric import QConfig, q_value

# beyond this weight the sharpness term produces heavy ringing
BETA_RINGING_LIMIT = 0.5


@dataclass(frozen=True)
class LossConfig:
    beta: float = 0.0
    q_cfg: QConfig = field(default_factory=QConfig)
    l1_delta: float = 1e-3

    def __post_init__(self):
        if not self.beta >= 0:
            raise ConfigError(f"beta must be >= 0, got {self.beta}")
        if not self.l1_delta > 0:
            raise ConfigError(f"l1_delta must be positive, got {self.l1_delta}")
        if self.beta > BETA_RINGING_LIMIT:
            warnings.warn(
                f"beta={self.beta} exceeds {BETA_RINGING_LIMIT}; expect severe ringing artefacts",
                stacklevel=3,
            )


class LossValue(NamedTuple):
    total: float
    l1_term: float
    q_value: float


def _pair(pred, gt):
    pred = as_image(pred)
    gt = as_image(gt)
    if pred.shape != gt.shape:
        raise DimensionError(f"prediction {pred.shape} and target {gt.shape} differ in shape")
    return pred, gt


def l1_loss(pred, gt) -> float:
    """Mean absolute difference."""
    pred, gt = _pair(pred, gt)
    return float(np.mean(np.abs(pred - gt)))


def charbonnier_grad(residual: np.ndarray, delta: float) -> np.ndarray:
    """Derivative of sqrt(r^2 + delta^2), the smooth stand-in for |r|."""
    return residual / np.sqrt(residual * residual + delta * delta)


def charbonnier_loss(pred, gt, delta: float = 1e-3) -> float:
    pred, gt = _pair(pred, gt)
    r = pred - gt
    return float(np.mean(np.sqrt(r * r + delta * delta)))


def composite_loss(pred, gt, cfg: LossConfig) -> LossValue:
    """L1 + beta * (-Q(pred)). Q is evaluated on the prediction only.

    Q is still reported when beta == 0, but the total is then exactly the L1 value
    (the sharpness term is skipped, not multiplied by zero).
    """
    l1 = l1_loss(pred, gt)
    q = q_value(pred, cfg.q_cfg)
    if cfg.beta == 0:
        return LossValue(l1, l1, q)
    return LossValue(l1 + cfg.beta * (-q), l1, q)


def composite_grad(pred, gt, cfg: LossConfig) -> np.ndarray:
    """Pixel gradient of the composite loss, with the L1 kink smoothed (Charbonnier)."""
    pred, gt = _pair(pred, gt)
    grad = charbonnier_grad(pred - gt, cfg.l1_delta) / pred.size
    if cfg.beta != 0:
        grad = grad - cfg.beta * q_gradient(pred, cfg.q_cfg)
    return grad
