from __future__ import annotations

import math
from typing import Mapping, MutableMapping

import numpy as np

from app.types import ConfigurationError, DimensionError


def cosine_lr(step: int, total_steps: int, base_lr: float) -> float:
    """``base_lr * (1 + cos(pi * step / (total_steps - 1))) / 2``.

    Steps are counted from 0, so the last of ``total_steps`` steps runs at
    rate 0. Flat when the schedule has fewer than two steps.
    """
    if total_steps <= 1:
        return base_lr
    last = total_steps - 1
    t = min(max(step, 0), last)
    return base_lr * (1.0 + math.cos(math.pi * t / last)) / 2.0


class SGDMomentum:
    """SGD with heavy-ball momentum, updating the given arrays in place.

    ``v = momentum * v + (g + weight_decay * p)``; ``p -= lr * v``. Arrays
    without a gradient in a step are left untouched, velocity included.
    """

    def __init__(
        self,
        params: MutableMapping[str, np.ndarray],
        lr: float,
        momentum: float = 0.9,
        weight_decay: float = 0.0,
    ) -> None:
        if lr <= 0:
            raise ConfigurationError(f"learning rate must be positive, got {lr}", key="lr")
        if not 0.0 <= momentum < 1.0:
            raise ConfigurationError(f"momentum must lie in [0, 1), got {momentum}", key="sgd_momentum")
        self.params = params
        self.lr = lr
        self.momentum = momentum
        self.weight_decay = weight_decay
        self.velocity: dict[str, np.ndarray] = {name: np.zeros_like(p) for name, p in params.items()}

    def step(self, grads: Mapping[str, np.ndarray], lr: float | None = None) -> None:
        rate = self.lr if lr is None else lr
        for name, grad in grads.items():
            param = self.params[name]
            if grad.shape != param.shape:
                raise DimensionError(f"sgd[{name}]", param.shape, grad.shape)
            if self.weight_decay:
                grad = grad + self.weight_decay * param
            velocity = self.velocity[name]
            velocity *= self.momentum
            velocity += grad
            param -= rate * velocity
