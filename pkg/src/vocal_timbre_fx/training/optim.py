"""Adam optimizer over named parameter arrays."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Dict, Mapping, Tuple

import numpy as np

from vocal_timbre_fx.config import TrainConfig
from vocal_timbre_fx.errors import ShapeError


@dataclass(frozen=True)
class AdamHyperParams:
    learning_rate: float = 1e-3
    beta1: float = 0.9
    beta2: float = 0.999
    eps: float = 1e-8

    @classmethod
    def from_config(cls, cfg: TrainConfig) -> "AdamHyperParams":
        return cls(cfg.learning_rate, cfg.beta1, cfg.beta2, cfg.adam_eps)


@dataclass(frozen=True, eq=False)
class AdamState:
    """First and second moment estimates plus the number of updates applied."""

    step: int
    m: Dict[str, np.ndarray]
    v: Dict[str, np.ndarray]

    @classmethod
    def zeros(cls, params: Mapping[str, np.ndarray]) -> "AdamState":
        return cls(
            step=0,
            m={k: np.zeros_like(p, dtype=np.float64) for k, p in params.items()},
            v={k: np.zeros_like(p, dtype=np.float64) for k, p in params.items()},
        )


def adam_step(
    params: Mapping[str, np.ndarray],
    grads: Mapping[str, np.ndarray],
    state: AdamState,
    hyper: AdamHyperParams = AdamHyperParams(),
) -> Tuple[Dict[str, np.ndarray], AdamState]:
    """One bias-corrected Adam update; inputs are left untouched."""
    if set(params) != set(grads) or set(params) != set(state.m):
        raise ShapeError("Parameters, gradients and optimizer state must share the same names.")
    step = state.step + 1
    correction1 = 1.0 - hyper.beta1**step
    correction2 = 1.0 - hyper.beta2**step

    new_params: Dict[str, np.ndarray] = {}
    new_m: Dict[str, np.ndarray] = {}
    new_v: Dict[str, np.ndarray] = {}
    for name, value in params.items():
        grad = np.asarray(grads[name], dtype=np.float64)
        if grad.shape != np.shape(value):
            raise ShapeError(f"{name}: gradient shape {grad.shape} does not match parameter {np.shape(value)}.")
        m = hyper.beta1 * state.m[name] + (1.0 - hyper.beta1) * grad
        v = hyper.beta2 * state.v[name] + (1.0 - hyper.beta2) * grad * grad
        update = hyper.learning_rate * (m / correction1) / (np.sqrt(v / correction2) + hyper.eps)
        new_params[name] = value - update
        new_m[name] = m
        new_v[name] = v
    return new_params, AdamState(step=step, m=new_m, v=new_v)
