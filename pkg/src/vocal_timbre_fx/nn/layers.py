"""Dense, layer-norm and GRU building blocks over autodiff tensors.

Parameters live in flat mappings keyed by dotted names (``"f0.dense0.w"``).
Values may be plain arrays (inference) or tensors watched on a tape (training).
"""

from __future__ import annotations

from typing import Dict, Mapping, Optional, Tuple

import numpy as np

from vocal_timbre_fx.autodiff import Tensor, ops
from vocal_timbre_fx.autodiff.tape import ArrayLike

Params = Mapping[str, ArrayLike]
Shapes = Dict[str, Tuple[int, ...]]

LEAKY_SLOPE = 0.2
LAYER_NORM_EPS = 1e-5


def exp_sigmoid(x: ArrayLike, max_value: float = 2.0, threshold: float = 1e-7) -> Tensor:
    """Scaled sigmoid, ``max_value * sigmoid(x) ** ln(10) + threshold``.

    Strictly positive and bounded by `max_value + threshold`.
    """
    return ops.pow(ops.sigmoid(x), np.log(10.0)) * max_value + threshold


def dense(params: Params, name: str, x: ArrayLike) -> Tensor:
    return ops.matmul(x, params[f"{name}.w"]) + params[f"{name}.b"]


def dense_shapes(name: str, n_in: int, n_out: int) -> Shapes:
    return {f"{name}.w": (n_in, n_out), f"{name}.b": (n_out,)}


def layer_norm(params: Params, name: str, x: Tensor) -> Tensor:
    """Normalize each row to zero mean and unit variance, then scale and shift."""
    centered = x - ops.broadcast(ops.mean(x, axis=-1, keepdims=True), x.shape)
    variance = ops.mean(centered * centered, axis=-1, keepdims=True)
    normalized = centered / ops.broadcast(ops.sqrt(variance + LAYER_NORM_EPS), x.shape)
    return normalized * params[f"{name}.gamma"] + params[f"{name}.beta"]


def layer_norm_shapes(name: str, n: int) -> Shapes:
    return {f"{name}.gamma": (n,), f"{name}.beta": (n,)}


def dense_stack(params: Params, name: str, x: ArrayLike, n_layers: int = 2) -> Tensor:
    """`n_layers` x (dense -> layer norm -> leaky ReLU)."""
    h = x
    for i in range(n_layers):
        h = dense(params, f"{name}.dense{i}", h)
        h = layer_norm(params, f"{name}.norm{i}", h)
        h = ops.leaky_relu(h, LEAKY_SLOPE)
    return h


def dense_stack_shapes(name: str, n_in: int, width: int, n_layers: int = 2) -> Shapes:
    shapes: Shapes = {}
    for i in range(n_layers):
        shapes.update(dense_shapes(f"{name}.dense{i}", n_in if i == 0 else width, width))
        shapes.update(layer_norm_shapes(f"{name}.norm{i}", width))
    return shapes


def gru(params: Params, name: str, x: ArrayLike, h0: Optional[ArrayLike] = None) -> Tensor:
    """Run a GRU over the rows of `x` (shape [frames, n_in]); returns [frames, hidden].

    Gate layout of the weight columns is (reset, update, candidate)::

        r = sigmoid(x W_r + b_r + h U_r + c_r)
        z = sigmoid(x W_z + b_z + h U_z + c_z)
        n = tanh(x W_n + b_n + r * (h U_n + c_n))
        h' = (1 - z) * n + z * h
    """
    w_u = params[f"{name}.u"]
    hidden = w_u.shape[0]
    projected = dense(params, f"{name}.input", x)
    h: ArrayLike = np.zeros((1, hidden)) if h0 is None else ops.reshape(h0, (1, hidden))

    outputs = []
    for t in range(projected.shape[0]):
        xt = projected[t : t + 1, :]
        ht = ops.matmul(h, w_u) + params[f"{name}.c"]
        r = ops.sigmoid(xt[:, :hidden] + ht[:, :hidden])
        z = ops.sigmoid(xt[:, hidden : 2 * hidden] + ht[:, hidden : 2 * hidden])
        n = ops.tanh(xt[:, 2 * hidden :] + r * ht[:, 2 * hidden :])
        h = (1.0 - z) * n + z * h
        outputs.append(h)
    return ops.concat(outputs, axis=0)


def gru_shapes(name: str, n_in: int, hidden: int) -> Shapes:
    shapes = dense_shapes(f"{name}.input", n_in, 3 * hidden)
    shapes[f"{name}.u"] = (hidden, 3 * hidden)
    shapes[f"{name}.c"] = (3 * hidden,)
    return shapes


def init_params(shapes: Shapes, rng: np.random.Generator) -> Dict[str, np.ndarray]:
    """Initialize parameters by naming convention.

    Biases (``.b``, ``.c``, ``.beta``) start at zero, layer-norm gains at one,
    recurrent matrices (``.u``) as per-gate orthogonal blocks and dense weights
    (``.w``) Glorot-uniform.
    """
    params: Dict[str, np.ndarray] = {}
    for key, shape in shapes.items():
        suffix = key.rsplit(".", 1)[-1]
        if suffix == "gamma":
            params[key] = np.ones(shape)
        elif suffix == "u":
            hidden = shape[0]
            params[key] = np.concatenate([_orthogonal(hidden, rng) for _ in range(shape[1] // hidden)], axis=1)
        elif suffix == "w":
            limit = np.sqrt(6.0 / (shape[0] + shape[1]))
            params[key] = rng.uniform(-limit, limit, size=shape)
        else:
            params[key] = np.zeros(shape)
    return params


def _orthogonal(n: int, rng: np.random.Generator) -> np.ndarray:
    q, r = np.linalg.qr(rng.standard_normal((n, n)))
    return q * np.sign(np.diag(r))
