"""Primitive table: eager forward functions and their vector-Jacobian products.

Every entry maps a kind name to a `Primitive(forward, vjp)`. `forward` receives the
input arrays plus keyword attributes; `vjp` receives the upstream gradient, the
input arrays, the forward output and the same attributes, and returns one
gradient per input (or None where an input needs none).

Binary elementwise kinds accept operands of equal shape, a scalar operand, or an
operand whose shape is a trailing suffix of the other (leading-dimension
broadcast). Anything else must go through the explicit `broadcast` kind.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Dict, Optional, Tuple

import numpy as np
from scipy.signal import fftconvolve
from scipy.special import expit

from vocal_timbre_fx.errors import DomainError, ShapeError

Grads = Tuple[Optional[np.ndarray], ...]


@dataclass(frozen=True)
class Primitive:
    forward: Callable[..., np.ndarray]
    vjp: Callable[..., Grads]


PRIMITIVES: Dict[str, Primitive] = {}


def primitive(kind: str, vjp: Callable[..., Grads]) -> Callable[[Callable[..., np.ndarray]], Callable[..., np.ndarray]]:
    def register(forward: Callable[..., np.ndarray]) -> Callable[..., np.ndarray]:
        PRIMITIVES[kind] = Primitive(forward=forward, vjp=vjp)
        return forward

    return register


# -- broadcasting helpers ---------------------------------------------------


def check_binary_shapes(kind: str, a: Tuple[int, ...], b: Tuple[int, ...]) -> None:
    if a == b or _is_scalar(a) or _is_scalar(b):
        return
    small, large = (a, b) if len(a) < len(b) else (b, a)
    if len(small) < len(large) and large[len(large) - len(small) :] == small:
        return
    raise ShapeError(f"{kind}: incompatible shapes {a} and {b}.")


def _is_scalar(shape: Tuple[int, ...]) -> bool:
    return shape == () or shape == (1,)


def unbroadcast(grad: np.ndarray, shape: Tuple[int, ...]) -> np.ndarray:
    """Sum `grad` down to `shape` (inverse of leading-dim, scalar or size-1 broadcast)."""
    if grad.shape == shape:
        return grad
    if _is_scalar(shape):
        return np.asarray(grad.sum()).reshape(shape)
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, n in enumerate(shape) if n == 1 and grad.shape[i] != 1)
    if axes:
        grad = grad.sum(axis=axes, keepdims=True)
    return grad.reshape(shape)


def _binary(kind: str, fn: Callable[[np.ndarray, np.ndarray], np.ndarray]) -> Callable[[np.ndarray, np.ndarray], np.ndarray]:
    def forward(a: np.ndarray, b: np.ndarray) -> np.ndarray:
        check_binary_shapes(kind, a.shape, b.shape)
        return fn(a, b)

    return forward


# -- elementwise arithmetic -------------------------------------------------


def _add_vjp(g, a, b, out):
    return unbroadcast(g, a.shape), unbroadcast(g, b.shape)


def _sub_vjp(g, a, b, out):
    return unbroadcast(g, a.shape), unbroadcast(-g, b.shape)


def _mul_vjp(g, a, b, out):
    return unbroadcast(g * b, a.shape), unbroadcast(g * a, b.shape)


def _div_vjp(g, a, b, out):
    return unbroadcast(g / b, a.shape), unbroadcast(-g * a / (b * b), b.shape)


PRIMITIVES["add"] = Primitive(_binary("add", np.add), _add_vjp)
PRIMITIVES["sub"] = Primitive(_binary("sub", np.subtract), _sub_vjp)
PRIMITIVES["mul"] = Primitive(_binary("mul", np.multiply), _mul_vjp)


def _div_forward(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    check_binary_shapes("div", a.shape, b.shape)
    if np.any(b == 0):
        raise DomainError("div: division by zero.")
    return a / b


PRIMITIVES["div"] = Primitive(_div_forward, _div_vjp)


def _matmul_vjp(g, a, b, out):
    return g @ b.T, a.T @ g


@primitive("matmul", _matmul_vjp)
def _matmul(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    if a.ndim != 2 or b.ndim != 2 or a.shape[1] != b.shape[0]:
        raise ShapeError(f"matmul: cannot multiply {a.shape} by {b.shape}.")
    return a @ b


# -- reductions and structure -----------------------------------------------


def _expand_reduced(g: np.ndarray, shape: Tuple[int, ...], axis, keepdims: bool) -> np.ndarray:
    if axis is not None and not keepdims:
        g = np.expand_dims(g, axis)
    return np.broadcast_to(g, shape)


def _sum_vjp(g, x, out, axis=None, keepdims=False):
    return (np.array(_expand_reduced(g, x.shape, axis, keepdims)),)


@primitive("sum", _sum_vjp)
def _sum(x: np.ndarray, axis=None, keepdims: bool = False) -> np.ndarray:
    return np.sum(x, axis=axis, keepdims=keepdims)


def _mean_vjp(g, x, out, axis=None, keepdims=False):
    count = x.size if axis is None else np.prod([x.shape[a] for a in np.atleast_1d(axis)])
    return (np.array(_expand_reduced(g, x.shape, axis, keepdims)) / count,)


@primitive("mean", _mean_vjp)
def _mean(x: np.ndarray, axis=None, keepdims: bool = False) -> np.ndarray:
    return np.mean(x, axis=axis, keepdims=keepdims)


def _concat_vjp(g, *xs_and_out, axis=0):
    xs = xs_and_out[:-1]
    bounds = np.cumsum([x.shape[axis] for x in xs])[:-1]
    return tuple(np.split(g, bounds, axis=axis))


@primitive("concat", _concat_vjp)
def _concat(*xs: np.ndarray, axis: int = 0) -> np.ndarray:
    return np.concatenate(xs, axis=axis)


def _slice_vjp(g, x, out, index=()):
    grad = np.zeros_like(x)
    grad[index] = g
    return (grad,)


@primitive("slice", _slice_vjp)
def _slice(x: np.ndarray, index=()) -> np.ndarray:
    return np.array(x[index])


def _reshape_vjp(g, x, out, shape=()):
    return (g.reshape(x.shape),)


@primitive("reshape", _reshape_vjp)
def _reshape(x: np.ndarray, shape=()) -> np.ndarray:
    return x.reshape(shape)


def _transpose_vjp(g, x, out):
    return (g.T,)


@primitive("transpose", _transpose_vjp)
def _transpose(x: np.ndarray) -> np.ndarray:
    return np.array(x.T)


def _broadcast_vjp(g, x, out, shape=()):
    return (unbroadcast(g, x.shape),)


@primitive("broadcast", _broadcast_vjp)
def _broadcast(x: np.ndarray, shape=()) -> np.ndarray:
    try:
        return np.array(np.broadcast_to(x, shape))
    except ValueError as e:
        raise ShapeError(f"broadcast: cannot broadcast {x.shape} to {shape}.") from e


def _cumsum_vjp(g, x, out, axis=-1):
    return (np.flip(np.cumsum(np.flip(g, axis=axis), axis=axis), axis=axis),)


@primitive("cumsum", _cumsum_vjp)
def _cumsum(x: np.ndarray, axis: int = -1) -> np.ndarray:
    return np.cumsum(x, axis=axis)


# -- elementwise functions --------------------------------------------------


@primitive("sin", lambda g, x, out: (g * np.cos(x),))
def _sin(x: np.ndarray) -> np.ndarray:
    return np.sin(x)


@primitive("exp", lambda g, x, out: (g * out,))
def _exp(x: np.ndarray) -> np.ndarray:
    return np.exp(x)


@primitive("log", lambda g, x, out: (g / x,))
def _log(x: np.ndarray) -> np.ndarray:
    if np.any(x <= 0):
        raise DomainError("log: argument must be strictly positive.")
    return np.log(x)


def _pow_vjp(g, x, out, exponent=1.0):
    return (g * exponent * np.power(x, exponent - 1.0),)


@primitive("pow", _pow_vjp)
def _pow(x: np.ndarray, exponent: float = 1.0) -> np.ndarray:
    if float(exponent) != int(exponent) and np.any(x < 0):
        raise DomainError("pow: negative base with a fractional exponent.")
    return np.power(x, exponent)


@primitive("abs", lambda g, x, out: (g * np.sign(x),))
def _abs(x: np.ndarray) -> np.ndarray:
    return np.abs(x)


@primitive("sigmoid", lambda g, x, out: (g * out * (1.0 - out),))
def _sigmoid(x: np.ndarray) -> np.ndarray:
    return expit(x)


@primitive("tanh", lambda g, x, out: (g * (1.0 - out * out),))
def _tanh(x: np.ndarray) -> np.ndarray:
    return np.tanh(x)


def _leaky_relu_vjp(g, x, out, slope=0.2):
    return (g * np.where(x > 0, 1.0, slope),)


@primitive("leaky_relu", _leaky_relu_vjp)
def _leaky_relu(x: np.ndarray, slope: float = 0.2) -> np.ndarray:
    return np.where(x > 0, x, slope * x)


def _softmax_vjp(g, x, out, axis=-1):
    return (out * (g - np.sum(g * out, axis=axis, keepdims=True)),)


@primitive("softmax", _softmax_vjp)
def _softmax(x: np.ndarray, axis: int = -1) -> np.ndarray:
    shifted = np.exp(x - np.max(x, axis=axis, keepdims=True))
    return shifted / np.sum(shifted, axis=axis, keepdims=True)


# -- signal processing ------------------------------------------------------


def _rfft_vjp(g, x, out):
    n = x.shape[-1]
    spectrum = g[..., 0, :] + 1j * g[..., 1, :]
    return (n * np.real(np.fft.ifft(spectrum, n=n, axis=-1)),)


@primitive("rfft", _rfft_vjp)
def _rfft(x: np.ndarray) -> np.ndarray:
    """Real FFT along the last axis; output [..., 2, n // 2 + 1] stacks (real, imag)."""
    spectrum = np.fft.rfft(x, axis=-1)
    return np.stack([spectrum.real, spectrum.imag], axis=-2)


def _frame_forward(x: np.ndarray, size: int, hop: int) -> np.ndarray:
    if x.ndim != 1 or x.shape[0] < size:
        raise ShapeError(f"frame: need a 1-D signal of at least {size} samples, got {x.shape}.")
    n_frames = 1 + (x.shape[0] - size) // hop
    return np.array(np.lib.stride_tricks.sliding_window_view(x, size)[::hop][:n_frames])


def _overlap_add_forward(frames: np.ndarray, hop: int) -> np.ndarray:
    if frames.ndim != 2:
        raise ShapeError(f"overlap_add: frames must be 2-D, got {frames.shape}.")
    n_frames, size = frames.shape
    out = np.zeros((n_frames - 1) * hop + size)
    positions = np.arange(n_frames)[:, None] * hop + np.arange(size)[None, :]
    np.add.at(out, positions.ravel(), frames.ravel())
    return out


def _frame_vjp(g, x, out, size=0, hop=1):
    grad = np.zeros_like(x)
    used = _overlap_add_forward(g, hop)
    grad[: used.shape[0]] = used
    return (grad,)


def _overlap_add_vjp(g, frames, out, hop=1):
    return (_frame_forward(g, frames.shape[1], hop),)


PRIMITIVES["frame"] = Primitive(_frame_forward, _frame_vjp)
PRIMITIVES["overlap_add"] = Primitive(_overlap_add_forward, _overlap_add_vjp)


def _convolve_vjp(g, a, b, out):
    grad_a = fftconvolve(g, b[..., ::-1], mode="valid", axes=-1)
    grad_b = fftconvolve(g, a[..., ::-1], mode="valid", axes=-1)
    return grad_a, grad_b


@primitive("convolve", _convolve_vjp)
def _convolve(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Full linear convolution along the last axis, batched over equal leading axes."""
    if a.shape[:-1] != b.shape[:-1]:
        raise ShapeError(f"convolve: leading shapes differ: {a.shape} vs {b.shape}.")
    return fftconvolve(a, b, mode="full", axes=-1)


def interpolation_weights(n_frames: int, hop: int, start: int, stop: int) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Knot indices and weights for linear interpolation between frame centers.

    Frame i sits on sample i * hop; samples past the last frame hold its value.
    """
    position = np.arange(start, stop) / hop
    lower = np.minimum(np.floor(position).astype(np.int64), n_frames - 1)
    upper = np.minimum(lower + 1, n_frames - 1)
    weight = np.where(lower == upper, 0.0, position - lower)
    return lower, upper, weight


def _upsample_vjp(g, x, out, hop=1, start=0, stop=0):
    lower, upper, weight = interpolation_weights(x.shape[0], hop, start, stop)
    w = weight.reshape((-1,) + (1,) * (x.ndim - 1))
    grad = np.zeros_like(x)
    np.add.at(grad, lower, (1.0 - w) * g)
    np.add.at(grad, upper, w * g)
    return (grad,)


@primitive("upsample", _upsample_vjp)
def _upsample(x: np.ndarray, hop: int = 1, start: int = 0, stop: int = 0) -> np.ndarray:
    lower, upper, weight = interpolation_weights(x.shape[0], hop, start, stop)
    w = weight.reshape((-1,) + (1,) * (x.ndim - 1))
    return (1.0 - w) * x[lower] + w * x[upper]
