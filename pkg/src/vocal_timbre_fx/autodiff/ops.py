"""Functional front end to the primitive table."""

from __future__ import annotations

from typing import Optional, Sequence, Tuple, Union

from vocal_timbre_fx.autodiff.tape import ArrayLike, Tensor, record
from vocal_timbre_fx.errors import ShapeError

Axis = Optional[Union[int, Tuple[int, ...]]]


def add(a: ArrayLike, b: ArrayLike) -> Tensor:
    return record("add", a, b)


def sub(a: ArrayLike, b: ArrayLike) -> Tensor:
    return record("sub", a, b)


def mul(a: ArrayLike, b: ArrayLike) -> Tensor:
    return record("mul", a, b)


def div(a: ArrayLike, b: ArrayLike) -> Tensor:
    return record("div", a, b)


def matmul(a: ArrayLike, b: ArrayLike) -> Tensor:
    return record("matmul", a, b)


def sum(x: ArrayLike, axis: Axis = None, keepdims: bool = False) -> Tensor:  # noqa: A001
    return record("sum", x, axis=axis, keepdims=keepdims)


def mean(x: ArrayLike, axis: Axis = None, keepdims: bool = False) -> Tensor:
    return record("mean", x, axis=axis, keepdims=keepdims)


def concat(xs: Sequence[ArrayLike], axis: int = 0) -> Tensor:
    if not xs:
        raise ShapeError("concat: nothing to concatenate.")
    return record("concat", *xs, axis=axis)


def reshape(x: ArrayLike, shape: Tuple[int, ...]) -> Tensor:
    return record("reshape", x, shape=tuple(shape))


def transpose(x: ArrayLike) -> Tensor:
    return record("transpose", x)


def broadcast(x: ArrayLike, shape: Tuple[int, ...]) -> Tensor:
    return record("broadcast", x, shape=tuple(shape))


def cumsum(x: ArrayLike, axis: int = -1) -> Tensor:
    return record("cumsum", x, axis=axis)


def sin(x: ArrayLike) -> Tensor:
    return record("sin", x)


def exp(x: ArrayLike) -> Tensor:
    return record("exp", x)


def log(x: ArrayLike) -> Tensor:
    return record("log", x)


def pow(x: ArrayLike, exponent: float) -> Tensor:  # noqa: A001
    return record("pow", x, exponent=float(exponent))


def sqrt(x: ArrayLike) -> Tensor:
    return record("pow", x, exponent=0.5)


def abs(x: ArrayLike) -> Tensor:  # noqa: A001
    return record("abs", x)


def sigmoid(x: ArrayLike) -> Tensor:
    return record("sigmoid", x)


def tanh(x: ArrayLike) -> Tensor:
    return record("tanh", x)


def leaky_relu(x: ArrayLike, slope: float = 0.2) -> Tensor:
    return record("leaky_relu", x, slope=slope)


def softmax(x: ArrayLike, axis: int = -1) -> Tensor:
    return record("softmax", x, axis=axis)


def rfft(x: ArrayLike) -> Tensor:
    return record("rfft", x)


def magnitude(x: ArrayLike, eps: float = 1e-12) -> Tensor:
    """|rfft(x)| along the last axis, kept strictly positive so it stays differentiable."""
    spectrum = rfft(x)
    return sqrt(sum(spectrum * spectrum, axis=-2) + eps)


def frame(x: ArrayLike, size: int, hop: int) -> Tensor:
    return record("frame", x, size=int(size), hop=int(hop))


def overlap_add(frames: ArrayLike, hop: int) -> Tensor:
    return record("overlap_add", frames, hop=int(hop))


def convolve(a: ArrayLike, b: ArrayLike) -> Tensor:
    return record("convolve", a, b)


def upsample(x: ArrayLike, hop: int, start: int, stop: int) -> Tensor:
    """Linear interpolation of frame-rate rows onto samples [start, stop)."""
    return record("upsample", x, hop=int(hop), start=int(start), stop=int(stop))
