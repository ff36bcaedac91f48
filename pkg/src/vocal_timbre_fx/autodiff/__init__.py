"""Tape-based reverse-mode automatic differentiation."""

from vocal_timbre_fx.autodiff import ops
from vocal_timbre_fx.autodiff.tape import (
    Tape,
    Tensor,
    as_tensor,
    backward,
    current_tape,
    gradients_by_name,
    record,
    value_and_grad,
    value_of,
    watch_all,
)

__all__ = [
    "ops",
    "Tape",
    "Tensor",
    "as_tensor",
    "backward",
    "current_tape",
    "gradients_by_name",
    "record",
    "value_and_grad",
    "value_of",
    "watch_all",
]
