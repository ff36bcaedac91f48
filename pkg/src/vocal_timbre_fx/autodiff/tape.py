"""Reverse-mode differentiation over an explicit tape.

A `Tape` is an append-only list of nodes. Each node names a primitive kind, the
ids of its parent nodes and the arrays the vector-Jacobian product needs. Parents
always precede children, so a single reverse sweep over the ids is a valid
topological order.

Only the tape that is *active* on the current thread records. Tensors that
belong to no tape, or to a different one, enter a recorded operation as
constants. Worker threads each open their own tape, so nodes never cross threads.

Typical use::

    with Tape() as tape:
        w = tape.watch(weights)
        loss = ops.sum(w * w)
    grads = backward(tape, loss)
    grads[w.node_id]
"""

from __future__ import annotations

import logging
import threading
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Optional, Tuple, Union

import numpy as np

from vocal_timbre_fx.autodiff.primitives import PRIMITIVES
from vocal_timbre_fx.errors import GradientError

logger = logging.getLogger(__name__)

ArrayLike = Union["Tensor", np.ndarray, float, int]

_LEAF = "leaf"
_local = threading.local()


@dataclass
class Node:
    kind: str
    parents: Tuple[Optional[int], ...]
    inputs: Tuple[np.ndarray, ...]
    output: np.ndarray
    attrs: Dict[str, Any] = field(default_factory=dict)


class Tensor:
    """A float64 array, optionally tied to a node on a tape."""

    __slots__ = ("data", "node_id", "tape")
    __array_ufunc__ = None

    def __init__(self, data: Any, node_id: Optional[int] = None, tape: Optional["Tape"] = None) -> None:
        self.data = np.asarray(data, dtype=np.float64)
        self.node_id = node_id
        self.tape = tape

    @property
    def shape(self) -> Tuple[int, ...]:
        return self.data.shape

    @property
    def ndim(self) -> int:
        return self.data.ndim

    @property
    def size(self) -> int:
        return self.data.size

    @property
    def T(self) -> "Tensor":
        return record("transpose", self)

    def numpy(self) -> np.ndarray:
        return self.data

    def item(self) -> float:
        if self.data.size != 1:
            raise GradientError(f"item() needs a single-element tensor, got shape {self.shape}.")
        return float(self.data.reshape(-1)[0])

    def __len__(self) -> int:
        return self.data.shape[0]

    def __repr__(self) -> str:
        where = f"node={self.node_id}" if self.node_id is not None else "constant"
        return f"Tensor(shape={self.shape}, {where})"

    def __add__(self, other: ArrayLike) -> "Tensor":
        return record("add", self, other)

    def __radd__(self, other: ArrayLike) -> "Tensor":
        return record("add", other, self)

    def __sub__(self, other: ArrayLike) -> "Tensor":
        return record("sub", self, other)

    def __rsub__(self, other: ArrayLike) -> "Tensor":
        return record("sub", other, self)

    def __mul__(self, other: ArrayLike) -> "Tensor":
        return record("mul", self, other)

    def __rmul__(self, other: ArrayLike) -> "Tensor":
        return record("mul", other, self)

    def __truediv__(self, other: ArrayLike) -> "Tensor":
        return record("div", self, other)

    def __rtruediv__(self, other: ArrayLike) -> "Tensor":
        return record("div", other, self)

    def __neg__(self) -> "Tensor":
        return record("mul", self, -1.0)

    def __matmul__(self, other: ArrayLike) -> "Tensor":
        return record("matmul", self, other)

    def __rmatmul__(self, other: ArrayLike) -> "Tensor":
        return record("matmul", other, self)

    def __pow__(self, exponent: float) -> "Tensor":
        return record("pow", self, exponent=float(exponent))

    def __getitem__(self, index: Any) -> "Tensor":
        if not isinstance(index, tuple):
            index = (index,)
        return record("slice", self, index=index)


class Tape:
    """Append-only record of the operations run while it is active."""

    def __init__(self) -> None:
        self.nodes: List[Node] = []
        self._previous: Optional[Tape] = None

    def __enter__(self) -> "Tape":
        self._previous = current_tape()
        _local.tape = self
        return self

    def __exit__(self, *exc: object) -> None:
        _local.tape = self._previous
        self._previous = None

    def __len__(self) -> int:
        return len(self.nodes)

    def watch(self, value: Any) -> Tensor:
        """Register `value` as a differentiable leaf and return its tensor."""
        data = np.array(value.data if isinstance(value, Tensor) else value, dtype=np.float64)
        return Tensor(data, self._append(Node(_LEAF, (), (), data)), self)

    def leaf_ids(self) -> List[int]:
        return [i for i, node in enumerate(self.nodes) if node.kind == _LEAF]

    def _append(self, node: Node) -> int:
        self.nodes.append(node)
        return len(self.nodes) - 1


def current_tape() -> Optional[Tape]:
    return getattr(_local, "tape", None)


def as_tensor(value: ArrayLike) -> Tensor:
    return value if isinstance(value, Tensor) else Tensor(value)


def value_of(value: ArrayLike) -> np.ndarray:
    """Plain array behind `value`, whether it is a tensor or not."""
    return value.data if isinstance(value, Tensor) else np.asarray(value, dtype=np.float64)


def record(kind: str, *inputs: ArrayLike, **attrs: Any) -> Tensor:
    """Run primitive `kind` eagerly and append it to the active tape if any input is on it."""
    primitive = PRIMITIVES.get(kind)
    if primitive is None:
        raise GradientError(f"Unknown primitive {kind!r}.")
    tensors = [as_tensor(x) for x in inputs]
    arrays = tuple(t.data for t in tensors)
    output = np.asarray(primitive.forward(*arrays, **attrs), dtype=np.float64)

    tape = current_tape()
    if tape is None or not any(t.tape is tape and t.node_id is not None for t in tensors):
        return Tensor(output)
    parents = tuple(t.node_id if t.tape is tape else None for t in tensors)
    node_id = tape._append(Node(kind, parents, arrays, output, attrs))
    return Tensor(output, node_id, tape)


def backward(tape: Tape, output: Tensor) -> Dict[int, np.ndarray]:
    """Gradient of scalar `output` with respect to every leaf of `tape`.

    Returns
    -------
    dict
        Leaf node id -> gradient with the leaf's shape. Leaves that do not
        influence `output` get zeros.

    Raises
    ------
    GradientError
        If `output` is not a single-element tensor recorded on `tape`.
    """
    if output.tape is not tape or output.node_id is None:
        raise GradientError("Output was not recorded on this tape.")
    if output.size != 1:
        raise GradientError(f"backward needs a scalar output, got shape {output.shape}.")

    grads: Dict[int, np.ndarray] = {output.node_id: np.ones_like(output.data)}
    for node_id in range(output.node_id, -1, -1):
        node = tape.nodes[node_id]
        if node.kind == _LEAF or node_id not in grads:
            continue
        upstream = grads.pop(node_id)
        input_grads = PRIMITIVES[node.kind].vjp(upstream, *node.inputs, node.output, **node.attrs)
        for parent, grad in zip(node.parents, input_grads):
            if parent is None or grad is None:
                continue
            if parent in grads:
                grads[parent] = grads[parent] + grad
            else:
                grads[parent] = np.asarray(grad, dtype=np.float64)

    result = {}
    for leaf in tape.leaf_ids():
        grad = grads.get(leaf)
        result[leaf] = np.zeros_like(tape.nodes[leaf].output) if grad is None else grad.reshape(tape.nodes[leaf].output.shape)
    return result


def value_and_grad(
    fn: Callable[..., Tensor], *params: np.ndarray
) -> Tuple[float, List[np.ndarray]]:
    """Evaluate `fn(*watched params)` on a fresh tape and differentiate it."""
    with Tape() as tape:
        leaves = [tape.watch(p) for p in params]
        out = fn(*leaves)
    grads = backward(tape, out)
    return out.item(), [grads[leaf.node_id] for leaf in leaves]


def watch_all(tape: Tape, params: Dict[str, np.ndarray]) -> Dict[str, Tensor]:
    return {name: tape.watch(value) for name, value in params.items()}


def gradients_by_name(grads: Dict[int, np.ndarray], watched: Dict[str, Tensor]) -> Dict[str, np.ndarray]:
    return {name: grads[t.node_id] for name, t in watched.items()}

