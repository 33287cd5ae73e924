"""Dense float tensors with a reverse-mode gradient tape.

Row-major numpy storage, float32 by default with a switchable float64 mode
for gradient verification. Differentiable ops record onto an implicit tape
in execution order; ``backward`` replays the tape exactly once in reverse,
after which the tape is dead and a fresh one starts on the next op.

Tensors are value-like: safe to share for reading, never mutated by ops.
A tape belongs to the thread that built it.
"""

from __future__ import annotations

import threading
from contextlib import contextmanager

import numpy as np


class TensorError(Exception):
    """Base class for tensor-library failures."""


class DimensionError(TensorError):
    """Operand shapes are incompatible with the requested op."""


class ContractError(TensorError):
    """An op precondition was violated (wrong dtype, missing grad, ...)."""


class TapeError(TensorError):
    """Tape misuse: replaying a consumed tape, or a loss with no tape."""


class NonFiniteError(TensorError):
    """A forward op produced NaN or Inf."""


class DegenerateInputError(TensorError):
    """Input is structurally valid but numerically degenerate for this op."""


_FLOAT_DTYPES = (np.dtype("float32"), np.dtype("float64"))


class _State(threading.local):
    def __init__(self):
        self.dtype = np.dtype("float32")
        self.recording = True
        self.tape = None


_STATE = _State()


def default_dtype() -> np.dtype:
    return _STATE.dtype


def set_default_dtype(dtype) -> None:
    dt = np.dtype(dtype)
    if dt not in _FLOAT_DTYPES:
        raise ContractError(f"unsupported default dtype {dt}; use float32 or float64")
    _STATE.dtype = dt


@contextmanager
def precision(dtype):
    """Temporarily switch the default float dtype ('float32' / 'float64')."""
    old = _STATE.dtype
    set_default_dtype(dtype)
    try:
        yield
    finally:
        _STATE.dtype = old


@contextmanager
def no_grad():
    """Disable tape recording inside the block (inference / finite differences)."""
    old = _STATE.recording
    _STATE.recording = False
    try:
        yield
    finally:
        _STATE.recording = old


class Tape:
    """Ordered record of executed differentiable ops.

    Node order is execution order, which is already topological, so the
    backward pass is a single reverse sweep visiting each node once.
    """

    __slots__ = ("nodes", "consumed")

    def __init__(self):
        self.nodes = []  # (out_tensor, input_tensors, backward_fn)
        self.consumed = False


def _active_tape() -> Tape:
    tape = _STATE.tape
    if tape is None or tape.consumed:
        tape = Tape()
        _STATE.tape = tape
    return tape


def _finite_or_raise(data: np.ndarray, op: str) -> None:
    if not np.isfinite(data).all():
        raise NonFiniteError(f"{op} produced non-finite values")


class Tensor:
    """A dense n-d float array, optionally tracked on the gradient tape."""

    __slots__ = ("data", "requires_grad", "grad", "_tape", "_node")

    def __init__(self, data, requires_grad: bool = False):
        arr = np.asarray(data)
        if arr.dtype not in _FLOAT_DTYPES:
            arr = arr.astype(_STATE.dtype)
        self.data = arr
        self.requires_grad = bool(requires_grad)
        self.grad = None
        self._tape = None
        self._node = -1

    @property
    def shape(self):
        return self.data.shape

    @property
    def ndim(self):
        return self.data.ndim

    @property
    def size(self):
        return self.data.size

    @property
    def dtype(self):
        return self.data.dtype

    def item(self) -> float:
        if self.data.size != 1:
            raise ContractError(f"item() on tensor of size {self.data.size}")
        return float(self.data.reshape(()))

    def numpy(self) -> np.ndarray:
        return self.data

    def detach(self) -> "Tensor":
        return Tensor(self.data, requires_grad=False)

    def zero_grad(self) -> None:
        self.grad = None

    def _accumulate(self, g: np.ndarray) -> None:
        if self.grad is None:
            self.grad = g.copy()
        else:
            self.grad = self.grad + g

    def __repr__(self):
        flag = ", grad" if self.requires_grad else ""
        return f"Tensor(shape={self.data.shape}, dtype={self.data.dtype}{flag})"

    # -- arithmetic (same-shape only; scalars fold into the op) --------------

    def __add__(self, other):
        if isinstance(other, Tensor):
            _check_binary(self, other, "add")
            return make_result(
                self.data + other.data, (self, other), lambda g: (g, g), "add"
            )
        s = float(other)
        return make_result(self.data + s, (self,), lambda g: (g,), "add")

    __radd__ = __add__

    def __sub__(self, other):
        if isinstance(other, Tensor):
            _check_binary(self, other, "sub")
            return make_result(
                self.data - other.data, (self, other), lambda g: (g, -g), "sub"
            )
        s = float(other)
        return make_result(self.data - s, (self,), lambda g: (g,), "sub")

    def __rsub__(self, other):
        s = float(other)
        return make_result(s - self.data, (self,), lambda g: (-g,), "rsub")

    def __mul__(self, other):
        if isinstance(other, Tensor):
            _check_binary(self, other, "mul")
            a, b = self.data, other.data
            return make_result(a * b, (self, other), lambda g: (g * b, g * a), "mul")
        s = float(other)
        return make_result(self.data * s, (self,), lambda g: (g * s,), "mul")

    __rmul__ = __mul__

    def __truediv__(self, other):
        return self * (1.0 / float(other))

    def __neg__(self):
        return make_result(-self.data, (self,), lambda g: (-g,), "neg")

    # -- reductions / shape ---------------------------------------------------

    def sum(self, axis: int | None = None) -> "Tensor":
        if axis is None:
            shape = self.data.shape

            def bw(g):
                return (np.broadcast_to(g, shape).astype(g.dtype, copy=False),)

            return make_result(np.sum(self.data), (self,), bw, "sum")
        ax = axis % self.data.ndim

        def bw_axis(g):
            return (np.broadcast_to(np.expand_dims(g, ax), self.data.shape).copy(),)

        return make_result(np.sum(self.data, axis=ax), (self,), bw_axis, "sum")

    def mean(self, axis: int | None = None) -> "Tensor":
        n = self.data.size if axis is None else self.data.shape[axis % self.data.ndim]
        if n == 0:
            raise DegenerateInputError("mean over an empty axis")
        return self.sum(axis) * (1.0 / n)

    def reshape(self, *shape) -> "Tensor":
        if len(shape) == 1 and isinstance(shape[0], (tuple, list)):
            shape = tuple(shape[0])
        old = self.data.shape
        try:
            out = self.data.reshape(shape)
        except ValueError as exc:
            raise DimensionError(str(exc)) from None
        return make_result(out, (self,), lambda g: (g.reshape(old),), "reshape")


def _check_binary(a: Tensor, b: Tensor, op: str) -> None:
    if a.data.shape != b.data.shape:
        raise DimensionError(f"{op}: shape mismatch {a.data.shape} vs {b.data.shape}")
    if a.data.dtype != b.data.dtype:
        raise ContractError(f"{op}: dtype mismatch {a.data.dtype} vs {b.data.dtype}")


def make_result(data, inputs, backward_fn, op_name: str) -> Tensor:
    """Wrap an op output, recording it on the tape when grads are needed.

    ``backward_fn(gout)`` must return one grad array (or None) per input.
    """
    data = np.asarray(data)
    _finite_or_raise(data, op_name)
    needs = _STATE.recording and any(t.requires_grad for t in inputs)
    out = Tensor(data, requires_grad=needs)
    if needs:
        tape = _active_tape()
        tape.nodes.append((out, inputs, backward_fn))
        out._tape = tape
        out._node = len(tape.nodes) - 1
    return out


def backward(loss: Tensor) -> None:
    """Reverse-sweep the tape from a scalar loss.

    Every tensor reachable from ``loss`` that requires grad gets ``.grad``
    populated; grads accumulate additively across shared uses. The tape is
    consumed: a second backward on it raises ``TapeError``.
    """
    if not isinstance(loss, Tensor):
        raise ContractError("backward expects a Tensor")
    if loss.data.size != 1:
        raise ContractError(f"backward needs a scalar loss, got shape {loss.data.shape}")
    tape = loss._tape
    if tape is None:
        if not loss.requires_grad:
            raise TapeError("loss does not require grad / is not connected to a tape")
        raise TapeError("loss is not connected to a tape")
    if tape.consumed:
        raise TapeError("tape already consumed by a previous backward")
    tape.consumed = True

    loss.grad = np.ones_like(loss.data)
    for out, inputs, backward_fn in reversed(tape.nodes[: loss._node + 1]):
        if out.grad is None:
            continue
        grads = backward_fn(out.grad)
        for tensor, g in zip(inputs, grads):
            if g is not None and tensor.requires_grad:
                tensor._accumulate(np.asarray(g))
    tape.nodes.clear()


def zero_grads(params) -> None:
    """Clear .grad on an iterable (or dict) of tensors."""
    values = params.values() if isinstance(params, dict) else params
    for p in values:
        p.grad = None
