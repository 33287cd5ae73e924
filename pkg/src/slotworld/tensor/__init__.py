"""Minimal dense-tensor library with a reverse-mode tape and Adam."""

from .checkpoint import CheckpointError, load_arrays, save_arrays
from .gradcheck import FD_STEP, GradCheckReport, grad_check
from .ops import (
    LAYER_NORM_EPS,
    concat,
    conv2d,
    conv_transpose2d,
    layer_norm,
    leaky_relu,
    linear,
    permute_batch,
    relu,
    sigmoid,
    take_slots,
)
from .optim import Adam
from .tensor import (
    ContractError,
    DegenerateInputError,
    DimensionError,
    NonFiniteError,
    Tape,
    TapeError,
    Tensor,
    TensorError,
    backward,
    default_dtype,
    no_grad,
    precision,
    set_default_dtype,
    zero_grads,
)

__all__ = [
    "Adam",
    "CheckpointError",
    "ContractError",
    "DegenerateInputError",
    "DimensionError",
    "FD_STEP",
    "GradCheckReport",
    "LAYER_NORM_EPS",
    "NonFiniteError",
    "Tape",
    "TapeError",
    "Tensor",
    "TensorError",
    "backward",
    "concat",
    "conv2d",
    "conv_transpose2d",
    "default_dtype",
    "grad_check",
    "layer_norm",
    "leaky_relu",
    "linear",
    "load_arrays",
    "no_grad",
    "permute_batch",
    "precision",
    "relu",
    "save_arrays",
    "set_default_dtype",
    "sigmoid",
    "take_slots",
    "zero_grads",
]
