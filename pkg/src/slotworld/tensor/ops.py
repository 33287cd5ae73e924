"""Differentiable ops on top of the tape: affine maps, convolution, activations.

Shapes are strict: no broadcasting beyond the leading batch axes of ``linear``
and ``conv2d``. Anything else needs an explicit reshape.
"""

from __future__ import annotations

import numpy as np

from .tensor import (
    DegenerateInputError,
    DimensionError,
    Tensor,
    make_result,
)

LAYER_NORM_EPS = 1e-8


# -- affine -------------------------------------------------------------------


def linear(x: Tensor, weight: Tensor, bias: Tensor | None = None) -> Tensor:
    """Affine map on the trailing axis: (..., F_in) @ weight.T + bias.

    weight is (F_out, F_in); leading axes of x are treated as batch.
    """
    f_out, f_in = weight.data.shape
    if x.data.shape[-1] != f_in:
        raise DimensionError(
            f"linear: trailing extent {x.data.shape[-1]} != weight fan-in {f_in}"
        )
    x2d = x.data.reshape(-1, f_in)
    out = x2d @ weight.data.T
    if bias is not None:
        out = out + bias.data
    out = out.reshape(x.data.shape[:-1] + (f_out,))

    inputs = (x, weight) if bias is None else (x, weight, bias)

    def bw(g):
        g2d = g.reshape(-1, f_out)
        gx = (g2d @ weight.data).reshape(x.data.shape)
        gw = g2d.T @ x2d
        if bias is None:
            return gx, gw
        return gx, gw, g2d.sum(axis=0)

    return make_result(out, inputs, bw, "linear")


# -- convolution --------------------------------------------------------------


def _pad_hw(x: np.ndarray, padding: int) -> np.ndarray:
    if padding == 0:
        return x
    return np.pad(x, ((0, 0), (0, 0), (padding, padding), (padding, padding)))


def _conv_fwd(xp: np.ndarray, w: np.ndarray, stride: int) -> np.ndarray:
    """Cross-correlate padded input (B,Ci,Hp,Wp) with w (Co,Ci,kH,kW)."""
    b, _, hp, wp = xp.shape
    co, _, kh, kw = w.shape
    ho = (hp - kh) // stride + 1
    wo = (wp - kw) // stride + 1
    out = np.zeros((b, ho, wo, co), dtype=xp.dtype)
    for u in range(kh):
        for v in range(kw):
            xs = xp[:, :, u : u + stride * ho : stride, v : v + stride * wo : stride]
            out += np.tensordot(xs, w[:, :, u, v], axes=([1], [1]))
    return np.ascontiguousarray(out.transpose(0, 3, 1, 2))


def _conv_grad_input(g: np.ndarray, w: np.ndarray, stride: int, padded_shape) -> np.ndarray:
    """Scatter output grads (B,Co,Ho,Wo) back onto the padded input."""
    _, _, ho, wo = g.shape
    _, _, kh, kw = w.shape
    gx = np.zeros(padded_shape, dtype=g.dtype)
    for u in range(kh):
        for v in range(kw):
            contrib = np.tensordot(g, w[:, :, u, v], axes=([1], [0]))  # (B,Ho,Wo,Ci)
            gx[:, :, u : u + stride * ho : stride, v : v + stride * wo : stride] += (
                contrib.transpose(0, 3, 1, 2)
            )
    return gx


def _conv_grad_kernel(xp: np.ndarray, g: np.ndarray, stride: int, kshape) -> np.ndarray:
    _, _, ho, wo = g.shape
    _, _, kh, kw = kshape
    gw = np.zeros(kshape, dtype=g.dtype)
    for u in range(kh):
        for v in range(kw):
            xs = xp[:, :, u : u + stride * ho : stride, v : v + stride * wo : stride]
            gw[:, :, u, v] = np.tensordot(g, xs, axes=([0, 2, 3], [0, 2, 3]))
    return gw


def conv2d(
    x: Tensor,
    kernel: Tensor,
    bias: Tensor | None = None,
    stride: int = 1,
    padding: int = 0,
) -> Tensor:
    """2-D cross-correlation over the trailing two axes.

    x is (C_in,H,W) or (B,C_in,H,W); kernel is (C_out,C_in,kH,kW); output
    spatial extent is floor((H + 2*padding - kH)/stride) + 1.
    """
    squeeze = x.data.ndim == 3
    xd = x.data[None] if squeeze else x.data
    if xd.ndim != 4:
        raise DimensionError(f"conv2d: expected 3- or 4-d input, got {x.data.ndim}-d")
    co, ci, kh, kw = kernel.data.shape
    b, ci_in, h, w = xd.shape
    if ci_in != ci:
        raise DimensionError(f"conv2d: input has {ci_in} channels, kernel expects {ci}")
    if h + 2 * padding < kh or w + 2 * padding < kw:
        raise DimensionError("conv2d: kernel larger than padded input")
    if bias is not None and bias.data.shape != (co,):
        raise DimensionError(f"conv2d: bias shape {bias.data.shape} != ({co},)")

    xp = _pad_hw(xd, padding)
    out = _conv_fwd(xp, kernel.data, stride)
    if bias is not None:
        out = out + bias.data[None, :, None, None]
    if squeeze:
        out = out[0]

    inputs = (x, kernel) if bias is None else (x, kernel, bias)

    def bw(g):
        gd = g[None] if squeeze else g
        gxp = _conv_grad_input(gd, kernel.data, stride, xp.shape)
        gx = gxp[:, :, padding : padding + h, padding : padding + w]
        if squeeze:
            gx = gx[0]
        gw = _conv_grad_kernel(xp, gd, stride, kernel.data.shape)
        if bias is None:
            return gx, gw
        return gx, gw, gd.sum(axis=(0, 2, 3))

    return make_result(out, inputs, bw, "conv2d")


def conv_transpose2d(
    x: Tensor,
    kernel: Tensor,
    bias: Tensor | None = None,
    stride: int = 1,
    padding: int = 0,
) -> Tensor:
    """Adjoint of conv2d (fractionally-strided convolution).

    x is (C_in,h,w) or (B,C_in,h,w); kernel is (C_in,C_out,kH,kW); output
    spatial extent is (h-1)*stride + kH - 2*padding.
    """
    squeeze = x.data.ndim == 3
    xd = x.data[None] if squeeze else x.data
    ci, co, kh, kw = kernel.data.shape
    b, ci_in, h, w = xd.shape
    if ci_in != ci:
        raise DimensionError(
            f"conv_transpose2d: input has {ci_in} channels, kernel expects {ci}"
        )
    hout = (h - 1) * stride + kh - 2 * padding
    wout = (w - 1) * stride + kw - 2 * padding
    if hout <= 0 or wout <= 0:
        raise DimensionError("conv_transpose2d: non-positive output extent")

    full = _conv_grad_input(
        xd, kernel.data, stride, (b, co, hout + 2 * padding, wout + 2 * padding)
    )
    out = full[:, :, padding : padding + hout, padding : padding + wout]
    if bias is not None:
        out = out + bias.data[None, :, None, None]
    if squeeze:
        out = out[0]

    inputs = (x, kernel) if bias is None else (x, kernel, bias)

    def bw(g):
        gd = g[None] if squeeze else g
        gp = _pad_hw(gd, padding)
        gx = _conv_fwd(gp, kernel.data, stride)  # kernel maps g-channels Co -> Ci
        if squeeze:
            gx = gx[0]
        gw = _conv_grad_kernel(gp, xd, stride, (ci, co, kh, kw))
        if bias is None:
            return gx, gw
        return gx, gw, gd.sum(axis=(0, 2, 3))

    return make_result(out, inputs, bw, "conv_transpose2d")


# -- activations / normalization ------------------------------------------------


def relu(x: Tensor) -> Tensor:
    mask = x.data > 0
    return make_result(
        np.where(mask, x.data, 0), (x,), lambda g: (np.where(mask, g, 0),), "relu"
    )


def leaky_relu(x: Tensor, slope: float = 0.1) -> Tensor:
    mask = x.data > 0
    out = np.where(mask, x.data, slope * x.data)
    return make_result(
        out, (x,), lambda g: (np.where(mask, g, slope * g),), "leaky_relu"
    )


def sigmoid(x: Tensor) -> Tensor:
    e = np.exp(-np.abs(x.data))
    out = np.where(x.data >= 0, 1.0 / (1.0 + e), e / (1.0 + e))

    def bw(g):
        return (g * out * (1.0 - out),)

    return make_result(out, (x,), bw, "sigmoid")


def layer_norm(x: Tensor, gain: Tensor, offset: Tensor) -> Tensor:
    """Normalize the trailing axis to zero mean / unit variance, then affine."""
    n = x.data.shape[-1]
    if n < 2:
        raise DegenerateInputError("layer_norm needs a trailing axis of length >= 2")
    if gain.data.shape != (n,) or offset.data.shape != (n,):
        raise DimensionError("layer_norm: gain/offset must match the trailing axis")
    mu = x.data.mean(axis=-1, keepdims=True)
    xc = x.data - mu
    var = np.mean(xc * xc, axis=-1, keepdims=True)
    inv = 1.0 / np.sqrt(var + LAYER_NORM_EPS)
    xhat = xc * inv
    out = xhat * gain.data + offset.data

    def bw(g):
        lead = tuple(range(g.ndim - 1))
        ggain = (g * xhat).sum(axis=lead)
        goffset = g.sum(axis=lead)
        gh = g * gain.data
        gx = inv * (
            gh
            - gh.mean(axis=-1, keepdims=True)
            - xhat * (gh * xhat).mean(axis=-1, keepdims=True)
        )
        return gx, ggain, goffset

    return make_result(out, (x, gain, offset), bw, "layer_norm")


# -- structural ----------------------------------------------------------------


def concat(tensors, axis: int = -1) -> Tensor:
    tensors = list(tensors)
    if not tensors:
        raise DimensionError("concat of zero tensors")
    ax = axis % tensors[0].data.ndim
    out = np.concatenate([t.data for t in tensors], axis=ax)
    sizes = [t.data.shape[ax] for t in tensors]
    splits = np.cumsum(sizes)[:-1]

    def bw(g):
        return tuple(np.split(g, splits, axis=ax))

    return make_result(out, tuple(tensors), bw, "concat")


def take_slots(x: Tensor, index) -> Tensor:
    """Gather slots along axis 1 of a (B,K,D) tensor: out[:, p] = x[:, index[p]].

    The backward scatter-add runs as a dense matmul against a one-hot
    selection matrix, which keeps it BLAS-shaped.
    """
    if x.data.ndim != 3:
        raise DimensionError(f"take_slots expects a 3-d tensor, got {x.data.ndim}-d")
    idx = np.asarray(index, dtype=np.intp)
    k = x.data.shape[1]
    if idx.ndim != 1 or (idx.size and (idx.min() < 0 or idx.max() >= k)):
        raise DimensionError("take_slots: index out of range")
    out = x.data[:, idx, :]
    onehot = np.zeros((idx.size, k), dtype=x.data.dtype)
    onehot[np.arange(idx.size), idx] = 1.0

    def bw(g):
        gx = np.tensordot(g, onehot, axes=([1], [0]))  # (B,D,K)
        return (np.ascontiguousarray(gx.transpose(0, 2, 1)),)

    return make_result(out, (x,), bw, "take_slots")


def permute_batch(x: Tensor, perm) -> Tensor:
    """Reorder the leading axis by a permutation (used for in-batch negatives)."""
    p = np.asarray(perm, dtype=np.intp)
    if p.ndim != 1 or p.shape[0] != x.data.shape[0] or np.sort(p).tolist() != list(
        range(x.data.shape[0])
    ):
        raise DimensionError("permute_batch: not a permutation of the leading axis")
    out = x.data[p]

    def bw(g):
        gx = np.empty_like(g)
        gx[p] = g
        return (gx,)

    return make_result(out, (x,), bw, "permute_batch")
