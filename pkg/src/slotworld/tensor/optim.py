"""Adam optimizer with bias correction, keyed by parameter name."""

from __future__ import annotations

import numpy as np

from .tensor import ContractError, Tensor


class Adam:
    """Standard Adam. ``step`` applies one update and zeroes the grads.

    Moment arrays live per parameter name so they can round-trip through
    checkpoints together with the parameters.
    """

    def __init__(self, params: dict[str, Tensor], lr: float = 5e-4,
                 beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8):
        self.params = dict(params)
        self.lr = lr
        self.beta1 = beta1
        self.beta2 = beta2
        self.eps = eps
        self.step_count = 0
        self.m = {k: np.zeros_like(p.data) for k, p in self.params.items()}
        self.v = {k: np.zeros_like(p.data) for k, p in self.params.items()}

    def step(self) -> None:
        missing = [k for k, p in self.params.items() if p.grad is None]
        if missing:
            raise ContractError(f"adam step with missing grads: {missing[:3]}")
        self.step_count += 1
        t = self.step_count
        bc1 = 1.0 - self.beta1**t
        bc2 = 1.0 - self.beta2**t
        for k, p in self.params.items():
            g = p.grad
            m = self.m[k]
            v = self.v[k]
            m *= self.beta1
            m += (1.0 - self.beta1) * g
            v *= self.beta2
            v += (1.0 - self.beta2) * (g * g)
            update = (m / bc1) / (np.sqrt(v / bc2) + self.eps)
            p.data = p.data - (self.lr * update).astype(p.data.dtype, copy=False)
            p.grad = None

    def zero_grad(self) -> None:
        for p in self.params.values():
            p.grad = None

    def state_arrays(self) -> dict[str, np.ndarray]:
        """Moment arrays under stable names, for checkpointing."""
        out = {}
        for k in self.params:
            out[f"opt/m/{k}"] = self.m[k]
            out[f"opt/v/{k}"] = self.v[k]
        return out

    def load_state_arrays(self, arrays: dict[str, np.ndarray], step_count: int) -> None:
        for k in self.params:
            self.m[k] = arrays[f"opt/m/{k}"].copy()
            self.v[k] = arrays[f"opt/v/{k}"].copy()
        self.step_count = int(step_count)
