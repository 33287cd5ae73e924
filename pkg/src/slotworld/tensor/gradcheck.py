"""Finite-difference verification of tape gradients.

Central differences with a fixed step; runs in float64 so the truncation
error of the difference quotient stays far below the tolerances used by
the test-suite (1e-5 elementwise / 1e-4 composite).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .tensor import ContractError, Tensor, backward, no_grad

FD_STEP = 1e-5


@dataclass
class GradCheckReport:
    max_rel_err: float
    tolerance: float
    per_input: list = field(default_factory=list)  # (name, max rel err)

    @property
    def passed(self) -> bool:
        return self.max_rel_err < self.tolerance


def _rel_err(analytic: np.ndarray, numeric: np.ndarray) -> np.ndarray:
    scale = np.maximum(np.abs(analytic), np.abs(numeric))
    diff = np.abs(analytic - numeric)
    # Below this scale the difference itself is already the honest error.
    small = scale < 1e-6
    return np.where(small, diff, diff / np.where(small, 1.0, scale))


def grad_check(fn, inputs, tolerance: float = 1e-5, h: float = FD_STEP) -> GradCheckReport:
    """Compare tape gradients of ``fn(*inputs)`` against central differences.

    ``fn`` must return a scalar Tensor and be deterministic; every input must
    be a float64 Tensor with requires_grad set.
    """
    for i, t in enumerate(inputs):
        if t.data.dtype != np.float64:
            raise ContractError(f"grad_check input {i} must be float64")
        if not t.requires_grad:
            raise ContractError(f"grad_check input {i} must require grad")
        t.grad = None

    out = fn(*inputs)
    if out.data.size != 1:
        raise ContractError("grad_check target must be scalar-valued")
    backward(out)

    report = GradCheckReport(max_rel_err=0.0, tolerance=tolerance)
    for i, t in enumerate(inputs):
        analytic = np.zeros_like(t.data) if t.grad is None else t.grad
        numeric = np.zeros_like(t.data)
        flat = t.data.reshape(-1)
        nflat = numeric.reshape(-1)
        with no_grad():
            for j in range(flat.size):
                orig = flat[j]
                flat[j] = orig + h
                f_plus = fn(*inputs).item()
                flat[j] = orig - h
                f_minus = fn(*inputs).item()
                flat[j] = orig
                nflat[j] = (f_plus - f_minus) / (2.0 * h)
        err = float(_rel_err(analytic, numeric).max()) if flat.size else 0.0
        report.per_input.append((f"input{i}", err))
        report.max_rel_err = max(report.max_rel_err, err)
        t.grad = None
    return report
