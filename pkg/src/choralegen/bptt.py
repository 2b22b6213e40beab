"""Exact gradients of the MSE loss by full backpropagation through time,
plus a central finite-difference oracle for verification."""

from __future__ import annotations

import numpy as np

from .errors import LengthMismatch, NonFiniteGradient, ShapeMismatch
from .network import ForwardTrace, NetworkParams, forward_sequence, mse_loss

# A gradient set is shape-congruent with the params it was computed for.
GradientSet = NetworkParams


def backward(params: NetworkParams, trace: ForwardTrace, targets: np.ndarray,
             loss_scale: float = 1.0) -> GradientSet:
    """dE/dtheta for E = loss_scale * mse_loss(trace.y, targets).

    Error flows through both the cell-state recurrence and the
    block-output recurrence across every timestep (no truncation).
    """
    targets = np.asarray(targets, dtype=np.float64)
    if targets.shape != trace.y.shape:
        raise LengthMismatch(f"targets {targets.shape} vs trace {trace.y.shape}")
    grads = params.zeros_like()
    num_entries = trace.y.size
    d_y = loss_scale * 2.0 * (trace.y - targets) / num_entries

    dh_carry = np.zeros(params.num_blocks)
    dc_carry = np.zeros(params.num_blocks)
    for t in range(len(trace) - 1, -1, -1):
        y = trace.y[t]
        dz_y = d_y[t] * y * (1.0 - y)
        h = trace.block_outputs[t]
        grads.w_out += np.outer(dz_y, h)
        grads.b_out += dz_y

        dh = params.w_out.T @ dz_y + dh_carry
        gi, gf, go = trace.gate_in[t], trace.gate_forget[t], trace.gate_out[t]
        ci, c = trace.cell_input[t], trace.cell_states[t]
        tc = np.tanh(c)
        d_go = dh * tc
        dc = dh * go * (1.0 - tc * tc) + dc_carry

        c_prev = trace.cell_states[t - 1] if t > 0 else trace.init_state.cell_states
        h_prev = trace.block_outputs[t - 1] if t > 0 else trace.init_state.block_outputs

        dz_o = d_go * go * (1.0 - go)
        dz_i = dc * ci * gi * (1.0 - gi)
        dz_f = dc * c_prev * gf * (1.0 - gf)
        dz_c = dc * gi * (1.0 - ci * ci)

        x = trace.x[t]
        for dz, wx, wh, b in (
            (dz_i, "wx_i", "wh_i", "b_i"),
            (dz_f, "wx_f", "wh_f", "b_f"),
            (dz_o, "wx_o", "wh_o", "b_o"),
            (dz_c, "wx_c", "wh_c", "b_c"),
        ):
            getattr(grads, wx)[...] += np.outer(dz, x)
            getattr(grads, wh)[...] += np.outer(dz, h_prev)
            getattr(grads, b)[...] += dz

        dh_carry = (params.wh_i.T @ dz_i + params.wh_f.T @ dz_f
                    + params.wh_o.T @ dz_o + params.wh_c.T @ dz_c)
        dc_carry = dc * gf

    for a in grads.arrays():
        if not np.isfinite(a).all():
            raise NonFiniteGradient("NaN/inf in gradient")
    return grads


def add_into(total: GradientSet, extra: GradientSet) -> GradientSet:
    """In-place elementwise sum; returns total."""
    total.check_congruent(extra)
    for mine, theirs in zip(total.arrays(), extra.arrays()):
        mine += theirs
    return total


def accumulate(grads: list[GradientSet]) -> GradientSet:
    """Elementwise sum in the given (corpus) order for bit-reproducibility."""
    if not grads:
        raise ShapeMismatch("nothing to accumulate")
    total = grads[0].zeros_like()
    for g in grads:
        add_into(total, g)
    return total


def finite_diff_gradient(params: NetworkParams, inputs: np.ndarray,
                         targets: np.ndarray, h: float = 1e-5) -> GradientSet:
    """Central difference (E(w+h) - E(w-h)) / 2h per parameter.

    Quadratic cost in parameter count; meant for small test networks.
    """
    if h <= 0:
        raise ValueError("h must be > 0")

    def loss(flat):
        p = params.with_flat(flat)
        return mse_loss(forward_sequence(p, inputs).y, targets)

    base = params.flatten()
    grad = np.zeros_like(base)
    for k in range(base.size):
        bumped = base.copy()
        bumped[k] = base[k] + h
        up = loss(bumped)
        bumped[k] = base[k] - h
        down = loss(bumped)
        grad[k] = (up - down) / (2.0 * h)
    return params.zeros_like().with_flat(grad)


def max_relative_error(analytic: GradientSet, numeric: GradientSet) -> float:
    """Max-norm relative disagreement: ||a - n||_inf / max(||a||_inf, ||n||_inf)."""
    a = analytic.flatten()
    n = numeric.flatten()
    scale = max(float(np.max(np.abs(a))), float(np.max(np.abs(n))), 1e-12)
    return float(np.max(np.abs(a - n))) / scale
