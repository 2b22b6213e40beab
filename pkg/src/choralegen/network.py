"""LSTM network: gated memory blocks, recurrent hidden layer, sigmoid outputs.

Variant: forget-gate LSTM without peepholes, one cell per block, tanh
cell-input and cell-output squashing. Recurrence runs from block outputs
only; the output layer reads block outputs plus bias. All math is float64.
"""

from __future__ import annotations

from dataclasses import dataclass, fields

import numpy as np

from .errors import LengthMismatch, NonFiniteActivation, ShapeMismatch

# Serialization / flattening order: gates input, forget, output, then cell
# candidate; per gate inputs-then-recurrent-then-bias; output layer last.
PARAM_FIELDS = (
    "wx_i", "wh_i", "b_i",
    "wx_f", "wh_f", "b_f",
    "wx_o", "wh_o", "b_o",
    "wx_c", "wh_c", "b_c",
    "w_out", "b_out",
)


@dataclass(frozen=True)
class NetworkConfig:
    num_inputs: int = 88
    num_blocks: int = 64
    num_outputs: int = 88
    rng_seed: int = 0
    init_scale: float = 0.1

    def __post_init__(self):
        if min(self.num_inputs, self.num_blocks, self.num_outputs) < 1:
            raise ValueError("layer sizes must be >= 1")


def param_count(config: NetworkConfig) -> int:
    return (4 * config.num_blocks * (config.num_inputs + config.num_blocks + 1)
            + config.num_outputs * (config.num_blocks + 1))


@dataclass
class NetworkParams:
    """All weights and biases; also reused (zeroed) as a gradient container."""

    wx_i: np.ndarray
    wh_i: np.ndarray
    b_i: np.ndarray
    wx_f: np.ndarray
    wh_f: np.ndarray
    b_f: np.ndarray
    wx_o: np.ndarray
    wh_o: np.ndarray
    b_o: np.ndarray
    wx_c: np.ndarray
    wh_c: np.ndarray
    b_c: np.ndarray
    w_out: np.ndarray
    b_out: np.ndarray

    @property
    def num_inputs(self) -> int:
        return self.wx_i.shape[1]

    @property
    def num_blocks(self) -> int:
        return self.wx_i.shape[0]

    @property
    def num_outputs(self) -> int:
        return self.w_out.shape[0]

    def arrays(self):
        return [getattr(self, name) for name in PARAM_FIELDS]

    def size(self) -> int:
        return sum(a.size for a in self.arrays())

    def copy(self) -> "NetworkParams":
        return NetworkParams(*(a.copy() for a in self.arrays()))

    def zeros_like(self) -> "NetworkParams":
        return NetworkParams(*(np.zeros_like(a) for a in self.arrays()))

    def flatten(self) -> np.ndarray:
        return np.concatenate([a.ravel() for a in self.arrays()])

    def with_flat(self, flat: np.ndarray) -> "NetworkParams":
        out = []
        pos = 0
        for a in self.arrays():
            out.append(flat[pos : pos + a.size].reshape(a.shape))
            pos += a.size
        if pos != flat.size:
            raise ShapeMismatch("flat vector length does not match parameter count")
        return NetworkParams(*out)

    def check_congruent(self, other: "NetworkParams"):
        for mine, theirs in zip(self.arrays(), other.arrays()):
            if mine.shape != theirs.shape:
                raise ShapeMismatch(f"{mine.shape} vs {theirs.shape}")


def init_params(config: NetworkConfig) -> NetworkParams:
    """Draw weights uniformly from [-init_scale, +init_scale] with PCG64.

    Fields are filled in PARAM_FIELDS order from a single stream seeded
    by rng_seed, so identical configs give bit-identical parameters.
    Forget-gate biases start at +1.0 to keep early memory open; all
    other biases start at zero.
    """
    rng = np.random.Generator(np.random.PCG64(config.rng_seed))
    n_in, n_b, n_out = config.num_inputs, config.num_blocks, config.num_outputs
    shapes = {
        "wx": (n_b, n_in), "wh": (n_b, n_b), "b": (n_b,),
        "w_out": (n_out, n_b), "b_out": (n_out,),
    }
    values = {}
    for name in PARAM_FIELDS:
        kind = name.split("_")[0] if name not in ("w_out", "b_out") else name
        shape = shapes[kind]
        if kind.startswith("b"):
            values[name] = np.zeros(shape)
        else:
            values[name] = rng.uniform(-config.init_scale, config.init_scale, shape)
    values["b_f"] = np.ones(n_b)
    return NetworkParams(**{name: values[name] for name in PARAM_FIELDS})


def sigmoid(z: np.ndarray) -> np.ndarray:
    # Split form avoids overflow in exp for large |z|.
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


@dataclass
class StepState:
    cell_states: np.ndarray
    block_outputs: np.ndarray

    @classmethod
    def zeros(cls, num_blocks: int) -> "StepState":
        return cls(np.zeros(num_blocks), np.zeros(num_blocks))


@dataclass
class StepRecord:
    x: np.ndarray
    gate_in: np.ndarray
    gate_forget: np.ndarray
    gate_out: np.ndarray
    cell_input: np.ndarray  # tanh candidate
    cell_states: np.ndarray
    block_outputs: np.ndarray
    out_pre: np.ndarray
    y: np.ndarray


@dataclass
class ForwardTrace:
    """Stacked per-timestep activations, everything exact BPTT needs."""

    x: np.ndarray            # (T, num_inputs)
    gate_in: np.ndarray      # (T, num_blocks)
    gate_forget: np.ndarray
    gate_out: np.ndarray
    cell_input: np.ndarray
    cell_states: np.ndarray
    block_outputs: np.ndarray
    out_pre: np.ndarray      # (T, num_outputs)
    y: np.ndarray            # predictions in (0, 1)
    init_state: StepState

    def __len__(self) -> int:
        return self.x.shape[0]


def forward_step(params: NetworkParams, x: np.ndarray,
                 prev: StepState) -> tuple[np.ndarray, StepState, StepRecord]:
    x = np.asarray(x, dtype=np.float64)
    h_prev = prev.block_outputs
    gi = sigmoid(params.wx_i @ x + params.wh_i @ h_prev + params.b_i)
    gf = sigmoid(params.wx_f @ x + params.wh_f @ h_prev + params.b_f)
    go = sigmoid(params.wx_o @ x + params.wh_o @ h_prev + params.b_o)
    ci = np.tanh(params.wx_c @ x + params.wh_c @ h_prev + params.b_c)
    c = gf * prev.cell_states + gi * ci
    h = go * np.tanh(c)
    zy = params.w_out @ h + params.b_out
    y = sigmoid(zy)
    if not (np.isfinite(c).all() and np.isfinite(y).all()):
        raise NonFiniteActivation(0)
    record = StepRecord(x, gi, gf, go, ci, c, h, zy, y)
    return y, StepState(c, h), record


def forward_sequence(params: NetworkParams, inputs: np.ndarray,
                     init_state: StepState | None = None) -> ForwardTrace:
    """Run the whole sequence from a zero state (or a given one)."""
    inputs = np.asarray(inputs, dtype=np.float64)
    if inputs.ndim != 2 or inputs.shape[0] < 1:
        raise ValueError("inputs must be a non-empty (T, num_inputs) array")
    state = init_state if init_state is not None else StepState.zeros(params.num_blocks)
    init = StepState(state.cell_states.copy(), state.block_outputs.copy())
    records = []
    for t in range(inputs.shape[0]):
        try:
            _, state, rec = forward_step(params, inputs[t], state)
        except NonFiniteActivation:
            raise NonFiniteActivation(t) from None
        records.append(rec)
    stack = lambda name: np.stack([getattr(r, name) for r in records])
    return ForwardTrace(
        x=stack("x"), gate_in=stack("gate_in"), gate_forget=stack("gate_forget"),
        gate_out=stack("gate_out"), cell_input=stack("cell_input"),
        cell_states=stack("cell_states"), block_outputs=stack("block_outputs"),
        out_pre=stack("out_pre"), y=stack("y"), init_state=init,
    )


def mse_loss(predictions: np.ndarray, targets: np.ndarray) -> float:
    """Mean squared error over all timestep x unit entries."""
    predictions = np.asarray(predictions, dtype=np.float64)
    targets = np.asarray(targets, dtype=np.float64)
    if predictions.shape != targets.shape:
        raise LengthMismatch(f"{predictions.shape} vs {targets.shape}")
    return float(np.mean((predictions - targets) ** 2))
