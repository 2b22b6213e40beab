"""Training and generation orchestration.

Training is full batch with teacher forcing: every epoch forwards each
sequence on ground-truth inputs, sums the per-sequence gradients in
corpus order, and applies exactly one optimizer step. Generation feeds
thresholded predictions back as the next input.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from .bptt import add_into, backward
from .errors import EmptyCorpus, NonFiniteLoss
from .metrics import frame_accuracy
from .network import (NetworkParams, StepState, forward_sequence, forward_step)
from .optim import (GDConfig, RPropConfig, RPropState, gd_step, rprop_init,
                    rprop_step)
from .pianoroll import PianoRoll, to_supervised


@dataclass(frozen=True)
class TrainConfig:
    max_epochs: int = 500
    target_mse: float = 0.01
    optimizer: str = "rprop"  # or "gd"
    truncation_window: int | None = None
    log_every: int = 25

    def __post_init__(self):
        if self.max_epochs < 1:
            raise ValueError("max_epochs must be >= 1")
        if not 0 < self.target_mse < 1:
            raise ValueError("target_mse must be in (0, 1)")
        if self.optimizer not in ("rprop", "gd"):
            raise ValueError(f"unknown optimizer {self.optimizer!r}")


@dataclass
class TrainHistory:
    mse: list[float] = field(default_factory=list)
    epochs_run: int = 0
    converged: bool = False
    epoch_seconds: list[float] = field(default_factory=list)


@dataclass(frozen=True)
class GenerationConfig:
    threshold: float = 0.9
    num_steps: int = 1
    seed_frames: int = 1
    feedback: str = "binary"  # or "raw"
    fallback: str = "silence"  # or "top_k"
    top_k: int = 4

    def __post_init__(self):
        if not 0 < self.threshold < 1:
            raise ValueError("threshold must be in (0, 1)")
        if self.feedback not in ("binary", "raw"):
            raise ValueError(f"unknown feedback mode {self.feedback!r}")
        if self.fallback not in ("silence", "top_k"):
            raise ValueError(f"unknown fallback {self.fallback!r}")


def _sequence_grad(params, inputs, targets, window, loss_scale):
    """Forward + backward, optionally as truncated-BPTT chunks with state
    carried across chunk boundaries but gradients confined to each chunk.
    Returns (grads, sum of squared errors)."""
    if window is None or window >= len(inputs):
        trace = forward_sequence(params, inputs)
        grads = backward(params, trace, targets, loss_scale)
        sq = float(np.sum((trace.y - targets) ** 2))
        return grads, sq
    grads = params.zeros_like()
    sq = 0.0
    state = StepState.zeros(params.num_blocks)
    total = targets.size
    for start in range(0, len(inputs), window):
        chunk_in = inputs[start : start + window]
        chunk_tg = targets[start : start + window]
        trace = forward_sequence(params, chunk_in, init_state=state)
        state = StepState(trace.cell_states[-1].copy(), trace.block_outputs[-1].copy())
        # Rescale so chunk gradients sum to the whole-sequence MSE gradient.
        scale = loss_scale * chunk_tg.size / total
        add_into(grads, backward(params, trace, chunk_tg, scale))
        sq += float(np.sum((trace.y - chunk_tg) ** 2))
    return grads, sq


def train(rolls: list[PianoRoll], params: NetworkParams,
          optimizer_config: RPropConfig | GDConfig, config: TrainConfig,
          loss_scale: float = 1.0,
          log=None) -> tuple[NetworkParams, TrainHistory]:
    """Batch-train until total MSE <= target_mse or max_epochs.

    Total MSE is the mean over all sequences' timestep x unit entries.
    The epoch at which the target is met performs no further update.
    """
    if not rolls:
        raise EmptyCorpus("no training sequences")
    sequences = [to_supervised(r) for r in rolls]
    total_entries = sum(s.targets.size for s in sequences)

    rprop_state: RPropState | None = None
    if config.optimizer == "rprop":
        assert isinstance(optimizer_config, RPropConfig)
        rprop_state = rprop_init(params, optimizer_config)

    history = TrainHistory()
    for epoch in range(config.max_epochs):
        start = time.perf_counter()
        grads = params.zeros_like()
        sq_sum = 0.0
        for seq in sequences:
            g, sq = _sequence_grad(params, seq.inputs, seq.targets,
                                   config.truncation_window, loss_scale)
            add_into(grads, g)
            sq_sum += sq
        mse = sq_sum / total_entries
        if not np.isfinite(mse):
            raise NonFiniteLoss(epoch)
        history.mse.append(mse)
        history.epochs_run = epoch + 1
        history.epoch_seconds.append(time.perf_counter() - start)
        if log and (epoch % config.log_every == 0 or mse <= config.target_mse):
            log(f"epoch {epoch:4d}  mse {mse:.6f}")
        if mse <= config.target_mse:
            history.converged = True
            break
        if config.optimizer == "rprop":
            params, rprop_state = rprop_step(params, grads, rprop_state, optimizer_config)
        else:
            params = gd_step(params, grads, optimizer_config)
    return params, history


def format_history(history: TrainHistory) -> str:
    """Two-column table (epoch, mse) for external plotting."""
    lines = ["epoch\tmse"]
    for epoch, mse in enumerate(history.mse):
        lines.append(f"{epoch}\t{mse:.10g}")
    return "\n".join(lines) + "\n"


def predict_next(params: NetworkParams, history_frames: np.ndarray) -> np.ndarray:
    """Probability vector for the frame following the given history."""
    trace = forward_sequence(params, history_frames)
    return trace.y[-1]


def _threshold_frame(y: np.ndarray, config: GenerationConfig) -> np.ndarray:
    frame = (y > config.threshold).astype(np.float64)
    if frame.sum() == 0 and config.fallback == "top_k":
        top = np.argsort(y)[-config.top_k:]
        frame[top] = 1.0
    return frame


def generate(params: NetworkParams, seed_frames: np.ndarray,
             config: GenerationConfig, num_steps: int | None = None) -> PianoRoll:
    """Feed the seed, then free-run: threshold each prediction into a
    binary frame, append it, and feed it (or the raw probabilities) back."""
    seed_frames = np.asarray(seed_frames, dtype=np.float64)
    if seed_frames.ndim != 2 or seed_frames.shape[0] < 1:
        raise ValueError("seed must be a non-empty (S, 88) array")
    steps = config.num_steps if num_steps is None else num_steps
    state = StepState.zeros(params.num_blocks)
    y = None
    for row in seed_frames:
        y, state, _ = forward_step(params, row, state)
    rows = list(seed_frames)
    for _ in range(steps):
        frame = _threshold_frame(y, config)
        rows.append(frame)
        feed = frame if config.feedback == "binary" else y
        y, state, _ = forward_step(params, feed, state)
    return PianoRoll(np.array(rows), source_id="generated")


def reconstruct(params: NetworkParams, original: PianoRoll,
                config: GenerationConfig) -> tuple[PianoRoll, float]:
    """Seed with the opening frames, free-run to the original's length,
    and score the result with frame-level accuracy."""
    if len(original) < 2:
        raise ValueError("original must have >= 2 frames")
    seed = original.frames[: config.seed_frames]
    rendition = generate(params, seed, config, num_steps=len(original) - len(seed))
    accuracy = frame_accuracy([(rendition.frames, original.frames)])
    return rendition, accuracy
