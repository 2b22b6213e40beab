"""Multi-label scoring: per-piece precision/recall/F1 and corpus
frame-level accuracy (sum TP / sum(TP + FP + FN))."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyCorpus, ShapeMismatch
from .network import NetworkParams, forward_sequence
from .pianoroll import PianoRoll, to_supervised


@dataclass
class FrameCounts:
    tp: int = 0
    fp: int = 0
    fn: int = 0

    def add(self, other: "FrameCounts"):
        self.tp += other.tp
        self.fp += other.fp
        self.fn += other.fn


@dataclass
class PieceScore:
    source_id: str
    precision: float
    recall: float
    f1: float
    counts: FrameCounts


@dataclass
class EvalReport:
    pieces: list[PieceScore] = field(default_factory=list)
    macro_f1: float = 0.0
    frame_accuracy: float = 0.0


def _count(predicted: np.ndarray, target: np.ndarray) -> FrameCounts:
    if predicted.shape != target.shape:
        raise ShapeMismatch(f"{predicted.shape} vs {target.shape}")
    pred_on = predicted > 0.5
    targ_on = target > 0.5
    return FrameCounts(
        tp=int(np.sum(pred_on & targ_on)),
        fp=int(np.sum(pred_on & ~targ_on)),
        fn=int(np.sum(~pred_on & targ_on)),
    )


def piece_prf(predicted: np.ndarray, target: np.ndarray) -> tuple[float, float, float]:
    """P = |T∩S|/|S|, R = |T∩S|/|T|, F1 = 2PR/(P+R) over (step, pitch) cells.

    Conventions: empty prediction set gives P = 0; empty target set gives
    R = 0; P + R = 0 gives F1 = 0.
    """
    c = _count(np.asarray(predicted), np.asarray(target))
    precision = c.tp / (c.tp + c.fp) if c.tp + c.fp else 0.0
    recall = c.tp / (c.tp + c.fn) if c.tp + c.fn else 0.0
    f1 = 2 * precision * recall / (precision + recall) if precision + recall else 0.0
    return precision, recall, f1


def frame_accuracy(pairs: list[tuple[np.ndarray, np.ndarray]]) -> float:
    """Acc over every frame of every piece; empty tallies count as perfect."""
    total = FrameCounts()
    for predicted, target in pairs:
        total.add(_count(np.asarray(predicted), np.asarray(target)))
    denom = total.tp + total.fp + total.fn
    return total.tp / denom if denom else 1.0


def evaluate(params: NetworkParams, test_rolls: list[PianoRoll],
             threshold: float = 0.9) -> EvalReport:
    """Teacher-forced one-step-ahead scoring: each input frame is ground
    truth, the thresholded prediction is scored against the next frame."""
    if not test_rolls:
        raise EmptyCorpus("empty test split")
    report = EvalReport()
    pairs = []
    for roll in test_rolls:
        sup = to_supervised(roll)
        trace = forward_sequence(params, sup.inputs)
        predicted = (trace.y > threshold).astype(np.float64)
        p, r, f1 = piece_prf(predicted, sup.targets)
        report.pieces.append(PieceScore(roll.source_id, p, r, f1,
                                        _count(predicted, sup.targets)))
        pairs.append((predicted, sup.targets))
    report.macro_f1 = float(np.mean([s.f1 for s in report.pieces]))
    report.frame_accuracy = frame_accuracy(pairs)
    return report


def format_report(report: EvalReport, method: str = "RProp") -> str:
    """Plain-text table: method, accuracy %, F1 %."""
    lines = [f"{'method':<10} {'Accuracy':>10} {'F1 score':>10}",
             f"{method:<10} {report.frame_accuracy * 100:>9.2f}% "
             f"{report.macro_f1 * 100:>9.2f}%",
             "",
             f"{'piece':<30} {'P':>7} {'R':>7} {'F1':>7}"]
    for s in report.pieces:
        lines.append(f"{s.source_id:<30} {s.precision:>7.4f} {s.recall:>7.4f} {s.f1:>7.4f}")
    return "\n".join(lines)
