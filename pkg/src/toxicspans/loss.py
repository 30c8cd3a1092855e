"""Label-smoothed cross-entropy over token logits."""

from __future__ import annotations

import numpy as np

__all__ = ["log_softmax", "smoothed_ce_loss", "smoothed_ce_with_grad", "smoothed_targets"]


def smoothed_targets(label: int, num_classes: int, epsilon: float) -> np.ndarray:
    """``1 - epsilon`` on ``label``, the rest split evenly over other classes."""
    if not 0 <= label < num_classes:
        raise ValueError(f"label {label} outside 0..{num_classes - 1}")
    if not 0.0 <= epsilon < 1.0:
        raise ValueError(f"epsilon must lie in [0, 1), got {epsilon}")
    if num_classes == 1:
        return np.ones(1)
    target = np.full(num_classes, epsilon / (num_classes - 1))
    target[label] = 1.0 - epsilon
    return target


def _target_matrix(labels: np.ndarray, num_classes: int, epsilon: float, dtype) -> np.ndarray:
    labels = np.clip(labels, 0, num_classes - 1)
    off = epsilon / (num_classes - 1) if num_classes > 1 else 0.0
    target = np.full(labels.shape + (num_classes,), off, dtype=dtype)
    np.put_along_axis(target, labels[..., None], 1.0 - epsilon, axis=-1)
    return target


def log_softmax(logits: np.ndarray) -> np.ndarray:
    shifted = logits - logits.max(axis=-1, keepdims=True)
    return shifted - np.log(np.exp(shifted).sum(axis=-1, keepdims=True))


def smoothed_ce_with_grad(
    logits: np.ndarray, labels: np.ndarray, mask: np.ndarray, epsilon: float
) -> tuple[float, np.ndarray]:
    """Mean smoothed CE over unmasked positions, and its gradient w.r.t. ``logits``.

    ``logits`` is ``(..., C)``; ``labels`` and ``mask`` match its leading shape.
    Masked positions contribute nothing; a fully masked input has loss 0.
    """
    if not 0.0 <= epsilon < 1.0:
        raise ValueError(f"epsilon must lie in [0, 1), got {epsilon}")
    mask = np.asarray(mask, dtype=bool)
    count = int(mask.sum())
    grad = np.zeros_like(logits)
    if count == 0:
        return 0.0, grad
    target = _target_matrix(np.asarray(labels), logits.shape[-1], epsilon, logits.dtype)
    logp = log_softmax(logits)
    per_token = -(target * logp).sum(axis=-1)
    loss = float(per_token[mask].sum() / count)
    grad[mask] = (np.exp(logp[mask]) - target[mask]) / count
    return loss, grad


def smoothed_ce_loss(
    logits: np.ndarray, labels: np.ndarray, mask: np.ndarray | None = None, epsilon: float = 0.0
) -> float:
    if mask is None:
        mask = np.ones(np.shape(labels), dtype=bool)
    return smoothed_ce_with_grad(np.asarray(logits), labels, mask, epsilon)[0]
