"""Sentence label induction from phrasal probability distributions.

Given the per-pair (E, C, N) distributions of a sample with K aligned
pairs among K' total, the fuzzy rules produce unnormalized scores

    s_E = geometric mean of P(E) over all K' pairs
    s_C = max of P(C) over the K aligned pairs (0 when K = 0)
    s_N = max of P(N) over all K' pairs, times (1 - s_C)

which are normalized by their sum.  The conjunction uses a geometric mean
rather than a plain product so the Entailment score stays on the same
magnitude as the two existential scores regardless of K'.  One-sided
pairs are excluded from s_C: a phrase with no counterpart signals missing
information, never a contradiction.

Everything is almost everywhere differentiable; each max routes its
gradient to the (lowest-index) argmax, and probabilities clamped to the
floor epsilon receive zero gradient.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .corpus import SentenceInduction, ValidationError


class InductionMode(str, Enum):
    FUZZY = "fuzzy"
    MEAN = "mean"


@dataclass(frozen=True)
class InductionConfig:
    mode: InductionMode = InductionMode.FUZZY
    epsilon: float = 1e-12

    def __post_init__(self):
        if not 0.0 < self.epsilon <= 1e-6:
            raise ValidationError(f"epsilon must lie in (0, 1e-6], got {self.epsilon}")


@dataclass
class InductionCache:
    """Intermediates of one induce() call, needed for the backward pass."""

    mode: InductionMode
    clamped: np.ndarray      # (k, 3) probabilities after the epsilon clamp
    clamp_mask: np.ndarray   # (k, 3) True where the clamp was active
    aligned: np.ndarray      # (k,) bool
    argmax_c: int | None     # row index of the contradiction max (fuzzy mode)
    argmax_n: int | None     # row index of the neutral max (fuzzy mode)
    scores: np.ndarray       # (3,) s_e, s_c, s_n
    z: float


def _validate_rows(probs: np.ndarray) -> None:
    if probs.ndim != 2 or probs.shape[1] != 3:
        raise ValidationError(f"pair probabilities must have shape (k, 3), got {probs.shape}")
    if probs.shape[0] == 0:
        raise ValidationError("induction requires at least one phrase pair")
    if not np.isfinite(probs).all():
        raise ValidationError("pair probabilities must be finite")
    if (probs < 0.0).any() or (probs > 1.0).any():
        raise ValidationError("pair probabilities must lie in [0, 1]")
    sums = probs.sum(axis=1)
    if np.abs(sums - 1.0).max() > 1e-9:
        raise ValidationError("each pair distribution must sum to 1 within 1e-9")


def _geometric_mean_log(column: np.ndarray) -> float:
    # log-space mean avoids underflow for long pair lists
    return float(np.exp(np.mean(np.log(column))))


def induce_arrays(probs: np.ndarray, aligned: np.ndarray,
                  cfg: InductionConfig = InductionConfig()) -> tuple[SentenceInduction, InductionCache]:
    """Core induction over a (k, 3) matrix of pair distributions."""
    probs = np.asarray(probs, dtype=np.float64)
    aligned = np.asarray(aligned, dtype=bool)
    _validate_rows(probs)
    if aligned.shape != (probs.shape[0],):
        raise ValidationError("aligned flags must match the number of pairs")

    clamped = np.clip(probs, cfg.epsilon, 1.0)
    clamp_mask = (probs < cfg.epsilon) | (probs > 1.0)

    argmax_c: int | None = None
    argmax_n: int | None = None
    if cfg.mode == InductionMode.FUZZY:
        s_e = _geometric_mean_log(clamped[:, 0])
        if aligned.any():
            aligned_rows = np.flatnonzero(aligned)
            argmax_c = int(aligned_rows[np.argmax(clamped[aligned_rows, 1])])
            s_c = float(clamped[argmax_c, 1])
        else:
            s_c = 0.0
        argmax_n = int(np.argmax(clamped[:, 2]))
        s_n = float(clamped[argmax_n, 2]) * (1.0 - s_c)
    else:
        s_e = _geometric_mean_log(clamped[:, 0])
        s_c = _geometric_mean_log(clamped[:, 1])
        s_n = _geometric_mean_log(clamped[:, 2])

    scores = np.array([s_e, s_c, s_n], dtype=np.float64)
    z = float(scores.sum())
    if z < 1e-300:
        raise FloatingPointError("degenerate induction: all scores vanished")
    norm = scores / z
    induction = SentenceInduction(
        s_e=float(scores[0]), s_c=float(scores[1]), s_n=float(scores[2]),
        z=z, probs=(float(norm[0]), float(norm[1]), float(norm[2])),
    )
    cache = InductionCache(mode=cfg.mode, clamped=clamped, clamp_mask=clamp_mask,
                           aligned=aligned, argmax_c=argmax_c, argmax_n=argmax_n,
                           scores=scores, z=z)
    return induction, cache


def induce(pair_probs, cfg: InductionConfig = InductionConfig()) -> SentenceInduction:
    """Induce sentence scores from [(distribution, aligned), ...] pairs."""
    rows = []
    flags = []
    for dist, aligned in pair_probs:
        rows.append(getattr(dist, "probs", dist))
        flags.append(bool(aligned))
    induction, _ = induce_arrays(np.asarray(rows, dtype=np.float64), np.asarray(flags), cfg)
    return induction


def induce_backward(cache: InductionCache, d_sentence_probs: np.ndarray) -> np.ndarray:
    """Gradients on every pair probability given gradients on the normalized output.

    Shapes: upstream (3,) -> returned (k, 3).  The normalization uses the
    quotient rule, the geometric mean spreads across all pairs, and each
    max sends everything to its recorded argmax row.
    """
    g = np.asarray(d_sentence_probs, dtype=np.float64)
    if g.shape != (3,):
        raise ValidationError(f"upstream gradient must have shape (3,), got {g.shape}")
    scores, z = cache.scores, cache.z
    k = cache.clamped.shape[0]

    # d probs_i / d s_j = (delta_ij * z - s_i) / z^2
    d_scores = g / z - np.dot(g, scores) / (z * z)

    d_pairs = np.zeros((k, 3), dtype=np.float64)
    if cache.mode == InductionMode.FUZZY:
        d_pairs[:, 0] = d_scores[0] * scores[0] / (k * cache.clamped[:, 0])
        d_s_c = d_scores[1]
        if cache.argmax_n is not None:
            max_n = cache.clamped[cache.argmax_n, 2]
            d_pairs[cache.argmax_n, 2] += d_scores[2] * (1.0 - (scores[1]))
            d_s_c += d_scores[2] * (-max_n)
        if cache.argmax_c is not None:
            d_pairs[cache.argmax_c, 1] += d_s_c
    else:
        for col in range(3):
            d_pairs[:, col] = d_scores[col] * scores[col] / (k * cache.clamped[:, col])

    d_pairs[cache.clamp_mask] = 0.0
    return d_pairs
