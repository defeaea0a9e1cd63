"""Phrasal label prediction: heuristic matching features + a small MLP.

For a pair of phrase representations ``p`` and ``h`` (each of dimension r)
the feature vector is ``[p; h; |p - h|; p * h]``; one rectified hidden
layer of width r and a three-way softmax produce the (E, C, N)
distribution.  A phrase without a partner is represented by a learnable
EMPTY vector for its missing side.

The forward pass records every intermediate so the exact reverse-mode
gradients can be replayed without a framework; all math is float64.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, fields
from enum import Enum

import numpy as np

from .corpus import (
    Label,
    PhrasalPrediction,
    PhrasePair,
    Side,
    ValidationError,
    atomic_write_text,
)
from .embeddings import PhraseEmbedding

CHECKPOINT_VERSION = 1


class FeatureVariant(str, Enum):
    LOCAL = "local"
    GLOBAL = "global"
    CONCAT = "concat"


@dataclass(frozen=True)
class FeatureConfig:
    variant: FeatureVariant = FeatureVariant.CONCAT

    def rep_dim(self, embedding_dim: int) -> int:
        """Phrase representation width: d, or 2d for the concatenation."""
        if self.variant == FeatureVariant.CONCAT:
            return 2 * embedding_dim
        return embedding_dim


@dataclass
class ModelParams:
    hidden_weight: np.ndarray   # (4r, r)
    hidden_bias: np.ndarray     # (r,)
    output_weight: np.ndarray   # (r, 3)
    output_bias: np.ndarray     # (3,)
    empty_premise: np.ndarray   # (r,)
    empty_hypothesis: np.ndarray  # (r,)

    def __post_init__(self):
        for f in fields(self):
            setattr(self, f.name, np.asarray(getattr(self, f.name), dtype=np.float64))
        r = self.hidden_bias.shape[0]
        expected = {
            "hidden_weight": (4 * r, r),
            "hidden_bias": (r,),
            "output_weight": (r, 3),
            "output_bias": (3,),
            "empty_premise": (r,),
            "empty_hypothesis": (r,),
        }
        for name, shape in expected.items():
            arr = getattr(self, name)
            if arr.shape != shape:
                raise ValidationError(f"{name} must have shape {shape}, got {arr.shape}")
            if not np.isfinite(arr).all():
                raise ValidationError(f"{name} contains non-finite values")

    @property
    def rep_dim(self) -> int:
        return self.hidden_bias.shape[0]

    @classmethod
    def zeros(cls, rep_dim: int) -> "ModelParams":
        r = rep_dim
        return cls(
            hidden_weight=np.zeros((4 * r, r)),
            hidden_bias=np.zeros(r),
            output_weight=np.zeros((r, 3)),
            output_bias=np.zeros(3),
            empty_premise=np.zeros(r),
            empty_hypothesis=np.zeros(r),
        )

    def copy(self) -> "ModelParams":
        return ModelParams(**{f.name: getattr(self, f.name).copy() for f in fields(self)})

    def tensors(self) -> dict[str, np.ndarray]:
        return {f.name: getattr(self, f.name) for f in fields(self)}


def init_params(rep_dim: int, seed: int) -> ModelParams:
    """Fan-in scaled uniform weights, zero biases, random EMPTY vectors."""
    rng = np.random.default_rng(seed)

    def uniform(shape, fan_in):
        bound = 1.0 / np.sqrt(fan_in)
        return rng.uniform(-bound, bound, size=shape)

    r = rep_dim
    return ModelParams(
        hidden_weight=uniform((4 * r, r), 4 * r),
        hidden_bias=np.zeros(r),
        output_weight=uniform((r, 3), r),
        output_bias=np.zeros(3),
        empty_premise=uniform((r,), r),
        empty_hypothesis=uniform((r,), r),
    )


def represent(embedding: PhraseEmbedding | None, params: ModelParams,
              cfg: FeatureConfig, side: Side) -> np.ndarray:
    """Phrase representation for one side; ``None`` selects the EMPTY vector."""
    if embedding is None:
        vec = params.empty_premise if side == Side.PREMISE else params.empty_hypothesis
        return vec.copy()
    if cfg.variant == FeatureVariant.LOCAL:
        vec = np.asarray(embedding.local, dtype=np.float64)
    elif cfg.variant == FeatureVariant.GLOBAL:
        vec = np.asarray(embedding.global_, dtype=np.float64)
    else:
        vec = np.concatenate([
            np.asarray(embedding.local, dtype=np.float64),
            np.asarray(embedding.global_, dtype=np.float64),
        ])
    if vec.shape[0] != params.rep_dim:
        raise ValidationError(
            f"representation dimension {vec.shape[0]} does not match model width "
            f"{params.rep_dim}")
    return vec


def features(p: np.ndarray, h: np.ndarray) -> np.ndarray:
    """Heuristic matching features [p; h; |p - h|; p * h]."""
    p = np.asarray(p, dtype=np.float64)
    h = np.asarray(h, dtype=np.float64)
    if p.shape != h.shape or p.ndim != 1:
        raise ValidationError(f"feature inputs must be equal-length vectors, "
                              f"got {p.shape} and {h.shape}")
    return np.concatenate([p, h, np.abs(p - h), p * h])


def softmax(logits: np.ndarray) -> np.ndarray:
    """Row-wise softmax with max subtraction."""
    logits = np.asarray(logits, dtype=np.float64)
    shifted = logits - logits.max(axis=-1, keepdims=True)
    exp = np.exp(shifted)
    return exp / exp.sum(axis=-1, keepdims=True)


#: largest float64 strictly below 1; used to keep serialized probabilities
#: inside the open unit interval when softmax saturates
_BELOW_ONE = float(np.nextafter(1.0, 0.0))


def open_unit_probs(row: np.ndarray) -> tuple[float, float, float]:
    """Nudge a distribution into (0, 1) strictly; off by at most one ulp."""
    clipped = np.clip(np.asarray(row, dtype=np.float64), 5e-324, _BELOW_ONE)
    return (float(clipped[0]), float(clipped[1]), float(clipped[2]))


@dataclass
class ForwardCache:
    """Intermediates of one batched forward pass over n pairs."""

    p: np.ndarray            # (n, r) premise representations (EMPTY substituted)
    h: np.ndarray            # (n, r)
    empty_p: np.ndarray      # (n,) bool, rows using the EMPTY premise vector
    empty_h: np.ndarray      # (n,) bool
    feats: np.ndarray        # (n, 4r)
    pre_activation: np.ndarray  # (n, r)
    hidden: np.ndarray       # (n, r)
    probs: np.ndarray        # (n, 3)


def forward_pairs(p_reps: np.ndarray, h_reps: np.ndarray,
                  empty_p: np.ndarray, empty_h: np.ndarray,
                  params: ModelParams) -> ForwardCache:
    """Vectorized forward pass; EMPTY rows are filled from the params.

    ``p_reps``/``h_reps`` rows flagged empty may hold anything; they are
    overwritten with the corresponding learnable vector.
    """
    p = np.array(p_reps, dtype=np.float64)
    h = np.array(h_reps, dtype=np.float64)
    empty_p = np.asarray(empty_p, dtype=bool)
    empty_h = np.asarray(empty_h, dtype=bool)
    if np.any(empty_p & empty_h):
        raise ValidationError("a pair cannot be EMPTY on both sides")
    p[empty_p] = params.empty_premise
    h[empty_h] = params.empty_hypothesis
    feats = np.concatenate([p, h, np.abs(p - h), p * h], axis=1)
    pre = feats @ params.hidden_weight + params.hidden_bias
    hidden = np.maximum(pre, 0.0)
    logits = hidden @ params.output_weight + params.output_bias
    probs = softmax(logits)
    if not np.isfinite(probs).all():
        bad = int(np.argwhere(~np.isfinite(probs))[0][0])
        raise FloatingPointError(f"non-finite prediction for pair {bad}")
    return ForwardCache(p=p, h=h, empty_p=empty_p, empty_h=empty_h,
                        feats=feats, pre_activation=pre, hidden=hidden, probs=probs)


def backward_pairs(cache: ForwardCache, d_probs: np.ndarray,
                   params: ModelParams) -> ModelParams:
    """Exact gradients of the forward pass, summed over the batch.

    ``d_probs`` is the upstream gradient at the softmax output, shape
    (n, 3).  Returns a ModelParams-shaped container of gradients; the
    EMPTY vectors accumulate only from rows that used them, and no
    gradient is propagated into the input embeddings.
    """
    d_probs = np.asarray(d_probs, dtype=np.float64)
    if d_probs.shape != cache.probs.shape:
        raise ValidationError(f"upstream gradient shape {d_probs.shape} does not match "
                              f"probs shape {cache.probs.shape}")
    probs = cache.probs
    # softmax backward: dL/dz_i = p_i * (g_i - sum_j g_j p_j)
    inner = (d_probs * probs).sum(axis=1, keepdims=True)
    d_logits = probs * (d_probs - inner)

    d_output_weight = cache.hidden.T @ d_logits
    d_output_bias = d_logits.sum(axis=0)
    d_hidden = d_logits @ params.output_weight.T
    d_pre = d_hidden * (cache.pre_activation > 0.0)

    d_hidden_weight = cache.feats.T @ d_pre
    d_hidden_bias = d_pre.sum(axis=0)
    d_feats = d_pre @ params.hidden_weight.T

    r = params.rep_dim
    d_a = d_feats[:, 0 * r:1 * r]
    d_b = d_feats[:, 1 * r:2 * r]
    d_c = d_feats[:, 2 * r:3 * r]
    d_d = d_feats[:, 3 * r:4 * r]
    sign = np.sign(cache.p - cache.h)
    d_p = d_a + d_c * sign + d_d * cache.h
    d_h = d_b - d_c * sign + d_d * cache.p

    return ModelParams(
        hidden_weight=d_hidden_weight,
        hidden_bias=d_hidden_bias,
        output_weight=d_output_weight,
        output_bias=d_output_bias,
        empty_premise=d_p[cache.empty_p].sum(axis=0) if cache.empty_p.any() else np.zeros(r),
        empty_hypothesis=d_h[cache.empty_h].sum(axis=0) if cache.empty_h.any() else np.zeros(r),
    )


def predict_pair(pair: PhrasePair, premise_embedding: PhraseEmbedding | None,
                 hypothesis_embedding: PhraseEmbedding | None,
                 params: ModelParams, cfg: FeatureConfig) -> PhrasalPrediction:
    """Single-pair convenience wrapper around the batched forward pass."""
    if pair.premise_phrase is not None and premise_embedding is None:
        raise ValidationError("premise embedding required for a present premise phrase")
    if pair.hypothesis_phrase is not None and hypothesis_embedding is None:
        raise ValidationError("hypothesis embedding required for a present hypothesis phrase")
    p = represent(premise_embedding if pair.premise_phrase is not None else None,
                  params, cfg, Side.PREMISE)
    h = represent(hypothesis_embedding if pair.hypothesis_phrase is not None else None,
                  params, cfg, Side.HYPOTHESIS)
    cache = forward_pairs(p[None, :], h[None, :],
                          np.array([pair.premise_phrase is None]),
                          np.array([pair.hypothesis_phrase is None]), params)
    return PhrasalPrediction(open_unit_probs(cache.probs[0]))


def argmax_label(probs: np.ndarray) -> Label:
    order = (Label.E, Label.C, Label.N)
    return order[int(np.argmax(probs))]


# ---------------------------------------------------------------------------
# Checkpoints
# ---------------------------------------------------------------------------

def save_checkpoint(params: ModelParams, path, *, variant: FeatureVariant,
                    embedding_dim: int, seed: int, extra: dict | None = None) -> None:
    doc = {
        "version": CHECKPOINT_VERSION,
        "config": {
            "variant": variant.value,
            "d": int(embedding_dim),
            "r": int(params.rep_dim),
            "seed": int(seed),
        },
        "params": {name: arr.tolist() for name, arr in params.tensors().items()},
    }
    if extra:
        doc.update(extra)
    atomic_write_text(path, json.dumps(doc, ensure_ascii=False, indent=1) + "\n")


def load_checkpoint(path) -> tuple[ModelParams, dict]:
    with open(path, "r", encoding="utf-8") as fh:
        doc = json.load(fh)
    if "version" not in doc:
        raise ValidationError(f"checkpoint {path} lacks the mandatory version field")
    if doc["version"] != CHECKPOINT_VERSION:
        raise ValidationError(f"unsupported checkpoint version {doc['version']}")
    params = ModelParams(**{name: np.asarray(values, dtype=np.float64)
                            for name, values in doc["params"].items()})
    info = {k: v for k, v in doc.items() if k != "params"}
    expected_r = FeatureConfig(FeatureVariant(doc["config"]["variant"])).rep_dim(
        int(doc["config"]["d"]))
    if params.rep_dim != expected_r:
        raise ValidationError(
            f"checkpoint width {params.rep_dim} does not match variant/d "
            f"({doc['config']['variant']}, d={doc['config']['d']})")
    return params, info
