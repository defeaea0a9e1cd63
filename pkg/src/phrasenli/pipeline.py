"""End-to-end per-sample wiring: chunk, align, represent, predict.

Random chunking and random alignment draw their randomness from seeds
derived per (run seed, sample id), so a full run is reproducible while
different samples still get different splits.
"""

from __future__ import annotations

import hashlib
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .alignment import AlignMode, AlignmentResult, align
from .chunking import ChunkerConfig, ChunkerMode, chunk
from .classifier import (
    FeatureConfig,
    ModelParams,
    argmax_label,
    forward_pairs,
    open_unit_probs,
    represent,
)
from .corpus import (
    PairPrediction,
    PhrasalPrediction,
    PredictionRecord,
    Sample,
    Side,
    ValidationError,
)
from .embeddings import AlignConfig
from .induction import InductionConfig, induce_arrays


def derive_seed(base: int, *parts) -> int:
    material = "|".join([str(int(base)), *map(str, parts)])
    digest = hashlib.blake2b(material.encode("utf-8"), digest_size=8).digest()
    return int.from_bytes(digest, "little")


@dataclass(frozen=True)
class PipelineConfig:
    chunker_mode: ChunkerMode = ChunkerMode.RULES
    align_mode: AlignMode = AlignMode.MUTUAL
    align: AlignConfig = AlignConfig()
    features: FeatureConfig = FeatureConfig()
    induction: InductionConfig = InductionConfig()
    seed: int = 0


@dataclass
class PreparedSample:
    """A sample with phrases aligned and representations precomputed.

    EMPTY rows of the representation matrices are placeholders; the
    forward pass substitutes the current learnable vectors.
    """

    sample: Sample
    result: AlignmentResult
    p_reps: np.ndarray   # (k_total, r)
    h_reps: np.ndarray   # (k_total, r)
    empty_p: np.ndarray  # (k_total,) bool
    empty_h: np.ndarray  # (k_total,) bool
    aligned: np.ndarray  # (k_total,) bool


def chunk_sample(sample: Sample, pcfg: PipelineConfig) -> tuple[list, list]:
    def cfg_for(side: Side) -> ChunkerConfig:
        if pcfg.chunker_mode == ChunkerMode.RANDOM:
            return ChunkerConfig(mode=ChunkerMode.RANDOM,
                                 seed=derive_seed(pcfg.seed, "chunk", sample.id, side.value))
        return ChunkerConfig()

    premise = chunk(sample.premise, cfg_for(Side.PREMISE), side=Side.PREMISE)
    hypothesis = chunk(sample.hypothesis, cfg_for(Side.HYPOTHESIS), side=Side.HYPOTHESIS)
    return premise, hypothesis


def align_sample(sample: Sample, provider, pcfg: PipelineConfig) -> AlignmentResult:
    premise, hypothesis = chunk_sample(sample, pcfg)
    seed = None
    if pcfg.align_mode == AlignMode.RANDOM:
        seed = derive_seed(pcfg.seed, "align", sample.id)
    return align(sample, premise, hypothesis, provider, pcfg.align, pcfg.align_mode, seed)


def prepare_sample(sample: Sample, provider, pcfg: PipelineConfig,
                   rep_dim: int) -> PreparedSample:
    result = align_sample(sample, provider, pcfg)
    n = result.k_total
    if n == 0:
        raise ValidationError(
            f"sample {sample.id!r} yields no phrases on either side; nothing to classify")
    p_reps = np.zeros((n, rep_dim))
    h_reps = np.zeros((n, rep_dim))
    empty_p = np.zeros(n, dtype=bool)
    empty_h = np.zeros(n, dtype=bool)
    aligned = np.zeros(n, dtype=bool)
    dummy = ModelParams.zeros(rep_dim)
    for i, pair in enumerate(result.pairs):
        aligned[i] = pair.aligned
        if pair.premise_phrase is None:
            empty_p[i] = True
        else:
            emb = provider.embed(sample, pair.premise_phrase)
            p_reps[i] = represent(emb, dummy, pcfg.features, Side.PREMISE)
        if pair.hypothesis_phrase is None:
            empty_h[i] = True
        else:
            emb = provider.embed(sample, pair.hypothesis_phrase)
            h_reps[i] = represent(emb, dummy, pcfg.features, Side.HYPOTHESIS)
    return PreparedSample(sample=sample, result=result, p_reps=p_reps, h_reps=h_reps,
                          empty_p=empty_p, empty_h=empty_h, aligned=aligned)


def prepare_corpus(samples, provider, pcfg: PipelineConfig,
                   threads: int = 1) -> list[PreparedSample]:
    rep_dim = pcfg.features.rep_dim(provider.dim)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(lambda s: prepare_sample(s, provider, pcfg, rep_dim), samples))
    return [prepare_sample(s, provider, pcfg, rep_dim) for s in samples]


def predict_prepared(prepared: PreparedSample, params: ModelParams,
                     icfg: InductionConfig) -> PredictionRecord:
    cache = forward_pairs(prepared.p_reps, prepared.h_reps,
                          prepared.empty_p, prepared.empty_h, params)
    induction, _ = induce_arrays(cache.probs, prepared.aligned, icfg)
    pairs = tuple(
        PairPrediction(
            pair=pair,
            prediction=PhrasalPrediction(open_unit_probs(cache.probs[i])),
            label=argmax_label(cache.probs[i]),
        )
        for i, pair in enumerate(prepared.result.pairs)
    )
    return PredictionRecord(
        sample_id=prepared.sample.id,
        pairs=pairs,
        sentence_scores=induction,
        sentence_label=induction.argmax(),
    )


def predict_corpus(samples, provider, params: ModelParams, pcfg: PipelineConfig,
                   threads: int = 1) -> list[PredictionRecord]:
    """Predict every sample; records come back sorted by sample id."""
    prepared = prepare_corpus(samples, provider, pcfg, threads=threads)
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            records = list(pool.map(
                lambda ps: predict_prepared(ps, params, pcfg.induction), prepared))
    else:
        records = [predict_prepared(ps, params, pcfg.induction) for ps in prepared]
    return sorted(records, key=lambda r: r.sample_id)
