"""Mutual-argmax phrase alignment.

A premise phrase and a hypothesis phrase align exactly when each is the
other's most similar phrase under the blended cosine.  Everything that
finds no mutual partner is emitted as a one-sided pair (to be matched
against the EMPTY placeholder downstream).  Argmax ties go to the lowest
phrase index so runs are reproducible.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .corpus import Phrase, PhrasePair, Sample, ValidationError
from .embeddings import AlignConfig, similarity


class AlignMode(str, Enum):
    MUTUAL = "mutual"
    RANDOM = "random"


@dataclass(frozen=True)
class AlignmentResult:
    """Aligned pairs first, then one-sided premise pairs, then hypothesis ones."""

    pairs: tuple[PhrasePair, ...]
    k_aligned: int
    k_total: int

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple(self.pairs))
        if self.k_total != len(self.pairs):
            raise ValidationError("k_total must equal the number of pairs")
        if any(not p.aligned for p in self.pairs[:self.k_aligned]):
            raise ValidationError("aligned pairs must come first")
        if any(p.aligned for p in self.pairs[self.k_aligned:]):
            raise ValidationError("unaligned pairs must come after aligned ones")


def mutual_argmax_pairs(sim: np.ndarray) -> list[tuple[int, int]]:
    """Index pairs (m, n) where row m's argmax is n and column n's argmax is m.

    Ties resolve to the first (lowest-index) maximum on both axes.
    """
    sim = np.asarray(sim, dtype=np.float64)
    if sim.ndim != 2:
        raise ValidationError("similarity matrix must be two-dimensional")
    if sim.shape[0] == 0 or sim.shape[1] == 0:
        return []
    row_best = np.argmax(sim, axis=1)
    col_best = np.argmax(sim, axis=0)
    return [(m, int(row_best[m])) for m in range(sim.shape[0])
            if int(col_best[int(row_best[m])]) == m]


def random_matching(n_premise: int, n_hypothesis: int, k: int, seed: int) -> list[tuple[int, int]]:
    """A uniformly random injective matching of exactly k pairs."""
    if k > min(n_premise, n_hypothesis):
        raise ValidationError("matching size exceeds one of the phrase counts")
    rng = np.random.default_rng(seed)
    rows = rng.choice(n_premise, size=k, replace=False)
    cols = rng.choice(n_hypothesis, size=k, replace=False)
    cols = cols[rng.permutation(k)]
    return sorted(zip(rows.tolist(), cols.tolist()))


def similarity_matrix(sample: Sample, premise_phrases, hypothesis_phrases,
                      provider, cfg: AlignConfig) -> np.ndarray:
    p_embs = [provider.embed(sample, p) for p in premise_phrases]
    h_embs = [provider.embed(sample, h) for h in hypothesis_phrases]
    sim = np.empty((len(p_embs), len(h_embs)), dtype=np.float64)
    for i, pe in enumerate(p_embs):
        for j, he in enumerate(h_embs):
            sim[i, j] = similarity(pe, he, cfg)
    return sim


def pairs_from_matching(premise_phrases, hypothesis_phrases,
                        matching: list[tuple[int, int]]) -> AlignmentResult:
    """Build the ordered pair list from index-level matches."""
    premise_phrases = list(premise_phrases)
    hypothesis_phrases = list(hypothesis_phrases)
    matched_p = {m for m, _ in matching}
    matched_h = {n for _, n in matching}
    aligned = [
        PhrasePair(premise_phrases[m], hypothesis_phrases[n], aligned=True)
        for m, n in matching
    ]
    aligned.sort(key=lambda pp: pp.premise_phrase.span)
    rest_p = [PhrasePair(premise_phrases[m], None, aligned=False)
              for m in range(len(premise_phrases)) if m not in matched_p]
    rest_p.sort(key=lambda pp: pp.premise_phrase.span)
    rest_h = [PhrasePair(None, hypothesis_phrases[n], aligned=False)
              for n in range(len(hypothesis_phrases)) if n not in matched_h]
    rest_h.sort(key=lambda pp: pp.hypothesis_phrase.span)
    pairs = aligned + rest_p + rest_h
    return AlignmentResult(pairs=tuple(pairs), k_aligned=len(aligned), k_total=len(pairs))


def align(sample: Sample, premise_phrases: list[Phrase], hypothesis_phrases: list[Phrase],
          provider, cfg: AlignConfig = AlignConfig(),
          mode: AlignMode = AlignMode.MUTUAL, seed: int | None = None) -> AlignmentResult:
    """Pair up phrases across the two sides.

    Mutual mode applies the mutual-argmax rule to the full similarity
    matrix.  Random mode keeps the number of aligned pairs that mutual
    mode finds but redraws the matching uniformly at random, which is the
    ablation that isolates how much alignment quality matters.
    """
    sim = similarity_matrix(sample, premise_phrases, hypothesis_phrases, provider, cfg)
    matching = mutual_argmax_pairs(sim)
    if mode == AlignMode.RANDOM:
        if seed is None:
            raise ValidationError("random alignment requires a seed")
        matching = random_matching(len(premise_phrases), len(hypothesis_phrases),
                                   len(matching), seed)
    return pairs_from_matching(premise_phrases, hypothesis_phrases, matching)
