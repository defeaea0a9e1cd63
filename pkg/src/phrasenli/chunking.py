"""Rule-based phrase detection over POS-tagged sentences.

Four rules run in order, and a token consumed by an earlier rule is not
available to later ones:

1. prepositional phrase: a token with fine tag ``IN`` immediately followed
   by a noun chunk becomes one PP covering both;
2. every remaining noun chunk becomes an NP;
3. verb phrase: optional auxiliary + optional negation particle + verb +
   optional particle (fine tag ``RP``), all contiguous;
4. every remaining open-class token becomes a singleton Other phrase.

Leftover closed-class tokens ("there", "is", ...) carry no standalone
semantics and belong to no phrase.  The random mode re-partitions the
open-class token positions into the same number of contiguous chunks that
the rules produce, which keeps chunk counts comparable while destroying
the phrase structure.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .corpus import (
    Phrase,
    PhraseKind,
    Sentence,
    Side,
    Span,
    UNIVERSAL_POS_TAGS,
    ValidationError,
)

#: Coarse tags treated as open-class (content) words.
OPEN_CLASS_TAGS = frozenset({"NOUN", "PROPN", "VERB", "ADJ", "ADV", "INTJ", "NUM"})

#: Lowercase negation particles accepted inside a verb phrase.
NEGATION_TEXTS = frozenset({"not", "n't"})


class ChunkerMode(str, Enum):
    RULES = "rules"
    RANDOM = "random"


@dataclass(frozen=True)
class ChunkerConfig:
    mode: ChunkerMode = ChunkerMode.RULES
    seed: int | None = None

    def __post_init__(self):
        if self.mode == ChunkerMode.RANDOM and self.seed is None:
            raise ValidationError("random chunker mode requires a seed")


def _is_negation(token) -> bool:
    return token.pos == "PART" and token.text.lower() in NEGATION_TEXTS


def fallback_noun_chunks(sentence: Sentence) -> tuple[Span, ...]:
    """Maximal runs of [DET | possessive PRON | NUM | ADJ]* NOUN+ ."""
    chunks: list[Span] = []
    tokens = sentence.tokens
    i = 0
    while i < len(tokens):
        j = i
        while j < len(tokens) and (
            tokens[j].pos in ("DET", "NUM", "ADJ")
            or (tokens[j].pos == "PRON" and tokens[j].tag == "PRP$")
        ):
            j += 1
        if j < len(tokens) and tokens[j].pos == "NOUN":
            k = j
            while k < len(tokens) and tokens[k].pos == "NOUN":
                k += 1
            chunks.append((i, k))
            i = k
        else:
            i += 1
    return tuple(chunks)


def _rule_phrases(sentence: Sentence, side: Side) -> list[Phrase]:
    tokens = sentence.tokens
    n = len(tokens)
    consumed = [False] * n
    phrases: list[Phrase] = []

    def take(start: int, end: int, kind: PhraseKind) -> None:
        for t in range(start, end):
            consumed[t] = True
        phrases.append(Phrase(side=side, span=(start, end), kind=kind))

    chunks = sentence.noun_chunks
    if chunks is None:
        chunks = fallback_noun_chunks(sentence)
    chunks = sorted(chunks)
    chunk_used = [False] * len(chunks)

    # Rule 1: IN immediately followed by a noun chunk -> one PP over both.
    for ci, (s, e) in enumerate(chunks):
        if s >= 1 and tokens[s - 1].tag == "IN" and not consumed[s - 1]:
            take(s - 1, e, PhraseKind.PP)
            chunk_used[ci] = True

    # Rule 2: remaining noun chunks -> NP.
    for ci, (s, e) in enumerate(chunks):
        if not chunk_used[ci] and not any(consumed[s:e]):
            take(s, e, PhraseKind.NP)

    # Rule 3: [AUX] [NOT] VERB [RP], contiguous and unconsumed.
    for v in range(n):
        if tokens[v].pos != "VERB" or consumed[v]:
            continue
        start = v
        if start >= 1 and not consumed[start - 1] and _is_negation(tokens[start - 1]):
            start -= 1
            if start >= 1 and not consumed[start - 1] and tokens[start - 1].pos == "AUX":
                start -= 1
        elif start >= 1 and not consumed[start - 1] and tokens[start - 1].pos == "AUX":
            start -= 1
        end = v + 1
        if end < n and tokens[end].tag == "RP" and not consumed[end]:
            end += 1
        take(start, end, PhraseKind.VP)

    # Rule 4: remaining open-class tokens stand alone.
    for t in range(n):
        if not consumed[t] and tokens[t].pos in OPEN_CLASS_TAGS:
            take(t, t + 1, PhraseKind.OTHER)

    return sorted(phrases, key=lambda p: p.span)


def _random_phrases(sentence: Sentence, side: Side, count: int, seed: int) -> list[Phrase]:
    open_positions = [i for i, t in enumerate(sentence.tokens) if t.pos in OPEN_CLASS_TAGS]
    # A provided noun chunk may hold no open-class token (e.g. a bare
    # pronoun), in which case the rule count is not reachable here.
    count = min(count, len(open_positions))
    if count == 0:
        return []
    rng = np.random.default_rng(seed)
    gaps = len(open_positions) - 1
    split_points = sorted(rng.choice(gaps, size=count - 1, replace=False) + 1) if count > 1 else []
    bounds = [0, *split_points, len(open_positions)]
    phrases = []
    for a, b in zip(bounds, bounds[1:]):
        group = open_positions[a:b]
        phrases.append(Phrase(side=side, span=(group[0], group[-1] + 1), kind=PhraseKind.OTHER))
    return phrases


def chunk(sentence: Sentence, config: ChunkerConfig = ChunkerConfig(),
          side: Side = Side.PREMISE) -> list[Phrase]:
    """Extract non-overlapping phrases from one sentence.

    Rules mode is deterministic.  Random mode partitions the open-class
    positions into as many contiguous chunks as rules mode yields, with
    split points drawn under ``config.seed``.
    """
    for token in sentence.tokens:
        if token.pos not in UNIVERSAL_POS_TAGS:
            raise ValidationError(f"unknown coarse POS tag {token.pos!r}")
    rule_based = _rule_phrases(sentence, side)
    if config.mode == ChunkerMode.RULES:
        return rule_based
    return _random_phrases(sentence, side, len(rule_based), config.seed)
