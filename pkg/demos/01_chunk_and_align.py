"""Phrase detection and mutual-argmax alignment, step by step.

Run with:  python demos/01_chunk_and_align.py
"""

from phrasenli import (
    AlignConfig,
    Sample,
    Sentence,
    Side,
    Token,
    ToyEmbeddingProvider,
    align,
    chunk,
)

# A sentence arrives pre-tagged: every token carries a coarse (universal)
# POS tag and a fine tag.  Noun chunks may be supplied by the producing
# tagger; without them a small fallback grammar kicks in.
premise = Sentence(
    tokens=(
        Token("The", "DET", "DT"), Token("woman", "NOUN", "NN"),
        Token("is", "AUX", "VBZ"), Token("showing", "VERB", "VBG"),
        Token("off", "ADP", "RP"), Token("her", "PRON", "PRP$"),
        Token("blue", "ADJ", "JJ"), Token("dog", "NOUN", "NN"),
        Token("at", "ADP", "IN"), Token("the", "DET", "DT"),
        Token("playground", "NOUN", "NN"),
    ),
    noun_chunks=((0, 2), (5, 8), (9, 11)),
)

hypothesis = Sentence(
    tokens=(
        Token("A", "DET", "DT"), Token("lady", "NOUN", "NN"),
        Token("presents", "VERB", "VBZ"), Token("her", "PRON", "PRP$"),
        Token("dog", "NOUN", "NN"), Token("at", "ADP", "IN"),
        Token("the", "DET", "DT"), Token("park", "NOUN", "NN"),
    ),
    noun_chunks=((0, 2), (3, 5), (6, 8)),
)

# Four rules fire in order: IN + noun chunk becomes a PP, remaining noun
# chunks become NPs, [AUX][NOT]VERB[RP] becomes a VP, and leftover
# open-class words stand alone.  Leftover closed-class words are dropped.
premise_phrases = chunk(premise, side=Side.PREMISE)
hypothesis_phrases = chunk(hypothesis, side=Side.HYPOTHESIS)

print("premise phrases:")
for p in premise_phrases:
    print(f"  {p.kind.value:5s} {premise.text(p.span)!r}")
print("hypothesis phrases:")
for p in hypothesis_phrases:
    print(f"  {p.kind.value:5s} {hypothesis.text(p.span)!r}")

# Alignment needs embeddings.  The toy provider hashes phrase text into
# deterministic unit vectors, good enough to demonstrate the machinery
# ("her blue dog" and "her dog" share no anchor here, so do not expect
# semantically perfect matches from it).
sample = Sample(id="demo", premise=premise, hypothesis=hypothesis)
provider = ToyEmbeddingProvider(dim=16, seed=0)

# A pair aligns only when each phrase is the other's most similar one
# under sim = gamma * cos(global) + (1 - gamma) * cos(local).
result = align(sample, premise_phrases, hypothesis_phrases, provider,
               AlignConfig(gamma=0.6))

print(f"\naligned {result.k_aligned} of {result.k_total} pairs:")
for pair in result.pairs:
    left = premise.text(pair.premise_phrase.span) if pair.premise_phrase else "⟨EMPTY⟩"
    right = (hypothesis.text(pair.hypothesis_phrase.span)
             if pair.hypothesis_phrase else "⟨EMPTY⟩")
    marker = "↔" if pair.aligned else "·"
    print(f"  {left!r} {marker} {right!r}")
