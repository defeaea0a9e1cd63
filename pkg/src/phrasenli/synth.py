"""Synthetic corpora with known phrasal ground truth.

Each generated sample plants 2-5 phrase-level relations and composes the
sentence label from them with the same rules the induction module uses:
Entailment when every planted relation is E, Contradiction when at least
one is C, Neutral otherwise.  A surplus premise phrase (no counterpart in
the hypothesis) is planted as E, a surplus hypothesis phrase as N, since
extra information on the premise side leaves the hypothesis entailed
while extra claims in the hypothesis make it neutral.

The generator also emits an embedding file with exact per-sample
geometry: inside a sample, every planted pair lives on its own pair of
orthonormal directions, with cosine 1.0 for E partners, 0.6 for C, and
0.2 for N, so mutual-argmax alignment recovers the planted pairing, and
the relation is linearly recoverable from the pair features.  Gold
annotations matching the evaluator's format round out the outputs.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chunking import chunk
from .corpus import (
    AnnotationRecord,
    AnnotationUnit,
    Label,
    PhraseKind,
    PredictionRecord,
    Sample,
    Sentence,
    Side,
    Span,
    Token,
    UnitLabel,
    ValidationError,
)
from .pipeline import derive_seed

_KIND_ORDER = {PhraseKind.NP: 0, PhraseKind.VP: 1, PhraseKind.PP: 2, PhraseKind.OTHER: 3}

#: local-cosine targets between planted partners, per relation
RELATION_COSINE = {Label.E: 1.0, Label.C: 0.6, Label.N: 0.2}

#: share of the global vector carried over from the local one
GLOBAL_LOCAL_WEIGHT = 0.9

#: strength of the sentence-label component mixed into the shared context
#: direction of the global vectors.  Mean-pooled sentence representations
#: inevitably carry aggregate label signal; a weak planted trace of it lets
#: a classifier shortcut to the sentence label through global features,
#: which is what separates the induction variants.
LABEL_LEAK_WEIGHT = 0.15


class GenerationError(ValueError):
    """The requested corpus exceeds what the lexicon can support."""


@dataclass(frozen=True)
class PhraseForm:
    """One surface realization of a phrase: tokens plus its chunk shape."""

    kind: PhraseKind
    tokens: tuple[tuple[str, str, str], ...]  # (text, pos, tag)

    def token_objects(self) -> tuple[Token, ...]:
        return tuple(Token(text=t, pos=p, tag=g) for t, p, g in self.tokens)

    def noun_chunk(self) -> Span | None:
        """Chunk span relative to the form, for NP and PP shapes."""
        if self.kind == PhraseKind.NP:
            return (0, len(self.tokens))
        if self.kind == PhraseKind.PP:
            return (1, len(self.tokens))
        return None


@dataclass(frozen=True)
class Concept:
    name: str
    head: PhraseForm
    synonyms: tuple[PhraseForm, ...]
    antonyms: tuple[PhraseForm, ...]
    unrelated: tuple[PhraseForm, ...]

    def forms_for(self, relation: Label) -> tuple[PhraseForm, ...]:
        if relation == Label.E:
            return self.synonyms
        if relation == Label.C:
            return self.antonyms
        return self.unrelated


@dataclass(frozen=True)
class Lexicon:
    concepts: tuple[Concept, ...]
    diversity_bound: int = 200_000

    def __post_init__(self):
        object.__setattr__(self, "concepts", tuple(self.concepts))
        if len(self.concepts) < 6:
            raise ValidationError("lexicon needs at least 6 concepts")
        for concept in self.concepts:
            groups = (concept.synonyms, concept.antonyms, concept.unrelated)
            texts = [frozenset(f.tokens for f in g) for g in groups]
            if texts[0] & texts[1] or texts[0] & texts[2] or texts[1] & texts[2]:
                raise ValidationError(
                    f"concept {concept.name!r} has overlapping relation sets")
            for form in (concept.head, *concept.synonyms, *concept.antonyms,
                         *concept.unrelated):
                _check_form_chunks(form, concept.name)


def _check_form_chunks(form: PhraseForm, concept_name: str) -> None:
    """Every form must survive the rule chunker as exactly one phrase."""
    nc = form.noun_chunk()
    sentence = Sentence(tokens=form.token_objects(),
                        noun_chunks=None if nc is None else (nc,))
    phrases = chunk(sentence)
    if len(phrases) != 1 or phrases[0].span != (0, len(form.tokens)) \
            or phrases[0].kind != form.kind:
        raise ValidationError(
            f"form {' '.join(t for t, _, _ in form.tokens)!r} of concept "
            f"{concept_name!r} does not chunk to a single {form.kind.value} phrase")


def _np(*words: str) -> PhraseForm:
    tokens = []
    for i, w in enumerate(words):
        if i == 0 and w.lower() in ("the", "a", "an", "some", "every"):
            tokens.append((w, "DET", "DT"))
        elif i == len(words) - 1:
            tokens.append((w, "NOUN", "NN"))
        else:
            tokens.append((w, "ADJ", "JJ"))
    return PhraseForm(kind=PhraseKind.NP, tokens=tuple(tokens))


def _vp(*words: str) -> PhraseForm:
    tokens = []
    for i, w in enumerate(words):
        if i == 0 and w in ("is", "was", "can", "could", "will"):
            tokens.append((w, "AUX", "VBZ"))
        elif w in ("off", "up", "down", "out"):
            tokens.append((w, "ADP", "RP"))
        elif w in ("not",):
            tokens.append((w, "PART", "RB"))
        else:
            tokens.append((w, "VERB", "VBG" if w.endswith("ing") else "VBZ"))
    return PhraseForm(kind=PhraseKind.VP, tokens=tuple(tokens))


def _pp(*words: str) -> PhraseForm:
    tokens = [(words[0], "ADP", "IN")]
    for i, w in enumerate(words[1:], start=1):
        if i == 1 and w.lower() in ("the", "a", "an"):
            tokens.append((w, "DET", "DT"))
        elif i == len(words) - 1:
            tokens.append((w, "NOUN", "NN"))
        else:
            tokens.append((w, "ADJ", "JJ"))
    return PhraseForm(kind=PhraseKind.PP, tokens=tuple(tokens))


def _adv(word: str) -> PhraseForm:
    return PhraseForm(kind=PhraseKind.OTHER, tokens=((word, "ADV", "RB"),))


def default_lexicon() -> Lexicon:
    """A small hand-written lexicon covering all four phrase kinds."""
    concepts = (
        Concept("woman", _np("the", "young", "woman"),
                synonyms=(_np("the", "lady"), _np("a", "young", "female")),
                antonyms=(_np("the", "old", "man"), _np("a", "male", "senior")),
                unrelated=(_np("a", "forest", "ranger"), _np("the", "night", "clerk"))),
        Concept("dog", _np("the", "small", "dog"),
                synonyms=(_np("the", "little", "dog"), _np("a", "tiny", "puppy")),
                antonyms=(_np("the", "huge", "cat"), _np("a", "giant", "feline")),
                unrelated=(_np("an", "office", "printer"), _np("the", "steel", "bridge"))),
        Concept("children", _np("several", "children"),
                synonyms=(_np("some", "kids"), _np("a", "group", "child")),
                antonyms=(_np("a", "single", "adult"), _np("the", "lone", "elder")),
                unrelated=(_np("the", "parked", "tractor"), _np("a", "glass", "bottle"))),
        Concept("musician", _np("a", "street", "musician"),
                synonyms=(_np("a", "busking", "performer"), _np("the", "street", "player")),
                antonyms=(_np("a", "silent", "statue"), _np("the", "mute", "mime")),
                unrelated=(_np("a", "tax", "auditor"), _np("the", "harbor", "crane"))),
        Concept("meal", _np("a", "warm", "meal"),
                synonyms=(_np("a", "hot", "dish"), _np("some", "warm", "food")),
                antonyms=(_np("a", "frozen", "snack"), _np("the", "cold", "leftover")),
                unrelated=(_np("a", "broken", "ladder"), _np("the", "spare", "tire"))),
        Concept("walking", _vp("is", "walking"),
                synonyms=(_vp("is", "strolling"), _vp("walks")),
                antonyms=(_vp("is", "not", "moving"), _vp("sits", "down")),
                unrelated=(_vp("is", "singing"), _vp("paints"))),
        Concept("eating", _vp("is", "eating"),
                synonyms=(_vp("is", "dining"), _vp("eats")),
                antonyms=(_vp("is", "fasting"), _vp("is", "not", "eating")),
                unrelated=(_vp("is", "sleeping"), _vp("codes"))),
        Concept("showing", _vp("is", "showing", "off"),
                synonyms=(_vp("shows", "off"), _vp("is", "bragging")),
                antonyms=(_vp("is", "hiding"), _vp("covers", "up")),
                unrelated=(_vp("is", "measuring"), _vp("waits"))),
        Concept("park", _pp("at", "the", "park"),
                synonyms=(_pp("in", "the", "park"), _pp("at", "the", "playground")),
                antonyms=(_pp("in", "the", "office"), _pp("at", "the", "desk")),
                unrelated=(_pp("under", "a", "bridge"), _pp("on", "the", "roof"))),
        Concept("kitchen", _pp("in", "the", "kitchen"),
                synonyms=(_pp("near", "the", "stove"), _pp("in", "the", "galley")),
                antonyms=(_pp("in", "the", "garden"), _pp("on", "the", "street")),
                unrelated=(_pp("at", "the", "station"), _pp("by", "the", "river"))),
        Concept("quickly", _adv("quickly"),
                synonyms=(_adv("swiftly"), _adv("rapidly")),
                antonyms=(_adv("slowly"), _adv("sluggishly")),
                unrelated=(_adv("loudly"), _adv("politely"))),
        Concept("happily", _adv("happily"),
                synonyms=(_adv("cheerfully"), _adv("gladly")),
                antonyms=(_adv("sadly"), _adv("grimly")),
                unrelated=(_adv("remotely"), _adv("weekly"))),
    )
    return Lexicon(concepts=concepts)


@dataclass(frozen=True)
class GoldPair:
    premise_span: Span | None
    hypothesis_span: Span | None
    relation: Label


@dataclass(frozen=True)
class SynthSample:
    sample: Sample
    gold_pairs: tuple[GoldPair, ...]

    def __post_init__(self):
        relations = [gp.relation for gp in self.gold_pairs]
        if any(r == Label.C for r in relations):
            expected = Label.C
        elif all(r == Label.E for r in relations):
            expected = Label.E
        else:
            expected = Label.N
        if self.sample.label != expected:
            raise ValidationError(
                f"sample {self.sample.id!r} label {self.sample.label} does not follow "
                f"from planted relations {[r.value for r in relations]}")


@dataclass
class _PlannedUnit:
    concept_index: int
    relation: Label
    premise_form: PhraseForm | None
    hypothesis_form: PhraseForm | None


def _plan_units(target: Label, lexicon: Lexicon, rng: np.random.Generator) -> list[_PlannedUnit]:
    n_aligned = int(rng.integers(2, 5))
    unaligned: str | None = None  # "premise" | "hypothesis" | None

    # Surplus phrases appear only where their implied relation is sound: a
    # premise-only phrase in an entailed sample, a hypothesis-only phrase
    # in a neutral one.  At most one per sample, and never on both sides.
    if target == Label.E:
        relations = [Label.E] * n_aligned
        if rng.random() < 0.5:
            unaligned = "premise"
    elif target == Label.C:
        relations = [Label.C if rng.random() < 0.3 else Label.E for _ in range(n_aligned)]
        relations[int(rng.integers(0, n_aligned))] = Label.C
    else:
        if rng.random() < 0.4:
            relations = [Label.E] * n_aligned
            unaligned = "hypothesis"
        else:
            relations = [Label.N if rng.random() < 0.3 else Label.E for _ in range(n_aligned)]
            relations[int(rng.integers(0, n_aligned))] = Label.N

    n_units = n_aligned + (1 if unaligned else 0)
    concept_ids = rng.choice(len(lexicon.concepts), size=n_units, replace=False)
    units = []
    for slot, relation in enumerate(relations):
        concept = lexicon.concepts[concept_ids[slot]]
        forms = concept.forms_for(relation)
        hyp_form = forms[int(rng.integers(0, len(forms)))]
        units.append(_PlannedUnit(int(concept_ids[slot]), relation, concept.head, hyp_form))
    if unaligned == "premise":
        concept = lexicon.concepts[concept_ids[-1]]
        units.append(_PlannedUnit(int(concept_ids[-1]), Label.E, concept.head, None))
    elif unaligned == "hypothesis":
        concept = lexicon.concepts[concept_ids[-1]]
        units.append(_PlannedUnit(int(concept_ids[-1]), Label.N, None, concept.head))
    return units


def _assemble_side(units: list[_PlannedUnit], side: Side) -> tuple[Sentence, list[Span | None]]:
    attr = "premise_form" if side == Side.PREMISE else "hypothesis_form"
    indexed = [(i, getattr(u, attr)) for i, u in enumerate(units)]
    present = [(i, f) for i, f in indexed if f is not None]
    present.sort(key=lambda pair: (_KIND_ORDER[pair[1].kind], pair[0]))

    tokens: list[Token] = []
    chunks: list[Span] = []
    spans: list[Span | None] = [None] * len(units)
    for unit_index, form in present:
        offset = len(tokens)
        tokens.extend(form.token_objects())
        spans[unit_index] = (offset, len(tokens))
        nc = form.noun_chunk()
        if nc is not None:
            chunks.append((offset + nc[0], offset + nc[1]))
    return Sentence(tokens=tuple(tokens), noun_chunks=tuple(chunks)), spans


def _sample_embeddings(sample_id: str, label: Label, units: list[_PlannedUnit],
                       premise_spans: list[Span | None], hypothesis_spans: list[Span | None],
                       dim: int, rng: np.random.Generator) -> list[tuple]:
    """Per-token embedding records; every token carries its phrase's vector.

    Emitting token granularity lets the provider compose an embedding for
    any span (mean-pool and renormalize), which keeps ablations with
    non-planted spans such as the random chunker runnable.  A planted
    span pools identical vectors, so it still resolves to its exact
    anchor geometry.

    Relation geometry lives in a per-sample random orthonormal basis of
    the leading dim-4 components; the last three components are fixed
    per-label directions that enter only through the shared context of
    the global vectors, weighted by LABEL_LEAK_WEIGHT.
    """
    free = dim - 4
    basis = np.zeros((dim, free))
    basis[:free, :], _ = np.linalg.qr(rng.standard_normal((free, free)))
    context_rand = basis[:, free - 1]
    label_dir = np.zeros(dim)
    label_dir[free + (Label.E, Label.C, Label.N).index(label)] = 1.0
    context = (np.sqrt(1.0 - LABEL_LEAK_WEIGHT ** 2) * context_rand
               + LABEL_LEAK_WEIGHT * label_dir)
    ctx_weight = float(np.sqrt(1.0 - GLOBAL_LOCAL_WEIGHT ** 2))

    def as_global(local: np.ndarray) -> np.ndarray:
        return GLOBAL_LOCAL_WEIGHT * local + ctx_weight * context

    records = []

    def emit(side: Side, span: Span, local: np.ndarray) -> None:
        for t in range(span[0], span[1]):
            records.append((sample_id, side, (t, t + 1), local, as_global(local)))

    for i, unit in enumerate(units):
        anchor = basis[:, i]
        secondary = basis[:, len(units) + i]
        if premise_spans[i] is not None:
            emit(Side.PREMISE, premise_spans[i], anchor)
        if hypothesis_spans[i] is not None:
            if unit.premise_form is None:
                hyp_local = anchor
            else:
                c = RELATION_COSINE[unit.relation]
                hyp_local = c * anchor + np.sqrt(1.0 - c * c) * secondary
            emit(Side.HYPOTHESIS, hypothesis_spans[i], hyp_local)
    return records


def generate(lexicon: Lexicon, n: int, seed: int, dim: int = 16, id_prefix: str = "synth"
             ) -> tuple[list[SynthSample], list[AnnotationRecord], list[tuple], int]:
    """Generate n samples plus gold annotations and an embedding record list.

    Sentence labels cycle E, C, N, so the label balance is exact up to
    one sample.  Deterministic per (lexicon, n, seed).
    """
    if n < 1:
        raise ValidationError("need n >= 1")
    if n > lexicon.diversity_bound:
        raise GenerationError(
            f"{n} samples would repeat the lexicon beyond its diversity bound "
            f"({lexicon.diversity_bound})")
    if dim < 15:
        raise ValidationError("embedding dimension must be at least 15 for the planted geometry")

    synth_samples: list[SynthSample] = []
    annotations: list[AnnotationRecord] = []
    embedding_records: list[tuple] = []
    width = max(6, len(str(n)))
    for i in range(n):
        rng = np.random.default_rng(derive_seed(seed, "synth", i))
        target = (Label.E, Label.C, Label.N)[i % 3]
        units = _plan_units(target, lexicon, rng)
        premise, premise_spans = _assemble_side(units, Side.PREMISE)
        hypothesis, hypothesis_spans = _assemble_side(units, Side.HYPOTHESIS)
        sample_id = f"{id_prefix}-{i:0{width}d}"
        sample = Sample(id=sample_id, premise=premise, hypothesis=hypothesis, label=target)

        gold_pairs = tuple(
            GoldPair(premise_spans[k], hypothesis_spans[k], units[k].relation)
            for k in range(len(units))
        )
        synth_samples.append(SynthSample(sample=sample, gold_pairs=gold_pairs))

        units_ann = []
        for k, unit in enumerate(units):
            if unit.premise_form is not None and unit.hypothesis_form is not None:
                units_ann.append(AnnotationUnit(
                    label=UnitLabel(unit.relation.value),
                    premise_span=premise_spans[k], hypothesis_span=hypothesis_spans[k]))
            elif unit.premise_form is not None:
                units_ann.append(AnnotationUnit(label=UnitLabel.UP,
                                                premise_span=premise_spans[k]))
            else:
                units_ann.append(AnnotationUnit(label=UnitLabel.UH,
                                                hypothesis_span=hypothesis_spans[k]))
        annotations.append(AnnotationRecord(sample_id=sample_id, annotator_id="gold",
                                            units=tuple(units_ann)))

        emb_rng = np.random.default_rng(derive_seed(seed, "emb", i))
        embedding_records.extend(_sample_embeddings(
            sample_id, target, units, premise_spans, hypothesis_spans, dim, emb_rng))
    return synth_samples, annotations, embedding_records, dim


def planted_label_accuracy(predictions: list[PredictionRecord],
                           synth_samples: list[SynthSample]) -> float:
    """Share of planted relations whose pair was found and labeled correctly.

    A planted pair counts as correct only if the prediction contains a
    pair with the same spans and alignment status whose argmax label
    matches the planted relation; misaligned pairs count as wrong.
    """
    pred_by_id = {p.sample_id: p for p in predictions}
    total = 0
    correct = 0
    for ss in synth_samples:
        record = pred_by_id.get(ss.sample.id)
        predicted: dict[tuple, Label] = {}
        if record is not None:
            for pp in record.pairs:
                p_span = pp.pair.premise_phrase.span if pp.pair.premise_phrase else None
                h_span = pp.pair.hypothesis_phrase.span if pp.pair.hypothesis_phrase else None
                predicted[(p_span, h_span)] = pp.label
        for gp in ss.gold_pairs:
            total += 1
            if predicted.get((gp.premise_span, gp.hypothesis_span)) == gp.relation:
                correct += 1
    if total == 0:
        raise ValidationError("no planted pairs to score")
    return correct / total
