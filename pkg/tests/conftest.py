import numpy as np
import pytest

from phrasenli.corpus import (
    Label,
    PairPrediction,
    PhrasalPrediction,
    Phrase,
    PhraseKind,
    PhrasePair,
    PredictionRecord,
    Sample,
    Sentence,
    Side,
    Token,
)
from phrasenli.induction import induce


def tok(text, pos, tag=""):
    return Token(text=text, pos=pos, tag=tag or pos)


def sentence(*specs, noun_chunks=None):
    """Build a Sentence from (text, pos[, tag]) tuples."""
    tokens = tuple(tok(*spec) for spec in specs)
    return Sentence(tokens=tokens, noun_chunks=noun_chunks)


def showing_off_sentence():
    """The showing-off sentence with its standard tags and noun chunks."""
    return sentence(
        ("The", "DET", "DT"), ("woman", "NOUN", "NN"), ("is", "AUX", "VBZ"),
        ("showing", "VERB", "VBG"), ("off", "ADP", "RP"), ("her", "PRON", "PRP$"),
        ("blue", "ADJ", "JJ"), ("dog", "NOUN", "NN"), ("at", "ADP", "IN"),
        ("the", "DET", "DT"), ("playground", "NOUN", "NN"),
        noun_chunks=((0, 2), (5, 8), (9, 11)),
    )


def words(*texts, pos="NOUN", tag="NN"):
    return sentence(*((t, pos, tag) for t in texts))


def make_sample(sample_id="s1", premise=None, hypothesis=None, label=None):
    return Sample(
        id=sample_id,
        premise=premise if premise is not None else words("a", "b", "c"),
        hypothesis=hypothesis if hypothesis is not None else words("x", "y"),
        label=label,
    )


def phrase(side, start, end, kind=PhraseKind.NP):
    return Phrase(side=Side(side), span=(start, end), kind=kind)


def probs_for(label, strength=0.8):
    rest = (1.0 - strength) / 2.0
    order = {Label.E: 0, Label.C: 1, Label.N: 2}[Label(label)]
    row = [rest, rest, rest]
    row[order] = strength
    return tuple(row)


def make_prediction_record(sample_id, labeled_pairs):
    """Build a consistent PredictionRecord.

    ``labeled_pairs`` is a list of (premise_span | None, hypothesis_span
    | None, label) triples; spans present on both sides mean an aligned
    pair.
    """
    pair_predictions = []
    pair_inputs = []
    for p_span, h_span, label in labeled_pairs:
        pair = PhrasePair(
            premise_phrase=None if p_span is None else phrase("premise", *p_span),
            hypothesis_phrase=None if h_span is None else phrase("hypothesis", *h_span),
            aligned=p_span is not None and h_span is not None,
        )
        prediction = PhrasalPrediction(probs_for(label))
        pair_predictions.append(PairPrediction(pair=pair, prediction=prediction,
                                               label=Label(label)))
        pair_inputs.append((prediction, pair.aligned))
    induction = induce(pair_inputs)
    return PredictionRecord(
        sample_id=sample_id,
        pairs=tuple(pair_predictions),
        sentence_scores=induction,
        sentence_label=induction.argmax(),
    )


@pytest.fixture
def rng():
    return np.random.default_rng(12345)
