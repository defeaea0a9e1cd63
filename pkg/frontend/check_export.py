#!/usr/bin/env python3
"""Validate a UI export against the Python evaluator.

Reads the fixture written by `npm test` (tests/roundtrip.test.ts), checks
it through the annotation reader and bounds validator, then scores the
annotated spans as if a model had predicted exactly them: F_E must be 1.

Usage: python check_export.py
"""

import sys
from pathlib import Path

from phrasenli.corpus import (
    Label,
    PairPrediction,
    PhrasalPrediction,
    Phrase,
    PhraseKind,
    PhrasePair,
    PredictionRecord,
    Side,
    UnitLabel,
    read_annotations,
    read_corpus,
    validate_annotations,
)
from phrasenli.evaluation import evaluate
from phrasenli.induction import induce

FIXTURES = Path(__file__).parent / "fixtures"


def prediction_from_annotation(record):
    """Treat the annotated units as a model's aligned pair predictions."""
    pairs = []
    for unit in record.units:
        if unit.label in (UnitLabel.UP, UnitLabel.UH):
            pair = PhrasePair(
                premise_phrase=(Phrase(Side.PREMISE, unit.premise_span, PhraseKind.NP)
                                if unit.premise_span else None),
                hypothesis_phrase=(Phrase(Side.HYPOTHESIS, unit.hypothesis_span,
                                          PhraseKind.NP)
                                   if unit.hypothesis_span else None),
                aligned=False)
            label = Label.E if unit.label == UnitLabel.UP else Label.N
        else:
            pair = PhrasePair(
                premise_phrase=Phrase(Side.PREMISE, unit.premise_span, PhraseKind.NP),
                hypothesis_phrase=Phrase(Side.HYPOTHESIS, unit.hypothesis_span,
                                         PhraseKind.NP),
                aligned=True)
            label = Label(unit.label.value)
        probs = {Label.E: (0.8, 0.1, 0.1), Label.C: (0.1, 0.8, 0.1),
                 Label.N: (0.1, 0.1, 0.8)}[label]
        pairs.append(PairPrediction(pair=pair, prediction=PhrasalPrediction(probs),
                                    label=label))
    induction = induce([(pp.prediction, pp.pair.aligned) for pp in pairs])
    return PredictionRecord(sample_id=record.sample_id, pairs=tuple(pairs),
                            sentence_scores=induction,
                            sentence_label=induction.argmax())


def main() -> int:
    annotation_path = FIXTURES / "kid-in-red.annotations.json"
    corpus_path = FIXTURES / "kid-in-red.corpus.jsonl"
    if not annotation_path.exists():
        print("fixture missing; run `npm test` first", file=sys.stderr)
        return 1

    annotations = read_annotations(annotation_path)
    samples = read_corpus(corpus_path)
    validate_annotations(annotations, samples)
    print(f"validated {len(annotations)} annotation record(s) "
          f"against {len(samples)} sample(s)")

    predictions = [prediction_from_annotation(rec) for rec in annotations]
    report = evaluate(predictions, annotations)
    print(f"self-score: F_E={report.f_e}  GM={report.gm}  AM={report.am}")
    if report.f_e != 1.0:
        print("FAIL: expected F_E = 1.0", file=sys.stderr)
        return 1
    print("PASS: UI export round-trips through the evaluator with F_E = 1")
    return 0


if __name__ == "__main__":
    sys.exit(main())
