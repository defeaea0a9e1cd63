"""Word-index F-scores: why position matters and sides multiply.

Run with:  python demos/04_evaluation_metrics.py
"""

from phrasenli.corpus import (
    AnnotationRecord,
    AnnotationUnit,
    Label,
    PairPrediction,
    PhrasalPrediction,
    Phrase,
    PhraseKind,
    PhrasePair,
    PredictionRecord,
    Side,
    UnitLabel,
)
from phrasenli.evaluation import count_sample, score, sum_counts
from phrasenli.induction import induce

# Premise:    "A kid in red is playing in a garden"       (indexes 0..8)
# Hypothesis: "A child in red is watching TV in the bedroom"  (0..9)
# An annotator highlighted "A kid in red" ↔ "A child in red" as
# Entailment: token indexes 0..3 on both sides.
gold = AnnotationRecord(
    sample_id="kid", annotator_id="a1",
    units=(AnnotationUnit(label=UnitLabel.E, premise_span=(0, 4),
                          hypothesis_span=(0, 4)),),
)


def prediction_with(pairs):
    """Aligned E-labeled pairs over the given premise/hypothesis spans."""
    labeled = []
    for p_span, h_span in pairs:
        pair = PhrasePair(
            premise_phrase=Phrase(Side.PREMISE, p_span, PhraseKind.NP),
            hypothesis_phrase=Phrase(Side.HYPOTHESIS, h_span, PhraseKind.NP),
            aligned=True)
        labeled.append(PairPrediction(pair=pair,
                                      prediction=PhrasalPrediction((0.8, 0.1, 0.1)),
                                      label=Label.E))
    induction = induce([(pp.prediction, True) for pp in labeled])
    return PredictionRecord(sample_id="kid", pairs=tuple(labeled),
                            sentence_scores=induction,
                            sentence_label=induction.argmax())


def f_e_for(pairs):
    return score([sum_counts([count_sample(prediction_with(pairs), gold)])]).f_e


# Case 1: the model aligned "in a garden" with "in the bedroom" and called
# it Entailment.  The word "in" appears inside the gold highlight too, but
# at different token indexes, so there are zero hits: scoring by index
# (not by word) refuses credit for coincidental vocabulary overlap.
print("E pair 'in a garden' ↔ 'in the bedroom':", f_e_for([((6, 9), (7, 10))]))

# Case 2: "a kid in red" ↔ "watching TV".  The premise side is a perfect
# hit, the hypothesis side a complete miss.  Precision and recall are
# geometric means across sides, so one wrong side zeroes the category:
# reasoning must be right in both sentences at once.
print("E pair 'a kid in red' ↔ 'watching TV': ", f_e_for([((0, 4), (5, 7))]))

# Case 3: the model split the highlight into two pairs, "a kid" ↔
# "a child" and "in red" ↔ "in red".  Segmentation differs from the
# annotator but the covered indexes coincide exactly, so the score is a
# full 1.0: the metric is agnostic to phrase granularity.
print("E pairs 'a kid|in red' ↔ 'a child|in red':",
      f_e_for([((0, 2), (0, 2)), ((2, 4), (2, 4))]))

# Corpus scores pool raw counts first (micro-average): a verbose sample
# with many wrong predictions weighs in proportionally, instead of
# averaging away behind per-sample scores.
