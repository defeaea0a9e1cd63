"""Word-index F-scores for phrasal reasoning quality.

Predictions and gold annotations are compared as sets of token indexes,
separately per side and per category (E, C, N over aligned pairs; UP and
UH for phrases left without a partner on the premise or hypothesis side).
Index sets rule out accidental hits on the same word at a different
position.  Counts pool over the corpus (micro-average); precision and
recall of two-sided categories take the geometric mean across sides, so
reasoning must be right in both sentences to score.  With several
annotators, per-annotator F-scores are averaged arithmetically.
"""

from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

from .corpus import (
    AnnotationRecord,
    EvalReport,
    Label,
    PredictionRecord,
    Sample,
    UnitLabel,
    ValidationError,
)

CATEGORIES = (UnitLabel.E, UnitLabel.C, UnitLabel.N, UnitLabel.UP, UnitLabel.UH)
TWO_SIDED = (UnitLabel.E, UnitLabel.C, UnitLabel.N)


@dataclass(frozen=True)
class CategoryCounts:
    category: UnitLabel
    hits_premise: int = 0
    pred_premise: int = 0
    gold_premise: int = 0
    hits_hypothesis: int = 0
    pred_hypothesis: int = 0
    gold_hypothesis: int = 0

    def __post_init__(self):
        for name in ("hits_premise", "pred_premise", "gold_premise",
                     "hits_hypothesis", "pred_hypothesis", "gold_hypothesis"):
            if getattr(self, name) < 0:
                raise ValidationError(f"{name} must be non-negative")
        if self.hits_premise > min(self.pred_premise, self.gold_premise):
            raise ValidationError("premise hits exceed predicted or gold counts")
        if self.hits_hypothesis > min(self.pred_hypothesis, self.gold_hypothesis):
            raise ValidationError("hypothesis hits exceed predicted or gold counts")

    def __add__(self, other: "CategoryCounts") -> "CategoryCounts":
        if self.category != other.category:
            raise ValidationError("cannot add counts of different categories")
        return CategoryCounts(
            category=self.category,
            hits_premise=self.hits_premise + other.hits_premise,
            pred_premise=self.pred_premise + other.pred_premise,
            gold_premise=self.gold_premise + other.gold_premise,
            hits_hypothesis=self.hits_hypothesis + other.hits_hypothesis,
            pred_hypothesis=self.pred_hypothesis + other.pred_hypothesis,
            gold_hypothesis=self.gold_hypothesis + other.gold_hypothesis,
        )


IndexSets = dict[UnitLabel, tuple[set[int], set[int]]]


def _empty_sets() -> IndexSets:
    return {c: (set(), set()) for c in CATEGORIES}


def prediction_index_sets(record: PredictionRecord) -> IndexSets:
    """Token-index sets per category from one prediction record.

    E/C/N collect the spans of aligned pairs by their argmax label; the
    one-sided pairs feed UP and UH regardless of their predicted label.
    """
    sets = _empty_sets()
    for pp in record.pairs:
        pair = pp.pair
        if pair.aligned:
            cat = UnitLabel(pp.label.value)
            p_span = pair.premise_phrase.span
            h_span = pair.hypothesis_phrase.span
            sets[cat][0].update(range(p_span[0], p_span[1]))
            sets[cat][1].update(range(h_span[0], h_span[1]))
        elif pair.premise_phrase is not None:
            span = pair.premise_phrase.span
            sets[UnitLabel.UP][0].update(range(span[0], span[1]))
        else:
            span = pair.hypothesis_phrase.span
            sets[UnitLabel.UH][1].update(range(span[0], span[1]))
    return sets


def annotation_index_sets(record: AnnotationRecord) -> IndexSets:
    sets = _empty_sets()
    for unit in record.units:
        if unit.premise_span is not None:
            sets[unit.label][0].update(range(unit.premise_span[0], unit.premise_span[1]))
        if unit.hypothesis_span is not None:
            sets[unit.label][1].update(range(unit.hypothesis_span[0], unit.hypothesis_span[1]))
    return sets


def counts_from_sets(pred: IndexSets, gold: IndexSets) -> list[CategoryCounts]:
    counts = []
    for cat in CATEGORIES:
        pred_p, pred_h = pred[cat]
        gold_p, gold_h = gold[cat]
        counts.append(CategoryCounts(
            category=cat,
            hits_premise=len(pred_p & gold_p),
            pred_premise=len(pred_p),
            gold_premise=len(gold_p),
            hits_hypothesis=len(pred_h & gold_h),
            pred_hypothesis=len(pred_h),
            gold_hypothesis=len(gold_h),
        ))
    return counts


def count_sample(prediction: PredictionRecord,
                 annotation: AnnotationRecord) -> list[CategoryCounts]:
    """Raw hit/predicted/gold token counts for one sample and one annotator."""
    if prediction.sample_id != annotation.sample_id:
        raise ValidationError(
            f"sample mismatch: prediction {prediction.sample_id!r} vs "
            f"annotation {annotation.sample_id!r}")
    return counts_from_sets(prediction_index_sets(prediction),
                            annotation_index_sets(annotation))


def sum_counts(counts: Iterable[Sequence[CategoryCounts]]) -> dict[UnitLabel, CategoryCounts]:
    total = {c: CategoryCounts(category=c) for c in CATEGORIES}
    for per_sample in counts:
        for cc in per_sample:
            total[cc.category] = total[cc.category] + cc
    return total


def _ratio(hits: int, denom: int) -> float:
    return hits / denom if denom > 0 else 0.0


def _f_score(precision: float, recall: float) -> float:
    if precision + recall == 0.0:
        return 0.0
    return 2.0 * precision * recall / (precision + recall)


def category_f(counts: CategoryCounts) -> float:
    """F-score of one pooled category; zero denominators count as zero."""
    if counts.category in TWO_SIDED:
        p = (_ratio(counts.hits_premise, counts.pred_premise)
             * _ratio(counts.hits_hypothesis, counts.pred_hypothesis)) ** 0.5
        r = (_ratio(counts.hits_premise, counts.gold_premise)
             * _ratio(counts.hits_hypothesis, counts.gold_hypothesis)) ** 0.5
    elif counts.category == UnitLabel.UP:
        p = _ratio(counts.hits_premise, counts.pred_premise)
        r = _ratio(counts.hits_premise, counts.gold_premise)
    else:
        p = _ratio(counts.hits_hypothesis, counts.pred_hypothesis)
        r = _ratio(counts.hits_hypothesis, counts.gold_hypothesis)
    return _f_score(p, r)


def report_from_f(f_by_category: Mapping[UnitLabel, float],
                  sentence_accuracy: float | None = None) -> EvalReport:
    f_values = [f_by_category[c] for c in CATEGORIES]
    gm = 1.0
    for f in f_values:
        gm *= f
    gm = gm ** (1.0 / len(f_values))
    am = sum(f_values) / len(f_values)
    return EvalReport(f_e=f_values[0], f_c=f_values[1], f_n=f_values[2],
                      f_up=f_values[3], f_uh=f_values[4], gm=gm, am=am,
                      sentence_accuracy=sentence_accuracy)


def score(counts_per_annotator: Sequence[Mapping[UnitLabel, CategoryCounts]],
          sentence_accuracy: float | None = None) -> EvalReport:
    """Per-annotator F-scores from pooled counts, arithmetically averaged."""
    if not counts_per_annotator:
        raise ValidationError("scoring requires counts from at least one annotator")
    averaged: dict[UnitLabel, float] = {}
    for cat in CATEGORIES:
        per_annotator = [category_f(counts[cat]) for counts in counts_per_annotator]
        averaged[cat] = sum(per_annotator) / len(per_annotator)
    return report_from_f(averaged, sentence_accuracy)


def evaluate(predictions: Sequence[PredictionRecord],
             annotations: Sequence[AnnotationRecord],
             samples: Sequence[Sample] | None = None) -> EvalReport:
    """Corpus-level report: micro-averaged per annotator, then averaged.

    The prediction records define the evaluation universe; annotations
    for unpredicted samples are ignored, and each annotator is compared
    on the annotated samples that remain.  When labeled samples are
    supplied, sentence accuracy is included.
    """
    pred_by_id = {p.sample_id: p for p in predictions}
    by_annotator: dict[str, list[AnnotationRecord]] = defaultdict(list)
    for rec in annotations:
        if rec.sample_id in pred_by_id:
            by_annotator[rec.annotator_id].append(rec)
    if not by_annotator:
        raise ValidationError("no annotation records overlap the predictions")

    counts_per_annotator = []
    for annotator_id in sorted(by_annotator):
        per_sample = [count_sample(pred_by_id[rec.sample_id], rec)
                      for rec in by_annotator[annotator_id]]
        counts_per_annotator.append(sum_counts(per_sample))

    accuracy = None
    if samples is not None:
        accuracy = sentence_accuracy(predictions, samples)
    return score(counts_per_annotator, sentence_accuracy=accuracy)


def sentence_accuracy(predictions: Sequence[PredictionRecord],
                      samples: Sequence[Sample]) -> float:
    """Fraction of samples whose predicted sentence label matches the gold one."""
    if not samples:
        raise ValidationError("sentence accuracy needs at least one sample")
    pred_by_id = {p.sample_id: p for p in predictions}
    correct = 0
    for sample in samples:
        if sample.label is None:
            raise ValidationError(f"sample {sample.id!r} has no gold label")
        if sample.id not in pred_by_id:
            raise ValidationError(f"missing prediction for sample {sample.id!r}")
        if pred_by_id[sample.id].sentence_label == sample.label:
            correct += 1
    return correct / len(samples)


def agreement(annotations: Sequence[AnnotationRecord]) -> EvalReport:
    """Inter-annotator report: each ordered pair scores one side as the system.

    Alignment status is read from the labels themselves (E/C/N units act
    as aligned pairs, UP/UH as one-sided phrases); the F-scores of all
    ordered annotator pairs are averaged.
    """
    by_annotator: dict[str, dict[str, AnnotationRecord]] = defaultdict(dict)
    for rec in annotations:
        by_annotator[rec.annotator_id][rec.sample_id] = rec
    annotators = sorted(by_annotator)
    if len(annotators) < 2:
        raise ValidationError("agreement requires at least two annotators")

    pair_counts = []
    for system in annotators:
        for gold in annotators:
            if system == gold:
                continue
            shared = sorted(set(by_annotator[system]) & set(by_annotator[gold]))
            if not shared:
                continue
            per_sample = []
            for sample_id in shared:
                pred_sets = annotation_index_sets(by_annotator[system][sample_id])
                gold_sets = annotation_index_sets(by_annotator[gold][sample_id])
                per_sample.append(counts_from_sets(pred_sets, gold_sets))
            pair_counts.append(sum_counts(per_sample))
    if not pair_counts:
        raise ValidationError("no two annotators share a sample")
    return score(pair_counts)
