"""Data model and file formats shared by the whole pipeline.

Every record type is an immutable dataclass that validates its invariants on
construction.  Files are JSON based: corpora, predictions, and phrase lists
are line-delimited (one record per line, optional ``_meta`` header on the
first line); annotation files and reports are single JSON documents.  All
spans are half-open token-index intervals ``[start, end)``.
"""

from __future__ import annotations

import json
import os
import tempfile
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping, Sequence


class ValidationError(ValueError):
    """An in-memory record violates one of its invariants."""


class ParseError(ValueError):
    """A file could not be decoded into records."""

    def __init__(self, message: str, path: str | os.PathLike | None = None,
                 line: int | None = None):
        self.path = str(path) if path is not None else None
        self.line = line
        where = ""
        if self.path is not None:
            where = f"{self.path}: "
        if line is not None:
            where += f"line {line}: "
        super().__init__(where + message)


class Label(str, Enum):
    """Sentence-level and phrasal inference labels."""

    E = "E"
    C = "C"
    N = "N"


class UnitLabel(str, Enum):
    """Annotation labels: the three pair labels plus the two unaligned ones."""

    E = "E"
    C = "C"
    N = "N"
    UP = "UP"  # unaligned phrase in the premise
    UH = "UH"  # unaligned phrase in the hypothesis


class Side(str, Enum):
    PREMISE = "premise"
    HYPOTHESIS = "hypothesis"


class PhraseKind(str, Enum):
    NP = "NP"
    PP = "PP"
    VP = "VP"
    OTHER = "Other"


#: Universal coarse POS tags accepted in corpus files.
UNIVERSAL_POS_TAGS = frozenset({
    "ADJ", "ADP", "ADV", "AUX", "CCONJ", "DET", "INTJ", "NOUN", "NUM",
    "PART", "PRON", "PROPN", "PUNCT", "SCONJ", "SYM", "VERB", "X",
})

#: Sentence label words used in corpus files.
LABEL_TO_WORD = {Label.E: "entailment", Label.C: "contradiction", Label.N: "neutral"}
WORD_TO_LABEL = {w: l for l, w in LABEL_TO_WORD.items()}

Span = tuple[int, int]


def _check_span(span: Sequence[int], what: str) -> Span:
    if len(span) != 2:
        raise ValidationError(f"{what} must be a [start, end) pair, got {span!r}")
    start, end = int(span[0]), int(span[1])
    if start < 0 or start >= end:
        raise ValidationError(f"{what} must satisfy 0 <= start < end, got [{start}, {end})")
    return (start, end)


def spans_overlap(a: Span, b: Span) -> bool:
    return a[0] < b[1] and b[0] < a[1]


@dataclass(frozen=True)
class Token:
    text: str
    pos: str  # coarse tag, universal set
    tag: str  # fine tag, e.g. IN, RP

    def __post_init__(self):
        if not self.text:
            raise ValidationError("token text must be non-empty")
        if self.pos not in UNIVERSAL_POS_TAGS:
            raise ValidationError(f"unknown coarse POS tag {self.pos!r}")


@dataclass(frozen=True)
class Sentence:
    tokens: tuple[Token, ...]
    noun_chunks: tuple[Span, ...] | None = None

    def __post_init__(self):
        object.__setattr__(self, "tokens", tuple(self.tokens))
        if self.noun_chunks is not None:
            chunks = tuple(_check_span(c, "noun chunk") for c in self.noun_chunks)
            n = len(self.tokens)
            for c in chunks:
                if c[1] > n:
                    raise ValidationError(f"noun chunk {c} exceeds sentence length {n}")
            for i, a in enumerate(chunks):
                for b in chunks[i + 1:]:
                    if spans_overlap(a, b):
                        raise ValidationError(f"noun chunks {a} and {b} overlap")
            object.__setattr__(self, "noun_chunks", chunks)

    def __len__(self) -> int:
        return len(self.tokens)

    def text(self, span: Span | None = None) -> str:
        toks = self.tokens if span is None else self.tokens[span[0]:span[1]]
        return " ".join(t.text for t in toks)


@dataclass(frozen=True)
class Sample:
    id: str
    premise: Sentence
    hypothesis: Sentence
    label: Label | None = None

    def __post_init__(self):
        if not self.id:
            raise ValidationError("sample id must be non-empty")

    def sentence(self, side: Side) -> Sentence:
        return self.premise if side == Side.PREMISE else self.hypothesis


@dataclass(frozen=True)
class Phrase:
    side: Side
    span: Span
    kind: PhraseKind

    def __post_init__(self):
        object.__setattr__(self, "span", _check_span(self.span, "phrase span"))


@dataclass(frozen=True)
class PhrasePair:
    """An aligned premise/hypothesis pair, or a one-sided phrase.

    A one-sided pair stands for a phrase matched against the learnable
    EMPTY placeholder on the missing side.
    """

    premise_phrase: Phrase | None
    hypothesis_phrase: Phrase | None
    aligned: bool

    def __post_init__(self):
        if self.aligned:
            if self.premise_phrase is None or self.hypothesis_phrase is None:
                raise ValidationError("aligned pair must carry both phrases")
        elif (self.premise_phrase is None) == (self.hypothesis_phrase is None):
            raise ValidationError("unaligned pair must carry exactly one phrase")


@dataclass(frozen=True)
class PhrasalPrediction:
    """Probability distribution over (E, C, N) for one phrase pair."""

    probs: tuple[float, float, float]

    def __post_init__(self):
        probs = tuple(float(p) for p in self.probs)
        if len(probs) != 3:
            raise ValidationError("phrasal prediction needs exactly 3 probabilities")
        if not all(0.0 < p < 1.0 for p in probs):
            raise ValidationError(f"probabilities must lie strictly in (0, 1): {probs}")
        if abs(sum(probs) - 1.0) > 1e-12:
            raise ValidationError(f"probabilities must sum to 1 within 1e-12: {probs}")
        object.__setattr__(self, "probs", probs)

    def argmax(self) -> Label:
        best = max(range(3), key=lambda i: (self.probs[i], -i))
        return (Label.E, Label.C, Label.N)[best]


@dataclass(frozen=True)
class SentenceInduction:
    """Unnormalized sentence scores and their normalized probabilities."""

    s_e: float
    s_c: float
    s_n: float
    z: float
    probs: tuple[float, float, float]

    def __post_init__(self):
        probs = tuple(float(p) for p in self.probs)
        scores = (float(self.s_e), float(self.s_c), float(self.s_n))
        if not all(0.0 <= s <= 1.0 for s in scores):
            raise ValidationError(f"scores must lie in [0, 1]: {scores}")
        if self.z <= 0.0:
            raise ValidationError("normalizer z must be positive")
        if abs(self.z - sum(scores)) > 1e-9 * max(1.0, self.z):
            raise ValidationError("z must equal s_e + s_c + s_n")
        for s, p in zip(scores, probs):
            if abs(p - s / self.z) > 1e-9:
                raise ValidationError("probs must equal scores divided by z")
        if abs(sum(probs) - 1.0) > 1e-12:
            raise ValidationError(f"sentence probs must sum to 1 within 1e-12: {probs}")
        object.__setattr__(self, "probs", probs)

    def argmax(self) -> Label:
        best = max(range(3), key=lambda i: (self.probs[i], -i))
        return (Label.E, Label.C, Label.N)[best]


@dataclass(frozen=True)
class PairPrediction:
    pair: PhrasePair
    prediction: PhrasalPrediction
    label: Label

    def __post_init__(self):
        if self.label != self.prediction.argmax():
            raise ValidationError("pair label must be the argmax of its probabilities")


@dataclass(frozen=True)
class PredictionRecord:
    sample_id: str
    pairs: tuple[PairPrediction, ...]
    sentence_scores: SentenceInduction
    sentence_label: Label

    def __post_init__(self):
        object.__setattr__(self, "pairs", tuple(self.pairs))
        if self.sentence_label != self.sentence_scores.argmax():
            raise ValidationError(
                "sentence label must be the argmax of the normalized sentence probabilities")


@dataclass(frozen=True)
class AnnotationUnit:
    label: UnitLabel
    premise_span: Span | None = None
    hypothesis_span: Span | None = None

    def __post_init__(self):
        if self.premise_span is not None:
            object.__setattr__(self, "premise_span", _check_span(self.premise_span, "premise span"))
        if self.hypothesis_span is not None:
            object.__setattr__(
                self, "hypothesis_span", _check_span(self.hypothesis_span, "hypothesis span"))
        if self.label in (UnitLabel.E, UnitLabel.C, UnitLabel.N):
            if self.premise_span is None or self.hypothesis_span is None:
                raise ValidationError(f"label {self.label.value} requires spans on both sides")
        elif self.label == UnitLabel.UP:
            if self.premise_span is None or self.hypothesis_span is not None:
                raise ValidationError("label UP requires a premise span only")
        else:  # UH
            if self.hypothesis_span is None or self.premise_span is not None:
                raise ValidationError("label UH requires a hypothesis span only")


@dataclass(frozen=True)
class AnnotationRecord:
    sample_id: str
    annotator_id: str
    units: tuple[AnnotationUnit, ...]

    def __post_init__(self):
        object.__setattr__(self, "units", tuple(self.units))
        for side_attr in ("premise_span", "hypothesis_span"):
            spans = [getattr(u, side_attr) for u in self.units if getattr(u, side_attr) is not None]
            for i, a in enumerate(spans):
                for b in spans[i + 1:]:
                    if spans_overlap(a, b):
                        raise ValidationError(
                            f"{side_attr.split('_')[0]} spans {a} and {b} overlap "
                            f"in record for sample {self.sample_id!r}")


@dataclass(frozen=True)
class EvalReport:
    """Per-category F-scores with their geometric and arithmetic means."""

    f_e: float
    f_c: float
    f_n: float
    f_up: float
    f_uh: float
    gm: float
    am: float
    sentence_accuracy: float | None = None

    def __post_init__(self):
        for name in ("f_e", "f_c", "f_n", "f_up", "f_uh", "gm", "am"):
            v = getattr(self, name)
            if not 0.0 <= v <= 1.0:
                raise ValidationError(f"{name} must lie in [0, 1], got {v}")

    def f_scores(self) -> tuple[float, float, float, float, float]:
        return (self.f_e, self.f_c, self.f_n, self.f_up, self.f_uh)


# ---------------------------------------------------------------------------
# Serialization
# ---------------------------------------------------------------------------

META_KEY = "_meta"


def atomic_write_text(path: str | os.PathLike, text: str) -> None:
    """Write ``text`` to ``path`` via a temp file and rename."""
    path = os.fspath(path)
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", suffix=".part")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _dump_line(obj) -> str:
    return json.dumps(obj, ensure_ascii=False, separators=(", ", ": "))


def _meta_line(meta: Mapping | None) -> list[str]:
    return [_dump_line({META_KEY: dict(meta)})] if meta is not None else []


def _iter_records(path, lines: Iterable[str]):
    """Yield (line_number, parsed_object), skipping a leading header line."""
    for i, raw in enumerate(lines, start=1):
        raw = raw.strip()
        if not raw:
            continue
        try:
            obj = json.loads(raw)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON ({exc.msg})", path=path, line=i) from exc
        if i == 1 and isinstance(obj, dict) and META_KEY in obj:
            continue
        yield i, obj


def _require(obj: Mapping, key: str, path, line):
    if key not in obj:
        raise ParseError(f"missing field {key!r}", path=path, line=line)
    return obj[key]


def _token_to_obj(t: Token) -> dict:
    return {"text": t.text, "pos": t.pos, "tag": t.tag}


def _sentence_to_obj(s: Sentence) -> dict:
    obj = {"tokens": [_token_to_obj(t) for t in s.tokens]}
    if s.noun_chunks is not None:
        obj["noun_chunks"] = [[a, b] for a, b in s.noun_chunks]
    return obj


def _sentence_from_obj(obj: Mapping, path, line) -> Sentence:
    tokens = []
    for t in _require(obj, "tokens", path, line):
        tokens.append(Token(
            text=_require(t, "text", path, line),
            pos=_require(t, "pos", path, line),
            tag=_require(t, "tag", path, line),
        ))
    chunks = obj.get("noun_chunks")
    return Sentence(tuple(tokens), None if chunks is None else tuple((c[0], c[1]) for c in chunks))


def sample_to_obj(sample: Sample) -> dict:
    obj = {"id": sample.id}
    if sample.label is not None:
        obj["label"] = LABEL_TO_WORD[sample.label]
    obj["premise"] = _sentence_to_obj(sample.premise)
    obj["hypothesis"] = _sentence_to_obj(sample.hypothesis)
    return obj


def sample_from_obj(obj: Mapping, path=None, line=None) -> Sample:
    label = None
    if "label" in obj and obj["label"] is not None:
        word = obj["label"]
        if word not in WORD_TO_LABEL:
            raise ParseError(f"unknown label {word!r}", path=path, line=line)
        label = WORD_TO_LABEL[word]
    try:
        return Sample(
            id=str(_require(obj, "id", path, line)),
            premise=_sentence_from_obj(_require(obj, "premise", path, line), path, line),
            hypothesis=_sentence_from_obj(_require(obj, "hypothesis", path, line), path, line),
            label=label,
        )
    except ValidationError as exc:
        raise ParseError(str(exc), path=path, line=line) from exc


def read_corpus(path: str | os.PathLike) -> list[Sample]:
    """Read a line-delimited corpus file, validating unique sample ids."""
    samples: list[Sample] = []
    seen: set[str] = set()
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, obj in _iter_records(path, fh):
            sample = sample_from_obj(obj, path=path, line=line_no)
            if sample.id in seen:
                raise ValidationError(f"duplicate sample id {sample.id!r} at line {line_no}")
            seen.add(sample.id)
            samples.append(sample)
    return samples


def write_corpus(samples: Sequence[Sample], path, meta: Mapping | None = None) -> None:
    lines = _meta_line(meta) + [_dump_line(sample_to_obj(s)) for s in samples]
    atomic_write_text(path, "\n".join(lines) + ("\n" if lines else ""))


def _phrase_to_obj(p: Phrase) -> dict:
    return {"side": p.side.value, "span": [p.span[0], p.span[1]], "kind": p.kind.value}


def phrase_from_obj(obj: Mapping, path=None, line=None) -> Phrase:
    try:
        return Phrase(
            side=Side(_require(obj, "side", path, line)),
            span=tuple(_require(obj, "span", path, line)),
            kind=PhraseKind(_require(obj, "kind", path, line)),
        )
    except (ValueError, ValidationError) as exc:
        raise ParseError(f"bad phrase record: {exc}", path=path, line=line) from exc


def _pair_to_obj(pp: PairPrediction) -> dict:
    pair = pp.pair
    return {
        "premise_phrase": None if pair.premise_phrase is None else _phrase_to_obj(pair.premise_phrase),
        "hypothesis_phrase": (None if pair.hypothesis_phrase is None
                              else _phrase_to_obj(pair.hypothesis_phrase)),
        "aligned": pair.aligned,
        "probs": [float(p) for p in pp.prediction.probs],
        "label": pp.label.value,
    }


def _pair_from_obj(obj: Mapping, path, line) -> PairPrediction:
    prem = obj.get("premise_phrase")
    hyp = obj.get("hypothesis_phrase")
    try:
        pair = PhrasePair(
            premise_phrase=None if prem is None else phrase_from_obj(prem, path, line),
            hypothesis_phrase=None if hyp is None else phrase_from_obj(hyp, path, line),
            aligned=bool(_require(obj, "aligned", path, line)),
        )
        return PairPrediction(
            pair=pair,
            prediction=PhrasalPrediction(tuple(_require(obj, "probs", path, line))),
            label=Label(_require(obj, "label", path, line)),
        )
    except ValidationError as exc:
        raise ParseError(str(exc), path=path, line=line) from exc


def prediction_to_obj(rec: PredictionRecord) -> dict:
    ind = rec.sentence_scores
    return {
        "sample_id": rec.sample_id,
        "pairs": [_pair_to_obj(p) for p in rec.pairs],
        "sentence_scores": {
            "s_e": float(ind.s_e), "s_c": float(ind.s_c), "s_n": float(ind.s_n),
            "z": float(ind.z), "probs": [float(p) for p in ind.probs],
        },
        "sentence_label": rec.sentence_label.value,
    }


def prediction_from_obj(obj: Mapping, path=None, line=None) -> PredictionRecord:
    scores = _require(obj, "sentence_scores", path, line)
    try:
        induction = SentenceInduction(
            s_e=float(_require(scores, "s_e", path, line)),
            s_c=float(_require(scores, "s_c", path, line)),
            s_n=float(_require(scores, "s_n", path, line)),
            z=float(_require(scores, "z", path, line)),
            probs=tuple(_require(scores, "probs", path, line)),
        )
        return PredictionRecord(
            sample_id=str(_require(obj, "sample_id", path, line)),
            pairs=tuple(_pair_from_obj(p, path, line) for p in _require(obj, "pairs", path, line)),
            sentence_scores=induction,
            sentence_label=Label(_require(obj, "sentence_label", path, line)),
        )
    except ValidationError as exc:
        raise ParseError(str(exc), path=path, line=line) from exc


def write_predictions(records: Sequence[PredictionRecord], path,
                      meta: Mapping | None = None) -> None:
    lines = _meta_line(meta) + [_dump_line(prediction_to_obj(r)) for r in records]
    atomic_write_text(path, "\n".join(lines) + ("\n" if lines else ""))


def read_predictions(path) -> list[PredictionRecord]:
    records = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, obj in _iter_records(path, fh):
            records.append(prediction_from_obj(obj, path=path, line=line_no))
    return records


def _unit_to_obj(u: AnnotationUnit) -> dict:
    return {
        "label": u.label.value,
        "premise_span": None if u.premise_span is None else list(u.premise_span),
        "hypothesis_span": None if u.hypothesis_span is None else list(u.hypothesis_span),
    }


def _unit_from_obj(obj: Mapping, path) -> AnnotationUnit:
    prem = obj.get("premise_span")
    hyp = obj.get("hypothesis_span")
    try:
        return AnnotationUnit(
            label=UnitLabel(_require(obj, "label", path, None)),
            premise_span=None if prem is None else tuple(prem),
            hypothesis_span=None if hyp is None else tuple(hyp),
        )
    except ValueError as exc:  # covers ValidationError
        raise ParseError(str(exc), path=path) from exc


def write_annotations(records: Sequence[AnnotationRecord], path,
                      meta: Mapping | None = None) -> None:
    doc: dict = {}
    if meta is not None:
        doc[META_KEY] = dict(meta)
    for rec in records:
        doc.setdefault(rec.sample_id, []).append({
            "annotator_id": rec.annotator_id,
            "units": [_unit_to_obj(u) for u in rec.units],
        })
    atomic_write_text(path, json.dumps(doc, ensure_ascii=False, indent=1) + "\n")


def read_annotations(path) -> list[AnnotationRecord]:
    """Read the single-document annotation file into per-annotator records."""
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON ({exc.msg})", path=path) from exc
    if not isinstance(doc, dict):
        raise ParseError("annotation document must be a JSON object", path=path)
    records = []
    for sample_id, recs in doc.items():
        if sample_id == META_KEY:
            continue
        for rec in recs:
            try:
                records.append(AnnotationRecord(
                    sample_id=sample_id,
                    annotator_id=str(_require(rec, "annotator_id", path, None)),
                    units=tuple(_unit_from_obj(u, path) for u in _require(rec, "units", path, None)),
                ))
            except ValidationError as exc:
                raise ParseError(str(exc), path=path) from exc
    return records


def validate_annotations(records: Sequence[AnnotationRecord],
                         samples: Sequence[Sample]) -> None:
    """Check annotation spans against sentence lengths in a corpus."""
    by_id = {s.id: s for s in samples}
    for rec in records:
        sample = by_id.get(rec.sample_id)
        if sample is None:
            raise ValidationError(f"annotation refers to unknown sample {rec.sample_id!r}")
        for u in rec.units:
            if u.premise_span is not None and u.premise_span[1] > len(sample.premise):
                raise ValidationError(
                    f"premise span {u.premise_span} exceeds sentence length "
                    f"{len(sample.premise)} in sample {rec.sample_id!r}")
            if u.hypothesis_span is not None and u.hypothesis_span[1] > len(sample.hypothesis):
                raise ValidationError(
                    f"hypothesis span {u.hypothesis_span} exceeds sentence length "
                    f"{len(sample.hypothesis)} in sample {rec.sample_id!r}")


def report_to_obj(report: EvalReport) -> dict:
    obj = {
        "f_e": float(report.f_e), "f_c": float(report.f_c), "f_n": float(report.f_n),
        "f_up": float(report.f_up), "f_uh": float(report.f_uh),
        "gm": float(report.gm), "am": float(report.am),
    }
    if report.sentence_accuracy is not None:
        obj["sentence_accuracy"] = float(report.sentence_accuracy)
    return obj


def write_report(report: EvalReport, path, meta: Mapping | None = None) -> None:
    doc = report_to_obj(report)
    if meta is not None:
        doc[META_KEY] = dict(meta)
    atomic_write_text(path, json.dumps(doc, ensure_ascii=False, indent=1) + "\n")


def read_report(path) -> EvalReport:
    with open(path, "r", encoding="utf-8") as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(f"invalid JSON ({exc.msg})", path=path) from exc
    try:
        return EvalReport(
            f_e=doc["f_e"], f_c=doc["f_c"], f_n=doc["f_n"],
            f_up=doc["f_up"], f_uh=doc["f_uh"], gm=doc["gm"], am=doc["am"],
            sentence_accuracy=doc.get("sentence_accuracy"),
        )
    except KeyError as exc:
        raise ParseError(f"missing field {exc.args[0]!r}", path=path) from exc
