"""Phrase-level natural language inference with differentiable label induction.

The pipeline detects phrases with POS rules, aligns them across the
premise and hypothesis by mutual argmax over blended cosine similarity,
classifies each pair as Entailment / Contradiction / Neutral, and induces
the sentence label through differentiable fuzzy-logic rules, so phrasal
behaviour is trainable from sentence labels alone.  Word-index F-scores
quantify the phrasal reasoning against human annotations.
"""

__version__ = "0.1.0"

from .alignment import AlignMode, AlignmentResult, align, mutual_argmax_pairs
from .chunking import ChunkerConfig, ChunkerMode, OPEN_CLASS_TAGS, chunk
from .classifier import (
    FeatureConfig,
    FeatureVariant,
    ModelParams,
    features,
    init_params,
    load_checkpoint,
    predict_pair,
    represent,
    save_checkpoint,
)
from .corpus import (
    AnnotationRecord,
    AnnotationUnit,
    EvalReport,
    Label,
    PhrasalPrediction,
    Phrase,
    PhraseKind,
    PhrasePair,
    PredictionRecord,
    Sample,
    Sentence,
    SentenceInduction,
    Side,
    Token,
    UnitLabel,
    read_annotations,
    read_corpus,
    read_predictions,
    read_report,
    write_annotations,
    write_corpus,
    write_predictions,
    write_report,
)
from .embeddings import (
    AlignConfig,
    FileEmbeddingProvider,
    PhraseEmbedding,
    ProviderConfig,
    ProviderKind,
    ToyEmbeddingProvider,
    cosine,
    make_provider,
    similarity,
    write_embeddings,
)
from .evaluation import agreement, count_sample, evaluate, score, sentence_accuracy
from .induction import InductionConfig, InductionMode, induce, induce_arrays, induce_backward
from .pipeline import PipelineConfig, predict_corpus
from .synth import Lexicon, SynthSample, default_lexicon, generate, planted_label_accuracy
from .training import TrainConfig, TrainMode, TrainResult, gradcheck, loss, stp_loss, train
