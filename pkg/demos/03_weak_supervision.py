"""Phrase labels learned from sentence labels alone.

Trains on a synthetic corpus whose phrasal relations are known, then
checks the phrase-level predictions against the planted truth that the
model never saw.  Takes a few seconds on a laptop CPU.

Run with:  python demos/03_weak_supervision.py
"""

import tempfile
from pathlib import Path

from phrasenli import (
    FileEmbeddingProvider,
    PipelineConfig,
    TrainConfig,
    default_lexicon,
    generate,
    planted_label_accuracy,
    predict_corpus,
    sentence_accuracy,
    train,
    write_embeddings,
)

# 1. Generate data: every sample plants 2-5 phrasal relations; the
#    sentence label follows the composition rules (all E -> E, any C -> C,
#    otherwise N).  Only the sentence labels are used for training.
synth, annotations, embedding_records, dim = generate(
    default_lexicon(), n=1650, seed=7)
train_split, test_split = synth[:1500], synth[1500:]
print(f"corpus: {len(train_split)} train / {len(test_split)} test samples")

with tempfile.TemporaryDirectory() as tmp:
    emb_path = Path(tmp) / "embeddings.jsonl"
    write_embeddings(embedding_records, dim, emb_path)
    provider = FileEmbeddingProvider(emb_path)

    # 2. Train: cross-entropy on the induced sentence probabilities,
    #    backpropagated through the fuzzy rules into the pair classifier.
    cfg = TrainConfig(learning_rate=2e-2, batch_size=32, epochs=3, seed=12)
    pipeline = PipelineConfig(seed=12)
    result = train([s.sample for s in train_split], provider, cfg, pipeline)
    for metrics in result.epoch_metrics:
        print(f"epoch {metrics.epoch}: mean loss {metrics.mean_loss:.4f}, "
              f"held-out accuracy {metrics.heldout_accuracy:.4f}")

    # 3. Predict on held-out samples and compare per-phrase labels with
    #    the planted relations.
    test_samples = [s.sample for s in test_split]
    records = predict_corpus(test_samples, provider, result.state.params, pipeline)
    acc = sentence_accuracy(records, test_samples)
    phrasal = planted_label_accuracy(records, test_split)
    print(f"\nsentence accuracy: {acc:.4f}")
    print(f"phrasal label accuracy vs planted relations: {phrasal:.4f}")
    print("(the model was never shown a phrase label)")

    # 4. Peek at one reasoning chain.
    record = records[0]
    sample = next(s.sample for s in test_split if s.sample.id == record.sample_id)
    print(f"\nsample {record.sample_id} (gold {sample.label.value}):")
    print(f"  premise:    {sample.premise.text()}")
    print(f"  hypothesis: {sample.hypothesis.text()}")
    for pp in record.pairs:
        left = (sample.premise.text(pp.pair.premise_phrase.span)
                if pp.pair.premise_phrase else "⟨EMPTY⟩")
        right = (sample.hypothesis.text(pp.pair.hypothesis_phrase.span)
                 if pp.pair.hypothesis_phrase else "⟨EMPTY⟩")
        print(f"  {left!r} ↔ {right!r}: {pp.label.value} "
              f"(E {pp.prediction.probs[0]:.2f} C {pp.prediction.probs[1]:.2f} "
              f"N {pp.prediction.probs[2]:.2f})")
    probs = record.sentence_scores.probs
    print(f"  sentence: E {probs[0]:.2f} C {probs[1]:.2f} N {probs[2]:.2f} "
          f"-> {record.sentence_label.value}")
