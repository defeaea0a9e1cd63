"""Phrase embedding providers and the blended cosine similarity.

Two representations exist per phrase: a *local* vector (the phrase encoded
on its own) and a *global* vector (the phrase's tokens encoded in sentence
context, mean-pooled).  Similarity blends the two cosines:

    sim = gamma * cos(global_a, global_b) + (1 - gamma) * cos(local_a, local_b)

Real encoders stay outside this package; vectors arrive through a file
provider, or through a deterministic hash-based toy provider good enough
for tests and demos.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass
from enum import Enum
from typing import Iterable, Mapping

import numpy as np

from .corpus import (
    ParseError,
    Phrase,
    Sample,
    Side,
    Span,
    ValidationError,
    atomic_write_text,
)


class EmbeddingLookupError(KeyError):
    """No stored vector for the requested (sample, side, span)."""

    def __init__(self, sample_id: str, side: Side, span: Span):
        super().__init__(f"no embedding for sample {sample_id!r}, "
                         f"{side.value} span [{span[0]}, {span[1]})")


@dataclass(frozen=True)
class PhraseEmbedding:
    local: np.ndarray
    global_: np.ndarray

    def __post_init__(self):
        local = np.asarray(self.local)
        global_ = np.asarray(self.global_)
        if local.ndim != 1 or global_.ndim != 1 or local.shape != global_.shape:
            raise ValidationError(
                f"local/global vectors must share one dimension, got {local.shape} "
                f"and {global_.shape}")
        if local.shape[0] == 0:
            raise ValidationError("embedding dimension must be positive")
        if not (np.isfinite(local).all() and np.isfinite(global_).all()):
            raise ValidationError("embedding vectors must be finite")
        object.__setattr__(self, "local", local)
        object.__setattr__(self, "global_", global_)

    @property
    def dim(self) -> int:
        return int(self.local.shape[0])


@dataclass(frozen=True)
class AlignConfig:
    """Weight of the global cosine in the similarity blend."""

    gamma: float = 0.6

    def __post_init__(self):
        if not 0.0 <= self.gamma <= 1.0:
            raise ValidationError(f"gamma must lie in [0, 1], got {self.gamma}")


class ProviderKind(str, Enum):
    FILE = "file"
    TOY = "toy"


@dataclass(frozen=True)
class ProviderConfig:
    kind: ProviderKind
    dim: int = 16
    source: str | os.PathLike | None = None
    seed: int | None = None

    def __post_init__(self):
        if self.kind == ProviderKind.FILE and self.source is None:
            raise ValidationError("file provider requires a source path")
        if self.kind == ProviderKind.TOY and self.seed is None:
            raise ValidationError("toy provider requires a seed")


def _hash_unit_vector(seed: int, key: str, dim: int) -> np.ndarray:
    digest = hashlib.blake2b(f"{seed}|{key}".encode("utf-8"), digest_size=8).digest()
    rng = np.random.default_rng(int.from_bytes(digest, "little"))
    v = rng.standard_normal(dim)
    return (v / np.linalg.norm(v)).astype(np.float32)


class ToyEmbeddingProvider:
    """Deterministic pseudo-random embeddings keyed by text.

    The local vector hashes the lowercased phrase text, so identical
    surface forms embed identically across samples.  The global vector
    is the renormalized mean of per-token hash vectors keyed by
    (token text, sample id), which ties it to the sentence it came from.
    """

    def __init__(self, dim: int = 16, seed: int = 0):
        if dim <= 0:
            raise ValidationError("embedding dimension must be positive")
        self.dim = int(dim)
        self.seed = int(seed)

    def embed(self, sample: Sample, phrase: Phrase) -> PhraseEmbedding:
        sentence = sample.sentence(phrase.side)
        if phrase.span[1] > len(sentence):
            raise ValidationError(
                f"phrase span {phrase.span} exceeds sentence length {len(sentence)}")
        text = sentence.text(phrase.span).lower()
        local = _hash_unit_vector(self.seed, f"local|{text}", self.dim)
        token_vectors = [
            _hash_unit_vector(self.seed, f"global|{tok.text.lower()}|{sample.id}", self.dim)
            for tok in sentence.tokens[phrase.span[0]:phrase.span[1]]
        ]
        pooled = np.mean(np.stack(token_vectors), axis=0, dtype=np.float64)
        norm = np.linalg.norm(pooled)
        if norm == 0.0:
            raise ValidationError("token vectors cancelled to a zero global embedding")
        return PhraseEmbedding(local=local, global_=(pooled / norm).astype(np.float32))


class FileEmbeddingProvider:
    """Reads stored vectors into an in-memory index keyed by (id, side, span)."""

    def __init__(self, path: str | os.PathLike):
        self.path = os.fspath(path)
        self._index: dict[tuple[str, str, Span], PhraseEmbedding] = {}
        with open(self.path, "r", encoding="utf-8") as fh:
            header_line = fh.readline()
            try:
                header = json.loads(header_line)
            except json.JSONDecodeError as exc:
                raise ParseError(f"invalid header ({exc.msg})", path=self.path, line=1) from exc
            if not isinstance(header, dict) or "dim" not in header:
                raise ParseError("embedding file must start with a {\"dim\": d} header",
                                 path=self.path, line=1)
            self.dim = int(header["dim"])
            if self.dim <= 0:
                raise ParseError("embedding dimension must be positive", path=self.path, line=1)
            for line_no, raw in enumerate(fh, start=2):
                raw = raw.strip()
                if not raw:
                    continue
                try:
                    rec = json.loads(raw)
                except json.JSONDecodeError as exc:
                    raise ParseError(f"invalid JSON ({exc.msg})", path=self.path,
                                     line=line_no) from exc
                try:
                    key = (str(rec["sample_id"]), str(rec["side"]),
                           (int(rec["span"][0]), int(rec["span"][1])))
                    emb = PhraseEmbedding(
                        local=np.asarray(rec["local"], dtype=np.float32),
                        global_=np.asarray(rec["global"], dtype=np.float32),
                    )
                except (KeyError, IndexError, TypeError) as exc:
                    raise ParseError(f"bad embedding record: {exc}", path=self.path,
                                     line=line_no) from exc
                if emb.dim != self.dim:
                    raise ParseError(
                        f"vector dimension {emb.dim} does not match header dim {self.dim}",
                        path=self.path, line=line_no)
                self._index[key] = emb

    def embed(self, sample: Sample, phrase: Phrase) -> PhraseEmbedding:
        key = (sample.id, phrase.side.value, phrase.span)
        hit = self._index.get(key)
        if hit is not None:
            return hit
        return self._compose(sample.id, phrase.side, phrase.span)

    def _compose(self, sample_id: str, side: Side, span: Span) -> PhraseEmbedding:
        """Mean-pool stored single-token vectors over a span not stored itself."""
        locals_ = []
        globals_ = []
        for t in range(span[0], span[1]):
            rec = self._index.get((sample_id, side.value, (t, t + 1)))
            if rec is None:
                raise EmbeddingLookupError(sample_id, side, span)
            locals_.append(rec.local)
            globals_.append(rec.global_)

        def pooled(vectors) -> np.ndarray:
            mean = np.mean(np.stack(vectors), axis=0, dtype=np.float64)
            norm = np.linalg.norm(mean)
            if norm == 0.0:
                raise ValidationError(
                    f"token vectors of {sample_id!r} {side.value} span {span} "
                    f"cancel to zero")
            return (mean / norm).astype(np.float32)

        return PhraseEmbedding(local=pooled(locals_), global_=pooled(globals_))


def make_provider(config: ProviderConfig):
    if config.kind == ProviderKind.TOY:
        return ToyEmbeddingProvider(dim=config.dim, seed=config.seed)
    return FileEmbeddingProvider(config.source)


def write_embeddings(records: Iterable[tuple[str, Side, Span, np.ndarray, np.ndarray]],
                     dim: int, path, meta: Mapping | None = None) -> None:
    """Write an embedding file: one header record, then one record per phrase."""
    header: dict = {"dim": int(dim)}
    if meta is not None:
        header["_meta"] = dict(meta)
    lines = [json.dumps(header, ensure_ascii=False, separators=(", ", ": "))]
    for sample_id, side, span, local, global_ in records:
        local32 = np.asarray(local, dtype=np.float32)
        global32 = np.asarray(global_, dtype=np.float32)
        lines.append(json.dumps({
            "sample_id": sample_id,
            "side": side.value if isinstance(side, Side) else str(side),
            "span": [int(span[0]), int(span[1])],
            "local": [float(x) for x in local32],
            "global": [float(x) for x in global32],
        }, ensure_ascii=False, separators=(", ", ": ")))
    atomic_write_text(path, "\n".join(lines) + "\n")


def cosine(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine of two vectors, accumulated at 64-bit precision."""
    a64 = np.asarray(a, dtype=np.float64)
    b64 = np.asarray(b, dtype=np.float64)
    if a64.shape != b64.shape:
        raise ValidationError(f"dimension mismatch: {a64.shape} vs {b64.shape}")
    na = np.linalg.norm(a64)
    nb = np.linalg.norm(b64)
    if na == 0.0 or nb == 0.0:
        raise ValidationError("cosine is undefined for a zero-norm vector")
    return float(np.dot(a64, b64) / (na * nb))


def similarity(a: PhraseEmbedding, b: PhraseEmbedding, cfg: AlignConfig = AlignConfig()) -> float:
    """Blend of global and local cosines weighted by gamma."""
    return cfg.gamma * cosine(a.global_, b.global_) + (1.0 - cfg.gamma) * cosine(a.local, b.local)
