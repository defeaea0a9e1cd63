"""Weakly supervised training from sentence labels only.

The standard mode backpropagates the sentence cross-entropy through the
label induction into the phrasal classifier, so phrase-level behaviour is
learned without any phrase-level supervision.  The baseline mode ("stp")
instead applies the sentence label directly to every phrase pair and
averages the per-pair cross-entropies; its inference still goes through
induction argmax.

Optimization is Adam with a linear warmup over the first fraction of the
total steps and linear decay to zero afterwards.  Given a seed, shuffling,
initialization, and reduction order are all fixed, so training is bitwise
reproducible.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, fields
from enum import Enum

import numpy as np

from .classifier import FeatureConfig, ModelParams, backward_pairs, forward_pairs, init_params
from .corpus import Label, SentenceInduction, ValidationError
from .induction import InductionConfig, InductionMode, induce_arrays, induce_backward
from .pipeline import PipelineConfig, PreparedSample, derive_seed, prepare_corpus, predict_prepared

LABEL_INDEX = {Label.E: 0, Label.C: 1, Label.N: 2}


class TrainMode(str, Enum):
    EPR = "epr"   # sentence loss through the induction rules
    STP = "stp"   # sentence label applied to every pair directly


@dataclass(frozen=True)
class TrainConfig:
    mode: TrainMode = TrainMode.EPR
    induction: InductionConfig = InductionConfig()
    features: FeatureConfig = FeatureConfig()
    learning_rate: float = 5e-5
    beta1: float = 0.9
    beta2: float = 0.999
    batch_size: int = 32
    epochs: int = 3
    warmup_fraction: float = 0.1
    seed: int = 0
    epsilon_adam: float = 1e-8

    def __post_init__(self):
        if self.learning_rate <= 0:
            raise ValidationError("learning rate must be positive")
        if not 0.0 < self.warmup_fraction < 1.0:
            raise ValidationError("warmup fraction must lie in (0, 1)")
        if self.batch_size < 1:
            raise ValidationError("batch size must be at least 1")
        if self.epochs < 1:
            raise ValidationError("epochs must be at least 1")


@dataclass
class TrainState:
    params: ModelParams
    m: ModelParams
    v: ModelParams
    step: int = 0

    @classmethod
    def fresh(cls, params: ModelParams) -> "TrainState":
        r = params.rep_dim
        return cls(params=params, m=ModelParams.zeros(r), v=ModelParams.zeros(r))


@dataclass
class EpochMetrics:
    epoch: int
    mean_loss: float
    heldout_accuracy: float | None


@dataclass
class TrainResult:
    state: TrainState
    step_losses: list[float]
    epoch_metrics: list[EpochMetrics]
    heldout_ids: list[str] = field(default_factory=list)


def loss(sentence: SentenceInduction, target: Label) -> float:
    """Sentence cross-entropy: -ln of the normalized target probability."""
    with np.errstate(divide="ignore"):
        return float(-np.log(sentence.probs[LABEL_INDEX[target]]))


def stp_loss(pair_probs, target: Label) -> float:
    """Mean over pairs of -ln P(target | pair)."""
    rows = np.asarray([getattr(p, "probs", p) for p in pair_probs], dtype=np.float64)
    if rows.size == 0:
        raise ValidationError("stp loss requires at least one pair")
    with np.errstate(divide="ignore"):
        return float(np.mean(-np.log(rows[:, LABEL_INDEX[target]])))


def learning_rate_at(step: int, total_steps: int, peak: float, warmup_fraction: float) -> float:
    """Piecewise linear schedule: ramp to the peak, then decay to zero.

    ``step`` is 1-based; the peak is reached exactly at the warmup
    boundary and the final step runs at rate 0.
    """
    if not 1 <= step <= total_steps:
        raise ValidationError(f"step {step} outside 1..{total_steps}")
    warmup = max(1, int(warmup_fraction * total_steps))
    if step <= warmup:
        return peak * step / warmup
    if total_steps == warmup:
        return peak
    return peak * (total_steps - step) / (total_steps - warmup)


def adam_step(state: TrainState, grads: ModelParams, lr: float, cfg: TrainConfig) -> None:
    """One in-place Adam update with bias correction."""
    state.step += 1
    t = state.step
    bc1 = 1.0 - cfg.beta1 ** t
    bc2 = 1.0 - cfg.beta2 ** t
    for f in fields(ModelParams):
        g = getattr(grads, f.name)
        m = getattr(state.m, f.name)
        v = getattr(state.v, f.name)
        m *= cfg.beta1
        m += (1.0 - cfg.beta1) * g
        v *= cfg.beta2
        v += (1.0 - cfg.beta2) * g * g
        update = lr * (m / bc1) / (np.sqrt(v / bc2) + cfg.epsilon_adam)
        getattr(state.params, f.name).__isub__(update)


def _batch_loss_and_dprobs(prepared_batch: list[PreparedSample], probs_slices,
                           cfg: TrainConfig) -> tuple[float, list[np.ndarray]]:
    """Per-sample losses and upstream gradients at the pair probabilities."""
    batch = len(prepared_batch)
    total = 0.0
    d_slices = []
    for ps, probs in zip(prepared_batch, probs_slices):
        target = LABEL_INDEX[ps.sample.label]
        if cfg.mode == TrainMode.EPR:
            induction, cache = induce_arrays(probs, ps.aligned, cfg.induction)
            total += -math.log(induction.probs[target]) if induction.probs[target] > 0 else math.inf
            g = np.zeros(3)
            g[target] = -1.0 / induction.probs[target] / batch
            d_slices.append(induce_backward(cache, g))
        else:
            k = probs.shape[0]
            with np.errstate(divide="ignore"):
                total += float(np.mean(-np.log(probs[:, target])))
            d = np.zeros_like(probs)
            d[:, target] = -1.0 / (k * probs[:, target]) / batch
            d_slices.append(d)
    return total / batch, d_slices


def train_step(prepared_batch: list[PreparedSample], state: TrainState, lr: float,
               cfg: TrainConfig) -> float:
    """Forward, backward, and one optimizer update over a batch of samples."""
    p = np.concatenate([ps.p_reps for ps in prepared_batch])
    h = np.concatenate([ps.h_reps for ps in prepared_batch])
    empty_p = np.concatenate([ps.empty_p for ps in prepared_batch])
    empty_h = np.concatenate([ps.empty_h for ps in prepared_batch])
    cache = forward_pairs(p, h, empty_p, empty_h, state.params)

    offsets = np.cumsum([0, *(ps.result.k_total for ps in prepared_batch)])
    probs_slices = [cache.probs[a:b] for a, b in zip(offsets, offsets[1:])]
    batch_loss, d_slices = _batch_loss_and_dprobs(prepared_batch, probs_slices, cfg)
    grads = backward_pairs(cache, np.concatenate(d_slices), state.params)
    adam_step(state, grads, lr, cfg)
    return batch_loss


def heldout_accuracy(prepared: list[PreparedSample], params: ModelParams,
                     icfg: InductionConfig) -> float | None:
    if not prepared:
        return None
    correct = sum(
        predict_prepared(ps, params, icfg).sentence_label == ps.sample.label
        for ps in prepared
    )
    return correct / len(prepared)


def train(samples, provider, cfg: TrainConfig, pipeline_cfg: PipelineConfig | None = None,
          val_samples=None, threads: int = 1) -> TrainResult:
    """Train a phrasal classifier from sentence labels.

    Without an explicit validation set, a seeded shuffle holds out 10% of
    the corpus for the per-epoch accuracy metric.
    """
    samples = list(samples)
    for s in samples:
        if s.label is None:
            raise ValidationError(f"sample {s.id!r} has no label; training needs labels")
    if pipeline_cfg is None:
        pipeline_cfg = PipelineConfig(features=cfg.features, induction=cfg.induction,
                                      seed=cfg.seed)

    if val_samples is None:
        split_rng = np.random.default_rng(derive_seed(cfg.seed, "split"))
        order = split_rng.permutation(len(samples))
        n_heldout = len(samples) // 10
        heldout = [samples[i] for i in order[:n_heldout]]
        train_samples = [samples[i] for i in order[n_heldout:]]
    else:
        heldout = list(val_samples)
        train_samples = samples
        for s in heldout:
            if s.label is None:
                raise ValidationError(f"validation sample {s.id!r} has no label")
    if not train_samples:
        raise ValidationError("no training samples left after the held-out split")

    prepared_train = prepare_corpus(train_samples, provider, pipeline_cfg, threads=threads)
    prepared_heldout = prepare_corpus(heldout, provider, pipeline_cfg, threads=threads)

    rep_dim = cfg.features.rep_dim(provider.dim)
    params = init_params(rep_dim, derive_seed(cfg.seed, "init"))
    state = TrainState.fresh(params)

    steps_per_epoch = math.ceil(len(prepared_train) / cfg.batch_size)
    total_steps = cfg.epochs * steps_per_epoch
    shuffle_rng = np.random.default_rng(derive_seed(cfg.seed, "shuffle"))

    step_losses: list[float] = []
    epoch_metrics: list[EpochMetrics] = []
    for epoch in range(cfg.epochs):
        order = shuffle_rng.permutation(len(prepared_train))
        epoch_loss = 0.0
        for start in range(0, len(order), cfg.batch_size):
            batch = [prepared_train[i] for i in order[start:start + cfg.batch_size]]
            lr = learning_rate_at(state.step + 1, total_steps, cfg.learning_rate,
                                  cfg.warmup_fraction)
            batch_loss = train_step(batch, state, lr, cfg)
            if not math.isfinite(batch_loss):
                raise FloatingPointError(f"non-finite loss at step {state.step}")
            step_losses.append(batch_loss)
            epoch_loss += batch_loss * len(batch)
        epoch_metrics.append(EpochMetrics(
            epoch=epoch + 1,
            mean_loss=epoch_loss / len(prepared_train),
            heldout_accuracy=heldout_accuracy(prepared_heldout, state.params, cfg.induction),
        ))
    return TrainResult(state=state, step_losses=step_losses, epoch_metrics=epoch_metrics,
                       heldout_ids=[s.id for s in heldout])


# ---------------------------------------------------------------------------
# Gradient checking
# ---------------------------------------------------------------------------

@dataclass
class GradCheckFixture:
    p_reps: np.ndarray
    h_reps: np.ndarray
    empty_p: np.ndarray
    empty_h: np.ndarray
    aligned: np.ndarray
    target: Label
    params: ModelParams


@dataclass
class GradCheckReport:
    max_relative_error: dict[str, float]
    threshold: float
    fixture_seed: int

    @property
    def passed(self) -> bool:
        return all(err <= self.threshold for err in self.max_relative_error.values())

    def format_table(self) -> str:
        lines = [f"{'tensor':<18} {'max rel err':>12}  status"]
        for name, err in self.max_relative_error.items():
            status = "ok" if err <= self.threshold else "FAIL"
            lines.append(f"{name:<18} {err:>12.3e}  {status}")
        return "\n".join(lines)


def _fixture_loss(fixture: GradCheckFixture, params: ModelParams, cfg: TrainConfig) -> float:
    cache = forward_pairs(fixture.p_reps, fixture.h_reps, fixture.empty_p,
                          fixture.empty_h, params)
    target = LABEL_INDEX[fixture.target]
    if cfg.mode == TrainMode.STP:
        return float(np.mean(-np.log(cache.probs[:, target])))
    induction, _ = induce_arrays(cache.probs, fixture.aligned, cfg.induction)
    return float(-np.log(induction.probs[target]))


def _fixture_grads(fixture: GradCheckFixture, params: ModelParams,
                   cfg: TrainConfig) -> ModelParams:
    cache = forward_pairs(fixture.p_reps, fixture.h_reps, fixture.empty_p,
                          fixture.empty_h, params)
    target = LABEL_INDEX[fixture.target]
    if cfg.mode == TrainMode.STP:
        k = cache.probs.shape[0]
        d_probs = np.zeros_like(cache.probs)
        d_probs[:, target] = -1.0 / (k * cache.probs[:, target])
    else:
        induction, icache = induce_arrays(cache.probs, fixture.aligned, cfg.induction)
        g = np.zeros(3)
        g[target] = -1.0 / induction.probs[target]
        d_probs = induce_backward(icache, g)
    return backward_pairs(cache, d_probs, params)


def _tie_margins_ok(fixture: GradCheckFixture, params: ModelParams, cfg: TrainConfig,
                    margin: float = 1e-3) -> bool:
    cache = forward_pairs(fixture.p_reps, fixture.h_reps, fixture.empty_p,
                          fixture.empty_h, params)
    if np.abs(cache.pre_activation).min() < margin:
        return False
    probs = np.clip(cache.probs, cfg.induction.epsilon, 1.0)

    def gap_ok(values: np.ndarray) -> bool:
        if values.shape[0] < 2:
            return True
        top2 = np.sort(values)[-2:]
        return (top2[1] - top2[0]) >= margin

    if cfg.mode == TrainMode.EPR and cfg.induction.mode == InductionMode.FUZZY:
        if not gap_ok(probs[fixture.aligned, 1]):
            return False
        if not gap_ok(probs[:, 2]):
            return False
    return True


def make_gradcheck_fixture(fixture_seed: int, cfg: TrainConfig,
                           dim: int = 3, max_pairs: int = 3) -> GradCheckFixture:
    """A small random fixture guaranteed to sit away from max ties."""
    for attempt in range(64):
        rng = np.random.default_rng(derive_seed(fixture_seed, "gradcheck", attempt))
        r = cfg.features.rep_dim(dim)
        k = int(rng.integers(1, max_pairs + 1))
        p = rng.uniform(-1.0, 1.0, size=(k, r))
        h = rng.uniform(-1.0, 1.0, size=(k, r))
        empty_p = np.zeros(k, dtype=bool)
        empty_h = np.zeros(k, dtype=bool)
        aligned = rng.random(k) < 0.7
        for i in range(k):
            if not aligned[i]:
                if rng.random() < 0.5:
                    empty_p[i] = True
                else:
                    empty_h[i] = True
        target = (Label.E, Label.C, Label.N)[int(rng.integers(0, 3))]
        if target == Label.C and not aligned.any():
            target = Label.N
        params = init_params(r, derive_seed(fixture_seed, "gradcheck-params", attempt))
        # spread the weights a little so gradients are not uniformly tiny
        params.hidden_weight *= 3.0
        params.output_weight *= 3.0
        fixture = GradCheckFixture(p_reps=p, h_reps=h, empty_p=empty_p, empty_h=empty_h,
                                   aligned=aligned, target=target, params=params)
        if _tie_margins_ok(fixture, params, cfg):
            return fixture
    raise RuntimeError("could not build a tie-free gradcheck fixture")


def gradcheck(cfg: TrainConfig, fixture_seed: int, step: float = 1e-5,
              threshold: float = 1e-3) -> GradCheckReport:
    """Compare analytic gradients of the full loss with central differences."""
    fixture = make_gradcheck_fixture(fixture_seed, cfg)
    params = fixture.params
    analytic = _fixture_grads(fixture, params, cfg)
    report: dict[str, float] = {}
    for f in fields(ModelParams):
        tensor = getattr(params, f.name)
        a = getattr(analytic, f.name)
        worst = 0.0
        flat = tensor.reshape(-1)
        a_flat = a.reshape(-1)
        for idx in range(flat.shape[0]):
            original = flat[idx]
            flat[idx] = original + step
            up = _fixture_loss(fixture, params, cfg)
            flat[idx] = original - step
            down = _fixture_loss(fixture, params, cfg)
            flat[idx] = original
            fd = (up - down) / (2.0 * step)
            denom = max(abs(a_flat[idx]), abs(fd))
            err = abs(a_flat[idx] - fd) if denom < 1e-6 else abs(a_flat[idx] - fd) / denom
            worst = max(worst, err)
        report[f.name] = worst
    return GradCheckReport(max_relative_error=report, threshold=threshold,
                           fixture_seed=fixture_seed)
