import math

import numpy as np
import pytest

from phrasenli.classifier import FeatureConfig, FeatureVariant, ModelParams
from phrasenli.corpus import Label, SentenceInduction, ValidationError
from phrasenli.embeddings import write_embeddings, FileEmbeddingProvider
from phrasenli.induction import InductionConfig, InductionMode, induce_arrays
from phrasenli.pipeline import PipelineConfig
from phrasenli.synth import default_lexicon, generate
from phrasenli.training import (
    TrainConfig,
    TrainMode,
    TrainState,
    adam_step,
    gradcheck,
    learning_rate_at,
    loss,
    stp_loss,
    train,
)


def make_induction(probs):
    z = sum(probs)
    return SentenceInduction(s_e=probs[0], s_c=probs[1], s_n=probs[2], z=z,
                             probs=tuple(p / z for p in probs))


class TestLoss:
    def test_perfect_prediction(self):
        ind, _ = induce_arrays(np.array([[1.0, 0.0, 0.0]]), np.array([True]))
        assert loss(ind, Label.E) == pytest.approx(0.0, abs=1e-9)

    def test_half_probability(self):
        ind = make_induction((0.5, 0.5, 0.0))
        assert loss(ind, Label.E) == pytest.approx(math.log(2), abs=1e-12)

    def test_induction_fixture_cross_entropy(self):
        ind, _ = induce_arrays(np.array([[0.9, 0.05, 0.05], [0.4, 0.5, 0.1]]),
                               np.array([True, True]))
        assert loss(ind, Label.C) == pytest.approx(0.8329091229351041, abs=1e-9)


class TestStpLoss:
    def test_certain_pair(self):
        assert stp_loss([(1.0 - 2e-13, 1e-13, 1e-13)], Label.E) == \
            pytest.approx(0.0, abs=1e-9)

    def test_two_pairs(self):
        rows = [(0.5, 0.25, 0.25), (0.25, 0.5, 0.25)]
        assert stp_loss(rows, Label.E) == \
            pytest.approx(1.5 * math.log(2), abs=1e-12)  # (ln 2 + ln 4) / 2

    def test_empty_rejected(self):
        with pytest.raises(ValidationError):
            stp_loss([], Label.E)

    def test_independent_of_induction_epsilon(self):
        rows = [(0.5, 0.3, 0.2)]
        assert stp_loss(rows, Label.N) == stp_loss(rows, Label.N)
        # stp never consults the induction config at all: same value
        # regardless of what epsilon any induction would use
        cfg_a = TrainConfig(mode=TrainMode.STP,
                            induction=InductionConfig(epsilon=1e-12))
        cfg_b = TrainConfig(mode=TrainMode.STP,
                            induction=InductionConfig(epsilon=1e-7))
        ra = gradcheck(cfg_a, fixture_seed=3)
        rb = gradcheck(cfg_b, fixture_seed=3)
        assert ra.max_relative_error == rb.max_relative_error


class TestAdam:
    def reference_scalar_adam(self, grads, lr=5e-5, b1=0.9, b2=0.999, eps=1e-8):
        """Independent scalar recurrence, kept deliberately simple."""
        theta, m, v = 0.0, 0.0, 0.0
        for t, g in enumerate(grads, start=1):
            m = b1 * m + (1 - b1) * g
            v = b2 * v + (1 - b2) * g * g
            m_hat = m / (1 - b1 ** t)
            v_hat = v / (1 - b2 ** t)
            theta -= lr * m_hat / (math.sqrt(v_hat) + eps)
        return theta

    def ones_grads(self, value=1.0):
        g = ModelParams.zeros(1)
        for arr in g.tensors().values():
            arr[:] = value
        return g

    def test_single_step_matches_hand_computation(self):
        cfg = TrainConfig()
        state = TrainState.fresh(ModelParams.zeros(1))
        adam_step(state, self.ones_grads(), cfg.learning_rate, cfg)
        expected = self.reference_scalar_adam([1.0])
        assert expected == pytest.approx(-4.9999999500000045e-05, abs=1e-18)
        for name, arr in state.params.tensors().items():
            np.testing.assert_allclose(arr, expected, rtol=0, atol=1e-18,
                                       err_msg=name)

    def test_three_steps_match_reference(self):
        cfg = TrainConfig()
        state = TrainState.fresh(ModelParams.zeros(1))
        grads = [1.0, -0.5, 0.25]
        for g in grads:
            adam_step(state, self.ones_grads(g), cfg.learning_rate, cfg)
        expected = self.reference_scalar_adam(grads)
        np.testing.assert_allclose(state.params.hidden_bias, expected, atol=1e-18)
        assert state.step == 3

    def test_zero_gradient_moves_nothing(self):
        cfg = TrainConfig()
        params = ModelParams.zeros(2)
        params.hidden_bias[:] = [1.5, -2.5]
        state = TrainState.fresh(params.copy())
        adam_step(state, ModelParams.zeros(2), cfg.learning_rate, cfg)
        np.testing.assert_array_equal(state.params.hidden_bias, params.hidden_bias)
        np.testing.assert_array_equal(state.m.hidden_bias, 0.0)
        np.testing.assert_array_equal(state.v.hidden_bias, 0.0)
        assert state.step == 1  # bias-correction bookkeeping still advances


class TestSchedule:
    def test_shape(self):
        total, peak, warm = 100, 1.0, 0.1
        values = [learning_rate_at(t, total, peak, warm) for t in range(1, total + 1)]
        assert values[9] == pytest.approx(peak)      # warmup boundary at step 10
        assert max(values) == pytest.approx(peak)
        assert values[-1] == 0.0
        assert all(a < b or math.isclose(a, b) for a, b in zip(values[:10], values[1:10]))
        assert all(a > b for a, b in zip(values[10:], values[11:]))

    def test_continuity(self):
        total = 57
        values = [learning_rate_at(t, total, 2.0, 0.25) for t in range(1, total + 1)]
        jumps = np.abs(np.diff(values))
        warmup = max(1, int(0.25 * total))
        max_slope = max(2.0 / warmup, 2.0 / (total - warmup))
        assert jumps.max() <= max_slope + 1e-12

    def test_bounds_checked(self):
        with pytest.raises(ValidationError):
            learning_rate_at(0, 10, 1.0, 0.1)
        with pytest.raises(ValidationError):
            learning_rate_at(11, 10, 1.0, 0.1)


def tiny_setup(tmp_path, n=24, seed=5):
    synth, _, emb, dim = generate(default_lexicon(), n, seed=seed)
    path = tmp_path / "emb.jsonl"
    write_embeddings(emb, dim, path)
    provider = FileEmbeddingProvider(path)
    return [s.sample for s in synth], provider


class TestTrain:
    def test_requires_labels(self, tmp_path):
        samples, provider = tiny_setup(tmp_path, n=6)
        from dataclasses import replace
        samples[0] = replace(samples[0], label=None)
        with pytest.raises(ValidationError, match="label"):
            train(samples, provider, TrainConfig(epochs=1))

    def test_overfits_a_repeated_small_batch(self, tmp_path):
        # 200 optimizer steps over the same 8 samples must at least halve
        # the loss
        samples, provider = tiny_setup(tmp_path, n=8)
        cfg = TrainConfig(learning_rate=1e-2, batch_size=8, epochs=200, seed=1)
        result = train(samples, provider, cfg,
                       val_samples=[])  # keep all 8 in the training split
        assert len(result.step_losses) == 200
        assert result.step_losses[-1] < 0.5 * result.step_losses[0]

    def test_bitwise_reproducible(self, tmp_path):
        samples, provider = tiny_setup(tmp_path, n=20)
        cfg = TrainConfig(learning_rate=5e-3, epochs=2, seed=7)
        r1 = train(samples, provider, cfg)
        r2 = train(samples, provider, cfg)
        assert r1.step_losses == r2.step_losses
        for name, arr in r1.state.params.tensors().items():
            np.testing.assert_array_equal(arr, getattr(r2.state.params, name),
                                          err_msg=name)
        assert [m.heldout_accuracy for m in r1.epoch_metrics] == \
            [m.heldout_accuracy for m in r2.epoch_metrics]

    def test_heldout_split_is_ten_percent(self, tmp_path):
        samples, provider = tiny_setup(tmp_path, n=30)
        result = train(samples, provider, TrainConfig(epochs=1, seed=2))
        assert len(result.heldout_ids) == 3
        assert len(result.epoch_metrics) == 1
        assert result.epoch_metrics[0].heldout_accuracy is not None

    def test_explicit_validation_corpus(self, tmp_path):
        samples, provider = tiny_setup(tmp_path, n=20)
        result = train(samples[:15], provider, TrainConfig(epochs=1, seed=2),
                       val_samples=samples[15:])
        assert sorted(result.heldout_ids) == sorted(s.id for s in samples[15:])

    def test_stp_mode_trains(self, tmp_path):
        samples, provider = tiny_setup(tmp_path, n=20)
        cfg = TrainConfig(mode=TrainMode.STP, learning_rate=5e-3, epochs=2, seed=3)
        result = train(samples, provider, cfg)
        assert result.step_losses[-1] < result.step_losses[0]


class TestGradcheck:
    @pytest.mark.parametrize("mode,imode", [
        (TrainMode.EPR, InductionMode.FUZZY),
        (TrainMode.EPR, InductionMode.MEAN),
        (TrainMode.STP, InductionMode.FUZZY),
    ])
    def test_modes_pass_tightly(self, mode, imode):
        cfg = TrainConfig(mode=mode, induction=InductionConfig(mode=imode))
        for seed in range(5):
            report = gradcheck(cfg, fixture_seed=seed)
            assert report.passed
            assert max(report.max_relative_error.values()) <= 1e-4

    def test_dead_rectifier_zeroes_hidden_gradients(self):
        from phrasenli.training import GradCheckFixture, _fixture_grads
        rng = np.random.default_rng(0)
        r = 4
        params = ModelParams.zeros(r)
        params.hidden_weight[:] = rng.uniform(-0.5, 0.5, size=(4 * r, r))
        params.hidden_bias[:] = -100.0  # every pre-activation strictly negative
        params.output_weight[:] = rng.uniform(-0.5, 0.5, size=(r, 3))
        fixture = GradCheckFixture(
            p_reps=rng.uniform(-1, 1, size=(2, r)),
            h_reps=rng.uniform(-1, 1, size=(2, r)),
            empty_p=np.zeros(2, bool), empty_h=np.zeros(2, bool),
            aligned=np.ones(2, bool), target=Label.E, params=params)
        grads = _fixture_grads(fixture, params, TrainConfig())
        np.testing.assert_array_equal(grads.hidden_weight, 0.0)
        np.testing.assert_array_equal(grads.hidden_bias, 0.0)
        np.testing.assert_array_equal(grads.output_weight, 0.0)
        assert np.abs(grads.output_bias).max() > 0

    def test_report_table_format(self):
        report = gradcheck(TrainConfig(), fixture_seed=0)
        table = report.format_table()
        assert "hidden_weight" in table
        assert "ok" in table


class TestConfigValidation:
    def test_bad_values_rejected(self):
        with pytest.raises(ValidationError):
            TrainConfig(learning_rate=0.0)
        with pytest.raises(ValidationError):
            TrainConfig(warmup_fraction=1.0)
        with pytest.raises(ValidationError):
            TrainConfig(batch_size=0)
        with pytest.raises(ValidationError):
            TrainConfig(epochs=0)
