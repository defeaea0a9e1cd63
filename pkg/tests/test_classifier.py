import numpy as np
import pytest

from phrasenli.classifier import (
    FeatureConfig,
    FeatureVariant,
    ModelParams,
    backward_pairs,
    features,
    forward_pairs,
    init_params,
    load_checkpoint,
    predict_pair,
    represent,
    save_checkpoint,
    softmax,
)
from phrasenli.corpus import PhrasePair, Side, ValidationError
from phrasenli.embeddings import PhraseEmbedding

from conftest import phrase


def embedding(local, global_):
    return PhraseEmbedding(local=np.asarray(local, float), global_=np.asarray(global_, float))


class TestRepresent:
    def test_concat(self):
        e = embedding([1.0, 2.0], [3.0, 4.0])
        params = ModelParams.zeros(4)
        np.testing.assert_array_equal(
            represent(e, params, FeatureConfig(FeatureVariant.CONCAT), Side.PREMISE),
            [1.0, 2.0, 3.0, 4.0])

    def test_empty_marker_returns_learned_vector(self):
        params = ModelParams.zeros(2)
        params.empty_hypothesis[:] = [7.0, 8.0]
        out = represent(None, params, FeatureConfig(FeatureVariant.LOCAL), Side.HYPOTHESIS)
        np.testing.assert_array_equal(out, [7.0, 8.0])

    def test_local_variant_ignores_global(self):
        params = ModelParams.zeros(2)
        cfg = FeatureConfig(FeatureVariant.LOCAL)
        base = represent(embedding([1.0, 2.0], [0.0, 0.0]), params, cfg, Side.PREMISE)
        perturbed = represent(embedding([1.0, 2.0], [9.0, -9.0]), params, cfg, Side.PREMISE)
        np.testing.assert_array_equal(base, perturbed)

    def test_dimension_mismatch(self):
        with pytest.raises(ValidationError, match="dimension"):
            represent(embedding([1.0], [1.0]), ModelParams.zeros(4),
                      FeatureConfig(FeatureVariant.LOCAL), Side.PREMISE)


class TestFeatures:
    def test_template(self):
        np.testing.assert_array_equal(
            features(np.array([1.0, 2.0]), np.array([3.0, -1.0])),
            [1, 2, 3, -1, 2, 3, 3, -2])

    def test_equal_inputs_zero_difference(self):
        p = np.array([0.5, -2.0])
        out = features(p, p)
        np.testing.assert_array_equal(out[4:6], [0.0, 0.0])
        np.testing.assert_array_equal(out[6:8], p * p)

    def test_zero_premise(self):
        h = np.array([2.0, -3.0])
        out = features(np.zeros(2), h)
        np.testing.assert_array_equal(out[0:2], [0.0, 0.0])
        np.testing.assert_array_equal(out[4:6], np.abs(h))
        np.testing.assert_array_equal(out[6:8], [0.0, 0.0])

    def test_shape_error(self):
        with pytest.raises(ValidationError):
            features(np.ones(2), np.ones(3))


class TestForward:
    def test_zero_params_give_uniform(self):
        params = ModelParams.zeros(3)
        cache = forward_pairs(np.ones((2, 3)), np.ones((2, 3)),
                              np.zeros(2, bool), np.zeros(2, bool), params)
        np.testing.assert_allclose(cache.probs, 1.0 / 3.0, atol=1e-15)

    def test_probabilities_sum_to_one(self, rng):
        params = init_params(6, seed=0)
        p = rng.normal(size=(17, 6))
        h = rng.normal(size=(17, 6))
        cache = forward_pairs(p, h, np.zeros(17, bool), np.zeros(17, bool), params)
        np.testing.assert_allclose(cache.probs.sum(axis=1), 1.0, atol=1e-12)
        assert (cache.probs > 0).all()

    def test_hand_evaluated_one_dim_fixture(self):
        # r=1, all weights one, zero biases, p=h=1:
        # feats = [1, 1, 0, 1]; hidden = relu(3) = 3; logits = (3, 3, 3)
        params = ModelParams(
            hidden_weight=np.ones((4, 1)), hidden_bias=np.zeros(1),
            output_weight=np.ones((1, 3)), output_bias=np.zeros(3),
            empty_premise=np.zeros(1), empty_hypothesis=np.zeros(1))
        cache = forward_pairs(np.array([[1.0]]), np.array([[1.0]]),
                              np.array([False]), np.array([False]), params)
        np.testing.assert_allclose(cache.hidden, [[3.0]])
        np.testing.assert_allclose(cache.probs, [[1 / 3, 1 / 3, 1 / 3]], atol=1e-15)

    def test_softmax_overflow_guard(self):
        probs = softmax(np.array([[1000.0, 0.0, -1000.0]]))
        assert np.isfinite(probs).all()
        assert probs[0, 0] == pytest.approx(1.0)

    def test_per_pair_independence(self, rng):
        params = init_params(4, seed=1)
        p = rng.normal(size=(5, 4))
        h = rng.normal(size=(5, 4))
        full = forward_pairs(p, h, np.zeros(5, bool), np.zeros(5, bool), params)
        for i in range(5):
            solo = forward_pairs(p[i:i + 1], h[i:i + 1], np.zeros(1, bool),
                                 np.zeros(1, bool), params)
            # batched and single-row matmuls may differ in the last ulp
            np.testing.assert_allclose(full.probs[i], solo.probs[0], rtol=0, atol=1e-12)


class TestBackward:
    def loss_for(self, params, p, h, empty_p, empty_h, target=0):
        cache = forward_pairs(p, h, empty_p, empty_h, params)
        return -np.log(cache.probs[:, target]).sum()

    def test_zero_upstream_gradient_gives_zero(self, rng):
        params = init_params(4, seed=2)
        p = rng.normal(size=(3, 4))
        h = rng.normal(size=(3, 4))
        cache = forward_pairs(p, h, np.zeros(3, bool), np.zeros(3, bool), params)
        grads = backward_pairs(cache, np.zeros((3, 3)), params)
        for name, arr in grads.tensors().items():
            np.testing.assert_array_equal(arr, 0.0, err_msg=name)

    def test_hidden_bias_matches_finite_differences(self, rng):
        params = init_params(3, seed=3)
        p = rng.uniform(-1, 1, size=(2, 3))
        h = rng.uniform(-1, 1, size=(2, 3))
        empty_p = np.array([False, False])
        empty_h = np.array([False, True])
        cache = forward_pairs(p, h, empty_p, empty_h, params)
        d_probs = np.zeros((2, 3))
        d_probs[:, 0] = -1.0 / cache.probs[:, 0]
        analytic = backward_pairs(cache, d_probs, params).hidden_bias
        step = 1e-5
        for j in range(3):
            params.hidden_bias[j] += step
            up = self.loss_for(params, p, h, empty_p, empty_h)
            params.hidden_bias[j] -= 2 * step
            down = self.loss_for(params, p, h, empty_p, empty_h)
            params.hidden_bias[j] += step
            fd = (up - down) / (2 * step)
            assert analytic[j] == pytest.approx(fd, rel=1e-4, abs=1e-10)

    def test_empty_gradients_only_from_empty_rows(self, rng):
        params = init_params(3, seed=4)
        p = rng.uniform(-1, 1, size=(2, 3))
        h = rng.uniform(-1, 1, size=(2, 3))
        # no EMPTY usage: both empty gradients vanish
        cache = forward_pairs(p, h, np.zeros(2, bool), np.zeros(2, bool), params)
        d_probs = np.tile([1.0, -1.0, 0.5], (2, 1))
        grads = backward_pairs(cache, d_probs, params)
        np.testing.assert_array_equal(grads.empty_premise, 0.0)
        np.testing.assert_array_equal(grads.empty_hypothesis, 0.0)
        # an EMPTY hypothesis row feeds exactly the hypothesis empty vector
        cache = forward_pairs(p, h, np.zeros(2, bool), np.array([False, True]), params)
        grads = backward_pairs(cache, d_probs, params)
        np.testing.assert_array_equal(grads.empty_premise, 0.0)
        assert np.abs(grads.empty_hypothesis).max() > 0

    def test_both_sides_empty_rejected(self):
        params = init_params(2, seed=0)
        with pytest.raises(ValidationError):
            forward_pairs(np.zeros((1, 2)), np.zeros((1, 2)),
                          np.array([True]), np.array([True]), params)


class TestPredictPair:
    def test_empty_hypothesis_pair(self):
        params = init_params(4, seed=5)
        pair = PhrasePair(premise_phrase=phrase("premise", 0, 1),
                          hypothesis_phrase=None, aligned=False)
        out = predict_pair(pair, embedding([1.0, 0.0], [0.0, 1.0]), None, params,
                           FeatureConfig(FeatureVariant.CONCAT))
        assert sum(out.probs) == pytest.approx(1.0, abs=1e-12)


class TestCheckpoint:
    def test_round_trip(self, tmp_path):
        params = init_params(6, seed=9)
        path = tmp_path / "model.json"
        save_checkpoint(params, path, variant=FeatureVariant.CONCAT,
                        embedding_dim=3, seed=9, extra={"pipeline": {"gamma": 0.6}})
        loaded, info = load_checkpoint(path)
        for name, arr in params.tensors().items():
            np.testing.assert_array_equal(arr, getattr(loaded, name), err_msg=name)
        assert info["version"] == 1
        assert info["config"] == {"variant": "concat", "d": 3, "r": 6, "seed": 9}

    def test_version_mandatory(self, tmp_path):
        path = tmp_path / "model.json"
        path.write_text('{"config": {}, "params": {}}')
        with pytest.raises(ValidationError, match="version"):
            load_checkpoint(path)

    def test_width_consistency_checked(self, tmp_path):
        params = init_params(6, seed=9)
        path = tmp_path / "model.json"
        save_checkpoint(params, path, variant=FeatureVariant.LOCAL,
                        embedding_dim=3, seed=9)  # local of d=3 needs r=3, not 6
        with pytest.raises(ValidationError, match="width"):
            load_checkpoint(path)


class TestInit:
    def test_deterministic_and_shaped(self):
        a = init_params(5, seed=1)
        b = init_params(5, seed=1)
        for name, arr in a.tensors().items():
            np.testing.assert_array_equal(arr, getattr(b, name), err_msg=name)
        assert a.hidden_weight.shape == (20, 5)
        assert a.output_weight.shape == (5, 3)
        np.testing.assert_array_equal(a.hidden_bias, 0.0)
        np.testing.assert_array_equal(a.output_bias, 0.0)

    def test_shape_validation(self):
        with pytest.raises(ValidationError):
            ModelParams(hidden_weight=np.zeros((3, 2)), hidden_bias=np.zeros(2),
                        output_weight=np.zeros((2, 3)), output_bias=np.zeros(3),
                        empty_premise=np.zeros(2), empty_hypothesis=np.zeros(2))
