import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from phrasenli.corpus import PhrasalPrediction, ValidationError
from phrasenli.induction import (
    InductionCache,
    InductionConfig,
    InductionMode,
    induce,
    induce_arrays,
    induce_backward,
)

FUZZY = InductionConfig(mode=InductionMode.FUZZY)
MEAN = InductionConfig(mode=InductionMode.MEAN)


def run(rows, aligned, cfg=FUZZY):
    return induce_arrays(np.asarray(rows, float), np.asarray(aligned, bool), cfg)


class TestFuzzyForward:
    def test_single_certain_pair(self):
        ind, _ = run([[1.0, 0.0, 0.0]], [True])
        assert ind.s_e == pytest.approx(1.0, abs=1e-9)
        assert ind.s_c == pytest.approx(0.0, abs=1e-11)
        assert ind.probs[0] == pytest.approx(1.0, abs=1e-9)

    def test_two_aligned_pairs_fixture(self):
        # s_e = sqrt(0.36) = 0.6, s_c = 0.5, s_n = 0.1 * 0.5, z = 1.15
        ind, _ = run([[0.9, 0.05, 0.05], [0.4, 0.5, 0.1]], [True, True])
        assert ind.s_e == pytest.approx(0.6, abs=1e-12)
        assert ind.s_c == pytest.approx(0.5, abs=1e-12)
        assert ind.s_n == pytest.approx(0.05, abs=1e-12)
        assert ind.z == pytest.approx(1.15, abs=1e-12)
        assert ind.probs == pytest.approx(
            (0.5217391304347826, 0.4347826086956521, 0.043478260869565216), abs=1e-12)

    def test_unaligned_pair_excluded_from_contradiction(self):
        # s_e = sqrt(0.16) = 0.4, s_c = 0.1, s_n = 0.5 * 0.9 = 0.45, z = 0.95
        ind, _ = run([[0.8, 0.1, 0.1], [0.2, 0.3, 0.5]], [True, False])
        assert ind.s_e == pytest.approx(0.4, abs=1e-12)
        assert ind.s_c == pytest.approx(0.1, abs=1e-12)
        assert ind.s_n == pytest.approx(0.45, abs=1e-12)
        assert ind.probs == pytest.approx(
            (0.4210526315789474, 0.10526315789473685, 0.4736842105263158), abs=1e-12)

    def test_contradiction_max_ignores_unaligned(self):
        ind, _ = run([[0.7, 0.2, 0.1], [0.05, 0.9, 0.05]], [True, False])
        assert ind.s_c == pytest.approx(0.2, abs=1e-12)

    def test_no_aligned_pairs_zero_contradiction(self):
        ind, _ = run([[0.3, 0.3, 0.4]], [False])
        assert ind.s_c == 0.0

    def test_induce_accepts_phrasal_predictions(self):
        pairs = [(PhrasalPrediction((0.9, 0.05, 0.05)), True),
                 (PhrasalPrediction((0.4, 0.5, 0.1)), True)]
        ind = induce(pairs)
        assert ind.s_e == pytest.approx(0.6, abs=1e-12)

    def test_empty_pair_list_rejected(self):
        with pytest.raises(ValidationError):
            induce([])

    def test_invalid_distribution_rejected(self):
        with pytest.raises(ValidationError):
            run([[0.9, 0.3, 0.3]], [True])
        with pytest.raises(ValidationError):
            run([[1.2, -0.1, -0.1]], [True])


class TestMeanForward:
    def test_geometric_means_per_column(self):
        rows = [[0.5, 0.25, 0.25], [0.125, 0.75, 0.125]]
        ind, _ = run(rows, [True, True], MEAN)
        s_e = math.sqrt(0.5 * 0.125)
        s_c = math.sqrt(0.25 * 0.75)
        s_n = math.sqrt(0.25 * 0.125)
        z = s_e + s_c + s_n
        assert ind.s_e == pytest.approx(s_e, abs=1e-12)
        assert ind.s_c == pytest.approx(s_c, abs=1e-12)
        assert ind.s_n == pytest.approx(s_n, abs=1e-12)
        assert ind.probs[1] == pytest.approx(s_c / z, abs=1e-12)

    def test_single_aligned_pair_matches_fuzzy_on_e_and_c(self):
        row = [0.6, 0.3, 0.1]
        fuzzy, _ = run([row], [True], FUZZY)
        mean, _ = run([row], [True], MEAN)
        assert fuzzy.s_e == pytest.approx(row[0], abs=1e-12)
        assert mean.s_e == pytest.approx(row[0], abs=1e-12)
        assert fuzzy.s_c == pytest.approx(row[1], abs=1e-12)
        assert mean.s_c == pytest.approx(row[1], abs=1e-12)
        # neutral differs: fuzzy multiplies by (1 - s_c)
        assert fuzzy.s_n == pytest.approx(row[2] * (1 - row[1]), abs=1e-12)
        assert mean.s_n == pytest.approx(row[2], abs=1e-12)


class TestProperties:
    def test_shared_distribution_gives_exact_entailment_score(self, rng):
        for _ in range(50):
            q = rng.dirichlet(np.ones(3))
            k = int(rng.integers(1, 9))
            ind, _ = run(np.tile(q, (k, 1)), rng.random(k) < 0.5)
            assert ind.s_e == pytest.approx(q[0], rel=1e-12)

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.tuples(
        st.floats(0.01, 0.98), st.floats(0.01, 0.98), st.booleans()),
        min_size=1, max_size=8), st.randoms())
    def test_permutation_invariance(self, raw, rnd):
        rows = []
        aligned = []
        for a, b, flag in raw:
            v = np.array([a, b, 1.0])
            rows.append(v / v.sum())
            aligned.append(flag)
        base, _ = run(rows, aligned)
        order = list(range(len(rows)))
        rnd.shuffle(order)
        shuffled, _ = run([rows[i] for i in order], [aligned[i] for i in order])
        assert shuffled.probs == pytest.approx(base.probs, abs=1e-12)

    def test_probs_sum_to_one(self, rng):
        for _ in range(300):
            k = int(rng.integers(1, 10))
            rows = rng.dirichlet(np.ones(3), size=k)
            cfg = FUZZY if rng.random() < 0.5 else MEAN
            ind, _ = run(rows, rng.random(k) < 0.5, cfg)
            assert abs(sum(ind.probs) - 1.0) <= 1e-12
            assert all(0.0 <= s <= 1.0 for s in (ind.s_e, ind.s_c, ind.s_n))

    def test_raising_aligned_contradiction_never_lowers_s_c(self, rng):
        for _ in range(100):
            k = int(rng.integers(1, 6))
            rows = rng.dirichlet(np.ones(3), size=k)
            aligned = rng.random(k) < 0.7
            if not aligned.any():
                aligned[0] = True
            base, _ = run(rows, aligned)
            i = int(rng.choice(np.flatnonzero(aligned)))
            bumped = rows.copy()
            bumped[i, 1] = min(1.0, bumped[i, 1] + 0.2)
            bumped[i] = bumped[i] / bumped[i].sum()
            if bumped[i, 1] < rows[i, 1]:
                continue
            after, _ = run(bumped, aligned)
            assert after.s_c >= base.s_c - 1e-12

    def test_adding_unaligned_pair_never_changes_s_c(self, rng):
        for _ in range(100):
            k = int(rng.integers(1, 6))
            rows = rng.dirichlet(np.ones(3), size=k)
            aligned = rng.random(k) < 0.7
            base, _ = run(rows, aligned)
            extra = rng.dirichlet(np.ones(3))
            grown, _ = run(np.vstack([rows, extra]), np.append(aligned, False))
            assert grown.s_c == base.s_c


class TestBackward:
    def test_single_pair_entailment_score_derivative_is_one(self):
        rows = np.array([[0.5, 0.3, 0.2]])
        eps = 1e-7
        up, _ = run([[0.5 + eps, 0.3, 0.2 - eps]], [True])
        down, _ = run([[0.5 - eps, 0.3, 0.2 + eps]], [True])
        # s_e = q_E for a single pair, so the derivative along q_E is 1
        assert (up.s_e - down.s_e) / (2 * eps) == pytest.approx(1.0, rel=1e-6)

    def test_non_argmax_contradiction_gets_zero_gradient(self):
        rows = np.array([[0.3, 0.6, 0.1], [0.5, 0.2, 0.3]])
        ind, cache = run(rows, [True, True])
        d = induce_backward(cache, np.array([0.0, 1.0, 0.0]))
        assert d[1, 1] == 0.0
        assert d[0, 1] != 0.0
        # consistency with a direct perturbation of the non-argmax entry
        bumped = rows.copy()
        bumped[1, 1] += 1e-6
        bumped[1, 0] -= 1e-6
        after, _ = run(bumped, [True, True])
        assert after.s_c == ind.s_c

    @staticmethod
    def direct_probs(rows, aligned, mode="fuzzy", eps=1e-12):
        """Independent direct evaluation of the induction formulas.

        Unlike the library entry point this accepts rows that do not sum
        to one, which makes entry-wise finite differences possible."""
        q = np.clip(np.asarray(rows, float), eps, 1.0)
        k = q.shape[0]
        if mode == "fuzzy":
            s_e = float(np.prod(q[:, 0]) ** (1.0 / k))
            s_c = float(q[aligned, 1].max()) if np.any(aligned) else 0.0
            s_n = float(q[:, 2].max()) * (1.0 - s_c)
            s = np.array([s_e, s_c, s_n])
        else:
            s = np.prod(q, axis=0) ** (1.0 / k)
        return s / s.sum()

    def test_matches_finite_differences_on_fixture(self):
        rows = np.array([[0.9, 0.05, 0.05], [0.4, 0.5, 0.1]])
        aligned = np.array([True, True])
        ind, cache = run(rows, aligned)
        target = 0
        g = np.zeros(3)
        g[target] = -1.0 / ind.probs[target]
        analytic = induce_backward(cache, g)
        eps = 1e-5
        for i in range(2):
            for j in range(3):
                up_rows = rows.copy(); up_rows[i, j] += eps
                down_rows = rows.copy(); down_rows[i, j] -= eps
                up = -math.log(self.direct_probs(up_rows, aligned)[target])
                down = -math.log(self.direct_probs(down_rows, aligned)[target])
                fd = (up - down) / (2 * eps)
                assert analytic[i, j] == pytest.approx(fd, rel=1e-4, abs=1e-8)

    def test_clamped_entries_get_zero_gradient(self):
        rows = np.array([[1.0, 0.0, 0.0], [0.5, 0.25, 0.25]])
        ind, cache = run(rows, [True, True])
        d = induce_backward(cache, np.array([1.0, 1.0, 1.0]))
        assert d[0, 1] == 0.0  # clamped to epsilon
        assert d[0, 2] == 0.0

    def test_mean_mode_finite_differences(self, rng):
        for _ in range(20):
            k = int(rng.integers(1, 5))
            rows = rng.dirichlet(np.full(3, 5.0), size=k)
            aligned = rng.random(k) < 0.5
            ind, cache = run(rows, aligned, MEAN)
            g = rng.normal(size=3)
            analytic = induce_backward(cache, g)
            eps = 1e-6
            for i in range(k):
                for j in range(3):
                    up_rows = rows.copy(); up_rows[i, j] += eps
                    down_rows = rows.copy(); down_rows[i, j] -= eps
                    up = float(np.dot(g, TestBackward.direct_probs(up_rows, aligned, "mean")))
                    down = float(np.dot(g, TestBackward.direct_probs(down_rows, aligned, "mean")))
                    fd = (up - down) / (2 * eps)
                    assert analytic[i, j] == pytest.approx(fd, rel=1e-4, abs=1e-6)

    def test_backward_shape_validation(self):
        _, cache = run([[0.5, 0.3, 0.2]], [True])
        with pytest.raises(ValidationError):
            induce_backward(cache, np.zeros(2))


class TestConfig:
    def test_epsilon_range(self):
        with pytest.raises(ValidationError):
            InductionConfig(epsilon=0.0)
        with pytest.raises(ValidationError):
            InductionConfig(epsilon=1e-3)
