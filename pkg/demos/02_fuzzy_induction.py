"""How sentence labels emerge from phrasal distributions.

Run with:  python demos/02_fuzzy_induction.py
"""

import numpy as np

from phrasenli.induction import (
    InductionConfig,
    InductionMode,
    induce_arrays,
    induce_backward,
)

# Each row is one phrase pair's (E, C, N) distribution; the flag says
# whether the pair is aligned or matched against the EMPTY placeholder.
pairs = np.array([
    [0.90, 0.05, 0.05],   # "the lady" ↔ "the woman"         (clearly E)
    [0.40, 0.50, 0.10],   # "is sitting" ↔ "is standing"     (leaning C)
])
aligned = np.array([True, True])

ind, cache = induce_arrays(pairs, aligned, InductionConfig())
print("Entailment score   = geometric mean of P(E) over all pairs:")
print(f"  s_E = sqrt(0.9 * 0.4) = {ind.s_e:.4f}")
print("Contradiction score = max P(C) over aligned pairs:")
print(f"  s_C = {ind.s_c:.4f}")
print("Neutral score = max P(N) over all pairs, damped by (1 - s_C):")
print(f"  s_N = 0.1 * (1 - 0.5) = {ind.s_n:.4f}")
print(f"normalized: E {ind.probs[0]:.4f}  C {ind.probs[1]:.4f}  N {ind.probs[2]:.4f}")
print(f"sentence label: {ind.argmax().value}\n")

# A surplus phrase pairs with EMPTY.  It is excluded from the
# contradiction max (missing information cannot contradict) but still
# drags the entailment geometric mean and can carry the neutral max.
pairs2 = np.array([
    [0.80, 0.10, 0.10],
    [0.20, 0.30, 0.50],   # hypothesis-only phrase, paired with EMPTY
])
ind2, _ = induce_arrays(pairs2, np.array([True, False]), InductionConfig())
print("with a surplus hypothesis phrase:")
print(f"  s_E={ind2.s_e:.4f}  s_C={ind2.s_c:.4f} (EMPTY pair excluded)  "
      f"s_N={ind2.s_n:.4f}  ->  {ind2.argmax().value}\n")

# Everything is almost everywhere differentiable, so sentence-level
# supervision reaches each pair.  The gradient of -log P(C) flows to the
# argmax pair of the contradiction max and through the geometric mean.
grad_out = np.zeros(3)
grad_out[1] = -1.0 / ind.probs[1]          # d(-log P(C)) / dP(C)
grad_pairs = induce_backward(cache, grad_out)
print("gradient of -log P_sentence(C) at each pair probability:")
for row, g in zip(pairs, grad_pairs):
    print(f"  pair {row} -> {np.array2string(g, precision=3)}")

# The mean-induction ablation replaces all three rules with per-column
# geometric means; it can no longer express "one contradictory pair
# decides the sentence".
mean_ind, _ = induce_arrays(pairs, aligned, InductionConfig(mode=InductionMode.MEAN))
print(f"\nmean induction on the same pairs: "
      f"E {mean_ind.probs[0]:.4f}  C {mean_ind.probs[1]:.4f}  N {mean_ind.probs[2]:.4f}")
