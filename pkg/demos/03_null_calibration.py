"""With no signal at all, the chi-squared test should reject about alpha of the time."""

import numpy as np

from vulnscreen import SynthConfig, generate, rank_features

seeds = range(100)
alpha = 0.05
rejects = np.zeros(36, int)
pvals = []

for seed in seeds:
    rep = rank_features(generate(SynthConfig(n=486, delta=0.0, seed=seed)), alpha)
    for r in rep.results:
        rejects[int(r.feature_id[1:]) - 1] += r.reject_null
        pvals.append(r.p_value)

print("pooled rejection rate:", rejects.sum() / (36 * len(seeds)))
print("per question (out of 100):", rejects.tolist())

# p-values under the null are uniform, so each decile holds about 10%
hist, _ = np.histogram(pvals, bins=10, range=(0, 1))
print("p-value deciles:", np.round(hist / len(pvals), 3).tolist())

# a single question at 100 trials wanders a lot; binomial sd is about 2.2 rejections
print("expected spread per question: 5 +/-", round(np.sqrt(100 * alpha * (1 - alpha)), 2))
