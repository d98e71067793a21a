"""Synthesize a 36-question survey, rank questions by chi-squared, then run backward elimination."""

import numpy as np

from vulnscreen import generate, paper_shaped_preset, rank_features, stratified_split
from vulnscreen.selection import accuracy_curve, backward_eliminate, default_configs

cfg = paper_shaped_preset(seed=7)   # 486 respondents, 18 informative questions, delta 0.6
ds = generate(cfg)
print(ds.n, "respondents,", ds.p, "questions,", int(ds.labels.sum()), "addicted")

report = rank_features(ds)
for r in report.results[:10]:
    star = "*" if r.feature_id in cfg.informative_ids else " "
    print(f"{star} {r.feature_id:>4}  chi2={r.statistic:8.2f}  df={r.df}  p={r.p_value:.2e}")

hits = len(set(report.ranked_ids[:18]) & set(cfg.informative_ids))
print("informative questions in the top 18:", hits)

split = stratified_split(ds, 1 / 3, seed=7)
print("train/test:", len(split.train), len(split.test))

# full 36 x 6 grid, dropping the lowest-ranked question each round
trace = backward_eliminate(ds, report.ranked_ids, split, base_configs=default_configs(7))
w = trace.winner
print("winner:", w.kind, "n =", w.n, "accuracy =", round(w.accuracy, 4), "auc =", round(w.auc, 4))

curve = accuracy_curve(trace, "LogisticRegression")
for n in (36, 18, 10, 5, 2, 1):
    print(f"LR accuracy with top {n:2d}: {curve[n]:.4f}")
