"""Friedman ranks and Nemenyi groups for a small table of made-up RMSEs."""

import numpy as np

from threshaug.report import build_critical_diagram
from threshaug.stats import friedman_mean_ranks

variants = ("linear", "tree", "linear+", "tree+")
rng = np.random.default_rng(3)
base = np.array([1.0, 0.8, 0.6, 0.55])
table = base + rng.normal(0, 0.08, size=(20, 4))   # 20 datasets

summary = friedman_mean_ranks(table, variants)
print(f"Friedman chi2 = {summary.chi2:.2f} (p = {summary.chi2_p:.2g}), CD = {summary.cd:.3f}")

diagram = build_critical_diagram(summary)
for name, rank in zip(diagram.variants, diagram.mean_ranks):
    print(f"  {name:8s} {rank:.2f}")
for a, b in diagram.groups:
    print("  not separable:", ", ".join(diagram.variants[a:b + 1]))
