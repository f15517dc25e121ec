"""How many pairs stay uncovered?  Fit the exponent of the leftover count.

For ell = 4 (the triangle removal process) the leftover is expected to grow
like n^(3/2), up to lower-order factors.
"""
from girth_triples.experiments import sweep

report, _ = sweep([100, 141, 200, 283, 400], 4, range(5), snapshot_times=())
for n, agg in sorted(report.per_n.items()):
    print(f"n={n:4d}: remaining {agg['mean']:8.1f} +- {agg['std']:6.1f}, covered {agg['covered']:.4f}")
print(f"fitted exponent: {report.fitted_exponent:.3f}")
