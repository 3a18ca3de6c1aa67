"""
Greedy search versus LP relaxation with randomized rounding
===========================================================

The LP optimum is a lower bound on the best achievable objective.  Each
rounding draw has expected objective at most n/e above it; keeping the best of
a few hundred draws usually lands much closer.
"""

import numpy as np

import pvm

mix = pvm.gen_mixture(seed=5, n=150)
ds = mix.dataset
D = pvm.euclidean_matrix(ds.points)
lam = 1 / ds.n

for q in (0.05, 0.2, 0.4):
    eps = pvm.distance_quantile(D, q)
    inc = pvm.build_incidence(D, ds.y, eps, ds.num_classes)
    greedy = pvm.greedy_select(inc, lam)
    res = pvm.lp_round(inc, lam, rounds=200, seed=0)
    print(f"quantile {q:.2f}  epsilon {eps:.3f}")
    print(f"  LP optimum             {res.opt_lp:8.3f}")
    print(f"  best of 200 draws      {res.best_objective:8.3f}  "
          f"(mean {res.objectives.mean():.3f}, bound n/e + OPT_LP = {res.bound:.3f})")
    print(f"  greedy                 {greedy.objective.total:8.3f}  "
          f"({sum(greedy.counts)} prototypes)")

# %%
# Per-class LPs can be inspected directly.  Fractional values show where the
# relaxation hedges between overlapping balls.
eps = pvm.distance_quantile(D, 0.2)
inc = pvm.build_incidence(D, ds.y, eps, ds.num_classes)
for sol in pvm.solve_relaxation(inc, lam):
    frac = np.count_nonzero((sol.alpha > 1e-9) & (sol.alpha < 1 - 1e-9))
    print(f"class {sol.klass + 1}: LP value {sol.objective:.3f}, "
          f"{np.count_nonzero(sol.alpha > 1e-9)} candidates used, {frac} fractional")

# %%
# The greedy trace records how much each added prototype improved the fit.
greedy = pvm.greedy_select(inc, lam)
improvements = [s.d_xi - s.d_eta for s in greedy.trace]
print("first ten improvements:", improvements[:10])
print("steps that only cover one new point:", sum(i == 1 for i in improvements))
