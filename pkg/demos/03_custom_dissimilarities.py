"""
Working from kernels, ranks and separate candidate pools
========================================================

Only the dissimilarity matrix matters, so anything that produces one can be
plugged in: a Gram matrix, a rank transform of raw distances, or a candidate
pool Z that differs from the training points.
"""

import numpy as np

import pvm

rng = np.random.default_rng(0)
mix = pvm.gen_mixture(seed=3, n=120)
ds = mix.dataset

# %%
# A Gaussian-kernel Gram matrix turned into the kernel-induced distance.
sq = pvm.euclidean_matrix(ds.points) ** 2
K = np.exp(-sq / 4.0)
D_kernel = pvm.kernel_to_distance(K)
eps = pvm.distance_quantile(D_kernel, 0.1)
sol = pvm.greedy_select(pvm.build_incidence(D_kernel, ds.y, eps, 3), 1 / ds.n)
print("kernel distance:", sol.counts, "prototypes per class")

# %%
# Rank dissimilarity: with an integer radius r every ball holds the r - 1
# training points closest to its centre, which adapts to local density.
D_rank = pvm.rank_transform(pvm.euclidean_matrix(ds.points))
sol = pvm.greedy_select(pvm.build_incidence(D_rank, ds.y, 15.0, 3), 1 / ds.n)
print("rank dissimilarity, radius 15:", sol.counts, "prototypes per class")

# %%
# Candidates on a regular grid instead of the training points themselves.
lo, hi = ds.points.min(axis=0), ds.points.max(axis=0)
gx, gy = np.meshgrid(np.linspace(lo[0], hi[0], 25), np.linspace(lo[1], hi[1], 25))
Z = np.column_stack([gx.ravel(), gy.ravel()])
D_grid = pvm.euclidean_matrix(ds.points, Z)
sol = pvm.greedy_select(pvm.build_incidence(D_grid, ds.y, 1.0, 3), 1 / ds.n)
test = pvm.gen_mixture(seed=4, n=120, subcenters=mix.subcenters).dataset
pred = pvm.classify(pvm.euclidean_matrix(test.points, Z), sol).predicted
print("grid candidates:", sol.counts, "prototypes, test error",
      round(pvm.test_error(pred, test.y), 3))
