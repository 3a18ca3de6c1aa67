"""
Choosing the radius by cross-validation
=======================================

Ten-fold CV over a quantile grid, then the one-standard-error rule picks the
sparsest radius whose error is within one SE of the best.
"""

import pvm

mix = pvm.gen_mixture(seed=8, n=300)
ds = mix.dataset
D = pvm.euclidean_matrix(ds.points)
grid = pvm.epsilon_grid(D, 10, 0.0, 0.5)

cv = pvm.kfold_cv(D, ds.y, grid, folds=10, seed=0)
print(f"{'epsilon':>8} {'cv error':>9} {'SE':>7} {'prototypes':>10}")
for eps, err, se, cnt in cv.table():
    mark = "  <- chosen" if eps == cv.chosen else ""
    print(f"{eps:8.3f} {err:9.3f} {se:7.3f} {cnt:10.1f}{mark}")

test = pvm.gen_mixture(seed=9, n=300, subcenters=mix.subcenters).dataset
sol = pvm.select_prototypes(D, ds.y, cv.chosen)
err = pvm.test_error(pvm.classify(pvm.euclidean_matrix(test.points, ds.points), sol).predicted,
                     test.y)
print(f"refit at epsilon {cv.chosen:.3f}: {sum(sol.counts)} prototypes, test error {err:.3f}")
