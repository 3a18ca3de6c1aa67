"""
Sweeping the ball radius on a three-class Gaussian mixture
==========================================================

Small radii keep almost every training point (nearest-neighbour behaviour);
larger radii let a few prototypes summarise each class.  This script fits the
greedy solver along a grid of radii and reports prototype counts and the error
on a fresh sample from the same mixture.
"""

import numpy as np

import pvm

mix = pvm.gen_mixture(seed=1, n=300)
train = mix.dataset
test = pvm.gen_mixture(seed=2, n=300, subcenters=mix.subcenters).dataset

D = pvm.euclidean_matrix(train.points)
D_test = pvm.euclidean_matrix(test.points, train.points)

# ten radii from the smallest interpoint distance to the median
grid = pvm.epsilon_grid(D, count=10, lo_q=0.0, hi_q=0.5)

print(f"{'epsilon':>9} {'prototypes':>10} {'per class':>14} {'objective':>10} {'test err':>9}")
for eps in grid:
    inc = pvm.build_incidence(D, train.y, eps, train.num_classes)
    sol = pvm.greedy_select(inc, lam=1 / train.n)
    err = pvm.test_error(pvm.classify(D_test, sol).predicted, test.y)
    print(f"{eps:9.3f} {sum(sol.counts):10d} {str(sol.counts):>14} "
          f"{sol.objective.total:10.3f} {err:9.3f}")

# %%
# The first row is the 1-NN end of the sweep: every training point is its own
# prototype.  Compare with plain nearest neighbour on the same split.
full = tuple(np.flatnonzero(train.y == l) for l in range(3))
print("1-NN test error:", pvm.test_error(pvm.classify(D_test, full).predicted, test.y))

# %%
# Optional picture of one solution: training points, prototypes and their balls.
try:
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt
except ImportError:
    plt = None

if plt is not None:
    eps = grid[len(grid) // 2]
    inc = pvm.build_incidence(D, train.y, eps, 3)
    sol = pvm.greedy_select(inc, 1 / train.n)
    fig, ax = plt.subplots(figsize=(6, 6))
    colors = ["tab:blue", "tab:orange", "tab:green"]
    for l in range(3):
        pts = train.points[train.y == l]
        ax.scatter(pts[:, 0], pts[:, 1], s=8, color=colors[l], alpha=0.5)
        for j in sol.prototype_sets[l]:
            ax.add_patch(plt.Circle(train.points[j], eps, fill=False, color=colors[l]))
            ax.plot(*train.points[j], "k+")
    ax.set_aspect("equal")
    ax.set_title(f"epsilon = {eps:.2f}, {sum(sol.counts)} prototypes")
    fig.savefig("mixture_prototypes.png", dpi=100)
    print("saved mixture_prototypes.png")
