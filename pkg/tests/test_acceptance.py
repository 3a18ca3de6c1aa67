"""Exit criteria for the package, one test per criterion."""

import math
import sys
import time
from fractions import Fraction

import numpy as np
import pytest

from pvm import io
from pvm.classifier import classify
from pvm.cli import main
from pvm.coverage import build_incidence, evaluate_objective
from pvm.dissimilarity import euclidean_matrix
from pvm.greedy import greedy_per_class, greedy_select
from pvm.harness import (brute_force_joint, brute_force_optimum, class_optimum,
                         gen_mixture, select_prototypes)
from pvm.lp_round import (alpha_matrix, build_class_lp, draw_objectives, eta_star, opt_lp,
                          randomized_round, rounding_bound, solve_lp, solve_relaxation)

from instances import one_nn, random_incidence, vertex_enumeration

LP_SLACK = 1e-7


def _instances(count, seed):
    """Small random instances: geometric (Z separate or Z = X) and non-metric."""
    rng = np.random.default_rng(seed)
    out = []
    for k in range(count):
        kind = k % 3
        if kind == 0:
            out.append(random_incidence(rng))
        elif kind == 1:
            out.append(random_incidence(rng, n_max=8, same=True))
        else:
            out.append(_nonmetric(rng))
    return out


def _nonmetric(rng, density=0.5):
    L = int(rng.integers(1, 4))
    n = int(rng.integers(max(L, 2), 13))
    m = int(rng.integers(1, 9))
    y = np.concatenate([np.arange(L), rng.integers(0, L, n - L)])
    rng.shuffle(y)
    D = rng.random((n, m))
    D = np.where(rng.random((n, m)) < density, 0.5 * D, 1 + D)
    lam = [0.0, 1.0 / n, 1.0][int(rng.integers(3))]
    return build_incidence(D, y, 1.0, L), lam


@pytest.fixture(scope="module")
def instances():
    return _instances(200, 2024)


def test_c1_optimality_sandwich(instances, record_property):
    record_property("criterion", "C1 OPT_LP <= OPT_IP <= min(greedy, best-of-200 rounding)")
    start = time.perf_counter()
    gaps = []
    for k, (inc, lam) in enumerate(instances):
        lp_sols = solve_relaxation(inc, lam)
        lp_val = opt_lp(lp_sols)
        ip, _ = brute_force_optimum(inc, lam)
        greedy = greedy_select(inc, lam).objective.total
        rounded = randomized_round(inc, lp_sols, lam, 200, seed=k).solution.objective.total
        assert lp_val <= ip.total + LP_SLACK
        assert ip.total <= greedy + 1e-12
        assert ip.total <= rounded + 1e-12
        gaps.append(greedy - ip.total)
    elapsed = time.perf_counter() - start
    record_property("detail", f"greedy optimal on {sum(g < 1e-12 for g in gaps)}/200, "
                              f"max greedy gap {max(gaps):.3f}, {elapsed:.1f}s")
    assert elapsed < 60


def test_c2_class_separability_of_the_optimum(instances, record_property):
    record_property("criterion", "C2 joint brute force == sum of per-class optima")
    for inc, lam in instances:
        lam_q = Fraction(lam)
        integer, count, sets = brute_force_joint(inc, lam)
        joint = integer + lam_q * count
        per_class = Fraction(0)
        for l in range(inc.num_classes):
            i_l, c_l, _ = class_optimum(inc, lam, l)
            per_class += i_l + lam_q * c_l
        assert joint == per_class
        b = evaluate_objective(inc, sets, lam)
        assert b.xi_total + b.eta_total == integer and b.proto_count == count


def _fractional_instances(count, seed):
    rng = np.random.default_rng(seed)
    found = []
    while len(found) < count:
        inc, lam = _nonmetric(rng)
        sols = solve_relaxation(inc, lam)
        a = alpha_matrix(sols)
        if ((a > 1e-6) & (a < 1 - 1e-6)).any():
            found.append((inc, lam, sols))
    return found


def test_c3_rounding_expectation_bound(record_property):
    record_property("criterion", "C3 E[OBJ] <= n/e + OPT_LP and E[T_i] = eta_i* (Monte Carlo)")
    draws = 10_000
    margins = []
    for k, (inc, lam, sols) in enumerate(_fractional_instances(20, 77)):
        alpha = alpha_matrix(sols)
        objs, _, S, T = draw_objectives(inc, alpha, lam, draws, seed=1000 + k, keep_slacks=True)
        mean, sd = objs.mean(), objs.std(ddof=1)
        bound = rounding_bound(inc.n, opt_lp(sols))
        assert mean <= bound + 3 * sd / math.sqrt(draws)
        margins.append(bound - mean)
        expected = eta_star(inc, alpha)
        t_mean = T.mean(axis=0)
        t_se = T.std(axis=0, ddof=1) / math.sqrt(draws)
        for i in range(inc.n):
            if t_se[i] == 0:
                assert t_mean[i] == pytest.approx(expected[i], abs=1e-9)
            else:
                assert abs(t_mean[i] - expected[i]) <= 4 * t_se[i]
    record_property("detail", f"min bound - mean = {min(margins):.3f}")


def test_c4_one_nn_reduction(record_property):
    record_property("criterion", "C4 smallest epsilon, Z = X, lam = 1/n reproduces 1-NN")
    rng = np.random.default_rng(4)
    for _ in range(20):
        n = int(rng.integers(10, 60))
        L = int(rng.integers(2, 5))
        X = rng.normal(size=(n, 3))
        y = np.concatenate([np.arange(L), rng.integers(0, L, n - L)])
        D = euclidean_matrix(X)
        off = D[~np.eye(n, dtype=bool)]
        assert np.unique(off).size == off.size // 2  # distinct distances
        inc = build_incidence(D, y, off.min(), L)
        sol = greedy_select(inc, 1 / n)
        assert sorted(j for P in sol.prototype_sets for j in P) == list(range(n))
        Q = rng.normal(size=(100, 3))
        Dq = euclidean_matrix(Q, X)
        assert np.array_equal(classify(Dq, sol).predicted, one_nn(Dq, y))


def test_c5_rounded_slacks_match_objective(record_property):
    record_property("criterion", "C5 OBJ from (S, T, lam*sum A) == evaluate_objective, exactly")
    rng = np.random.default_rng(5)
    checked = 0
    while checked < 1000:
        inc, lam = random_incidence(rng) if checked % 2 else _nonmetric(rng)
        alpha = rng.random((inc.m, inc.num_classes))
        seed = int(rng.integers(1 << 31))
        objs, _, S, T = draw_objectives(inc, alpha, lam, 50, seed, keep_slacks=True)
        u = np.random.default_rng(seed).random((50, inc.num_classes, inc.m))
        for b in range(50):
            A = u[b].T < alpha
            sets = tuple(np.flatnonzero(A[:, l]) for l in range(inc.num_classes))
            ref = evaluate_objective(inc, sets, lam)
            assert objs[b] == ref.total
            assert S[b].sum() == ref.xi_total and T[b].sum() == ref.eta_total
            checked += 1


def test_c6_greedy_trace_and_separability(record_property):
    record_property("criterion", "C6 greedy trace decreases by recorded dObj; per-class == joint")
    rng = np.random.default_rng(6)
    for _ in range(100):
        inc, lam = random_incidence(rng) if rng.random() < 0.5 else _nonmetric(rng)
        sol = greedy_select(inc, lam)
        sets = [[] for _ in range(inc.num_classes)]
        prev = evaluate_objective(inc, sets, lam)
        for step in sol.trace:
            sets[step.klass].append(step.candidate)
            cur = evaluate_objective(inc, sets, lam)
            assert step.d_obj > 0
            assert cur.total < prev.total
            assert (prev.xi_total + prev.eta_total) - (cur.xi_total + cur.eta_total) \
                == step.d_xi - step.d_eta
            assert cur.proto_count == prev.proto_count + 1
            assert prev.total - cur.total == pytest.approx(step.d_obj, abs=1e-12)
            prev = cur
        assert prev == sol.objective
        sep = greedy_per_class(inc, lam)
        assert [set(P) for P in sol.prototype_sets] == [set(P) for P in sep.prototype_sets]


def test_c7_mixture_generator(record_property):
    record_property("criterion", "C7 mixture: 100 per class, covariance I/5 within 5%, reproducible")
    mix = gen_mixture(11, 300)
    assert np.bincount(mix.dataset.y).tolist() == [100, 100, 100]
    again = gen_mixture(11, 300)
    assert np.array_equal(mix.dataset.points, again.dataset.points)
    assert np.array_equal(mix.dataset.labels, again.dataset.labels)
    # about 10^4 points per subcenter
    big = gen_mixture(12, 300_000, subcenters=mix.subcenters)
    worst = 0.0
    for l in range(3):
        for j in range(10):
            sel = (big.dataset.y == l) & (big.component == j)
            resid = big.dataset.points[sel] - mix.subcenters[l, j]
            cov = np.cov(resid.T)
            worst = max(worst, np.abs(np.diag(cov) / 0.2 - 1).max())
    record_property("detail", f"worst relative deviation {worst:.3%}")
    assert worst < 0.05


def test_c8_end_to_end_mixture(tmp_path, record_property):
    record_property("criterion", "C8 10-fold CV on n=300 mixture (both algorithms) < 5 min, beats majority")
    mix = gen_mixture(2009, 300)
    pts, lab, table = tmp_path / "pts.csv", tmp_path / "lab.txt", tmp_path / "cv.csv"
    io.write_matrix(pts, mix.dataset.points)
    io.write_labels(lab, mix.dataset.labels)
    start = time.perf_counter()
    assert main(["cv", "--points", str(pts), "--labels", str(lab), "--grid-count", "10",
                 "--q-lo", "0", "--q-hi", "0.5", "--folds", "10", "--algorithm", "both",
                 "--seed", "1", "--out", str(table)]) == 0
    elapsed = time.perf_counter() - start
    assert elapsed < 300
    rows = [ln.split(",") for ln in table.read_text().splitlines()[1:]]
    chosen = {r[0]: float(r[1]) for r in rows if r[-1] == "1"}
    assert set(chosen) == {"greedy", "lp_round"}

    fresh = gen_mixture(2010, 300, subcenters=mix.subcenters).dataset
    majority = 1 - np.bincount(fresh.y).max() / fresh.n
    D = euclidean_matrix(mix.dataset.points)
    Dq = euclidean_matrix(fresh.points, mix.dataset.points)
    details = []
    for alg, eps in chosen.items():
        sol = select_prototypes(D, mix.dataset.y, eps, algorithm=alg, seed=1, num_classes=3)
        err = np.mean(classify(Dq, sol).predicted != fresh.y)
        details.append(f"{alg}: eps={eps:.3f} protos={sum(sol.counts)} test err={err:.3f}")
        assert err < majority
    record_property("detail", f"cv {elapsed:.0f}s; " + "; ".join(details)
                    + f"; majority err={majority:.3f}")


def _tiny_class_lp(rng):
    """Class-0 LP with k + m <= 6 variables over a random covering pattern.

    Extra class-1 points only change the candidate costs.
    """
    extra = int(rng.integers(0, 4))
    if rng.random() < 1 / 3:
        # each point covered by exactly two of three candidates: fractional optimum
        k = m = 3
        own = ~np.eye(3, dtype=bool)[rng.permutation(3)]
    else:
        k = int(rng.integers(1, 4))
        m = int(rng.integers(1, 7 - k))
        own = rng.random((k, m)) < 0.6
    y = np.array([0] * k + [1] * extra)
    covered = np.vstack([own, rng.random((extra, m)) < 0.3])
    D = np.where(covered, 0.0, 2.0)
    lam = [0.0, 1.0 / (k + extra), 0.5, 1.0][int(rng.integers(4))]
    return build_class_lp(build_incidence(D, y, 1.0, 2), lam, 0)


def test_c9_simplex_vs_vertex_enumeration(record_property):
    record_property("criterion", "C9 simplex == vertex enumeration on 50 class LPs (<= 6 vars)")
    rng = np.random.default_rng(9)
    done = fractional = 0
    while done < 50:
        if done % 2:
            inc, lam = random_incidence(rng, n_max=5, m_max=4)
            lps = [build_class_lp(inc, lam, l) for l in range(inc.num_classes)]
        else:
            lps = [_tiny_class_lp(rng)]
        for lp in lps:
            if lp.num_candidates + lp.members.size > 6 or done >= 50:
                continue
            sol = solve_lp(lp)
            assert sol.objective == pytest.approx(vertex_enumeration(*lp.arrays()), abs=1e-8)
            fractional += bool(((sol.alpha > 1e-9) & (sol.alpha < 1 - 1e-9)).any())
            done += 1
    record_property("detail", f"{fractional} fractional optima")
