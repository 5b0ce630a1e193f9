import numpy as np
import pytest
from scipy import stats as sps

from turbo import gp
from turbo.acquisition import draw_normals, select_batch, select_from_posteriors
from turbo.candidates import CandidateSet
from turbo.exceptions import NoActiveRegionError
from turbo.gp import KernelParams, Posterior, StandardizationStats

UNIT = StandardizationStats(0.0, 1.0)


def degenerate(means):
    means = np.asarray(means, dtype=float)
    return Posterior(means, np.zeros((means.size, means.size)))


def cset(points):
    points = np.asarray(points, dtype=float)
    return CandidateSet(points, np.ones_like(points, dtype=bool))


def one_point_model(x, y, ls=0.3):
    return gp.build_model(np.array([x]), [y], KernelParams([ls] * len(x), 1.0, 0.01))


class TestDegenerate:
    def test_single_region_picks_mean_argmin(self, rng):
        pts = np.array([[0.1], [0.2], [0.3], [0.4]])
        sel = select_from_posteriors([degenerate([3.0, 1.0, 2.0, 5.0])], [UNIT], [pts], 1, rng)
        np.testing.assert_array_equal(sel.points, [[0.2]])
        assert sel.candidate_index.tolist() == [1]
        assert sel.sampled_values.tolist() == [1.0]

    def test_lower_region_wins_every_draw(self, rng):
        pts = [np.array([[0.1], [0.2]]), np.array([[0.7], [0.8]])]
        posts = [degenerate([1.0, 2.0]), degenerate([3.0, 0.5])]
        sel = select_from_posteriors(posts, [UNIT, UNIT], pts, 6, rng)
        assert sel.tr_assignment.tolist() == [1] * 6
        np.testing.assert_array_equal(sel.points, [[0.8]] * 6)

    def test_comparison_in_raw_units(self, rng):
        # region 0 has the lower standardized value but the higher raw value
        pts = [np.array([[0.1]]), np.array([[0.9]])]
        posts = [degenerate([-2.0]), degenerate([0.0])]
        stats = [StandardizationStats(10.0, 1.0), StandardizationStats(0.0, 1.0)]
        sel = select_from_posteriors(posts, stats, pts, 1, rng)
        assert sel.tr_assignment.tolist() == [1]
        assert sel.raw_values.tolist() == [0.0]

    def test_shift_moves_raw_values_by_constant(self):
        pts = [np.array([[0.1], [0.2]]), np.array([[0.7], [0.8]])]
        posts = [degenerate([1.0, 2.0]), degenerate([3.0, 0.5])]
        c = 100.0
        base = select_from_posteriors(posts, [UNIT, UNIT], pts, 3, np.random.default_rng(0))
        shifted = select_from_posteriors(
            posts, [StandardizationStats(c, 1.0)] * 2, pts, 3, np.random.default_rng(0)
        )
        np.testing.assert_array_equal(shifted.points, base.points)
        np.testing.assert_allclose(shifted.raw_values, base.raw_values + c, rtol=0, atol=1e-12)

    def test_ties_go_to_lowest_region_then_candidate(self, rng):
        pts = [np.array([[0.1], [0.2]]), np.array([[0.7], [0.8]])]
        posts = [degenerate([1.0, 1.0]), degenerate([1.0, 1.0])]
        sel = select_from_posteriors(posts, [UNIT, UNIT], pts, 2, rng, region_ids=[4, 7])
        assert sel.tr_assignment.tolist() == [4, 4]
        assert sel.candidate_index.tolist() == [0, 0]


def exhaustive_oracle(models, csets, q, rng, region_ids):
    """Reimplementation of 'sample every region, take the global minimum'."""
    base = int(rng.integers(2**63))
    samples = []
    for model, cs, rid in zip(models, csets, region_ids):
        post = gp.posterior(model, cs.points)
        L = np.linalg.cholesky(post.covariance)
        draws = []
        for i in range(q):
            z = np.random.default_rng([base, i, rid]).standard_normal(cs.r)
            draws.append(model.stats.mean + model.stats.std_dev * (post.mean + L @ z))
        samples.append(draws)
    picks = []
    for i in range(q):
        best = None
        for pos, (cs, rid) in enumerate(zip(csets, region_ids)):
            for j in range(cs.r):
                v = samples[pos][i][j]
                if best is None or v < best[0]:
                    best = (v, rid, j)
        picks.append(best[1:])
    return picks


class TestAgainstOracle:
    def test_two_regions_three_candidates(self):
        models = [
            gp.build_model(np.array([[0.2, 0.2], [0.3, 0.1]]), [1.0, 3.0], KernelParams([0.3, 0.3], 1.0, 0.01)),
            gp.build_model(np.array([[0.8, 0.7], [0.6, 0.9]]), [2.0, 2.5], KernelParams([0.2, 0.4], 1.5, 0.01)),
        ]
        csets = [
            cset([[0.25, 0.2], [0.1, 0.3], [0.3, 0.3]]),
            cset([[0.75, 0.7], [0.8, 0.8], [0.7, 0.85]]),
        ]
        for seed in range(20):
            sel = select_batch(models, csets, 5, np.random.default_rng(seed), region_ids=[0, 1])
            expected = exhaustive_oracle(models, csets, 5, np.random.default_rng(seed), [0, 1])
            assert list(zip(sel.tr_assignment.tolist(), sel.candidate_index.tolist())) == expected
            for k, (rid, j) in enumerate(expected):
                np.testing.assert_array_equal(sel.points[k], csets[rid].points[j])

    def test_one_point_posteriors(self):
        models = [one_point_model([0.5], 0.0), one_point_model([0.5], 0.0, ls=0.1)]
        csets = [cset([[0.4], [0.5], [0.9]]), cset([[0.1], [0.45], [0.6]])]
        for seed in range(20):
            sel = select_batch(models, csets, 3, np.random.default_rng(seed))
            expected = exhaustive_oracle(models, csets, 3, np.random.default_rng(seed), [0, 1])
            assert list(zip(sel.tr_assignment.tolist(), sel.candidate_index.tolist())) == expected


class TestDistribution:
    def test_single_region_matches_thompson_probabilities(self):
        mean = np.array([0.0, 0.1, -0.1, 0.3, 0.05])
        A = np.random.default_rng(1).standard_normal((5, 5)) * 0.3
        cov = A @ A.T + 0.05 * np.eye(5)
        post = Posterior(mean, cov)
        pts = np.arange(5.0)[:, None]

        # independent Monte Carlo estimate of P(candidate j is the argmin)
        mc = np.random.default_rng(99).multivariate_normal(mean, cov, size=1_000_000)
        probs = np.bincount(mc.argmin(1), minlength=5) / mc.shape[0]

        reps = 10_000
        rng = np.random.default_rng(2024)
        counts = np.zeros(5)
        for _ in range(reps):
            sel = select_from_posteriors([post], [UNIT], [pts], 1, rng)
            counts[sel.candidate_index[0]] += 1
        _, p = sps.chisquare(counts, probs * reps)
        assert p > 1e-3


class TestMisc:
    def test_membership(self, rng):
        X = rng.random((8, 3))
        models = [gp.build_model(X, X.sum(1), KernelParams([0.4] * 3, 1.0, 0.01)) for _ in range(3)]
        csets = [cset(rng.random((20, 3))) for _ in range(3)]
        sel = select_batch(models, csets, 10, rng, region_ids=[2, 5, 9])
        assert sel.points.shape == (10, 3)
        lookup = {2: 0, 5: 1, 9: 2}
        for p, rid, j in zip(sel.points, sel.tr_assignment, sel.candidate_index):
            np.testing.assert_array_equal(p, csets[lookup[rid]].points[j])

    def test_no_regions(self, rng):
        with pytest.raises(NoActiveRegionError):
            select_batch([], [], 1, rng)

    def test_streams_independent_of_region_order(self):
        a = draw_normals(5, 0, 1, 4)
        draw_normals(5, 0, 0, 4)
        assert np.array_equal(a, draw_normals(5, 0, 1, 4))
        assert not np.array_equal(a, draw_normals(5, 1, 1, 4))
