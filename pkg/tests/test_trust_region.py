import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from turbo import gp
from turbo import trust_region as tr
from turbo.exceptions import ContractViolation


def make_state(length=0.8, succ=0, fail=0, d=2, center=None):
    c = np.full(d, 0.5) if center is None else np.asarray(center, dtype=float)
    return tr.TrustRegionState(center=c, incumbent_value=0.0, base_length=length, success_count=succ, failure_count=fail)


def interpret(events, cfg):
    """Brute-force reading of the resizing rules, one event at a time.

    Each event is (improved, points). Returns the list of
    (length, succ, fail, terminated) after every event; stops at termination.
    """
    length, succ, fail = cfg.l_init, 0, 0
    out = []
    for improved, points in events:
        if improved:
            succ += 1
            fail = 0
        else:
            succ = 0
            fail += points
            if fail > cfg.tau_fail:
                fail = cfg.tau_fail
        if succ == cfg.tau_succ:
            length = min(cfg.l_max, 2 * length)
            succ, fail = 0, 0
        if fail == cfg.tau_fail:
            length = length / 2
            succ, fail = 0, 0
        dead = length < cfg.l_min
        out.append((length, succ, fail, dead))
        if dead:
            break
    return out


def run_machine(events, cfg):
    s = make_state(cfg.l_init)
    out = []
    for improved, points in events:
        s = tr.record_batch(s, improved, points, cfg)
        out.append((s.base_length, s.success_count, s.failure_count, not s.active))
        if not s.active:
            break
    return out


class TestConfig:
    def test_defaults(self):
        cfg = tr.TRConfig.default(d=10, q=10)
        assert (cfg.tau_succ, cfg.tau_fail) == (3, 1)
        assert (cfg.l_min, cfg.l_max, cfg.l_init) == (2**-7, 1.6, 0.8)

    def test_tau_fail_rounds_up(self):
        assert tr.TRConfig.default(d=10, q=3).tau_fail == 4
        assert tr.TRConfig.default(d=6, q=10).tau_fail == 1

    def test_multiple_regions_use_sequential_tolerance(self):
        assert tr.TRConfig.default(d=6, q=10, num_regions=5).tau_fail == 6

    def test_invalid_lengths(self):
        with pytest.raises(ValueError):
            tr.TRConfig(l_min=1.0, l_init=0.8)


class TestSideLengths:
    def test_isotropic(self):
        np.testing.assert_allclose(tr.side_lengths(0.8, [0.3] * 5), 0.8)

    def test_hand_example(self):
        np.testing.assert_allclose(tr.side_lengths(0.8, [2.0, 0.5]), [1.6, 0.4])

    @settings(max_examples=100, deadline=None)
    @given(
        st.floats(1e-3, 2.0),
        st.lists(st.floats(0.005, 2.0), min_size=1, max_size=30),
    )
    def test_volume_identity(self, length, lam):
        L = tr.side_lengths(length, lam)
        d = len(lam)
        assert np.exp(np.sum(np.log(L))) == pytest.approx(length**d, rel=1e-10)


class TestBounds:
    def test_centered(self):
        lo, hi = tr.region_bounds(make_state(0.4, d=3))
        np.testing.assert_allclose(lo, 0.3)
        np.testing.assert_allclose(hi, 0.7)

    def test_clipped_at_origin(self):
        lo, hi = tr.region_bounds(make_state(0.4, center=[0.0, 0.0]))
        np.testing.assert_array_equal(lo, 0.0)
        np.testing.assert_allclose(hi, 0.2)

    def test_clipped_at_upper_face(self):
        lo, hi = tr.region_bounds(make_state(0.8, center=[0.95]))
        assert lo[0] == pytest.approx(0.55)
        assert hi[0] == 1.0

    def test_center_inside(self, rng):
        for _ in range(50):
            s = make_state(rng.uniform(0.01, 1.6), center=rng.random(4))
            lo, hi = tr.region_bounds(s, rng.uniform(0.005, 2.0, 4))
            assert np.all(lo <= s.center) and np.all(s.center <= hi)


class TestRecordBatch:
    cfg = tr.TRConfig(tau_succ=3, tau_fail=2)

    def test_third_success_doubles(self):
        s = tr.record_batch(make_state(0.8, succ=2), True, 1, self.cfg)
        assert s.base_length == 1.6
        assert (s.success_count, s.failure_count) == (0, 0)

    def test_expansion_capped_at_max(self):
        s = tr.record_batch(make_state(1.6, succ=2), True, 1, self.cfg)
        assert s.base_length == 1.6

    def test_failure_counter_capped(self):
        s = tr.record_batch(make_state(0.8), False, 5, self.cfg)
        assert s.base_length == 0.4
        assert (s.success_count, s.failure_count) == (0, 0)

    def test_failure_resets_successes(self):
        s = tr.record_batch(make_state(0.8, succ=2), False, 1, self.cfg)
        assert (s.success_count, s.failure_count) == (0, 1)

    def test_success_resets_failures(self):
        s = tr.record_batch(make_state(0.8, fail=1), True, 1, self.cfg)
        assert (s.success_count, s.failure_count) == (1, 0)

    def test_terminates_below_min(self):
        s = tr.record_batch(make_state(2**-7), False, 2, self.cfg)
        assert s.base_length == 2**-8
        assert s.status == tr.TERMINATED

    def test_exactly_min_stays_active(self):
        s = tr.record_batch(make_state(2**-6), False, 2, self.cfg)
        assert s.base_length == 2**-7 and s.active

    def test_terminated_state_rejected(self):
        dead = tr.record_batch(make_state(2**-7), False, 2, self.cfg)
        with pytest.raises(ContractViolation):
            tr.record_batch(dead, True, 1, self.cfg)

    def test_zero_points_rejected(self):
        with pytest.raises(ContractViolation):
            tr.record_batch(make_state(), False, 0, self.cfg)

    def test_input_state_untouched(self):
        s = make_state(0.8, succ=2)
        tr.record_batch(s, True, 1, self.cfg)
        assert s.base_length == 0.8 and s.success_count == 2

    @settings(max_examples=200, deadline=None)
    @given(
        st.integers(1, 5),
        st.integers(1, 12),
        st.lists(st.tuples(st.booleans(), st.integers(1, 20)), min_size=1, max_size=200),
    )
    def test_matches_interpreter(self, tau_succ, tau_fail, events):
        cfg = tr.TRConfig(tau_succ=tau_succ, tau_fail=tau_fail)
        assert run_machine(events, cfg) == interpret(events, cfg)

    @settings(max_examples=100, deadline=None)
    @given(st.lists(st.tuples(st.booleans(), st.integers(1, 4)), min_size=1, max_size=200))
    def test_trajectory_properties(self, events):
        cfg = tr.TRConfig(tau_succ=3, tau_fail=3)
        s = make_state(cfg.l_init)
        for improved, points in events:
            s = tr.record_batch(s, improved, points, cfg)
            # at most one counter nonzero, both below their thresholds
            assert s.success_count == 0 or s.failure_count == 0
            assert s.success_count < cfg.tau_succ and s.failure_count < cfg.tau_fail
            # length is l_init * 2^k, clipped to l_max
            k = math.log2(s.base_length / cfg.l_init)
            assert s.base_length == cfg.l_max or k == round(k)
            assert 0 < s.base_length <= cfg.l_max
            if not s.active:
                with pytest.raises(ContractViolation):
                    tr.record_batch(s, True, 1, cfg)
                break


class TestCenter:
    def test_single_observation(self):
        s = tr.add_observations(make_state(), [[0.1, 0.2]], [5.0])
        s = tr.update_center(s)
        np.testing.assert_array_equal(s.center, [0.1, 0.2])
        assert s.incumbent_value == 5.0

    def test_noise_free_argmin(self):
        s = tr.add_observations(make_state(), [[0.1, 0.1], [0.9, 0.9]], [3.0, 1.0])
        s = tr.update_center(s)
        np.testing.assert_array_equal(s.center, [0.9, 0.9])
        assert s.incumbent_raw == 1.0

    def test_tie_keeps_earlier(self):
        s = tr.add_observations(make_state(), [[0.1, 0.1], [0.9, 0.9]], [1.0, 1.0])
        np.testing.assert_array_equal(tr.update_center(s).center, [0.1, 0.1])

    def test_noisy_ignores_outlier(self):
        # a low raw value surrounded by high neighbours should not win
        X = np.array([[0.50], [0.51], [0.49], [0.10], [0.11], [0.09]])
        y = np.array([-1.0, 3.0, 3.0, 0.0, 0.1, 0.05])
        p = gp.KernelParams([0.05], 1.0, 0.1)
        model = gp.build_model(X, y, p)
        means = model.predict_mean(X)
        expected = int(np.argmin(means))
        assert expected != 0
        s = tr.add_observations(make_state(d=1, center=[0.5]), X, y)
        s = tr.update_center(s, model, noisy=True)
        np.testing.assert_array_equal(s.center, X[expected])
        assert s.incumbent_value == pytest.approx(means[expected])
        assert s.incumbent_raw == y[expected]

    def test_noisy_needs_model(self):
        s = tr.add_observations(make_state(), [[0.1, 0.1]], [1.0])
        with pytest.raises(ContractViolation):
            tr.update_center(s, None, noisy=True)

    def test_empty_rejected(self):
        with pytest.raises(ContractViolation):
            tr.update_center(make_state())


class TestRestart:
    def test_fresh_state(self, rng):
        cfg = tr.TRConfig()
        s = tr.restart(cfg, rng, 20, 10)
        assert s.base_length == 0.8
        assert (s.success_count, s.failure_count) == (0, 0)
        assert s.active and s.n_obs == 0
        assert s.pending.shape == (20, 10)

    def test_different_seeds_differ(self):
        cfg = tr.TRConfig()
        a = tr.restart(cfg, np.random.default_rng(1), 5, 3)
        b = tr.restart(cfg, np.random.default_rng(2), 5, 3)
        assert not np.array_equal(a.pending, b.pending)
