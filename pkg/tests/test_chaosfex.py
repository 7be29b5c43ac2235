import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from neurochaos.chaosfex import (
    NeurochaosConfig,
    chaotic_orbit,
    extract_features,
    fire_trace,
    first_passage_times,
    normalize_instances,
    normalize_series,
    transform_instance,
    transform_instances,
)

from oracles import features_oracle, first_passage_oracle, skew_tent_scalar


class TestConfig:
    def test_valid_defaults(self):
        cfg = NeurochaosConfig(q=0.56)
        assert cfg.b == 0.499 and cfg.epsilon == 0.171 and cfg.max_iter == 10000

    def test_rejects_bad_q(self):
        for q in (0.0, 1.0, -0.2):
            with pytest.raises(ValueError):
                NeurochaosConfig(q=q)

    def test_rejects_bad_threshold_epsilon_cap(self):
        with pytest.raises(ValueError):
            NeurochaosConfig(q=0.5, b=1.0)
        with pytest.raises(ValueError):
            NeurochaosConfig(q=0.5, epsilon=0.0)
        with pytest.raises(ValueError):
            NeurochaosConfig(q=0.5, max_iter=0)


class TestNormalization:
    def test_affine_map(self):
        out = normalize_series(np.array([0.0, 5.0, 10.0]), 0.0, 10.0)
        assert np.allclose(out, [0.0, 0.5, 1.0])

    def test_clamping(self):
        out = normalize_series(np.array([-1.0, 11.0]), 0.0, 10.0)
        assert np.allclose(out, [0.0, 1.0])

    def test_endpoints_with_own_range(self):
        x = np.array([3.0, 7.0, 5.0])
        out = normalize_series(x, x.min(), x.max())
        assert out.min() == 0.0 and out.max() == 1.0

    def test_degenerate_range_rejected(self):
        with pytest.raises(ValueError):
            normalize_series(np.array([1.0, 2.0]), 5.0, 5.0)

    def test_per_series_rescaling(self):
        inst = np.array([[0.0, 2.0, 4.0], [10.0, 30.0, 20.0]])
        out = normalize_instances(inst)
        assert np.allclose(out[0], [0.0, 0.5, 1.0])
        assert np.allclose(out[1], [0.0, 1.0, 0.5])

    def test_per_series_requires_2d(self):
        with pytest.raises(ValueError):
            normalize_instances(np.array([1.0, 2.0, 3.0]))

    def test_constant_rows_reported(self):
        inst = np.array([[1.0, 1.0], [0.0, 2.0]])
        with pytest.raises(ValueError, match="0"):
            normalize_instances(inst)


class TestFirstPassage:
    def test_immediate_recognition(self):
        cfg = NeurochaosConfig(q=0.5, epsilon=0.2)
        trace = fire_trace(0.45, cfg)
        assert trace.recognized
        assert len(trace.samples) == 0

    def test_epsilon_larger_than_interval(self):
        cfg = NeurochaosConfig(q=0.3, epsilon=2.0)
        trace = fire_trace(0.99, cfg)
        assert trace.recognized and len(trace.samples) == 0

    def test_matches_plain_loop_iteration(self):
        cfg = NeurochaosConfig(q=0.34, b=0.499, epsilon=0.01)
        n = first_passage_oracle(0.34, 0.499, 0.01, 0.7, 10000)
        trace = fire_trace(0.7, cfg)
        assert len(trace.samples) == n

    def test_trace_is_the_orbit_prefix(self):
        cfg = NeurochaosConfig(q=0.41, b=0.6, epsilon=0.02)
        trace = fire_trace(0.83, cfg)
        y = 0.41
        for sample in trace.samples:
            assert sample == pytest.approx(y)
            y = skew_tent_scalar(y, 0.6)

    def test_unrecognized_capped_and_flagged(self):
        # A stimulus no orbit point approaches within a tiny ball in 50 steps.
        cfg = NeurochaosConfig(q=0.56, b=0.499, epsilon=1e-12, max_iter=50)
        trace = fire_trace(0.123456789, cfg)
        assert not trace.recognized
        assert len(trace.samples) == 50

    def test_stimulus_domain_checked(self):
        cfg = NeurochaosConfig(q=0.5)
        with pytest.raises(ValueError):
            fire_trace(1.5, cfg)

    def test_batch_first_passage_equals_oracle_10k_random_tuples(self):
        # Acceptance property: oracle equivalence over 10^4 random tuples.
        rng = np.random.default_rng(123)
        qs = rng.uniform(0.05, 0.95, 10000)
        bs = rng.uniform(0.1, 0.9, 10000)
        eps = rng.uniform(0.01, 0.5, 10000)
        ss = rng.uniform(0.0, 1.0, 10000)
        # Equivalence is cap-independent: both sides saturate at max_iter.
        max_iter = 300
        for k in range(10000):
            cfg = NeurochaosConfig(
                q=qs[k], b=bs[k], epsilon=eps[k], max_iter=max_iter
            )
            orbit = chaotic_orbit(cfg)
            got = first_passage_times(np.array([ss[k]]), orbit, eps[k])[0]
            want = first_passage_oracle(qs[k], bs[k], eps[k], ss[k], max_iter)
            assert got == want, (qs[k], bs[k], eps[k], ss[k])

    @given(
        q=st.floats(0.05, 0.95),
        b=st.floats(0.2, 0.8),
        s=st.floats(0.0, 1.0),
        eps_small=st.floats(0.01, 0.3),
        eps_big_extra=st.floats(0.0, 0.5),
    )
    @settings(max_examples=200, deadline=None)
    def test_larger_epsilon_never_fires_later(self, q, b, s, eps_small, eps_big_extra):
        late = first_passage_oracle(q, b, eps_small, s, 500)
        cfg_small = NeurochaosConfig(q=q, b=b, epsilon=eps_small, max_iter=500)
        cfg_big = NeurochaosConfig(
            q=q, b=b, epsilon=eps_small + eps_big_extra, max_iter=500
        )
        n_small = len(fire_trace(s, cfg_small).samples)
        n_big = len(fire_trace(s, cfg_big).samples)
        assert n_small == late
        assert n_big <= n_small


class TestFeatureExtraction:
    def test_hand_values(self):
        cfg = NeurochaosConfig(q=0.5, b=0.499)
        from neurochaos.chaosfex import NeuralTrace

        fv = extract_features(NeuralTrace(np.array([0.5, 0.5]), True), cfg)
        assert fv.firing_time == 2
        assert fv.firing_rate == pytest.approx(1.0)
        assert fv.energy == pytest.approx(0.5)
        assert fv.entropy == pytest.approx(0.0)

    def test_hand_values_balanced_symbols(self):
        cfg = NeurochaosConfig(q=0.5, b=0.5)
        from neurochaos.chaosfex import NeuralTrace

        fv = extract_features(NeuralTrace(np.array([0.2, 0.8]), True), cfg)
        assert fv.firing_time == 2
        assert fv.firing_rate == pytest.approx(0.5)
        assert fv.energy == pytest.approx(0.68)
        assert fv.entropy == pytest.approx(1.0)

    def test_empty_trace_all_zero(self):
        cfg = NeurochaosConfig(q=0.5)
        from neurochaos.chaosfex import NeuralTrace

        fv = extract_features(NeuralTrace(np.array([]), True), cfg)
        assert (fv.firing_time, fv.firing_rate, fv.energy, fv.entropy) == (0, 0, 0, 0)

    @given(
        q=st.floats(0.05, 0.95),
        b=st.floats(0.2, 0.8),
        s=st.floats(0.0, 1.0),
        eps=st.floats(0.02, 0.4),
    )
    @settings(max_examples=150, deadline=None)
    def test_features_match_oracle_on_real_traces(self, q, b, s, eps):
        cfg = NeurochaosConfig(q=q, b=b, epsilon=eps, max_iter=400)
        trace = fire_trace(s, cfg)
        fv = extract_features(trace, cfg)
        n, rate, energy, entropy = features_oracle(list(trace.samples), b)
        assert fv.firing_time == n
        assert fv.firing_rate == pytest.approx(rate)
        assert fv.energy == pytest.approx(energy)
        assert fv.entropy == pytest.approx(entropy)
        assert 0.0 <= fv.firing_rate <= 1.0
        assert 0.0 <= fv.entropy <= 1.0
        assert fv.energy <= fv.firing_time + 1e-12


class TestTransform:
    def test_constant_instance_identical_rows(self):
        cfg = NeurochaosConfig(q=0.56)
        fm = transform_instance(np.full(6, 0.37), cfg)
        assert fm.values.shape == (6, 4)
        assert np.all(fm.values == fm.values[0])
        assert fm.recognized.all()

    def test_single_stimulus_equals_composition(self):
        cfg = NeurochaosConfig(q=0.56)
        fm = transform_instance(np.array([0.8]), cfg)
        fv = extract_features(fire_trace(0.8, cfg), cfg)
        assert np.allclose(
            fm.values[0], [fv.firing_time, fv.firing_rate, fv.energy, fv.entropy]
        )

    def test_out_of_range_stimulus_rejected(self):
        cfg = NeurochaosConfig(q=0.56)
        with pytest.raises(ValueError):
            transform_instance(np.array([0.2, 1.3]), cfg)

    def test_batch_matches_per_instance(self):
        rng = np.random.default_rng(0)
        cfg = NeurochaosConfig(q=0.56)
        block = rng.uniform(size=(3, 40))
        feats, recog = transform_instances(block, cfg)
        assert feats.shape == (3, 40, 4)
        assert recog.shape == (3, 40)
        for i in range(3):
            single = transform_instance(block[i], cfg)
            assert np.allclose(feats[i], single.values)
            assert np.array_equal(recog[i], single.recognized)

    def test_determinism(self):
        cfg = NeurochaosConfig(q=0.34, b=0.6, epsilon=0.05)
        x = np.linspace(0, 1, 25)
        a = transform_instance(x, cfg)
        b = transform_instance(x, cfg)
        assert np.array_equal(a.values, b.values)
