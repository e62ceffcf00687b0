import numpy as np
import pytest

from loojam.channel import ChannelRealization, add_awgn, apply_tdl, load_profile, realize
from loojam.ofdm import OfdmSymbol, analyze, qpsk, synthesize


class TestLoadProfile:
    def test_flat(self):
        p = load_profile({"taps": [[0.0, 1.0]]})
        assert p.taps == ((0.0, 1.0),)

    def test_normalizes(self):
        p = load_profile({"taps": [[0.0, 0.5], [1e-7, 0.5]]})
        assert p.powers.sum() == pytest.approx(1.0)
        p = load_profile({"taps": [[0.0, 2.0], [1e-7, 6.0]]})
        np.testing.assert_allclose(p.powers, [0.25, 0.75])

    def test_builtin_cdl_d(self):
        p = load_profile("cdl_d")
        assert p.has_los
        assert abs(p.powers.sum() - 1.0) < 1e-6
        assert np.all(np.diff(p.delays) >= 0)

    def test_shipped_file_by_path(self, root):
        p = load_profile(root / "src" / "loojam" / "data" / "cdl_d.toml")
        assert p == load_profile("cdl_d")

    @pytest.mark.parametrize(
        "data, msg",
        [
            ({"taps": []}, "no taps"),
            ({"taps": [[0.0, -1.0]]}, "negative tap power"),
            ({"taps": [[-1e-9, 1.0]]}, "negative tap delay"),
            ({"taps": [[1e-7, 1.0], [0.0, 1.0]]}, "not sorted"),
            ({"taps": [[0.0, 0.0]]}, "zero"),
            ({"taps": [[0.0, 1.0]], "has_los": "yes"}, "boolean"),
            ({"taps": [[0.0]]}, "delay_s, power"),
        ],
    )
    def test_rejects(self, data, msg):
        with pytest.raises(ValueError, match=msg):
            load_profile(data)


class TestApplyTdl:
    def test_flat_identity(self, rng):
        x = synthesize(qpsk(rng, 64), 64)
        r = realize(load_profile("flat"), x.sample_rate, seed=1)
        np.testing.assert_allclose(apply_tdl(x, r).samples, x.samples, atol=1e-15)

    def test_half_gain(self, rng):
        x = synthesize(qpsk(rng, 64), 64)
        r = ChannelRealization(np.array([0.5 + 0j]), x.sample_rate)
        np.testing.assert_allclose(apply_tdl(x, r).samples, 0.5 * x.samples)

    @pytest.mark.parametrize("n", [8, 64, 256])
    def test_circular_matches_frequency_oracle(self, rng, n):
        bins = qpsk(rng, n)
        x = synthesize(bins, n)
        gains = np.array([0.8, 0, 0.3 - 0.2j])
        r = ChannelRealization(gains, x.sample_rate)
        h = np.array([sum(g * np.exp(-2j * np.pi * k * t / n) for t, g in enumerate(gains)) for k in range(n)])
        y = analyze(apply_tdl(x, r, circular=True))
        assert np.max(np.abs(y - h * bins)) < 1e-9

    def test_linear_truncates(self):
        x = OfdmSymbol(np.array([1, 2, 3, 4], complex))
        r = ChannelRealization(np.array([1.0, 1.0]), x.sample_rate)
        np.testing.assert_allclose(apply_tdl(x, r).samples, [1, 3, 5, 7])

    def test_sample_rate_mismatch(self, rng):
        x = synthesize(qpsk(rng, 64), 64)
        r = realize(load_profile("flat"), x.sample_rate * 2, seed=1)
        with pytest.raises(ValueError, match="sample-rate"):
            apply_tdl(x, r)

    def test_realization_reproducible(self):
        p = load_profile("cdl_d")
        a, b = realize(p, 30.72e6, 5), realize(p, 30.72e6, 5)
        assert np.array_equal(a.gains, b.gains)

    def test_los_tap_is_deterministic(self):
        p = load_profile({"taps": [[0.0, 0.5], [1e-6, 0.5]], "has_los": True})
        for seed in range(5):
            g = realize(p, 30.72e6, seed).gains
            assert g[0] == pytest.approx(np.sqrt(0.5))


class TestAwgn:
    def test_vanishing(self, rng):
        x = synthesize(qpsk(rng, 64), 64)
        assert np.max(np.abs(add_awgn(x, 300.0, 1).samples - x.samples)) < 1e-9

    def test_measured_snr(self):
        x = OfdmSymbol(np.exp(1j * np.linspace(0, 50, 100_000)))
        y = add_awgn(x, 5.0, 7)
        noise = y.samples - x.samples
        snr = 10 * np.log10(x.power() / np.mean(np.abs(noise) ** 2))
        assert snr == pytest.approx(5.0, abs=0.1)

    def test_noise_moments(self):
        x = OfdmSymbol(np.ones(1_000_000, complex))
        noise = add_awgn(x, 0.0, 3).samples - 1.0
        assert abs(noise.mean()) < 0.01
        assert np.mean(np.abs(noise) ** 2) == pytest.approx(1.0, rel=0.01)

    def test_deterministic(self, rng):
        x = synthesize(qpsk(rng, 64), 64)
        assert np.array_equal(add_awgn(x, 5.0, 2).samples, add_awgn(x, 5.0, 2).samples)

    def test_zero_power(self):
        with pytest.raises(ValueError):
            add_awgn(OfdmSymbol(np.zeros(8)), 5.0, 1)
