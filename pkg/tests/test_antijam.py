import numpy as np
import pytest

from loojam.antijam import (
    CorrectionPolicy,
    CorrectionSignal,
    apply_correction,
    choose_correction,
    correct_symbol,
    dirichlet_leakage_bound,
    paper_candidates,
    resonates,
    select_m_prime_negation,
    select_m_prime_paper,
    verify_restoration,
)
from loojam.detector import detect
from loojam.jammer import JammerConfig, apply_frequency_shift, jammer_gain, shifted_tone
from loojam.ofdm import SubcarrierWaveform, analyze, inner_product, qpsk, synthesize

import oracles


class TestPaperRule:
    def test_integer_candidate_rejected(self):
        assert select_m_prime_paper(5, 8, [1]) is None
        assert (2, 1) in oracles.exhaustive_resonance(1, 5, 8)

    def test_half_integer_accepted(self):
        assert select_m_prime_paper(5, 8, [0.5]) == 0.5
        assert oracles.exhaustive_resonance(0.5, 5, 8) == []

    def test_all_integers_exhausted(self):
        assert select_m_prime_paper(5, 8, range(8)) is None

    def test_first_acceptable_wins(self):
        assert select_m_prime_paper(5, 8, [0, 1, -0.5, 0.5]) == -0.5

    def test_empty_candidates(self):
        with pytest.raises(ValueError):
            select_m_prime_paper(5, 8, [])

    @pytest.mark.parametrize("n", [4, 8, 16])
    def test_exhaustive_against_oracle(self, n):
        cands = [float(c) for c in range(-n, n)] + [c + 0.5 for c in range(-n, n)]
        for i_tilde in range(n):
            for c in cands:
                hit = bool(oracles.exhaustive_resonance(c, i_tilde, n, range(-4, 5)))
                assert resonates(c, i_tilde, n) == hit
                assert hit == float(c).is_integer()

    def test_difference_rule(self):
        # k - i - m' is a multiple of N for k = i + m' when that is an index
        assert resonates(2, 5, 8, rule="difference")
        assert not resonates(0.5, 5, 8, rule="difference")
        with pytest.raises(ValueError):
            resonates(1, 5, 8, rule="product")

    def test_candidate_order(self):
        assert paper_candidates(0.5, 1.0) == [0.0, 0.5, -0.5, 1.0, -1.0]


class TestNegation:
    @pytest.mark.parametrize("m_hat, expected", [(0.5, -0.5), (0.0, 0.0), (-1.25, 1.25)])
    def test_examples(self, m_hat, expected):
        c = select_m_prime_negation(m_hat)
        assert c.m_prime == expected and c.amplitude == 1.0 and c.phase == 0.0
        assert c.policy is CorrectionPolicy.NEGATION

    def test_non_finite(self):
        with pytest.raises(ValueError):
            select_m_prime_negation(float("nan"))

    def test_gain_undone(self):
        c = select_m_prime_negation(0.5, 2.0 * np.exp(0.4j))
        assert c.amplitude == pytest.approx(0.5) and c.phase == pytest.approx(-0.4)

    @pytest.mark.parametrize("n", [8, 64])
    def test_restores_orthogonality(self, n):
        m = 0.37
        attacked = SubcarrierWaveform(3, 1, 0, n).times(SubcarrierWaveform(m, 1, 0, n))
        fixed = attacked.times(SubcarrierWaveform(-m, 1, 0, n))
        for k in range(n):
            if k != 3:
                assert abs(inner_product(SubcarrierWaveform(k, 1, 0, n), fixed)) < 1e-9


class TestApplyCorrection:
    def test_identity(self, rng):
        x = rng.standard_normal(16) + 1j * rng.standard_normal(16)
        np.testing.assert_array_equal(apply_correction(x, CorrectionSignal(0.0), 16), x)

    def test_invertible(self, rng):
        x = rng.standard_normal(32) + 1j * rng.standard_normal(32)
        c = CorrectionSignal(1.3, 2.5, 0.8)
        back = apply_correction(apply_correction(x, c, 32), c.inverse(), 32)
        assert np.max(np.abs(back - x)) < 1e-12

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            apply_correction(np.ones(8), CorrectionSignal(0.5), 16)

    def test_amplitude_positive(self):
        with pytest.raises(ValueError):
            CorrectionSignal(0.5, 0.0)


def _attack(rng, n=64, i=5, m=0.5, amplitude=1.0):
    bins = qpsk(rng, n)
    clean = synthesize(bins, n)
    cfg = JammerConfig(offset=m, targets=(i,), amplitude=amplitude)
    rx, rec = apply_frequency_shift(clean, bins, cfg)
    return clean, rx, bins, rec


class TestRestoration:
    def test_perfect_negation(self, rng):
        _, rx, bins, _ = _attack(rng)
        det = detect(rx, bins).detections[0]
        corr = choose_correction(det, CorrectionPolicy.NEGATION, reference_value=bins[5])
        fixed = correct_symbol(rx, det.frequency, det.gain, corr)
        out = verify_restoration(rx, fixed, bins, 5)
        assert out.psi_before == 63 and out.psi_after == 0
        assert out.residual_leakage < 1e-20

    def test_no_correction(self, rng):
        _, rx, bins, _ = _attack(rng)
        out = verify_restoration(rx, rx, bins, 5)
        assert out.psi_after == out.psi_before == 63

    def test_correction_on_clean_signal_causes_loo(self, rng):
        bins = qpsk(rng, 64)
        clean = synthesize(bins, 64)
        c = shifted_tone(bins[5], 5, 64)
        hurt = clean.with_samples(clean.samples - c + apply_correction(c, CorrectionSignal(0.5), 64))
        out = verify_restoration(clean, hurt, bins, 5)
        assert out.psi_before == 0 and out.psi_after == 63

    def test_leakage_within_dirichlet_bound(self, rng):
        n, i, m, amp = 64, 5, 0.5, 1.7
        _, rx, bins, rec = _attack(rng, n, i, m, amp)
        contribution = shifted_tone(bins[i] * rec.gain, i + m, n)
        corr = CorrectionSignal(-(m + 0.01))
        fixed = rx.with_samples(rx.samples - contribution + apply_correction(contribution, corr, n))
        leak = np.delete(analyze(fixed) - bins, i)
        bound = dirichlet_leakage_bound(abs(bins[i] * rec.gain), 0.01, n)
        assert bound == pytest.approx(oracles.dirichlet_bound(abs(bins[i] * rec.gain), 0.01, n))
        assert np.max(np.abs(leak)) <= bound * (1 + 1e-9)

    def test_paper_policy_moves_tone_elsewhere(self, rng):
        _, rx, bins, _ = _attack(rng)
        det = detect(rx, bins).detections[0]
        corr = choose_correction(det, CorrectionPolicy.PAPER, 64, paper_candidates())
        assert corr.m_prime == 0.5
        fixed = correct_symbol(rx, det.frequency, det.gain, corr)
        # 5.5 + 0.5 is an integer bin: no longer fully LoO, but not restored either
        assert verify_restoration(rx, fixed, bins, 5).psi_after == 1


def test_jammer_gain_roundtrip(rng):
    bins = qpsk(rng, 16)
    g = jammer_gain(bins, JammerConfig(offset=0.5, targets=(1,), amplitude=2.0, phase=0.3))
    c = select_m_prime_negation(0.5, g)
    assert abs(g * c.value - 1) < 1e-12
