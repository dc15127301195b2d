import numpy as np
import pytest

from bdpmc import (
    AttackReport,
    BinaryMarkovChain,
    NoiseParams,
    attack_correlation_aware,
    attack_single_bit,
    attack_viterbi,
    dp_noise,
    evaluate,
    sample,
    sanitize_independent,
    success_bound_dp,
)

from helpers import enum_best_path, enum_posterior, matrices


class TestSingleBit:
    def test_reads_the_index(self):
        assert attack_single_bit(np.array([0, 1, 0], dtype=np.uint8), 2) == 1
        assert attack_single_bit(np.array([0, 1, 0], dtype=np.uint8), 1) == 0

    def test_index_validation(self):
        with pytest.raises(IndexError):
            attack_single_bit(np.array([0, 1], dtype=np.uint8), 3)

    def test_perfect_on_noiseless_data(self):
        x = sample(BinaryMarkovChain(0.2, 0.3), 50, seed=4)
        hits = [attack_single_bit(x, i) == x[i - 1] for i in range(1, 51)]
        assert all(hits)

    def test_dp_bound_holds_at_calibrated_noise(self):
        eps = 0.5
        rho = dp_noise(eps)
        chain = BinaryMarkovChain(0.15, 0.15)
        rng_seeds = range(200)
        hits = 0
        trials = 0
        for s in rng_seeds:
            x = sample(chain, 30, seed=s)
            z = sanitize_independent(x, NoiseParams(rho, rho), seed=10_000 + s)
            for i in (5, 15, 25):
                hits += attack_single_bit(z, i) == x[i - 1]
                trials += 1
        p = hits / trials
        se = np.sqrt(p * (1 - p) / trials)
        assert p <= success_bound_dp(eps) + 3 * se


class TestCorrelationAware:
    def test_uninformative_noise_returns_stationary_mode(self):
        noise = NoiseParams(0.5, 0.5)
        z = np.array([1, 1, 1, 0, 1], dtype=np.uint8)
        # pi0 > pi1: mode is 0 regardless of the output
        assert attack_correlation_aware(BinaryMarkovChain(0.1, 0.3), noise, z, 3) == 0
        # pi1 > pi0: mode is 1
        assert attack_correlation_aware(BinaryMarkovChain(0.3, 0.1), noise, z, 3) == 1

    def test_near_independent_data_reduces_to_single_bit(self):
        theta = 0.49
        chain = BinaryMarkovChain(theta, theta)
        noise = NoiseParams(0.3, 0.3)
        agree = 0
        for s in range(60):
            x = sample(chain, 25, seed=s)
            z = sanitize_independent(x, noise, seed=500 + s)
            for i in (1, 12, 25):
                agree += attack_correlation_aware(chain, noise, z, i) == attack_single_bit(z, i)
        assert agree == 180  # identical guesses throughout

    def test_matches_exhaustive_per_bit_map(self):
        rng = np.random.default_rng(41)
        for _ in range(15):
            n = int(rng.integers(2, 12))
            q, r, rho0, rho1 = rng.uniform(0.05, 0.45, 4)
            chain = BinaryMarkovChain(q, r)
            noise = NoiseParams(rho0, rho1)
            z = rng.integers(0, 2, n).astype(np.uint8)
            pi, P, B = matrices(q, r, rho0, rho1)
            for i in range(1, n + 1):
                post = enum_posterior(pi, P, B, z, i)
                want = 0 if post[0] >= post[1] else 1
                assert attack_correlation_aware(chain, noise, z, i) == want


class TestViterbiAttack:
    def test_noiseless_returns_output(self):
        chain = BinaryMarkovChain(0.2, 0.3)
        z = sample(chain, 40, seed=9)
        assert np.array_equal(attack_viterbi(chain, NoiseParams(1e-9, 1e-9), z), z)

    def test_matches_exhaustive_best_path(self):
        rng = np.random.default_rng(42)
        for _ in range(10):
            n = int(rng.integers(2, 12))
            q, r, rho0, rho1 = rng.uniform(0.05, 0.45, 4)
            chain = BinaryMarkovChain(q, r)
            noise = NoiseParams(rho0, rho1)
            z = rng.integers(0, 2, n).astype(np.uint8)
            pi, P, B = matrices(q, r, rho0, rho1)
            assert np.array_equal(
                attack_viterbi(chain, noise, z), enum_best_path(pi, P, B, z)
            )


class TestEvaluate:
    def test_identical_series(self):
        x = np.array([0, 1, 1, 0], dtype=np.uint8)
        report = evaluate(x, x, attacker="self")
        assert report.accuracy == 1.0
        assert report.stderr == 0.0
        assert report.attacker == "self"
        assert report.successes.all()

    def test_complementary_series(self):
        x = np.array([0, 1, 1, 0], dtype=np.uint8)
        assert evaluate(x, 1 - x).accuracy == 0.0

    def test_single_guess_form(self):
        x = np.array([0, 1, 1], dtype=np.uint8)
        assert evaluate(x, (2, 1)).accuracy == 1.0
        assert evaluate(x, (1, 1)).accuracy == 0.0
        with pytest.raises(IndexError):
            evaluate(x, (4, 0))

    def test_length_mismatch(self):
        with pytest.raises(ValueError):
            evaluate(np.array([0, 1], dtype=np.uint8), np.array([0, 1, 1], dtype=np.uint8))

    def test_random_guessing_on_balanced_data(self):
        rng = np.random.default_rng(77)
        truth = rng.integers(0, 2, 10**6).astype(np.uint8)
        guesses = rng.integers(0, 2, 10**6).astype(np.uint8)
        report = evaluate(truth, guesses)
        assert abs(report.accuracy - 0.5) <= 3 * report.stderr
        assert report.stderr == pytest.approx(
            np.sqrt(report.accuracy * (1 - report.accuracy) / 10**6)
        )

    def test_report_from_successes_matches_definition(self):
        report = AttackReport.from_successes("x", [True, False, True, True])
        assert report.accuracy == 0.75
        assert report.stderr == pytest.approx(np.sqrt(0.75 * 0.25 / 4))


class TestBayesOptimality:
    def test_ca_beats_sb_on_model_data(self):
        # the posterior mode is Bayes-optimal among attackers without tuple
        # knowledge, so on-model its accuracy dominates the single-bit read
        chain = BinaryMarkovChain(0.1, 0.1)
        noise = NoiseParams(dp_noise(0.5), dp_noise(0.5))
        sb_hits = ca_hits = trials = 0
        for s in range(300):
            x = sample(chain, 30, seed=s)
            z = sanitize_independent(x, noise, seed=7_000 + s)
            i = 15
            sb_hits += attack_single_bit(z, i) == x[i - 1]
            ca_hits += attack_correlation_aware(chain, noise, z, i) == x[i - 1]
            trials += 1
        p_sb, p_ca = sb_hits / trials, ca_hits / trials
        se = np.sqrt(0.25 / trials)
        assert p_ca >= p_sb - 3 * se
        assert p_ca > p_sb  # strongly correlated data: a real gap
