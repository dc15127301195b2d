import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from bdpmc import (
    BinaryMarkovChain,
    CorrelatedNoiseChain,
    NoiseParams,
    sample,
    sanitize_correlated,
    sanitize_independent,
)
from bdpmc.mechanisms import noise_uniforms, per_index_uniform, sample_noise_chain

from helpers import bit_rows, enum_chain_logprob


class TestNoiseParams:
    def test_range(self):
        NoiseParams(0.0, 0.5)  # closed endpoints admitted for inference work
        for r0, r1 in [(-0.01, 0.2), (0.2, 0.51), (np.nan, 0.2)]:
            with pytest.raises(ValueError):
                NoiseParams(r0, r1)

    def test_emission_rows_sum_to_one(self):
        B = NoiseParams(0.13, 0.31).emission_matrix()
        assert np.allclose(B.sum(axis=1), 1.0)


class TestCorrelatedNoiseChain:
    def test_working_assumptions_enforced(self):
        CorrelatedNoiseChain(0.2, 0.5)
        with pytest.raises(ValueError):
            CorrelatedNoiseChain(0.5, 0.2)  # needs rho0 < rho1
        with pytest.raises(ValueError):
            CorrelatedNoiseChain(0.45, 0.65)  # sum > 1
        with pytest.raises(ValueError):
            CorrelatedNoiseChain(0.0, 0.5)

    def test_stationary_and_flip_rate(self):
        noise = CorrelatedNoiseChain(0.2, 0.6)
        pi0, pi1 = noise.stationary()
        assert pi0 == pytest.approx(0.75)
        assert pi1 == pytest.approx(0.25)
        assert noise.expected_flip_rate == pytest.approx(0.25)


class TestIndependentMechanism:
    def test_identity_noise(self):
        bits = sample(BinaryMarkovChain(0.2, 0.3), 200, seed=0)
        assert np.array_equal(sanitize_independent(bits, NoiseParams(0.0, 0.0), 5), bits)

    def test_deterministic_per_seed(self):
        bits = sample(BinaryMarkovChain(0.2, 0.3), 500, seed=0)
        noise = NoiseParams(0.2, 0.4)
        assert np.array_equal(
            sanitize_independent(bits, noise, 9), sanitize_independent(bits, noise, 9)
        )
        assert not np.array_equal(
            sanitize_independent(bits, noise, 9), sanitize_independent(bits, noise, 10)
        )

    def test_flip_frequency_all_zero_input(self):
        z = sanitize_independent(np.zeros(10**6, dtype=np.uint8), NoiseParams(0.3, 0.1), 7)
        assert abs(z.mean() - 0.3) < 0.005

    def test_exact_output_distribution_per_state(self):
        # fixed input bit: output matches the corresponding emission row
        noise = NoiseParams(0.27, 0.42)
        for bit, rate in [(0, noise.rho0), (1, noise.rho1)]:
            base = np.full(10**6, bit, dtype=np.uint8)
            z = sanitize_independent(base, noise, 123 + bit)
            flipped = float((z != bit).mean())
            se = np.sqrt(rate * (1 - rate) / base.size)
            assert abs(flipped - rate) < 4 * se

    def test_flips_uncorrelated_across_indices(self):
        bits = sample(BinaryMarkovChain(0.1, 0.1), 10**6, seed=21)
        z = sanitize_independent(bits, NoiseParams(0.25, 0.25), 22)
        flips = (z ^ bits).astype(float)
        f = flips - flips.mean()
        lag1 = float(np.mean(f[:-1] * f[1:]) / np.mean(f * f))
        assert abs(lag1) < 3 / np.sqrt(bits.size)

    def test_per_index_substream_matches_batch(self):
        u = noise_uniforms(40, 1000)
        for i in (1, 2, 3, 4, 5, 17, 999, 1000):
            assert per_index_uniform(40, i) == u[i - 1]

    def test_distributed_sanitization_equals_sequential(self):
        # owner of index i can compute their own output bit in isolation
        bits = sample(BinaryMarkovChain(0.2, 0.3), 64, seed=1)
        noise = NoiseParams(0.2, 0.4)
        z = sanitize_independent(bits, noise, 77)
        rates = (noise.rho0, noise.rho1)
        local = [
            int(bits[i - 1]) ^ (per_index_uniform(77, i) < rates[bits[i - 1]])
            for i in range(1, 65)
        ]
        assert z.tolist() == local

    @given(st.integers(0, 2**64 - 1), st.integers(1, 300))
    @settings(max_examples=50, deadline=None)
    def test_length_preserved(self, seed, n):
        bits = np.resize([0, 1, 1, 0], n).astype(np.uint8)
        assert sanitize_independent(bits, NoiseParams(0.1, 0.2), seed).size == n


class TestCorrelatedMechanism:
    def test_all_zero_input_reproduces_noise_chain(self):
        noise = CorrelatedNoiseChain(0.2, 0.5)
        z = sanitize_correlated(np.zeros(300, dtype=np.uint8), noise, 31)
        assert np.array_equal(z, sample_noise_chain(noise, 300, 31))

    def test_deterministic_per_seed(self):
        bits = sample(BinaryMarkovChain(0.3, 0.3), 400, seed=0)
        noise = CorrelatedNoiseChain(0.15, 0.55)
        assert np.array_equal(
            sanitize_correlated(bits, noise, 8), sanitize_correlated(bits, noise, 8)
        )

    def test_marginal_flip_rate(self):
        noise = CorrelatedNoiseChain(0.2, 0.5)
        bits = sample(BinaryMarkovChain(0.3, 0.3), 10**6, seed=3)
        z = sanitize_correlated(bits, noise, 4)
        assert abs(float((z != bits).mean()) - noise.expected_flip_rate) < 0.005

    def test_noise_stream_transition_frequencies(self):
        noise = CorrelatedNoiseChain(0.25, 0.55)
        bits = sample(BinaryMarkovChain(0.4, 0.2), 10**6, seed=6)
        y = sanitize_correlated(bits, noise, 7) ^ bits
        src, dst = y[:-1], y[1:]
        q_hat = np.sum((src == 0) & (dst == 1)) / np.sum(src == 0)
        r_hat = np.sum((src == 1) & (dst == 0)) / np.sum(src == 1)
        assert abs(q_hat - noise.rho0) < 0.005
        assert abs(r_hat - noise.rho1) < 0.005

    def test_boundary_sum_is_independent_symmetric_noise(self):
        # rho0 + rho1 = 1 makes the noise i.i.d.: compare exact output laws
        # for every input length <= 10 against per-bit randomized response
        rho = 0.3
        noise = CorrelatedNoiseChain(rho, 1 - rho)
        piB = np.array(noise.stationary())
        Bmat = noise.transition_matrix()
        for n in (1, 2, 3, 7, 10):
            x = np.resize([0, 1, 1, 0, 1], n).astype(np.uint8)
            zs = bit_rows(n)
            ys = zs ^ x[None, :]
            law_corr = np.exp(enum_chain_logprob(piB, Bmat, ys))
            flips = ys.astype(float)
            law_ind = np.prod(np.where(flips == 1, rho, 1 - rho), axis=1)
            assert np.allclose(law_corr, law_ind, atol=1e-12)
