"""Sanitization mechanisms: independent per-bit randomized response and the
correlated XOR-noise variant.

The independent mechanism flips each bit with a state-dependent rate,

    Pr[Z_i = z | X_i = x] = B[x, z],   B = [[1 - rho0, rho0],
                                            [rho1, 1 - rho1]],

drawing one uniform per index from a counter-based stream, so tuple owners can
sanitize their own entries independently (local privacy): the uniform for
index i is the i-th draw of the Philox stream keyed by the seed, reachable
directly via ``per_index_uniform`` without generating the prefix.

The correlated mechanism XORs the data with an independent stationary noise
chain; independent symmetric noise is the special case rho0 + rho1 = 1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chain import _sample_two_state, as_bits, make_rng


@dataclass(frozen=True)
class NoiseParams:
    """Per-state flip rates of the independent mechanism.

    rho0 flips a 0 into a 1, rho1 flips a 1 into a 0.  Rates live in
    [0, 0.5]; the closed right endpoint is admitted so that inference code
    can represent fully uninformative emissions, though a useful mechanism
    keeps both rates strictly below 0.5 and the privacy bounds require the
    open interval.
    """

    rho0: float
    rho1: float

    def __post_init__(self):
        for name, value in (("rho0", self.rho0), ("rho1", self.rho1)):
            if not np.isfinite(value) or not 0.0 <= value <= 0.5:
                raise ValueError(f"{name} must lie in [0, 0.5], got {value}")

    def emission_matrix(self) -> np.ndarray:
        return np.array([[1.0 - self.rho0, self.rho0], [self.rho1, 1.0 - self.rho1]])

    @property
    def is_symmetric(self) -> bool:
        return self.rho0 == self.rho1


@dataclass(frozen=True)
class CorrelatedNoiseChain:
    """Transition parameters of the stationary noise chain used for XOR noise.

    The noise chain moves 0->1 with rate rho0 and 1->0 with rate rho1, has
    stationary distribution (rho1, rho0) / (rho0 + rho1), and therefore flips
    any given bit with marginal probability rho0 / (rho0 + rho1).  The
    working assumptions rho0 < rho1 and rho0 + rho1 <= 1 keep each bit more
    likely to be preserved than flipped.
    """

    rho0: float
    rho1: float

    def __post_init__(self):
        for name, value in (("rho0", self.rho0), ("rho1", self.rho1)):
            if not np.isfinite(value) or not 0.0 < value < 1.0:
                raise ValueError(f"{name} must lie in (0, 1), got {value}")
        if not self.rho0 < self.rho1:
            raise ValueError(f"need rho0 < rho1, got rho0={self.rho0}, rho1={self.rho1}")
        if self.rho0 + self.rho1 > 1.0:
            raise ValueError(
                f"need rho0 + rho1 <= 1, got {self.rho0} + {self.rho1} = {self.rho0 + self.rho1}"
            )

    def stationary(self) -> tuple[float, float]:
        total = self.rho0 + self.rho1
        return self.rho1 / total, self.rho0 / total

    def transition_matrix(self) -> np.ndarray:
        return np.array([[1.0 - self.rho0, self.rho0], [self.rho1, 1.0 - self.rho1]])

    @property
    def expected_flip_rate(self) -> float:
        return self.rho0 / (self.rho0 + self.rho1)


def noise_uniforms(seed: int, n: int) -> np.ndarray:
    """The first ``n`` uniforms of the sanitization stream for ``seed``."""
    return make_rng(seed).random(n)


def per_index_uniform(seed: int, index: int) -> float:
    """The uniform consumed for 1-based ``index``, without generating the prefix.

    Philox is counter-based with four 64-bit words per counter block and one
    word per double, so draw k lives at word k % 4 of block k // 4.  Jumping
    the counter there reproduces exactly the draw the batch path uses, which
    is what lets each tuple owner sanitize independently.
    """
    if index < 1:
        raise ValueError(f"index must be >= 1, got {index}")
    k = index - 1
    bitgen = np.random.Philox(key=int(seed))
    bitgen.advance(k // 4)  # one advance step = one 4-word counter block
    return float(np.random.Generator(bitgen).random(k % 4 + 1)[-1])


def sanitize_independent(bits, noise: NoiseParams, seed: int) -> np.ndarray:
    """Flip each bit independently with its state's rate.  Deterministic per seed."""
    bits = as_bits(bits)
    u = noise_uniforms(seed, bits.size)
    flip_rate = np.where(bits == 0, noise.rho0, noise.rho1)
    return (bits ^ (u < flip_rate)).astype(np.uint8)


def sample_noise_chain(noise: CorrelatedNoiseChain, n: int, seed: int) -> np.ndarray:
    """Sample the stationary noise chain itself (the y-series that gets XORed)."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    _, pi1 = noise.stationary()
    return _sample_two_state(pi1, noise.rho0, noise.rho1, n, make_rng(seed))


def sanitize_correlated(bits, noise: CorrelatedNoiseChain, seed: int) -> np.ndarray:
    """XOR the data with an independent stationary noise-chain sample."""
    bits = as_bits(bits)
    y = sample_noise_chain(noise, bits.size, seed)
    return (bits ^ y).astype(np.uint8)
