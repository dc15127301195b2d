"""Reconstruction attackers over sanitized series, and their evaluation.

All attackers are deterministic functions of (parameters, z); the threat
model hands them the true chain and noise rates, since correlation structure
is assumed to be public knowledge.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .chain import BinaryMarkovChain, as_bits
from .hmm import posterior, viterbi
from .mechanisms import NoiseParams


@dataclass(frozen=True)
class AttackReport:
    """Per-index success indicators with the aggregate rate and its standard error."""

    attacker: str
    successes: np.ndarray
    accuracy: float
    stderr: float

    @classmethod
    def from_successes(cls, attacker: str, successes) -> "AttackReport":
        successes = np.asarray(successes, dtype=bool)
        p = float(successes.mean())
        se = float(np.sqrt(p * (1.0 - p) / successes.size))
        return cls(attacker=attacker, successes=successes, accuracy=p, stderr=se)


def attack_single_bit(z, i: int) -> int:
    """Guess the hidden bit by reading the sanitized bit at the same index."""
    z = as_bits(z)
    if not 1 <= i <= z.size:
        raise IndexError(f"index must satisfy 1 <= i <= {z.size}, got {i}")
    return int(z[i - 1])


def attack_correlation_aware(chain: BinaryMarkovChain, noise: NoiseParams, z, i: int) -> int:
    """Guess the posterior mode of X_i given the whole output; ties go to 0."""
    post = posterior(chain, noise, z, i)
    return 0 if post[0] >= post[1] else 1


def attack_viterbi(chain: BinaryMarkovChain, noise: NoiseParams, z) -> np.ndarray:
    """Reconstruct the entire hidden sequence with the max-probability path."""
    return viterbi(chain, noise, z)


def evaluate(true_bits, guesses, attacker: str = "") -> AttackReport:
    """Score a full guessed series, or a single (index, bit) guess.

    ``guesses`` is either a bit series aligned with ``true_bits`` or a tuple
    (i, bit) scoring one index.  Accuracy is the exact match rate and the
    standard error is sqrt(p (1-p) / trials).
    """
    true_bits = as_bits(true_bits)
    if isinstance(guesses, tuple) and len(guesses) == 2 and np.ndim(guesses[1]) == 0:
        i, bit = guesses
        if not 1 <= i <= true_bits.size:
            raise IndexError(f"index must satisfy 1 <= i <= {true_bits.size}, got {i}")
        if bit not in (0, 1):
            raise ValueError(f"guessed bit must be 0 or 1, got {bit}")
        successes = np.array([true_bits[i - 1] == bit])
    else:
        guessed = as_bits(guesses)
        if guessed.size != true_bits.size:
            raise ValueError(
                f"guess length {guessed.size} does not match series length {true_bits.size}"
            )
        successes = guessed == true_bits
    return AttackReport.from_successes(attacker, successes)
