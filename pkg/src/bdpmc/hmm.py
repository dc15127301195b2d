"""Exact inference over the sanitization HMM.

The sanitized series is a hidden Markov model with hidden transition matrix P
(the data chain), emission matrix B (the flip rates), and observations z.  The
engine computes conditional prefix/suffix likelihoods

    alpha_t(x) = Pr[Z_{1:t} = z_{1:t} | X_t = x]       (t = 0..n, alpha_0 = 1)
    beta_t(x)  = Pr[Z_{t+1:n} = z_{t+1:n} | X_t = x]   (t = 0..n, beta_n = 1)

in log space, so chains of tens of thousands of bits never underflow.  The
alpha recurrence conditions backward in time yet multiplies by the forward
transition entries; that is valid only because a stationary two-state chain is
automatically reversible (pi(x) P[x,x'] = pi(x') P[x',x]).

Tuple indices are 1-based throughout, matching the table convention above.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.special import logsumexp

from .chain import BinaryMarkovChain, as_bits
from .errors import EnumerationLimitError
from .mechanisms import CorrelatedNoiseChain, NoiseParams

BRUTE_FORCE_MAX_N = 20
CORRELATED_ORACLE_MAX_N = 10

# Log-domain scores closer than this are treated as tied (Viterbi prefers 0).
_TIE_TOL = 1e-9


@dataclass(frozen=True)
class LikelihoodTables:
    """Log alpha/beta tables, rows t = 0..n, columns x in {0, 1}."""

    alpha: np.ndarray
    beta: np.ndarray


def _log_matrices(chain: BinaryMarkovChain, noise: NoiseParams):
    chain.require_positive()
    with np.errstate(divide="ignore"):
        lp = np.log(chain.transition_matrix())
        lb = np.log(noise.emission_matrix())
    return lp, lb


def _check_index(i: int, n: int) -> None:
    if not 1 <= i <= n:
        raise IndexError(f"index must satisfy 1 <= i <= {n}, got {i}")


def forward(chain: BinaryMarkovChain, noise: NoiseParams, z) -> np.ndarray:
    """Log alpha table for ``z``; shape (n+1, 2), or (m, n+1, 2) for a batch.

    alpha_t(x) = B[x, z_t] * sum_x' P[x, x'] * alpha_{t-1}(x').
    """
    lp, lb = _log_matrices(chain, noise)
    z2 = np.atleast_2d(as_bits(z) if np.ndim(z) == 1 else np.asarray(z, dtype=np.uint8))
    m, n = z2.shape
    table = np.empty((m, n + 1, 2))
    cur = np.zeros((m, 2))
    table[:, 0] = cur
    for t in range(1, n + 1):
        zt = z2[:, t - 1]
        nxt = np.empty((m, 2))
        for x in (0, 1):
            nxt[:, x] = lb[x, zt] + np.logaddexp(lp[x, 0] + cur[:, 0], lp[x, 1] + cur[:, 1])
        cur = nxt
        table[:, t] = cur
    return table[0] if np.ndim(z) == 1 else table


def backward(chain: BinaryMarkovChain, noise: NoiseParams, z) -> np.ndarray:
    """Log beta table for ``z``; shape (n+1, 2), or (m, n+1, 2) for a batch.

    beta_t(x) = sum_x' P[x, x'] * B[x', z_{t+1}] * beta_{t+1}(x').  Row 0 is
    the value one virtual step before the series and is included so both
    tables share the t = 0..n layout.
    """
    lp, lb = _log_matrices(chain, noise)
    z2 = np.atleast_2d(as_bits(z) if np.ndim(z) == 1 else np.asarray(z, dtype=np.uint8))
    m, n = z2.shape
    table = np.empty((m, n + 1, 2))
    cur = np.zeros((m, 2))
    table[:, n] = cur
    for t in range(n - 1, -1, -1):
        zt = z2[:, t]
        nxt = np.empty((m, 2))
        for x in (0, 1):
            nxt[:, x] = np.logaddexp(
                lp[x, 0] + lb[0, zt] + cur[:, 0],
                lp[x, 1] + lb[1, zt] + cur[:, 1],
            )
        cur = nxt
        table[:, t] = cur
    return table[0] if np.ndim(z) == 1 else table


def likelihood_tables(chain: BinaryMarkovChain, noise: NoiseParams, z) -> LikelihoodTables:
    return LikelihoodTables(alpha=forward(chain, noise, z), beta=backward(chain, noise, z))


def likelihood_given_state(chain: BinaryMarkovChain, noise: NoiseParams, z,
                           i: int, x: int) -> float:
    """log Pr[Z = z | X_i = x] = log alpha_i(x) + log beta_i(x)."""
    z = as_bits(z)
    _check_index(i, z.size)
    if x not in (0, 1):
        raise ValueError(f"state must be 0 or 1, got {x}")
    alpha = forward(chain, noise, z)
    beta = backward(chain, noise, z)
    return float(alpha[i, x] + beta[i, x])


def posterior(chain: BinaryMarkovChain, noise: NoiseParams, z, i: int) -> np.ndarray:
    """Pr[X_i = . | Z = z], proportional to pi(x) alpha_i(x) beta_i(x)."""
    z = as_bits(z)
    _check_index(i, z.size)
    alpha = forward(chain, noise, z)
    beta = backward(chain, noise, z)
    logpost = np.log(chain.stationary()) + alpha[i] + beta[i]
    logpost -= logsumexp(logpost)
    return np.exp(logpost)


def posterior_batch(chain: BinaryMarkovChain, noise: NoiseParams, z_batch, i: int) -> np.ndarray:
    """Posterior of X_i for every row of ``z_batch``; shape (m, 2)."""
    z2 = np.asarray(z_batch, dtype=np.uint8)
    _check_index(i, z2.shape[1])
    alpha = forward(chain, noise, z2)
    beta = backward(chain, noise, z2)
    logpost = np.log(chain.stationary())[None, :] + alpha[:, i] + beta[:, i]
    logpost -= logsumexp(logpost, axis=1, keepdims=True)
    return np.exp(logpost)


def viterbi(chain: BinaryMarkovChain, noise: NoiseParams, z) -> np.ndarray:
    """A hidden sequence maximizing pi(x_1) prod P prod B[x_t, z_t].

    Among maximizing paths, returns the lexicographically smallest (prefer 0,
    earliest index first); log scores within 1e-9 count as tied.  Implemented
    as a backward max pass followed by a greedy forward pass, which realizes
    exactly that tie rule.
    """
    lp, lb = _log_matrices(chain, noise)
    z = as_bits(z)
    n = z.size
    zl = z.tolist()
    lp00, lp01, lp10, lp11 = lp[0, 0], lp[0, 1], lp[1, 0], lp[1, 1]
    # omega[t][x]: best suffix score for emissions t+1..n given X_t = x
    omega0, omega1 = 0.0, 0.0
    suffix = [(0.0, 0.0)] * (n + 1)
    for t in range(n - 1, 0, -1):
        e0, e1 = lb[0, zl[t]], lb[1, zl[t]]
        new0 = max(lp00 + e0 + omega0, lp01 + e1 + omega1)
        new1 = max(lp10 + e0 + omega0, lp11 + e1 + omega1)
        omega0, omega1 = new0, new1
        suffix[t] = (omega0, omega1)
    lpi = np.log(chain.stationary())
    out = np.empty(n, dtype=np.uint8)
    s0 = lpi[0] + lb[0, zl[0]] + suffix[1][0]
    s1 = lpi[1] + lb[1, zl[0]] + suffix[1][1]
    state = 0 if s0 >= s1 - _TIE_TOL else 1
    out[0] = state
    for t in range(1, n):
        row = (lp00, lp01) if state == 0 else (lp10, lp11)
        s0 = row[0] + lb[0, zl[t]] + suffix[t + 1][0]
        s1 = row[1] + lb[1, zl[t]] + suffix[t + 1][1]
        state = 0 if s0 >= s1 - _TIE_TOL else 1
        out[t] = state
    return out


def all_bit_rows(n: int) -> np.ndarray:
    """All 2^n bit rows in lexicographic order (index 1 most significant)."""
    idx = np.arange(2**n, dtype=np.uint32)
    return ((idx[:, None] >> np.arange(n - 1, -1, -1)) & 1).astype(np.uint8)


def log_chain_prob(chain: BinaryMarkovChain, rows: np.ndarray) -> np.ndarray:
    """Log stationary-chain probability of every row of a (m, n) bit array."""
    with np.errstate(divide="ignore"):
        lpi = np.log(chain.stationary())
        lp = np.log(chain.transition_matrix())
    out = lpi[rows[:, 0]].astype(float)
    for t in range(rows.shape[1] - 1):
        out += lp[rows[:, t], rows[:, t + 1]]
    return out


def brute_force_likelihood(chain: BinaryMarkovChain, noise: NoiseParams, z,
                           i: int, x: int) -> float:
    """log Pr[Z = z | X_i = x] by exhausting all hidden sequences with X_i = x.

    Pr[X = seq | X_i = x] is taken as the stationary joint over the full
    sequence divided by pi(x), which equals the reversibility-based
    factorization of the conditional chain.  Guarded to n <= 20.
    """
    z = as_bits(z)
    n = z.size
    if n > BRUTE_FORCE_MAX_N:
        raise EnumerationLimitError(f"brute force limited to n <= {BRUTE_FORCE_MAX_N}, got {n}")
    _check_index(i, n)
    if x not in (0, 1):
        raise ValueError(f"state must be 0 or 1, got {x}")
    chain.require_positive()
    rows = all_bit_rows(n)
    rows = rows[rows[:, i - 1] == x]
    logjoint = log_chain_prob(chain, rows) - np.log(chain.stationary()[x])
    with np.errstate(divide="ignore"):
        lb = np.log(noise.emission_matrix())
    emis = np.zeros(rows.shape[0])
    for t in range(n):
        emis += lb[rows[:, t], z[t]]
    return float(logsumexp(logjoint + emis))


def _product_logs(chain: BinaryMarkovChain, cnoise: CorrelatedNoiseChain):
    """Log transition/emission/stationary pieces of the (data, noise) product chain.

    State s = 2 * x + y.  Emission of z from (x, y) is deterministic: x ^ y == z.
    The product of two reversible stationary chains is reversible, so the
    conditional alpha recurrence applies unchanged.
    """
    chain.require_positive()
    P = chain.transition_matrix()
    B = cnoise.transition_matrix()
    PS = np.kron(P, B)
    with np.errstate(divide="ignore"):
        lps = np.log(PS)
        xor = np.array([0, 1, 1, 0])  # x ^ y per state index
        lemit = np.log(np.array([(xor == 0), (xor == 1)], dtype=float))  # [z, s]
    return lps, lemit


def _product_tables(chain: BinaryMarkovChain, cnoise: CorrelatedNoiseChain, z2: np.ndarray):
    """Batched log alpha/beta tables of the 4-state product chain; (m, n+1, 4)."""
    lps, lemit = _product_logs(chain, cnoise)
    m, n = z2.shape
    alpha = np.empty((m, n + 1, 4))
    cur = np.zeros((m, 4))
    alpha[:, 0] = cur
    for t in range(1, n + 1):
        zt = z2[:, t - 1]
        cur = lemit[zt] + logsumexp(lps[None, :, :] + cur[:, None, :], axis=2)
        alpha[:, t] = cur
    beta = np.empty((m, n + 1, 4))
    cur = np.zeros((m, 4))
    beta[:, n] = cur
    for t in range(n - 1, -1, -1):
        zt = z2[:, t]
        cur = logsumexp(lps[None, :, :] + lemit[zt][:, None, :] + cur[:, None, :], axis=2)
        beta[:, t] = cur
    return alpha, beta


def correlated_log_likelihoods(chain: BinaryMarkovChain, cnoise: CorrelatedNoiseChain,
                               z_batch) -> np.ndarray:
    """log Pr[Z = z | X_i = x] for every row, index, and state; (m, n, 2).

    Entry [j, i-1, x] conditions row j on X_i = x (i is 1-based).
    """
    z2 = np.atleast_2d(np.asarray(z_batch, dtype=np.uint8))
    alpha, beta = _product_tables(chain, cnoise, z2)
    lpi_b = np.log(cnoise.stationary())  # noise state is independent of X_i
    joint = alpha[:, 1:] + beta[:, 1:]  # (m, n, 4)
    m, n, _ = joint.shape
    per_state = joint.reshape(m, n, 2, 2) + lpi_b[None, None, None, :]
    return logsumexp(per_state, axis=3)


def correlated_likelihood(chain: BinaryMarkovChain, cnoise: CorrelatedNoiseChain,
                          z, i: int, x: int) -> float:
    """log Pr[Z = z | X_i = x] under the XOR-noise mechanism.

    Computed by forward-backward over the 4-state product of the data chain
    and the noise chain, with the deterministic emission z_t = x_t ^ y_t.
    """
    z = as_bits(z)
    n = z.size
    if n > 10**6:
        raise EnumerationLimitError(f"correlated likelihood limited to n <= 1e6, got {n}")
    _check_index(i, n)
    if x not in (0, 1):
        raise ValueError(f"state must be 0 or 1, got {x}")
    return float(correlated_log_likelihoods(chain, cnoise, z[None, :])[0, i - 1, x])
