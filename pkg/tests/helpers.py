"""Independent oracles for the test suite.

Everything here is built from first principles on the raw matrices

    pi = stationary distribution, P = transition matrix, B = emission matrix,

so it never touches the recurrences it is used to check.  All enumeration is
in lexicographic order with index 1 most significant, which makes "first
argmax" mean "lexicographically smallest".
"""

from __future__ import annotations

import numpy as np
from scipy.special import logsumexp

TIE_BAND = 1e-9


def matrices(q, r, rho0, rho1):
    pi = np.array([r / (q + r), q / (q + r)])
    P = np.array([[1 - q, q], [r, 1 - r]])
    B = np.array([[1 - rho0, rho0], [rho1, 1 - rho1]])
    return pi, P, B


def bit_rows(n: int) -> np.ndarray:
    idx = np.arange(2**n, dtype=np.uint32)
    return ((idx[:, None] >> np.arange(n - 1, -1, -1)) & 1).astype(np.uint8)


def enum_chain_logprob(pi, P, rows) -> np.ndarray:
    with np.errstate(divide="ignore"):
        lpi, lp = np.log(pi), np.log(P)
    out = lpi[rows[:, 0]].astype(float)
    for t in range(rows.shape[1] - 1):
        out += lp[rows[:, t], rows[:, t + 1]]
    return out


def enum_emission_logprob(B, rows, z) -> np.ndarray:
    with np.errstate(divide="ignore"):
        lb = np.log(B)
    out = np.zeros(rows.shape[0])
    for t in range(rows.shape[1]):
        out += lb[rows[:, t], z[t]]
    return out


def enum_conditional_loglik(pi, P, B, z, i, x) -> float:
    """log Pr[Z = z | X_i = x] by full enumeration of hidden sequences."""
    z = np.asarray(z)
    rows = bit_rows(z.size)
    rows = rows[rows[:, i - 1] == x]
    lj = enum_chain_logprob(pi, P, rows) - np.log(pi[x])
    return float(logsumexp(lj + enum_emission_logprob(B, rows, z)))


def enum_posterior(pi, P, B, z, i) -> np.ndarray:
    """Pr[X_i = . | Z = z] by Bayes over the exhaustive joint."""
    z = np.asarray(z)
    rows = bit_rows(z.size)
    lw = enum_chain_logprob(pi, P, rows) + enum_emission_logprob(B, rows, z)
    mask1 = rows[:, i - 1] == 1
    l1 = logsumexp(lw[mask1])
    l0 = logsumexp(lw[~mask1])
    p = np.exp(np.array([l0, l1]) - logsumexp(np.array([l0, l1])))
    return p


def enum_best_path(pi, P, B, z) -> np.ndarray:
    """Lexicographically smallest hidden sequence maximizing the joint score.

    Paths with log score within TIE_BAND of the maximum count as tied.
    """
    z = np.asarray(z)
    rows = bit_rows(z.size)
    scores = enum_chain_logprob(pi, P, rows) + enum_emission_logprob(B, rows, z)
    best = scores.max()
    return rows[np.flatnonzero(scores >= best - TIE_BAND)[0]]


def enum_lr_tables(pi, P, B, n):
    """log Pr[z | X_i = x] for every z, i, x; shape (2^n, n, 2)."""
    rows = bit_rows(n)
    lj = enum_chain_logprob(pi, P, rows)
    out = np.empty((2**n, n, 2))
    all_z = bit_rows(n)
    with np.errstate(divide="ignore"):
        lb = np.log(B)
    emis = np.zeros((2**n, 2**n))  # [xrow, zrow]
    for t in range(n):
        emis += lb[np.ix_(rows[:, t], all_z[:, t])]
    lw = lj[:, None] + emis
    for i in range(n):
        for x in (0, 1):
            mask = rows[:, i] == x
            out[:, i, x] = logsumexp(lw[mask] - np.log(pi[x]), axis=0)
    return out


def enum_correlated_loglik(pi, P, piB, Bmat, z, i, x) -> float:
    """XOR-mechanism log Pr[Z = z | X_i = x]: enumerate hidden rows, noise forced."""
    z = np.asarray(z)
    n = z.size
    rows = bit_rows(n)
    rows = rows[rows[:, i - 1] == x]
    lj = enum_chain_logprob(pi, P, rows) - np.log(pi[x])
    ys = rows ^ z[None, :]
    ly = enum_chain_logprob(piB, Bmat, ys)
    return float(logsumexp(lj + ly))
