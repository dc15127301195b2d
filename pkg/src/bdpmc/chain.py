"""Binary Markov-chain model: construction, stationary distribution, sampling,
empirical estimation, and binarization of real-valued series.

The chain lives on states {0, 1} with transition matrix

    P = [[1 - q,     q],
         [    r, 1 - r]],   q, r in [0, 0.5)

so it is "lazy": staying is always at least as likely as switching.  All
randomness comes from numpy's counter-based Philox generator, keyed directly
by a 64-bit seed, so every operation is a pure function of its inputs.
"""

from __future__ import annotations

import os
import tempfile
from dataclasses import dataclass

import numpy as np

from .errors import DegenerateChainError, InsufficientDataError, ParameterDomainError

# Estimates are clamped into [ESTIMATE_CLAMP_LO, ESTIMATE_CLAMP_HI] so that the
# privacy-loss formulas downstream (which need 0 < q, r < 0.5) stay finite.
ESTIMATE_CLAMP_LO = 1e-6
ESTIMATE_CLAMP_HI = 0.5 - 1e-6

_MAX_SEED = 2**64


def make_rng(seed: int) -> np.random.Generator:
    """Generator keyed by a 64-bit unsigned seed (Philox; fixed algorithm)."""
    if not isinstance(seed, (int, np.integer)):
        raise TypeError(f"seed must be an integer, got {type(seed).__name__}")
    if not 0 <= seed < _MAX_SEED:
        raise ValueError(f"seed must be in [0, 2**64), got {seed}")
    return np.random.Generator(np.random.Philox(key=int(seed)))


def as_bits(values) -> np.ndarray:
    """Validate and return a bit series as a uint8 array over {0, 1}."""
    bits = np.asarray(values)
    if bits.ndim != 1 or bits.size == 0:
        raise ValueError("bit series must be a nonempty 1-d sequence")
    if not np.isin(bits, (0, 1)).all():
        raise ValueError("bit series may only contain 0 and 1")
    return bits.astype(np.uint8)


@dataclass(frozen=True)
class BinaryMarkovChain:
    """Lazy two-state chain with 0->1 rate ``q`` and 1->0 rate ``r``.

    Both rates must lie in [0, 0.5).  Operations that rely on the privacy
    bounds additionally need strictly positive rates; they call
    :meth:`require_positive`.
    """

    q: float
    r: float

    def __post_init__(self):
        for name, value in (("q", self.q), ("r", self.r)):
            if not np.isfinite(value) or not 0.0 <= value < 0.5:
                raise ValueError(f"{name} must lie in [0, 0.5), got {value}")

    def transition_matrix(self) -> np.ndarray:
        return np.array([[1.0 - self.q, self.q], [self.r, 1.0 - self.r]])

    def stationary(self) -> tuple[float, float]:
        """Stationary distribution (pi0, pi1) = (r, q) / (q + r)."""
        total = self.q + self.r
        if total == 0.0:
            raise DegenerateChainError("stationary distribution undefined for q = r = 0")
        return self.r / total, self.q / total

    def require_positive(self) -> None:
        if self.q <= 0.0 or self.r <= 0.0:
            raise ParameterDomainError(
                f"operation needs 0 < q, r < 0.5, got q={self.q}, r={self.r}"
            )

    @property
    def is_symmetric(self) -> bool:
        return self.q == self.r


def _sample_two_state(prob_one_start: float, p01: float, p10: float,
                      n: int, rng: np.random.Generator) -> np.ndarray:
    """Sample a stationary two-state trajectory from per-step uniforms.

    Consumes exactly n uniforms: u[0] decides the initial state
    (1 iff u[0] < prob_one_start), u[t] decides the t-th transition
    (switch iff u[t] < flip rate of the current state).
    """
    u = rng.random(n)
    out = np.empty(n, dtype=np.uint8)
    state = 1 if u[0] < prob_one_start else 0
    out[0] = state
    flip = (p01, p10)
    ulist = u.tolist()
    for t in range(1, n):
        if ulist[t] < flip[state]:
            state = 1 - state
        out[t] = state
    return out


def sample(chain: BinaryMarkovChain, n: int, seed: int) -> np.ndarray:
    """Sample ``n`` bits: the first from the stationary distribution, the rest
    via the transition row of each predecessor.  Deterministic per seed."""
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    _, pi1 = chain.stationary()  # raises DegenerateChainError when q = r = 0
    return _sample_two_state(pi1, chain.q, chain.r, n, make_rng(seed))


@dataclass(frozen=True)
class ChainEstimate:
    """Transition-frequency estimate with the pre-clamp raw rates.

    ``clamped`` is True when either raw rate fell outside
    [ESTIMATE_CLAMP_LO, ESTIMATE_CLAMP_HI] and was pulled back in.
    """

    chain: BinaryMarkovChain
    q_raw: float
    r_raw: float
    clamped: bool


def estimate(bits) -> ChainEstimate:
    """Estimate (q, r) from observed transition frequencies.

    q_hat = #(0->1) / #(0->*), r_hat = #(1->0) / #(1->*).  Raises
    InsufficientDataError when either denominator is zero.
    """
    bits = as_bits(bits)
    if bits.size < 2:
        raise InsufficientDataError("need at least one transition pair")
    src, dst = bits[:-1], bits[1:]
    from0 = int(np.sum(src == 0))
    from1 = int(np.sum(src == 1))
    if from0 == 0 or from1 == 0:
        raise InsufficientDataError(
            f"need transitions out of both states, got {from0} from 0 and {from1} from 1"
        )
    q_raw = int(np.sum((src == 0) & (dst == 1))) / from0
    r_raw = int(np.sum((src == 1) & (dst == 0))) / from1
    q_hat = min(max(q_raw, ESTIMATE_CLAMP_LO), ESTIMATE_CLAMP_HI)
    r_hat = min(max(r_raw, ESTIMATE_CLAMP_LO), ESTIMATE_CLAMP_HI)
    return ChainEstimate(
        chain=BinaryMarkovChain(q_hat, r_hat),
        q_raw=q_raw,
        r_raw=r_raw,
        clamped=(q_hat != q_raw) or (r_hat != r_raw),
    )


def binarize(series) -> np.ndarray:
    """Threshold a real-valued series at its arithmetic mean.

    bit = 1 iff value > mean; ties (value == mean) map to 0, so a constant
    series becomes all zeros.
    """
    values = np.asarray(series, dtype=float)
    if values.ndim != 1 or values.size == 0:
        raise ValueError("series must be a nonempty 1-d sequence")
    if not np.isfinite(values).all():
        raise ValueError("series contains non-finite values")
    return (values > values.mean()).astype(np.uint8)


def read_real_series(path) -> np.ndarray:
    """Read one decimal number per line (UTF-8); '#'-prefixed lines are skipped."""
    values = []
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            try:
                values.append(float(text))
            except ValueError:
                raise ValueError(f"{path}:{lineno}: not a decimal number: {text!r}") from None
    if not values:
        raise ValueError(f"{path}: no data lines")
    return np.array(values)


def write_bits(path, bits) -> None:
    """Write a bit series as one '0'/'1' character per bit, newline-terminated.

    The write is atomic (temp file in the same directory, then rename).
    """
    bits = as_bits(bits)
    path = os.fspath(path)
    fd, tmp = tempfile.mkstemp(dir=os.path.dirname(path) or ".", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", encoding="utf-8") as fh:
            fh.write("".join("1" if b else "0" for b in bits))
            fh.write("\n")
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_bits(path) -> np.ndarray:
    """Read the single-line bit format written by :func:`write_bits`."""
    with open(path, encoding="utf-8") as fh:
        text = fh.read().strip()
    if not text or set(text) - {"0", "1"}:
        raise ValueError(f"{path}: expected a single line of 0/1 characters")
    return np.frombuffer(text.encode("ascii"), dtype=np.uint8) - ord("0")
