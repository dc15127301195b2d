"""Privacy-loss formulas and noise calibration.

Everything here reduces to the worst-case likelihood ratio of the sanitization
HMM.  Against an adversary with no known tuples, the ratio
Pr[Z = z | X_i = 0] / Pr[Z = z | X_i = 1] is maximized by the all-zero output
and an index near n/2, and is bounded by a ** 2 / (c * d) in terms of the
eigen-decomposition of the all-zero-observation prefix/suffix recurrences:

    x = (1 - rho0)(1 - q),  y = rho1 (1 - r)
    s = sqrt((x - y)^2 + 4 q r (1 - rho0) rho1)
    a, b = x - y +/- s          (eigenvector first components)
    c = 2 r rho1,  d = 2 r (1 - rho0)
    lambda_{1,2} = (x + y +/- s) / 2

The mirrored hypothesis (conditioning on X_i = 1, worst output all-ones) uses
the same formulas with q <-> r and rho0 <-> rho1 swapped.  Budget comparisons
are done in log space so huge e^eps values are never materialized.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.optimize import minimize_scalar
from scipy.special import expit

from .chain import BinaryMarkovChain
from .errors import EnumerationLimitError, ParameterDomainError
from .hmm import all_bit_rows, log_chain_prob
from .mechanisms import NoiseParams

BDPL_MAX_N = 12

_RHO_LO = 1e-12
_RHO_HI = 0.5 * (1.0 - 1e-12)


@dataclass(frozen=True)
class PrivacyBudget:
    """A privacy budget in nats; must be strictly positive."""

    epsilon: float

    def __post_init__(self):
        if not np.isfinite(self.epsilon) or self.epsilon <= 0:
            raise ValueError(f"epsilon must be a positive real, got {self.epsilon}")


def _as_eps(eps) -> float:
    if isinstance(eps, PrivacyBudget):
        return eps.epsilon
    eps = float(eps)
    if not np.isfinite(eps) or eps <= 0:
        raise ParameterDomainError(f"epsilon must be a positive real, got {eps}")
    return eps


@dataclass(frozen=True)
class Adversary:
    """Target index ``i`` plus the set of tuple indices already known (1-based)."""

    i: int
    known: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "known", frozenset(int(j) for j in self.known))
        if self.i in self.known:
            raise ValueError(f"target index {self.i} cannot be in the known set")


@dataclass(frozen=True)
class ClosedFormConstants:
    """Eigen-quantities of the all-zero-observation recurrences (see module docs).

    sigma = lambda2 / lambda1 in (0, 1);
    gamma = (a - d)(c - b) / ((a - c)(d - b)) > 0 shifts the worst index off n/2.
    """

    a: float
    b: float
    c: float
    d: float
    lambda1: float
    lambda2: float
    sigma: float
    gamma: float

    @classmethod
    def from_params(cls, chain: BinaryMarkovChain, noise: NoiseParams) -> "ClosedFormConstants":
        _check_open_params(chain, noise)
        q, r = chain.q, chain.r
        rho0, rho1 = noise.rho0, noise.rho1
        x = (1.0 - rho0) * (1.0 - q)
        y = rho1 * (1.0 - r)
        s = math.sqrt((x - y) ** 2 + 4.0 * q * r * (1.0 - rho0) * rho1)
        a = x - y + s
        b = x - y - s
        c = 2.0 * r * rho1
        d = 2.0 * r * (1.0 - rho0)
        gamma = ((a - d) * (c - b)) / ((a - c) * (d - b))
        lambda1 = 0.5 * (x + y + s)
        lambda2 = 0.5 * (x + y - s)
        return cls(a=a, b=b, c=c, d=d, lambda1=lambda1, lambda2=lambda2,
                   sigma=lambda2 / lambda1, gamma=gamma)


@dataclass(frozen=True)
class HProfile:
    """Tabulated unknown-run profile: h(k) = f(k) g(k), nondecreasing in k.

    f(k) is the stationary odds of the target against a known tuple k+1 steps
    away; g(k) is the matching all-zero suffix-likelihood ratio.  Their
    product tracks how the privacy loss grows as the contiguous unknown run
    around the target lengthens.
    """

    k: np.ndarray
    f: np.ndarray
    g: np.ndarray
    h: np.ndarray


def _check_open_params(chain: BinaryMarkovChain, noise: NoiseParams) -> None:
    chain.require_positive()
    if not (0.0 < noise.rho0 < 0.5 and 0.0 < noise.rho1 < 0.5):
        raise ParameterDomainError(
            f"privacy bounds need 0 < rho0, rho1 < 0.5, got ({noise.rho0}, {noise.rho1})"
        )


def _check_theta_rho(theta: float, rho: float | None = None) -> None:
    if not (np.isfinite(theta) and 0.0 < theta < 0.5):
        raise ParameterDomainError(f"theta must lie in (0, 0.5), got {theta}")
    if rho is not None and not (np.isfinite(rho) and 0.0 < rho < 0.5):
        raise ParameterDomainError(f"rho must lie in (0, 0.5), got {rho}")


def _log_bound_one(q: float, r: float, rho0: float, rho1: float) -> float:
    x = (1.0 - rho0) * (1.0 - q)
    y = rho1 * (1.0 - r)
    s = math.sqrt((x - y) ** 2 + 4.0 * q * r * (1.0 - rho0) * rho1)
    a = x - y + s
    c = 2.0 * r * rho1
    d = 2.0 * r * (1.0 - rho0)
    return 2.0 * math.log(a) - math.log(c) - math.log(d)


def _log_bounds(q: float, r: float, rho0: float, rho1: float) -> tuple[float, float]:
    return (_log_bound_one(q, r, rho0, rho1), _log_bound_one(r, q, rho1, rho0))


def log_lr_bound(chain: BinaryMarkovChain, noise: NoiseParams) -> tuple[float, float]:
    """Log of the two worst-case likelihood-ratio bounds (see :func:`lr_bound`)."""
    _check_open_params(chain, noise)
    return _log_bounds(chain.q, chain.r, noise.rho0, noise.rho1)


def lr_bound(chain: BinaryMarkovChain, noise: NoiseParams) -> tuple[float, float]:
    """Worst-case likelihood-ratio bounds (a^2/(cd) and its swapped analogue).

    bound0 dominates Pr[z | X_i = 0] / Pr[z | X_i = 1] over every z and i;
    bound1 dominates the reciprocal hypothesis and is obtained by swapping
    q <-> r and rho0 <-> rho1.  Both are >= 1.
    """
    l0, l1 = log_lr_bound(chain, noise)
    return math.exp(l0), math.exp(l1)


def log_lr_bound_grid(chain: BinaryMarkovChain, rho0, rho1) -> tuple[np.ndarray, np.ndarray]:
    """Vectorized :func:`log_lr_bound` over arrays of noise rates."""
    chain.require_positive()
    rho0 = np.asarray(rho0, dtype=float)
    rho1 = np.asarray(rho1, dtype=float)
    if np.any(rho0 <= 0) or np.any(rho0 >= 0.5) or np.any(rho1 <= 0) or np.any(rho1 >= 0.5):
        raise ParameterDomainError("noise rates must lie in (0, 0.5)")

    def one(q, r, r0, r1):
        x = (1.0 - r0) * (1.0 - q)
        y = r1 * (1.0 - r)
        s = np.sqrt((x - y) ** 2 + 4.0 * q * r * (1.0 - r0) * r1)
        a = x - y + s
        return 2.0 * np.log(a) - np.log(2.0 * r * r1) - np.log(2.0 * r * (1.0 - r0))

    q, r = chain.q, chain.r
    return one(q, r, rho0, rho1), one(r, q, rho1, rho0)


def log_lr_bound_symmetric(theta: float, rho: float) -> float:
    _check_theta_rho(theta, rho)
    a = math.sqrt(theta**2 + (1 - 2 * theta) * (1 - 2 * rho) ** 2) + (1 - theta) * (1 - 2 * rho)
    c = 2 * theta * (1 - rho)
    return math.log1p(-rho) - math.log(rho) + 2.0 * (math.log(a) - math.log(c))


def lr_bound_symmetric(theta: float, rho: float) -> float:
    """Worst-case likelihood-ratio bound for a symmetric chain and noise.

    Equals ((1 - rho)/rho) (a/c)^2 with the symmetric specializations of the
    eigen-quantities; strictly decreasing in rho, so it can be bisected.
    """
    return math.exp(log_lr_bound_symmetric(theta, rho))


def rho_sufficient_symmetric(theta: float, eps) -> float:
    """Closed-form flip rate sufficient for the symmetric bound to stay <= e^eps.

    Slightly conservative: it upper-bounds :func:`calibrate_symmetric_exact`
    everywhere while avoiding any root finding.
    """
    eps = _as_eps(eps)
    _check_theta_rho(theta)
    if eps > 700:
        raise ParameterDomainError(f"closed form overflows for eps > 700, got {eps}")
    e = math.exp(eps)
    num = 4 + theta * (theta * e - 2) - math.sqrt(theta**2 * e * (4 + theta * (theta * e - 4)))
    den = 8 + 2 * theta * (theta * e + theta - 4)
    rho = num / den
    if not 0.0 < rho < 0.5:
        raise ParameterDomainError(f"closed form left (0, 0.5): rho={rho}")
    return rho


def calibrate_symmetric_exact(theta: float, eps, tol: float = 1e-9) -> float:
    """Smallest rho with lr_bound_symmetric(theta, rho) <= e^eps, by bisection.

    The bound is strictly decreasing in rho and tends to 1 as rho -> 0.5, so
    the boundary always exists on the open interval.  Bisection keeps a
    (infeasible, feasible) bracket and runs to machine precision (well past
    the ``tol`` contract); the feasible endpoint is returned, so the bound at
    the result never exceeds e^eps.
    """
    eps = _as_eps(eps)
    _check_theta_rho(theta)
    lo, hi = 1e-300, _RHO_HI
    if log_lr_bound_symmetric(theta, hi) > eps:
        raise ParameterDomainError("bound exceeds budget even at rho ~ 0.5")
    if log_lr_bound_symmetric(theta, lo) <= eps:
        return lo
    while hi - lo > min(tol, 1e-15):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        if log_lr_bound_symmetric(theta, mid) <= eps:
            hi = mid
        else:
            lo = mid
    return hi


def _min_feasible_rho1(q: float, r: float, eps: float, rho0: float) -> float | None:
    """Smallest rho1 making both log bounds <= eps at this rho0, or None.

    Both bounds are strictly decreasing in rho1 (and in rho0), so each
    constraint boundary is found by bisection and the joint minimum is the
    larger of the two boundaries.
    """
    if max(_log_bounds(q, r, rho0, _RHO_HI)) > eps:
        return None
    lo_vals = _log_bounds(q, r, rho0, _RHO_LO)
    boundaries = []
    for which in (0, 1):
        if lo_vals[which] <= eps:
            boundaries.append(_RHO_LO)
            continue
        lo, hi = _RHO_LO, _RHO_HI
        for _ in range(90):
            mid = 0.5 * (lo + hi)
            if _log_bounds(q, r, rho0, mid)[which] <= eps:
                hi = mid
            else:
                lo = mid
        boundaries.append(hi)
    return max(boundaries)


def calibrate_asymmetric(chain: BinaryMarkovChain, eps) -> NoiseParams:
    """Minimize the expected noise pi0 rho0 + pi1 rho1 under both budget bounds.

    Grid-plus-bisection: for each rho0 on a grid, bisect the smallest feasible
    rho1 (each constraint is monotone in both rates), take the best grid
    point, then refine rho0 locally.  The returned pair satisfies both bounds
    (feasible-side bisection) and is optimal to ~1e-6 in the objective.
    """
    eps = _as_eps(eps)
    chain.require_positive()
    q, r = chain.q, chain.r
    pi0, pi1 = chain.stationary()

    def feasible_rho0(rho0):
        return max(_log_bounds(q, r, rho0, _RHO_HI)) <= eps

    if not feasible_rho0(_RHO_HI):
        raise ParameterDomainError("no feasible noise for this chain and budget")
    if feasible_rho0(_RHO_LO):
        rho0_lo = _RHO_LO
    else:
        lo, hi = _RHO_LO, _RHO_HI
        for _ in range(90):
            mid = 0.5 * (lo + hi)
            if feasible_rho0(mid):
                hi = mid
            else:
                lo = mid
        rho0_lo = hi

    def objective(rho0):
        rho1 = _min_feasible_rho1(q, r, eps, rho0)
        if rho1 is None:
            return math.inf
        return pi0 * rho0 + pi1 * rho1

    grid = np.linspace(rho0_lo, _RHO_HI, 513)
    values = [objective(r0) for r0 in grid]
    k = int(np.argmin(values))
    lo_b = grid[max(k - 1, 0)]
    hi_b = grid[min(k + 1, grid.size - 1)]
    res = minimize_scalar(objective, bounds=(lo_b, hi_b), method="bounded",
                          options={"xatol": 1e-10})
    rho0_best = float(res.x) if res.fun <= values[k] else float(grid[k])
    rho1_best = _min_feasible_rho1(q, r, eps, rho0_best)
    return NoiseParams(rho0_best, rho1_best)


def closed_form_ratios(chain: BinaryMarkovChain, noise: NoiseParams,
                       i: int, n: int) -> tuple[float, float]:
    """Exact all-zero-observation prefix/suffix ratios at a finite index.

    alpha_i(0)/alpha_i(1) = (a(c-b) + b(a-c) sigma^i) / (c(c-b) + c(a-c) sigma^i)
    written here with sigma^i factored out of lambda1^i, and the suffix
    analogue with d and sigma^(n-i).  Each ratio is at most its limit a/c
    (resp. a/d).
    """
    if not 1 <= i <= n:
        raise IndexError(f"index must satisfy 1 <= i <= {n}, got {i}")
    k = ClosedFormConstants.from_params(chain, noise)
    ua = (k.a - k.c) / (k.c - k.b) * k.sigma**i
    ub = (k.a - k.d) / (k.d - k.b) * k.sigma ** (n - i)
    alpha_ratio = (k.a + k.b * ua) / (k.c + k.c * ua)
    beta_ratio = (k.a + k.b * ub) / (k.d + k.d * ub)
    return alpha_ratio, beta_ratio


def argmax_index(chain: BinaryMarkovChain, noise: NoiseParams, n: int) -> tuple[int, float]:
    """Worst-case index for the all-zero output, and the ratio value there.

    i* = n/2 + log(gamma) / (2 log(sigma)), rounded half toward n/2 (so the
    symmetric case lands on floor(n/2)) and clamped to [1, n]; the value is
    the product of the two closed-form ratios at i*.
    """
    if n < 1:
        raise ValueError(f"n must be >= 1, got {n}")
    k = ClosedFormConstants.from_params(chain, noise)
    v = n / 2 + math.log(k.gamma) / (2.0 * math.log(k.sigma))
    i_star = math.ceil(v - 0.5) if v >= n / 2 else math.floor(v + 0.5)
    i_star = min(max(i_star, 1), n)
    alpha_ratio, beta_ratio = closed_form_ratios(chain, noise, i_star, n)
    return i_star, alpha_ratio * beta_ratio


def dp_noise(eps) -> float:
    """Flip rate achieving eps-DP for the symmetric mechanism: 1/(e^eps + 1)."""
    return float(expit(-_as_eps(eps)))


def zhao_eps3_threshold(theta: float) -> float:
    """Budget below which the single-step reduction of Zhao et al. is undefined."""
    _check_theta_rho(theta)
    return 6.0 * math.log((1 - theta) / theta)


def zhao_eps3_noise(theta: float, eps) -> float:
    """Flip rate from the single-step Zhao et al. reduction, as published.

    Returns 2 (1-theta)^6 / (theta^6 e^eps + (1-theta)^6); NaN when
    eps <= 6 ln((1-theta)/theta), where the reduced budget would be
    non-positive.  The published numerator carries a factor 2 that direct
    substitution of the reduced budget does not produce; see
    :func:`zhao_eps3_noise_direct` for the substituted form.
    """
    eps = _as_eps(eps)
    _check_theta_rho(theta)
    if eps <= zhao_eps3_threshold(theta):
        return math.nan
    return 2 * (1 - theta) ** 6 / (theta**6 * math.exp(eps) + (1 - theta) ** 6)


def zhao_eps3_noise_direct(theta: float, eps) -> float:
    """1/(e^{eps3} + 1) with eps3 = eps - 6 ln((1-theta)/theta); NaN when undefined."""
    eps = _as_eps(eps)
    _check_theta_rho(theta)
    eps3 = eps - zhao_eps3_threshold(theta)
    if eps3 <= 0:
        return math.nan
    return float(expit(-eps3))


def zhao_eps6_budget(theta: float, eps, n: int) -> float:
    """Reduced DP budget from the piecewise-linear Zhao et al. reduction.

    max over t in [1, n/2] of
    (eps - 6 ln((1 + (1-2theta)^t) / (1 - (1-2theta)^t))) / (2t - 1).
    May come out non-positive when the budget cannot pay the correlation
    penalty at any horizon.
    """
    eps = _as_eps(eps)
    _check_theta_rho(theta)
    if n < 2:
        raise ValueError(f"n must be >= 2, got {n}")
    ts = np.arange(1, n // 2 + 1)
    pen = 6.0 * np.log((1 + (1 - 2 * theta) ** ts) / (1 - (1 - 2 * theta) ** ts))
    return float(np.max((eps - pen) / (2 * ts - 1)))


def zhao_eps6_noise(theta: float, eps, n: int) -> float:
    """Flip rate 1/(e^{eps6} + 1); NaN when the reduced budget is infeasible."""
    eps6 = zhao_eps6_budget(theta, eps, n)
    if eps6 <= 0:
        return math.nan
    return float(expit(-eps6))


def h_profile(theta: float, rho: float, k_max: int) -> HProfile:
    """Tabulate f, g, h = f*g for unknown-run lengths k = 0 .. k_max.

    Uses the symmetric eigen-quantities of the all-zero suffix recurrence.
    The eigenvalue radical is sqrt(theta^2 + (1-2theta)(1-2rho)^2) -- the same
    radical as the eigenvector components -- because the eigenvalues must
    diagonalize [[ (1-t)(1-p), t p ], [ t (1-p), (1-t) p ]].
    """
    _check_theta_rho(theta, rho)
    if k_max < 1:
        raise ValueError(f"k_max must be >= 1, got {k_max}")
    srad = math.sqrt(theta**2 + (1 - 2 * theta) * (1 - 2 * rho) ** 2)
    a = srad + (1 - theta) * (1 - 2 * rho)
    b = -srad + (1 - theta) * (1 - 2 * rho)
    c = 2 * theta * (1 - rho)
    lambda1 = 0.5 * ((1 - theta) + srad)
    lambda2 = 0.5 * ((1 - theta) - srad)
    el = lambda2 / lambda1
    k = np.arange(0, k_max + 1)
    decay = el**k.astype(float)
    f = (1 - (1 - 2 * theta) ** (k + 1.0)) / (1 + (1 - 2 * theta) ** (k + 1.0))
    g = (a * (c * (1 - theta) - b * theta) + b * decay * (a * theta - c * (1 - theta))) / (
        a * (c * theta - b * (1 - theta)) + b * decay * (a * (1 - theta) - c * theta)
    )
    return HProfile(k=k, f=f, g=g, h=f * g)


def _emission_vectors(noise: NoiseParams, rows: np.ndarray) -> np.ndarray:
    """Pr[Z = . | X = row] for every row; shape (m, 2^n)."""
    B = noise.emission_matrix()
    m, n = rows.shape
    out = np.ones((m, 1))
    for t in range(n):
        out = (out[:, :, None] * B[rows[:, t], None, :]).reshape(m, -1)
    return out


def bdpl_adversary(chain: BinaryMarkovChain, noise: NoiseParams, n: int,
                   adversary: Adversary, return_witness: bool = False):
    """Exact privacy loss of the independent mechanism against one adversary.

    Enumerates every value of the known tuples, every output z, and both
    hypotheses for the target, marginalizing the unknown tuples exactly:

        sup over x_i, x_i', x_K, z of Pr[z | x_i, x_K] / Pr[z | x_i', x_K].

    Guarded to n <= 12.  With ``return_witness`` also returns the achieving
    (x_i, x_K assignment, z bits).
    """
    if n > BDPL_MAX_N:
        raise EnumerationLimitError(f"exhaustive BDPL limited to n <= {BDPL_MAX_N}, got {n}")
    _check_open_params(chain, noise)
    i = adversary.i
    known = sorted(adversary.known)
    if not 1 <= i <= n or any(not 1 <= j <= n for j in known):
        raise IndexError(f"adversary indices must lie in [1, {n}]")
    rows = all_bit_rows(n)
    prob = np.exp(log_chain_prob(chain, rows))
    fixed = [i] + known  # target bit is the low code bit
    codes = np.zeros(rows.shape[0], dtype=np.int64)
    for pos, j in enumerate(fixed):
        codes |= rows[:, j - 1].astype(np.int64) << pos
    ncodes = 2 ** len(fixed)
    dists = np.zeros((ncodes, 2**n))
    if n <= 10:
        weighted = prob[:, None] * _emission_vectors(noise, rows)
        np.add.at(dists, codes, weighted)
    else:
        for code in range(ncodes):
            mask = codes == code
            dists[code] = prob[mask] @ _emission_vectors(noise, rows[mask])
    mass = np.bincount(codes, weights=prob, minlength=ncodes)
    dists /= mass[:, None]
    dist0 = dists[0::2]  # x_i = 0, one row per x_K assignment
    dist1 = dists[1::2]
    ratios = dist0 / dist1
    forward_max = float(np.max(ratios))
    backward_max = float(np.max(1.0 / ratios))
    value = max(forward_max, backward_max)
    if not return_witness:
        return value
    if forward_max >= backward_max:
        code_k, z_idx = np.unravel_index(np.argmax(ratios), ratios.shape)
        x_i = 0
    else:
        code_k, z_idx = np.unravel_index(np.argmax(1.0 / ratios), ratios.shape)
        x_i = 1
    x_known = {j: (int(code_k) >> pos) & 1 for pos, j in enumerate(known)}
    z_bits = all_bit_rows(n)[z_idx]
    return value, x_i, x_known, z_bits


def bdpl_ratio_at(chain: BinaryMarkovChain, noise: NoiseParams, n: int,
                  adversary: Adversary, x_i: int, x_known: dict[int, int], z) -> float:
    """The Def-2 style ratio at one concrete assignment, exactly.

    Pr[z | X_i = x_i, x_K] / Pr[z | X_i = 1 - x_i, x_K], marginalizing the
    unknown tuples by enumeration; lets tests confirm which assignments
    achieve the supremum (the ratio surface is flat in bits screened off by
    known tuples, so the witness is not unique).
    """
    if n > BDPL_MAX_N:
        raise EnumerationLimitError(f"exhaustive BDPL limited to n <= {BDPL_MAX_N}, got {n}")
    _check_open_params(chain, noise)
    if set(x_known) != set(adversary.known):
        raise ValueError("x_known must assign exactly the adversary's known indices")
    z = np.asarray(z, dtype=np.uint8)
    rows = all_bit_rows(n)
    prob = np.exp(log_chain_prob(chain, rows))
    base = np.ones(rows.shape[0], dtype=bool)
    for j, bit in x_known.items():
        base &= rows[:, j - 1] == bit
    B = noise.emission_matrix()

    def conditional(target_bit):
        mask = base & (rows[:, adversary.i - 1] == target_bit)
        w = prob[mask]
        emis = np.ones(w.size)
        sub = rows[mask]
        for t in range(n):
            emis *= B[sub[:, t], z[t]]
        return float(np.dot(w, emis) / w.sum())

    return conditional(x_i) / conditional(1 - x_i)


def success_bound_dp(eps) -> float:
    """Reconstruction-success ceiling under eps-DP: e^eps / (1 + e^eps)."""
    return float(expit(_as_eps(eps)))


def success_bound_bdp(chain: BinaryMarkovChain, eps) -> float:
    """Reconstruction-success ceiling under eps-BDP for a possibly asymmetric chain.

    e^eps / (max(q/r, r/q) + e^eps); the extra factor accounts for the
    stationary skew of the chain.
    """
    eps = _as_eps(eps)
    chain.require_positive()
    skew = max(chain.q / chain.r, chain.r / chain.q)
    return float(expit(eps - math.log(skew)))
