"""Chain basics: build a lazy two-state chain, sample it, and fit one back.

Run:  python demos/01_chain_basics.py
"""

import numpy as np

from bdpmc import BinaryMarkovChain, binarize, estimate, sample

chain = BinaryMarkovChain(q=0.2, r=0.35)
pi0, pi1 = chain.stationary()
print(f"chain q={chain.q} r={chain.r}")
print(f"stationary distribution: pi0={pi0:.6f} pi1={pi1:.6f}")
print(f"transition matrix:\n{chain.transition_matrix()}")

bits = sample(chain, 50_000, seed=7)
print(f"\nsampled {bits.size} bits, fraction of ones = {bits.mean():.4f} (pi1 = {pi1:.4f})")

fit = estimate(bits)
print(f"refit from transition counts: q_hat={fit.chain.q:.4f} r_hat={fit.chain.r:.4f} "
      f"(clamped: {fit.clamped})")

# binarization of a real-valued series: above the mean -> 1
rng = np.random.default_rng(0)
heart_rate_like = 70 + np.cumsum(rng.normal(0, 0.8, 2000))
binary = binarize(heart_rate_like)
print(f"\nbinarized a real-valued walk: length {binary.size}, ones fraction {binary.mean():.3f}")
print(f"fitted from it: {estimate(binary).chain}")
