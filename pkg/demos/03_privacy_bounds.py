"""The privacy-loss calculus: exact finite-length ratios, the worst index,
the closed-form ceiling, and the exhaustive small-chain evaluator.

Run:  python demos/03_privacy_bounds.py
"""

from bdpmc import (
    Adversary,
    BinaryMarkovChain,
    ClosedFormConstants,
    NoiseParams,
    argmax_index,
    bdpl_adversary,
    closed_form_ratios,
    h_profile,
    lr_bound,
)

chain = BinaryMarkovChain(q=0.2, r=0.35)
noise = NoiseParams(rho0=0.25, rho1=0.3)
n = 30

k = ClosedFormConstants.from_params(chain, noise)
print(f"eigen-quantities: a={k.a:.5f} b={k.b:.5f} c={k.c:.5f} d={k.d:.5f}")
print(f"lambda1={k.lambda1:.5f} lambda2={k.lambda2:.5f} sigma={k.sigma:.5f} gamma={k.gamma:.5f}")

bound0, bound1 = lr_bound(chain, noise)
print(f"\nworst-case ratio ceilings: {bound0:.6f} (0-hypothesis), {bound1:.6f} (1-hypothesis)")

i_star, value = argmax_index(chain, noise, n)
print(f"worst index at n={n}: i*={i_star}, ratio there {value:.6f} "
      f"(within {1 - value / bound0:.2e} of the ceiling)")

print("\nall-zero-output ratio profile across the chain:")
for i in (1, 5, 10, i_star, 25, 30):
    ar, br = closed_form_ratios(chain, noise, i, n)
    print(f"  i={i:2d}: prefix ratio {ar:8.4f}  suffix ratio {br:8.4f}  product {ar * br:9.4f}")

print("\nunknown-run profile h(k) = f(k) g(k) for theta=0.3, rho=0.35:")
hp = h_profile(0.3, 0.35, 8)
for kk, f, g, h in zip(hp.k, hp.f, hp.g, hp.h):
    print(f"  k={kk}: f={f:.5f} g={g:.5f} h={h:.5f}")

print("\nexhaustive privacy loss for small chains (n=8, theta=0.3, rho=0.35):")
sym_chain = BinaryMarkovChain(0.3, 0.3)
sym_noise = NoiseParams(0.35, 0.35)
for known in (frozenset(), frozenset({1}), frozenset({1, 8}),
              frozenset(range(1, 8)) - {4}):
    value = bdpl_adversary(sym_chain, sym_noise, 8, Adversary(4, frozenset(known) - {4}))
    label = str(sorted(known)) if known else "nothing"
    print(f"  target 4, known {label:<22}: loss {value:.4f}")
print("note: knowledge is not monotone -- sparse opposing anchors can beat ignorance;")
print("calibration targets the ignorant-adversary ceiling (see README).")
