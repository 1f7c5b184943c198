"""Reproduce the coordination-benefit quantile curve.

Prints F_{S_K}^{-1}(0.01) for V1 = V2 = 1 over K = 2^0 .. 2^40, next to the
analytic sandwich bounds.  The curve grows like sqrt(2 ln K): each extra
facilitator bit is worth progressively less, but the first few are large.

Run:  python3 demos/quantile_curve.py
"""
import math

from cfmac import SkParams, lemma1_bounds, sk_inverse_cdf

EPS = 0.01

print(f"{'log2 K':>7} {'quantile':>10} {'lower':>10} {'upper(1-eps)':>13}")
prev = None
for log2_k in range(0, 41, 2):
    p = SkParams(v1=1.0, v2=1.0, k=2**log2_k)
    q = sk_inverse_cdf(p, EPS).value
    b = lemma1_bounds(p, EPS)
    lower = f"{b.lower_at_eps:10.4f}" if b.lower_at_eps is not None else "        NA"
    print(f"{log2_k:>7} {q:>10.4f} {lower} {b.upper_at_one_minus_eps:>13.4f}")
    if prev is not None:
        assert q > prev, "quantile must increase with K"
    prev = q

# the asymptotic shape: quantile / sqrt(2 ln K) tends to sqrt(V1)
k = 2**40
ratio = sk_inverse_cdf(SkParams(1.0, 1.0, k), EPS).value / math.sqrt(2 * math.log(k))
print(f"\nquantile / sqrt(2 ln K) at K=2^40: {ratio:.4f} (limit 1)")
