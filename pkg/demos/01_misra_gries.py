"""Misra-Gries on a skewed stream.

The table holds floor(1/eps) + 1 counters. Every estimate undercounts by
less than eps * m, so anything above phi * m is always reported.
"""
from heavyhitters import HHParams, MisraGries, exact_profile, gen_zipf, truth_l1

stream = gen_zipf(n=5000, m=200_000, s=1.2, seed=1)
eps, phi = 0.01, 0.05

mg = MisraGries(eps)
mg.consume(stream.items.tolist())
profile = exact_profile(stream)

print(f"{mg.capacity} counters for {len(profile.counts)} distinct items")
print("item   true   estimate")
for item, est in sorted(mg.report(phi), key=lambda kv: -kv[1]):
    print(f"{item:>4} {profile[item]:>6} {est:>10.0f}")

must, forbidden = truth_l1(profile, HHParams(eps, phi))
print("every must item reported:", must <= mg.report(phi).items)
