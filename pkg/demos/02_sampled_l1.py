"""Sampling plus hashed ids: the l1 sketch that keeps real ids only for the top.

About 400/eps^2 positions are sampled, ids are hashed into a universe big
enough to avoid collisions, and only ceil(2/phi) entries carry a full id.
"""
from heavyhitters import HHParams, MisraGries, SampledL1, exact_profile, gen_zipf, truth_l1

stream = gen_zipf(n=100_000, m=1_000_000, s=1.3, seed=3)
eps, phi = 0.05, 0.1

sketch = SampledL1(eps, phi, stream.m, seed=0)
sketch.consume(stream.items)
profile = exact_profile(stream)

print(f"sampled {sketch.sampled_count} of {stream.m} updates (target r = {sketch.r})")
for item, est in sorted(sketch.report(), key=lambda kv: -kv[1]):
    print(f"item {item:>3}: estimate {est:>9.0f}, true {profile[item]:>7}")

must, forbidden = truth_l1(profile, HHParams(eps, phi))
rep = sketch.report()
print("must covered:", must <= rep.items, "| forbidden reported:", sorted(rep.items & forbidden))

n = stream.n
print(f"bits: sampled sketch {sketch.space_bits(n)}, plain MG {MisraGries(eps).space_bits(n, stream.m)}")
