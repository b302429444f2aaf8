"""CountSketch in the turnstile model: insertions, deletions and merging."""
import numpy as np

from heavyhitters import CountSketch, exact_profile, gen_spike

n = 2**12
stream = gen_spike(n, n - 1 + 200, star=1234, f_star=200, seed=5)
profile = exact_profile(stream)

cs = CountSketch(buckets=256, rows=0, seed=7, n=n)
cs.update_many(stream.items)
print(f"{cs.rows} rows x {cs.buckets} buckets")
print(f"item 1234: estimate {cs.estimate(1234):.0f}, true {profile[1234]}")

report = cs.l2_report(phi=0.25, f2_hat=profile.f2, epsilon=0.1)
print("l2 report:", dict(report))

# two halves sketched separately and merged give the same counters
left, right = CountSketch(256, 0, seed=7, n=n), CountSketch(256, 0, seed=7, n=n)
half = stream.m // 2
left.update_many(stream.items[:half])
right.update_many(stream.items[half:])
print("merge equals whole:", np.array_equal(left.merge(right).counters, cs.counters))

# deleting everything returns the zero sketch
cs.update_many(stream.items, delta=-1)
print("zero after deleting the stream:", cs.is_zero())
