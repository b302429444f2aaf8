"""Finding one l2 heavy item with sign counters and bit learning.

The amplifier's counter pairs push the heavy item onto the larger side of
nearly every pair; items that follow it there take part in the rounds, and
each round reveals one hash bit of the heavy id.
"""
import math

from heavyhitters import IsolatedSieve, L2Sieve, exact_profile, gen_spike
from heavyhitters.core import gen_planted

n = 2**16
f_star = math.isqrt(n) * math.ceil(math.log2(n))
stream = gen_spike(n, n - 1 + f_star, star=31337, f_star=f_star, seed=0)
profile = exact_profile(stream)
print(f"heavy item holds {f_star**2 / profile.f2:.1%} of F2")

sieve = L2Sieve(n, seed=0)
sieve.consume(stream.items)
print(f"{sieve.pairs} amplifier pairs, {len(sieve.rounds)} rounds learned, "
      f"{sieve.participated} updates passed the membership test")
star_bits = sieve.match_fractions([31337])[0]
print(f"heavy id agrees with {star_bits:.0%} of the suffix bits")
print("report:", sieve.report())

space = sieve.space_bits()
print(f"bits: idealized {space['idealized']}, with stored round seeds {space['actual']}")

# several heavy items: split the universe into groups, one sieve each
planted = {11: 222, 22_222: 222, 44_444: 222}
multi = gen_planted(n, 2**14, planted, seed=1)
iso = IsolatedSieve(n, phi=0.3, epsilon=0.1, seed=1)
iso.consume(multi.items)
print("isolated report:", sorted(iso.report().items), "planted:", sorted(planted))
