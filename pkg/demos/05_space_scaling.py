"""How the bit counts grow with the universe size."""
import numpy as np

from heavyhitters.harness import space_table

table = space_table(range(10, 21, 2))
print(f"{'log2 n':>6} {'MG':>6} {'l1':>6} {'CS':>8} {'sieve':>6}")
for row in table:
    print(f"{row['log2_n']:>6} {row['mg']:>6} {row['l1']:>6} {row['cs']:>8} {row['sieve']:>6}")

L = np.array([r["log2_n"] for r in table], dtype=float)
for name, model in (("sieve", L * np.log2(L)), ("cs", L**2)):
    y = np.array([r[name] for r in table], dtype=float)
    c = model @ y / (model @ model)
    print(f"{name}: bits ~ {c:.1f} x model, max relative residual "
          f"{np.max(np.abs(y - c * model) / y):.1%}")
