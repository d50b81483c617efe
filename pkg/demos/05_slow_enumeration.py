"""Obedience depends on the enumeration, not just the set.

Enumerating every natural at its own stage costs nothing.  Enumerating the
same set too slowly — waiting for the short power-of-two descriptions to
arrive — pays at least 1 per dyadic interval, so the total diverges with
the horizon.  Summed limit prices over any infinite set diverge too.
"""

from costlab.catalog import cost_k
from costlab.constructions import infinite_ce_divergence, slow_enum_N
from costlab.core import EnumerationTrace, cost_of_trace
from costlab.machine import baseline_provider

print("== the fast enumeration is free ==")
S = 10_241
p = baseline_provider(S)
fast = EnumerationTrace(S, [(x + 1, x, 1) for x in range(200)])
print(f"  enumerating 0..199 at their own stages costs {cost_of_trace(cost_k(p), fast).total}")

print("\n== the slow enumeration pays per interval ==")
trace, ledger = slow_enum_N(p, 12)
print(f"  shortcut constants give the first constrained interval j0 = {ledger.j0}")
for j, v in ledger.per_interval.items():
    print(f"  interval ending at 2^{j}: exact cost {v} (~{float(v):.4f}) >= 1")

print("\n== limit prices over an infinite set diverge ==")
rs, sums = infinite_ce_divergence(list(range(200)), 5, baseline_provider(600), d=1)
print(f"  requests: {[(r, y) for r, y, _ in rs.entries]}")
for r, total in enumerate(sums):
    print(f"  partial sum after scale {r}: {float(total):.4f}")
print(f"  strictly increasing: {all(a < b for a, b in zip(sums, sums[1:]))}")
