"""Look-ahead transfers: paying early is cheaper.

Conjunction merges two approximations of one set along agreement stages;
implication re-times an approximation along domination stages; change sets
and joins move obedience to c.e. covers and effective joins.  Every claim
is an exact ledger comparison.
"""

from costlab.core import cost_of_trace
from costlab.generate import (
    additive_grid_cost,
    approximation_trace,
    dominated_cost_pair,
    monotone_cost,
    rng_for,
    same_final_pair,
    trace_with_final,
)
from costlab.transforms import (
    change_set,
    conjoin,
    decode_change_set,
    implication_transfer,
    join,
)

S = 400
rng = rng_for(7, "demo4")

print("== conjunction ==")
e, f, final = same_final_pair(rng, S)
c = additive_grid_cost(rng, S, "c")
d = additive_grid_cost(rng, S, "d")
r = conjoin(e, f, c, d)
print(f"  two approximations of {sorted(final)} merged along {len(r.stages)} agreement stages")
print(f"  (c+d)-total {float(r.output_total):.6f} <= 4 + parts {float(r.bound):.6f}: {r.ok}")

print("\n== implication along domination stages ==")
N = 3
c2, d2 = dominated_cost_pair(rng, S, N)
a = trace_with_final(rng, S, frozenset({1, 4, 9}), 24, S // 2)
ri = implication_transfer(a, c2, d2, N)
print(f"  d-total of the re-timed trace {float(ri.output_total):.6f}")
print(f"  N * c-total of the input      {float(ri.bound):.6f}: bound holds: {ri.ok}")

print("\n== change sets and joins ==")
cm = monotone_cost(rng, S)
t = approximation_trace(rng, S, 24, 8)
cs = change_set(t)
print(f"  change set decodes back: {decode_change_set(cs) == t.final_set()}")
print(
    f"  ledger(change set) {float(cost_of_trace(cm, cs).total):.6f} <= "
    f"ledger(source) {float(cost_of_trace(cm, t).total):.6f}"
)
t2 = approximation_trace(rng, S, 24, 8)
j = join(t, t2)
lhs = cost_of_trace(cm, j).total
rhs = cost_of_trace(cm, t).total + cost_of_trace(cm, t2).total
print(f"  ledger(join) {float(lhs):.6f} <= sum {float(rhs):.6f}: {lhs <= rhs}")
