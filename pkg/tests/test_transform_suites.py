"""Randomized ledger-inequality suites at the contract scale.

The remaining look-ahead operations run on 100 seeded instances with
horizon 1000 each; the merged-per-criterion operations are covered at the
same scale by the acceptance scenarios.
"""

from costlab.core import EnumerationTrace, cost_of_trace
from costlab.generate import (
    additive_grid_cost,
    left_ce_real,
    rng_for,
    trace_with_final,
)
from costlab.transforms import (
    ibT_transfer,
    identity_functional,
    same_real_transfer,
    to_enumeration,
    trim,
)

S = 1000
COUNT = 100


def test_to_enumeration_suite():
    for i in range(COUNT):
        rng = rng_for(i, "suite-toenum")
        c = additive_grid_cost(rng, S, "c")
        final = frozenset(rng.sample(range(40), 6))
        a = trace_with_final(rng, S, final, 40, S // 2)
        stages = sorted(rng.sample(range(S // 2 + 1, S), len(final)))
        b = EnumerationTrace(
            S,
            sorted(
                ((s, x, 1) for s, x in zip(stages, sorted(final))),
                key=lambda e: e[0],
            ),
        )
        out = to_enumeration(a, b)
        assert out.final_set() == final
        assert cost_of_trace(c, out).total <= cost_of_trace(c, a).total


def test_ibt_transfer_suite():
    g = identity_functional()
    for i in range(COUNT):
        rng = rng_for(i, "suite-ibt")
        c = additive_grid_cost(rng, S, "c")
        b = trace_with_final(rng, S, frozenset(rng.sample(range(40), 6)), 40, S // 2)
        r = ibT_transfer(g, b, c)
        assert r.ok
        assert r.trace.final_set() == b.final_set()


def test_same_real_transfer_suite():
    for i in range(COUNT):
        rng = rng_for(i, "suite-sr")
        a = left_ce_real(rng, S)
        ta = trace_with_final(rng, S, frozenset(rng.sample(range(30), 5)), 30, S // 2)
        out = same_real_transfer(a, a, ta)
        assert out.ok


def test_trim_suite():
    from fractions import Fraction

    for i in range(COUNT):
        rng = rng_for(i, "suite-trim")
        c = additive_grid_cost(rng, S, "c")
        a = trace_with_final(rng, S, frozenset(rng.sample(range(40), 6)), 40, S // 2)
        eps = Fraction(1, 1 << rng.randint(1, 16))
        t = trim(a, c, eps)
        assert t.final_set() == a.final_set()
        assert cost_of_trace(c, t).total < eps
