"""Seeded generators for universes, traces, reals, cost pairs, and schedules.

Everything is a pure function of its ``random.Random`` instance, so runs are
bit-identical given a seed.  Distributions are deliberately simple and
documented inline; they exist to exercise invariants, not to model anything.
"""

from __future__ import annotations

import random
from fractions import Fraction

import numpy as np

from .catalog import LeftCEReal, additive_from_real
from .constructions import Adversary, Universe, copycat_adversary, stubborn_adversary
from .core import ApproximationTrace, CostFn, EnumerationTrace, cost_fn
from .dual import PhiMock, blank_phi, scripted_phi, sensitive_phi
from .util import ZERO, pow2

SCALE = 24  # generated rationals are multiples of 2**-SCALE


def rng_for(seed: int, salt: str = "") -> random.Random:
    return random.Random(f"{seed}:{salt}")


def universe(rng: random.Random, size: int, S: int, mean_elements: int = 24) -> Universe:
    """Family of enumeration traces; element x of set e arrives at a stage > x."""
    sets = []
    for e in range(size):
        count = rng.randint(1, 2 * mean_elements)
        elements = sorted(rng.sample(range(2 * e, max(4 * e + 2, S // 4)),
                                     min(count, max(1, S // 8))))
        events = []
        for x in elements:
            stage = rng.randint(x + 1, S)
            events.append((stage, x, 1))
        events.sort(key=lambda ev: ev[0])
        sets.append(EnumerationTrace(S, events))
    return Universe(tuple(sets))


def enumeration_trace(rng: random.Random, S: int, width: int, count: int) -> EnumerationTrace:
    members = sorted(rng.sample(range(width), min(count, width)))
    events = sorted(
        ((rng.randint(1, S), x, 1) for x in members), key=lambda ev: ev[0]
    )
    return EnumerationTrace(S, events)


def approximation_trace(
    rng: random.Random,
    S: int,
    width: int,
    positions: int,
    max_flips: int = 3,
    settle_by: int | None = None,
) -> ApproximationTrace:
    """Flickery approximation; every position settles by the given stage."""
    settle = settle_by if settle_by is not None else S
    events = []
    for x in rng.sample(range(width), min(positions, width)):
        flips = rng.randint(1, max_flips)
        stages = sorted(rng.sample(range(1, settle + 1), min(flips, settle)))
        v = 0
        for s in stages:
            v = 1 - v
            events.append((s, x, v))
    events.sort(key=lambda ev: ev[0])
    return ApproximationTrace(S, events)


def trace_with_final(
    rng: random.Random,
    S: int,
    final: frozenset[int],
    width: int,
    settle_by: int,
    max_flips: int = 3,
) -> ApproximationTrace:
    """Approximation settling exactly on the requested final set."""
    events = []
    for x in range(width):
        target = 1 if x in final else 0
        flips = rng.randint(0, max_flips)
        if flips == 0 and target == 0:
            continue
        n_changes = 2 * flips + (1 if target == 1 else 0)
        if n_changes == 0:
            continue
        n_changes = min(n_changes, settle_by - 1) or (1 if target else 0)
        if n_changes == 0:
            continue
        if target == 1 and n_changes % 2 == 0:
            n_changes -= 1
        if target == 0 and n_changes % 2 == 1:
            n_changes -= 1
        if n_changes <= 0:
            continue
        stages = sorted(rng.sample(range(1, settle_by + 1), n_changes))
        v = 0
        for s in stages:
            v = 1 - v
            events.append((s, x, v))
    events.sort(key=lambda ev: ev[0])
    return ApproximationTrace(S, events)


def left_ce_real(
    rng: random.Random, S: int, cap: Fraction = Fraction(1), jumps: int | None = None
) -> LeftCEReal:
    """Nondecreasing dyadic sequence below the cap, jumping at random stages."""
    n_jumps = jumps if jumps is not None else rng.randint(1, max(2, S // 4))
    stages = sorted(rng.sample(range(1, S + 1), min(n_jumps, S)))
    total_units = int(cap * (1 << SCALE))
    values = [ZERO] * (S + 1)
    cur = ZERO
    remaining = total_units
    for s in range(1, S + 1):
        if stages and s == stages[0]:
            stages.pop(0)
            step = rng.randint(1, max(1, remaining // 4)) if remaining > 0 else 0
            remaining -= step
            cur += Fraction(step, 1 << SCALE)
        values[s] = cur
    return LeftCEReal(tuple(values), cap)


def strict_left_ce_real(rng: random.Random, S: int, cap: Fraction = Fraction(1)) -> LeftCEReal:
    """Strictly increasing variant (positive dyadic step at every stage)."""
    budget = int(cap * (1 << SCALE)) - 1
    if budget < S:
        raise ValueError("cap too small for a strict sequence at this horizon")
    cuts = sorted(rng.sample(range(1, budget), S - 1)) if S > 1 else []
    steps = []
    prev = 0
    for cpoint in cuts + [budget]:
        steps.append(cpoint - prev)
        prev = cpoint
    values = [ZERO]
    for st in steps:
        values.append(values[-1] + Fraction(max(st, 1), 1 << SCALE))
    return LeftCEReal(tuple(values), cap)


def additive_grid_cost(
    rng: random.Random, S: int, name: str = "generated-additive"
) -> CostFn:
    """Additive cost with an attached exact integer grid for vectorized checks."""
    b = left_ce_real(rng, S)
    base = additive_from_real(b)
    units = np.array([int(v * (1 << SCALE)) for v in b.seq], dtype=np.int64)
    xs = units[:, None]
    ss = units[None, :]
    grid = np.where(
        np.arange(S + 1)[:, None] <= np.arange(S + 1)[None, :], ss - xs, 0
    ).astype(np.int64)
    return cost_fn(
        name,
        S,
        base.eval_fn,
        monotone_main=True,
        monotone_stage=True,
        additive=True,
        grid=(grid, SCALE),
    )


def dominated_cost_pair(rng: random.Random, S: int, N: int) -> tuple[CostFn, CostFn]:
    """Pair (c, d) with N*c(x, s) > d(x, s) strictly on every x < s cell.

    Both are additive with per-stage dyadic increments; d's increment stays
    strictly below N times c's, so domination holds with margin on each cell.
    """
    gamma = np.array(
        [0] + [rng.randint(1, 1 << 8) for _ in range(S)], dtype=np.int64
    )
    delta = np.array(
        [0] + [rng.randint(0, int(N * g) - 1) for g in gamma[1:]], dtype=np.int64
    )
    c_units = np.cumsum(gamma)
    d_units = np.cumsum(delta)

    def make(units: np.ndarray, name: str) -> CostFn:
        vals = [Fraction(int(u), 1 << SCALE) for u in units]

        def ev(x: int, s: int) -> Fraction:
            if x > s:
                return ZERO
            return vals[min(s, S)] - vals[min(x, S)]

        mask = np.arange(S + 1)[:, None] <= np.arange(S + 1)[None, :]
        grid = np.where(mask, units[None, :] - units[:, None], 0).astype(np.int64)
        return cost_fn(
            name,
            S,
            ev,
            monotone_main=True,
            monotone_stage=True,
            additive=True,
            proper=True,
            grid=(grid, SCALE),
        )

    return make(c_units, "dominating"), make(d_units, "dominated")


def monotone_cost(rng: random.Random, S: int) -> CostFn:
    """Monotone, generally non-additive cost: a sum of weight-step terms.

    c(x, s) sums, over positions w in (x, s], a weight that steps up once at
    a per-position stage; this mimics complexity-sum behavior cheaply.
    """
    width = S + 1
    base_len = [rng.randint(4, 4 + SCALE // 2) for _ in range(width)]
    improved_len = [max(1, L - rng.randint(0, 3)) for L in base_len]
    improve_at = [rng.randint(w + 1, S) if S > w + 1 else S for w in range(width)]

    def weight(w: int, s: int) -> Fraction:
        if s <= w:
            return ZERO
        return pow2(improved_len[w] if s >= improve_at[w] else base_len[w])

    prefix_cache: dict[int, list[Fraction]] = {}

    def ev(x: int, s: int) -> Fraction:
        if x >= s:
            return ZERO
        s_eff = min(s, S)
        col = prefix_cache.get(s_eff)
        if col is None:
            col = [ZERO] * (width + 1)
            for w in range(width):
                col[w + 1] = col[w] + weight(w, s_eff)
            prefix_cache[s_eff] = col
        hi = min(s_eff, width - 1)
        return col[hi + 1] - col[x + 1]

    return cost_fn(
        "generated-monotone",
        S,
        ev,
        monotone_main=True,
        monotone_stage=True,
        proper=True,
    )


def same_final_pair(
    rng: random.Random, S: int, width: int = 48
) -> tuple[ApproximationTrace, ApproximationTrace, frozenset[int]]:
    final = frozenset(
        x for x in range(width) if rng.random() < 0.3
    )
    settle = max(4, S // 2)
    e = trace_with_final(rng, S, final, width, settle)
    f = trace_with_final(rng, S, final, width, settle)
    return e, f, final


def adversary_mix(rng: random.Random, count: int, width: int = 48) -> list[Adversary]:
    out: list[Adversary] = []
    for i in range(count):
        kind = rng.random()
        if kind < 0.6:
            out.append(copycat_adversary(width))
        else:
            members = frozenset(rng.sample(range(width), rng.randint(0, 4)))
            out.append(stubborn_adversary(members))
    return out


def halting_schedule(
    rng: random.Random, S: int, count: int
) -> tuple[EnumerationTrace, dict[int, int]]:
    """(halting-set trace, mock convergence stages) for the complete model."""
    ks = list(range(count))
    rng.shuffle(ks)
    stages = sorted(rng.sample(range(1, S + 1), 2 * count))
    entry_stages = stages[:count]
    phi_stages = stages[count:]
    events = sorted(
        ((s, k, 1) for s, k in zip(entry_stages, ks)), key=lambda ev: ev[0]
    )
    halting = EnumerationTrace(S, events)
    converging = {k: s for k, s in zip(rng.sample(ks, max(1, count // 2)), phi_stages)}
    return halting, converging


def dual_inputs(
    rng: random.Random, entrants: int, requirements: int, support: int = 24
):
    """(entrant order, scripted functionals, staircase cost functional)."""
    from .dual import TotalCostFunctional

    order = list(range(entrants))
    rng.shuffle(order)
    phis: list[PhiMock] = []
    for e in range(requirements):
        roll = rng.random()
        if roll < 0.5:
            phis.append(blank_phi(e))
        elif roll < 0.8:
            phis.append(scripted_phi(e, frozenset(rng.sample(range(200), 3))))
        else:
            phis.append(sensitive_phi(e, rng.randint(0, support)))
    jump_at = {x: rng.randint(1, 3 * (x + 1)) for x in range(support + 1)}

    def ev(bit, x: int, s: int):
        if x > support:
            return ZERO, 0
        if s >= jump_at[x]:
            return pow2(x + 2), 1
        return ZERO, 1

    c = TotalCostFunctional("staircase", ev, support_bound=support)
    return order, phis, c


def dual_inputs_scripted(
    rng: random.Random,
    entrants: int,
    requirements: int,
    S: int,
    support: int = 24,
    passes: int = 6,
):
    """Dual inputs whose functionals are scripted to chase activations.

    Starting from blank functionals, the run's auxiliary set is recorded and
    fed back as the next pass's scripts until the activation count stabilizes;
    the final scripts are honest fixed tables that happen to agree with the
    construction long enough to get diagonalized.
    """
    from .dual import dual_construct

    order, _phis, c = dual_inputs(rng, entrants, requirements, support)
    scripts: list[frozenset[int]] = [frozenset() for _ in range(requirements)]
    for _ in range(max(passes, requirements + 1)):
        phis = [scripted_phi(e, scripts[e]) for e in range(requirements)]
        st = dual_construct(c, order, phis, S)
        if not st.starved:
            break
        e_star = st.starved[0]
        updated = frozenset(st.f_trace.final_set())
        if scripts[e_star] == updated:
            break
        scripts[e_star] = updated
    phis = [scripted_phi(e, scripts[e]) for e in range(requirements)]
    return order, phis, c
