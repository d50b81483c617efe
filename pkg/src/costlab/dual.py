"""Oracle-relative cost functions and the dual construction.

A cost functional evaluates against an explicit oracle snapshot with a
recorded use; the dual engine enumerates a set D together with a wish ledger
so that the mock halting set's enumeration is cheap as measured relative
to D, while explicit requirements keep D from computing the auxiliary set F.
State is an event-sourced log enabling replay-based assertions.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .core import EnumerationTrace
from .util import ZERO, triple_pair

OracleBit = Callable[[int], int]


@dataclass(frozen=True)
class CostFunctional:
    """Oracle-relative cost function with recorded use and step counts.

    ``fn(bit, x, t)`` returns (value, use, steps) or None for divergence;
    the answer may depend only on oracle bits below the reported use.
    """

    name: str
    fn: Callable[[OracleBit, int, int], tuple[Fraction, int, int] | None]
    monotone_stage: bool = True


@dataclass(frozen=True)
class TotalCostFunctional:
    """Everywhere-convergent stage-limited form of a cost functional."""

    name: str
    eval_fn: Callable[[OracleBit, int, int], tuple[Fraction, int]]
    support_bound: int | None = None  # positions beyond this are priced 0

    def value(self, bit: OracleBit, x: int, s: int) -> Fraction:
        return self.eval_fn(bit, x, s)[0]

    def use(self, bit: OracleBit, x: int, s: int) -> int:
        return self.eval_fn(bit, x, s)[1]


def totalize(c: CostFunctional) -> TotalCostFunctional:
    """Stage-limited totalization: the value at the largest settled time.

    The stage-s value is the underlying value at the largest t <= s whose
    computation converges within s steps, and 0 when there is none; declared
    monotonicity is preserved.
    """

    def ev(bit: OracleBit, x: int, s: int) -> tuple[Fraction, int]:
        for t in range(s, -1, -1):
            out = c.fn(bit, x, t)
            if out is not None and out[2] <= s:
                return out[0], out[1]
        return ZERO, 0

    return TotalCostFunctional(f"{c.name}-totalized", ev)


def oracle_from_trace(d: EnumerationTrace, s: int) -> OracleBit:
    return lambda i: d.value(i, s)


def oracle_from_set(members: frozenset[int]) -> OracleBit:
    return lambda i: 1 if i in members else 0


def nondeficiency_stages(d: EnumerationTrace) -> frozenset[int]:
    """Stages whose enumeration is final below the entering element."""
    entries = [(s, x) for s, x, _v in d.events]
    out = set()
    for i, (s, x) in enumerate(entries):
        stage_entries = [xx for ss, xx in entries if ss == s]
        least = min(stage_entries)
        if all(xx >= least for ss, xx in entries if ss > s):
            out.add(s)
    return frozenset(out)


def hat_sup(c: TotalCostFunctional, d: EnumerationTrace, x: int) -> Fraction:
    """Supremum of restrained-oracle values over the nondeficiency stages.

    A stage contributes only when the recorded use stays below the least
    element entering at that stage (the hat-computation discipline).
    """
    best = ZERO
    entries_by_stage: dict[int, list[int]] = {}
    for s, xx, _v in d.events:
        entries_by_stage.setdefault(s, []).append(xx)
    for s in sorted(nondeficiency_stages(d)):
        value, use = c.eval_fn(oracle_from_trace(d, s), x, s)
        if use <= min(entries_by_stage[s]):
            best = max(best, value)
    return best


@dataclass
class Wish:
    """A request, with use u + 1, that the decoded value at x reach alpha."""

    x: int
    alpha: Fraction
    u: int
    born: int
    context_use: int  # the r of the pricing computation at birth
    removed: int | None = None
    holder: int | None = None


@dataclass(frozen=True)
class PhiMock:
    """Scripted oracle functional the dual construction diagonalizes against.

    ``rule(bit, y)`` returns (value, use); ``support(bit, upto)`` must return
    exactly the positions <= upto with value 1, so prefix agreement can be
    checked without scanning the whole prefix.
    """

    name: str
    rule: Callable[[OracleBit, int], tuple[int, int]]
    support: Callable[[OracleBit, int], frozenset[int]]


def blank_phi(e: int) -> PhiMock:
    return PhiMock(
        f"blank-{e}",
        lambda bit, y: (0, y + e + 1),
        lambda bit, upto: frozenset(),
    )


def scripted_phi(e: int, members: frozenset[int]) -> PhiMock:
    """Answers 1 exactly on a fixed set, independent of the oracle."""
    snap = frozenset(members)
    return PhiMock(
        f"scripted-{e}",
        lambda bit, y: (1 if y in snap else 0, y + e + 1),
        lambda bit, upto: frozenset(y for y in snap if y <= upto),
    )


def sensitive_phi(e: int, probe: int) -> PhiMock:
    """Answers 1 below its probe once the oracle is nonzero there."""

    def rule(bit: OracleBit, y: int) -> tuple[int, int]:
        return (1 if bit(probe) else 0, probe + 1)

    def support(bit: OracleBit, upto: int) -> frozenset[int]:
        if bit(probe):
            return frozenset(range(0, upto + 1))
        return frozenset()

    return PhiMock(f"sensitive-{e}-{probe}", rule, support)


@dataclass
class _Active:
    e: int
    v: int
    x: int
    stage: int


@dataclass(frozen=True)
class DualState:
    """Full event-sourced outcome of the dual construction."""

    horizon: int
    d_trace: EnumerationTrace
    f_trace: EnumerationTrace
    wishes: tuple[Wish, ...]
    visited_stages: tuple[int, ...]
    halting_entries: tuple[tuple[int, int], ...]  # (stage, element)
    activations: tuple[tuple[int, int, int, int], ...]  # (stage, e, v, x)
    cancellations: tuple[tuple[int, int, int, int], ...]  # (stage, e, v, entrant)
    held_history: tuple[tuple[int, int, Fraction], ...]  # (stage, e, held total)
    starved: tuple[int, ...]
    phi_names: tuple[str, ...]

    def d_entry_stages(self) -> list[tuple[int, int]]:
        return [(s, x) for s, x, _v in self.d_trace.events]


def gamma_eval(st: DualState, x: int, t: int) -> Fraction:
    """Decoded value at x with use bound t: the largest granted wish.

    The evaluation point is the least stage from which the enumerated set is
    final below t; wishes about x with use within t that are alive there
    contribute their alpha.
    """
    s_star = 0
    for s, xx in st.d_entry_stages():
        if xx < t:
            s_star = max(s_star, s)
    best = ZERO
    for w in st.wishes:
        if w.x == x and w.u <= t and w.born <= s_star:
            if w.removed is None or w.removed > s_star:
                best = max(best, w.alpha)
    return best


def halting_cost(st: DualState) -> Fraction:
    """Exact decoded-cost ledger of the mock halting set's enumeration."""
    return sum(
        (gamma_eval(st, n, s) for s, n in st.halting_entries), ZERO
    )


def dual_construct(
    c: TotalCostFunctional,
    zp: Sequence[int],
    phis: Sequence[PhiMock],
    S: int,
) -> DualState:
    """Stage loop of the dual construction with full wish ledgers.

    Each visited stage consumes one halting-set entrant, cancels overtaken
    requirements, removes stale unheld wishes by enumerating their removal
    keys, refreshes wishes to the current relative prices, and activates
    requirements whose diagonalization witness agrees with the auxiliary set;
    activation takeover is limited to weaker requirements so that each
    requirement's held total stays within its geometric budget.
    """
    E = len(phis)
    wishes: list[Wish] = []
    live_by_x: dict[int, list[Wish]] = {}
    d_members: set[int] = set()
    d_events: list[tuple[int, int, int]] = []
    f_members: set[int] = set()
    f_events: list[tuple[int, int, int]] = []
    halting: set[int] = set()
    halting_entries: list[tuple[int, int]] = []
    active: dict[int, _Active] = {}
    activations: list[tuple[int, int, int, int]] = []
    cancellations: list[tuple[int, int, int, int]] = []
    held_history: list[tuple[int, int, Fraction]] = []
    ever_activated: set[int] = set()
    visited: list[int] = []
    high_water = max([S and 0, E] + list(zp))

    def d_bit(i: int) -> int:
        return 1 if i in d_members else 0

    def held_total(e: int) -> Fraction:
        per_x: dict[int, Fraction] = {}
        for w in wishes:
            if w.holder == e and w.removed is None:
                per_x[w.x] = max(per_x.get(w.x, ZERO), w.alpha)
        return sum(per_x.values(), ZERO)

    def remove_wish(w: Wish, s: int) -> None:
        w.removed = s
        key = w.u - 1
        if key not in d_members:
            d_members.add(key)
            d_events.append((s, key, 1))
        live_by_x[w.x].remove(w)

    def halting_changed_below(born: int, s: int, x: int) -> bool:
        return any(
            born < stage <= s and n <= x for stage, n in halting_entries
        )

    stage = 1
    zp_idx = 0
    while stage <= S and zp_idx < len(zp):
        s = stage
        visited.append(s)
        n = zp[zp_idx]
        zp_idx += 1
        if n in halting:
            raise ValueError("halting-set entrants must be distinct")
        halting.add(n)
        halting_entries.append((s, n))
        high_water = max(high_water, s, n)

        # 1. cancel requirements whose guess was overtaken
        for e in sorted(active):
            rec = active[e]
            if rec.v > n:
                cancellations.append((s, e, rec.v, n))
                for w in wishes:
                    if w.holder == e and w.removed is None:
                        w.holder = None
                del active[e]

        # 2. remove stale unheld wishes
        for ws in [list(ws) for ws in live_by_x.values()]:
            for w in ws:
                if w.removed is None and w.holder is None:
                    if halting_changed_below(w.born, s, w.x):
                        remove_wish(w, s)

        # 3. add wishes at the current relative prices
        x_top = min(s, (c.support_bound + 1) if c.support_bound is not None else s)
        for x in range(x_top):
            alpha, use = c.eval_fn(d_bit, x, s)
            if alpha <= 0:
                continue
            current = live_by_x.get(x, [])
            if current and max(w.alpha for w in current) >= alpha:
                continue
            u = high_water + 2
            high_water = u
            w = Wish(x, alpha, u, s, use)
            wishes.append(w)
            live_by_x.setdefault(x, []).append(w)

        # 4. activate requirements
        for e in range(E):
            if e in active:
                continue
            floor = max(
                (rec.v for i, rec in active.items() if i < e), default=-1
            )
            chosen = None
            for v in range(e, n + 1):
                if v <= floor:
                    continue
                if c.value(d_bit, v, s) > Fraction(1, 2 * 3**e):
                    continue
                m = sum(1 for kk in halting if kk < v)
                x = triple_pair(e, v, m)
                if phis[e].support(d_bit, x) != frozenset(
                    y for y in f_members if y <= x
                ):
                    continue
                takeover = [
                    w
                    for ws in live_by_x.values()
                    for w in ws
                    if w.x >= v and (w.holder is None or w.holder > e)
                ]
                per_x: dict[int, Fraction] = {}
                for w in takeover:
                    per_x[w.x] = max(per_x.get(w.x, ZERO), w.alpha)
                if sum(per_x.values(), ZERO) > Fraction(1, 3**e):
                    continue
                chosen = (v, x, takeover)
                break
            if chosen is not None:
                v, x, takeover = chosen
                for w in takeover:
                    w.holder = e
                active[e] = _Active(e, v, x, s)
                ever_activated.add(e)
                activations.append((s, e, v, x))
                if x not in f_members:
                    f_members.add(x)
                    f_events.append((s, x, 1))
                high_water = max(high_water, x, v)

        for e in sorted(active):
            held_history.append((s, e, held_total(e)))

        stage = high_water + 1
        high_water = stage

    d_trace = EnumerationTrace(S, sorted(d_events, key=lambda ev: ev[0]))
    f_trace = EnumerationTrace(S, sorted(f_events, key=lambda ev: ev[0]))
    starved = tuple(e for e in range(E) if e not in ever_activated)
    return DualState(
        S,
        d_trace,
        f_trace,
        tuple(wishes),
        tuple(visited),
        tuple(halting_entries),
        tuple(activations),
        tuple(cancellations),
        tuple(held_history),
        starved,
        tuple(m.name for m in phis),
    )


@dataclass(frozen=True)
class DualAudit:
    held_ok: bool
    gamma_monotone: bool
    halting_total: Fraction
    halting_bound_ok: bool
    cancellations_justified: bool

    @property
    def ok(self) -> bool:
        return (
            self.held_ok
            and self.gamma_monotone
            and self.halting_bound_ok
            and self.cancellations_justified
        )


def audit_dual(st: DualState) -> DualAudit:
    """Replay-based verification of the dual construction's claims."""
    held_ok = all(
        total <= Fraction(1, 3**e) for _s, e, total in st.held_history
    )

    gamma_monotone = True
    for x in {w.x for w in st.wishes}:
        grid = sorted({w.u for w in st.wishes if w.x == x} | {st.horizon})
        prev = ZERO
        for t in grid:
            g = gamma_eval(st, x, t)
            if g < prev:
                gamma_monotone = False
            prev = g

    total = halting_cost(st)
    justified = all(n < v for _s, _e, v, n in st.cancellations)
    return DualAudit(
        held_ok, gamma_monotone, total, total <= Fraction(3, 2), justified
    )


def audit_diagonalization(st: DualState, phis: Sequence[PhiMock]) -> bool:
    """Every surviving activation disagrees with its functional at the horizon."""
    final_d = st.d_trace.final_set()

    def bit(i: int) -> int:
        return 1 if i in final_d else 0

    f_final = st.f_trace.final_set()
    ok = True
    for s, e, v, x in st.activations:
        later_cancel = any(
            cs >= s and ce == e and cv == v for cs, ce, cv, _n in st.cancellations
        )
        if later_cancel:
            continue
        value, _use = phis[e].rule(bit, x)
        if (x in f_final) == (value == 1):
            ok = False
    return ok
