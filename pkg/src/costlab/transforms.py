"""Look-ahead transformations between computable approximations.

Each transform is deterministic, preserves the final set (verified, not
assumed), and carries an exact ledger comparison documenting the cost bound
it promises.  Stage sequences are built by explicit bounded search; running
out of horizon is an error (StageSeqExhausted), never a silent truncation.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

from .catalog import LeftCEReal, additive_from_real
from .core import (
    ApproximationTrace,
    CostFn,
    EnumerationTrace,
    check_proper,
    cost_of_trace,
    require_same_final_set,
)
from .errors import CutoffNotFound, Mismatch, NoWitness, StageSeqExhausted
from .util import ZERO, cantor_pair, cantor_unpair, pow2


@dataclass(frozen=True)
class StageSeq:
    """Strictly increasing stage sequence together with its generating rule."""

    stages: tuple[int, ...]
    rule: str

    def __post_init__(self):
        if any(a >= b for a, b in zip(self.stages, self.stages[1:])):
            raise ValueError("stage sequences are strictly increasing")

    def block_of(self, x: int) -> int:
        """Index i with stages[i] <= x < stages[i+1]."""
        return bisect.bisect_right(self.stages, x) - 1

    def __len__(self) -> int:
        return len(self.stages)


@dataclass(frozen=True)
class IbTFunctional:
    """Mock Turing functional whose oracle use is bounded by the identity.

    ``rule(bit, x)`` may query the oracle only at positions <= x through the
    supplied lookup; querying beyond raises.  ``delay(x)`` is the stage at
    which the computation on input x converges (oracle-independent for these
    mocks).  ``window`` declares how far below x the rule actually looks,
    which lets transforms skip re-evaluations that cannot change.
    """

    name: str
    rule: Callable[[Callable[[int], int], int], int]
    delay: Callable[[int], int]
    window: int | None = None

    def at(self, oracle: ApproximationTrace, x: int, s: int) -> int | None:
        """Value of the computation at stage s against snapshot s, or None."""
        if s < self.delay(x):
            return None

        def bit(i: int) -> int:
            if i > x:
                raise ValueError(f"{self.name}: oracle query {i} above the use bound {x}")
            return oracle.value(i, s)

        return self.rule(bit, x)


def identity_functional() -> IbTFunctional:
    return IbTFunctional("identity", lambda bit, x: bit(x), lambda x: x + 1, window=0)


def constant_functional(value: int = 0) -> IbTFunctional:
    return IbTFunctional(f"constant-{value}", lambda bit, x: value, lambda x: 1, window=0)


@dataclass(frozen=True)
class LookAheadResult:
    """Output of a look-ahead transform plus its exact ledger comparison."""

    trace: ApproximationTrace
    stages: StageSeq
    output_total: Fraction
    bound: Fraction

    @property
    def ok(self) -> bool:
        return self.output_total <= self.bound


def trim(a: ApproximationTrace, c: CostFn, eps: Fraction) -> ApproximationTrace:
    """Same final set, total cost below eps, by pre-setting a low cutoff.

    Positions below the least sufficient cutoff are pinned to their final
    values from the start; raises CutoffNotFound (with the best residual)
    when no cutoff within the horizon achieves the bound.
    """
    if eps <= 0:
        raise ValueError("eps must be positive")
    if cost_of_trace(c, a).total < eps:
        return a
    final = a.final_set()
    candidates = sorted({x + 1 for _s, x, _v in a.events if x + 1 <= a.horizon})
    best_residual = None
    for x0 in candidates:
        events = [(s, x, v) for s, x, v in a.events if x >= x0]
        initial = frozenset(x for x in final if x < x0) | frozenset(
            x for x in a.initial if x >= x0
        )
        trimmed = ApproximationTrace(a.horizon, events, initial)
        total = cost_of_trace(c, trimmed).total
        if total < eps:
            return trimmed
        if best_residual is None or total < best_residual:
            best_residual = total
    raise CutoffNotFound(
        f"no cutoff within horizon {a.horizon} brings the total under {eps}",
        best_residual,
    )


def to_enumeration(a: ApproximationTrace, b: EnumerationTrace) -> EnumerationTrace:
    """Monotone approximation of the same set, never costlier under monotone costs.

    Position x is enumerated at the least stage from which the approximation
    and the witnessing enumeration agree with value 1; once 1, it stays.
    """
    final = require_same_final_set(a, b)
    if a.horizon != b.horizon:
        raise Mismatch("traces must share a horizon")
    events = []
    for x in sorted((set(a.positions()) | set(b.positions())) & final):
        # piece boundaries: stages where either value can change
        bounds = sorted(
            {1}
            | {s for s, y, _v in a.events if y == x}
            | {s for s, y, _v in b.events if y == x}
        )
        flip = None
        for p in bounds:
            t = next(
                (
                    t
                    for t in bounds + [a.horizon]
                    if t >= p and a.value(x, t) == b.value(x, t)
                ),
                None,
            )
            if t is not None and a.value(x, t) == 1:
                flip = p
                break
        if flip is None:
            raise Mismatch(f"position {x} never settles to its final value")
        events.append((flip, x, 1))
    events.sort(key=lambda e: e[0])
    return EnumerationTrace(a.horizon, events, a.initial & final)


def change_set(
    a: ApproximationTrace,
    pairing: Callable[[int, int], int] = cantor_pair,
) -> EnumerationTrace:
    """C.e. record of the approximation: the i-th change of x enters as pair(x, i)."""
    if a.initial:
        raise ValueError("change sets are defined for approximations starting empty")
    counts: dict[int, int] = {}
    events = []
    for s, x, _v in a.events:
        i = counts.get(x, 0)
        counts[x] = i + 1
        p = pairing(x, i)
        if p < x:
            raise ValueError("pairing must satisfy pair(x, i) >= x")
        events.append((s, p, 1))
    return EnumerationTrace(a.horizon, events)


def decode_change_set(
    cs: EnumerationTrace,
    unpair: Callable[[int], tuple[int, int]] = cantor_unpair,
) -> frozenset[int]:
    """Recover the approximated set from its change set at the horizon."""
    counts: dict[int, int] = {}
    for p in cs.final_set():
        x, _i = unpair(p)
        counts[x] = counts.get(x, 0) + 1
    return frozenset(x for x, n in counts.items() if n % 2 == 1)


def join(a: ApproximationTrace, b: ApproximationTrace) -> ApproximationTrace:
    """Trace of the effective join: evens from the first, odds from the second."""
    if a.horizon != b.horizon:
        raise Mismatch("traces must share a horizon")
    events = [(s, 2 * x, v) for s, x, v in a.events]
    events += [(s, 2 * x + 1, v) for s, x, v in b.events]
    events.sort(key=lambda e: e[0])
    initial = {2 * x for x in a.initial} | {2 * x + 1 for x in b.initial}
    return ApproximationTrace(a.horizon, events, initial)


def normalize_zero_before_diagonal(a: ApproximationTrace) -> ApproximationTrace:
    """Force value 0 at every (x, s) with s < x; cost-neutral for any cost function."""
    events = []
    initial = set()
    for x in sorted(a.positions()):
        stages = sorted({s for s, y, _v in a.events if y == x} | {max(x, 1)})
        prev = a.value(0, 0) if x == 0 else 0
        if x == 0 and prev == 1:
            initial.add(0)
        for s in stages:
            if s < x:
                continue
            v = a.value(x, s)
            if v != prev:
                events.append((s, x, v))
                prev = v
    events.sort(key=lambda e: e[0])
    return ApproximationTrace(a.horizon, events, initial)


def _blocks_to_trace(
    horizon: int,
    stages: Sequence[int],
    timelines: dict[int, list[tuple[int, int]]],
) -> ApproximationTrace:
    """Assemble a trace from per-position (block index, value) timelines.

    A change at block 0 lands in the initial snapshot; later blocks become
    events at the corresponding real stages.  Values persist between entries.
    """
    initial = set()
    events = []
    for x, history in timelines.items():
        prev = 0
        for k, v in history:
            if v == prev:
                continue
            if k == 0:
                initial.add(x)
            else:
                events.append((stages[k], x, v))
            prev = v
    events.sort(key=lambda e: e[0])
    return ApproximationTrace(horizon, events, initial)


def _check_final(out: ApproximationTrace, expected: frozenset[int], what: str) -> None:
    if out.final_set() != expected:
        raise Mismatch(f"{what} does not preserve the final set at this horizon")


def ibT_transfer(
    g: IbTFunctional,
    b: ApproximationTrace,
    c: CostFn,
    *,
    x_bound: int | None = None,
) -> LookAheadResult:
    """Approximation of the functional's output, never costlier than the oracle's.

    Stage sequence: s(i+1) is the least stage at which the functional has
    converged on every input below s(i).  Block values are the look-ahead
    evaluations two blocks ahead; positions outside the declared sensitivity
    window of any oracle event are evaluated once.
    """
    stages = [0]
    max_delay = 0
    scanned = 0
    while stages[-1] < b.horizon:
        top = stages[-1]
        while scanned < min(top, b.horizon):
            d = g.delay(scanned)
            if d > max_delay:
                max_delay = d
            scanned += 1
        nxt = max(stages[-1] + 1, max_delay)
        if nxt > b.horizon:
            break
        stages.append(nxt)
    if len(stages) < 4:
        raise StageSeqExhausted("functional convergence stages outran the horizon")
    seq = StageSeq(tuple(stages), "functional-convergence")
    K = len(stages) - 1

    if x_bound is None:
        width = g.window if g.window is not None else 0
        x_bound = max([x + width + 1 for x in b.positions()] or [1])
    x_bound = min(x_bound, stages[K - 2])

    width = g.window
    event_stages_by_pos: dict[int, list[int]] = {}
    for s, y, _v in b.events:
        event_stages_by_pos.setdefault(y, []).append(s)

    timelines: dict[int, list[tuple[int, int]]] = {}
    for x in range(x_bound):
        i = seq.block_of(x)
        if i + 2 > K:
            continue
        relevant: set[int] = set()
        if width is None:
            for y, ss in event_stages_by_pos.items():
                if y <= x:
                    relevant.update(ss)
        else:
            for y in range(max(0, x - width), x + 1):
                relevant.update(event_stages_by_pos.get(y, ()))
        ks = {i}
        for t in relevant:
            pos = bisect.bisect_left(stages, t)
            k = pos - 2
            if i < k <= K - 2:
                ks.add(k)
        history = []
        for k in sorted(ks):
            v = g.at(b, x, stages[k + 2])
            if v is None:
                raise StageSeqExhausted(f"functional diverges on input {x}")
            history.append((0 if k == i else k, v))
        timelines[x] = history

    out = _blocks_to_trace(b.horizon, stages, timelines)
    expected = frozenset(
        x for x in range(x_bound) if g.at(b, x, b.horizon) == 1
    )
    _check_final(out, expected, "functional transfer")
    bound = cost_of_trace(c, b).total
    total = cost_of_trace(c, out).total
    return LookAheadResult(out, seq, total, bound)


def conjoin(
    e: ApproximationTrace,
    f: ApproximationTrace,
    c: CostFn,
    d: CostFn,
) -> LookAheadResult:
    """Single approximation obeying the sum of two costs, up to additive slack 4.

    Inputs are normalized to be zero above the diagonal (a cost-neutral
    pre-pass), then merged along the agreement stage sequence with the
    two-case block value rule.
    """
    final = require_same_final_set(e, f)
    if e.horizon != f.horizon:
        raise Mismatch("traces must share a horizon")
    e = normalize_zero_before_diagonal(e)
    f = normalize_zero_before_diagonal(f)

    diff: set[int] = set()
    e_by_stage = e.change_stages()
    f_by_stage = f.change_stages()
    stages = [0]
    for s in range(1, e.horizon + 1):
        for x in e_by_stage.get(s, ()):
            diff.symmetric_difference_update({x})
        for x in f_by_stage.get(s, ()):
            diff.symmetric_difference_update({x})
        if not diff or min(diff) >= stages[-1]:
            stages.append(s)
    if len(stages) < 3:
        raise StageSeqExhausted("agreement stages outran the horizon")
    seq = StageSeq(tuple(stages), "agreement")
    K = len(stages) - 1

    e_events_by_pos: dict[int, list[int]] = {}
    for s, y, _v in e.events:
        e_events_by_pos.setdefault(y, []).append(s)

    timelines: dict[int, list[tuple[int, int]]] = {}
    for x in sorted(e.positions() | f.positions()):
        i = seq.block_of(x)
        j = None
        for cand in range(i, K):
            if e.value(x, stages[cand + 1]) == f.value(x, stages[cand + 1]):
                j = cand
                break
        if j is None:
            raise StageSeqExhausted(f"no agreement on position {x} within the horizon")
        v = e.value(x, stages[j + 1])
        history = [(0 if i == 0 else i, v)]
        ks = set()
        for t in e_events_by_pos.get(x, ()):
            pos = bisect.bisect_left(stages, t)
            k = pos - 1
            if j < k <= K - 1:
                ks.add(k)
        for k in sorted(ks):
            history.append((k, e.value(x, stages[k + 1])))
        timelines[x] = history

    out = _blocks_to_trace(e.horizon, stages, timelines)
    _check_final(out, final, "conjunction")
    combined = cost_of_trace(c, out).total + cost_of_trace(d, out).total
    bound = Fraction(4) + cost_of_trace(c, e).total + cost_of_trace(d, f).total
    return LookAheadResult(out, seq, combined, bound)


def implication_transfer(
    a: ApproximationTrace,
    c: CostFn,
    d: CostFn,
    N: int,
) -> LookAheadResult:
    """Re-approximate along stages where N*c dominates d, transferring obedience.

    Stage sequence: s(i+1) is the least stage s > s(i) with
    N*c(x, s) > d(x, s) for every x < s(i); raises StageSeqExhausted when the
    domination premise is unwitnessed at this horizon.
    """
    if N < 1:
        raise ValueError("N must be at least 1")
    grid = _grid_pair(c, d, N)
    stages = [0]
    s = 0
    while s < a.horizon:
        top = stages[-1]
        nxt = None
        for cand in range(top + 1, a.horizon + 1):
            if grid is not None:
                ok = bool(grid[cand][:top].all()) if top else True
            else:
                ok = all(N * c(x, cand) > d(x, cand) for x in range(top))
            if ok:
                nxt = cand
                break
        if nxt is None:
            break
        stages.append(nxt)
        s = nxt
    if len(stages) < 4:
        raise StageSeqExhausted(
            "domination stages outran the horizon; the premise is unwitnessed"
        )
    seq = StageSeq(tuple(stages), "domination")
    K = len(stages) - 1

    a_events_by_pos: dict[int, list[int]] = {}
    for s_ev, y, _v in a.events:
        a_events_by_pos.setdefault(y, []).append(s_ev)

    timelines: dict[int, list[tuple[int, int]]] = {}
    for x in sorted(a.positions()):
        i = seq.block_of(x)
        if i + 2 > K:
            continue
        history = [(0, a.value(x, stages[i + 2]))]
        ks = set()
        for t in a_events_by_pos.get(x, ()):
            pos = bisect.bisect_left(stages, t)
            k = pos - 1
            if i + 1 <= k <= K - 1:
                ks.add(k)
        for k in sorted(ks):
            history.append((k, a.value(x, stages[k + 1])))
        timelines[x] = history

    out = _blocks_to_trace(a.horizon, stages, timelines)
    _check_final(out, a.final_set(), "implication transfer")
    total = cost_of_trace(d, out).total
    bound = N * cost_of_trace(c, a).total
    return LookAheadResult(out, seq, total, bound)


def _grid_pair(c: CostFn, d: CostFn, N: int):
    """Columnwise boolean table N*c(x, s) > d(x, s) when both carry integer grids."""
    gc = getattr(c, "grid", None)
    gd = getattr(d, "grid", None)
    if gc is None or gd is None:
        return None
    (mc, sc), (md, sd) = gc, gd
    if sc != sd or mc.shape != md.shape:
        return None
    return (N * mc > md).T  # indexed [s][x]


@dataclass(frozen=True)
class OmegaCeBound:
    """Computable change-count bounds extracted from a proper cost function."""

    bounds: dict[int, int]
    first_positive: dict[int, int]
    normalized_counts: dict[int, int]
    violations: tuple[int, ...]

    def bound(self, x: int) -> int:
        return self.bounds[x]

    @property
    def ok(self) -> bool:
        return not self.violations


def omega_ce_bound(a: ApproximationTrace, c: CostFn, X: int) -> OmegaCeBound:
    """bound(x) = ceil(total / c(x, g(x))) where g(x) is the first positive stage.

    The normalized trace ignores changes before g(x); its recorded change
    counts must respect the bound for monotone c.
    """
    if not c.props.monotone:
        raise ValueError("the change-count bound needs a monotone cost function")
    witnesses = check_proper(c, X)
    if not witnesses.all_witnessed:
        missing = [x for x, t in witnesses.witnesses.items() if t is None]
        raise NoWitness(f"properness unwitnessed at horizon for {missing}")
    total = cost_of_trace(c, a).total
    bounds: dict[int, int] = {}
    counts: dict[int, int] = {}
    bad = []
    for x in range(X + 1):
        g = witnesses.witnesses[x]
        v = c(x, g)
        bounds[x] = int(-(-total // v)) if total > 0 else 0
        counts[x] = sum(1 for s, y, _v in a.events if y == x and s > g)
        if counts[x] > bounds[x]:
            bad.append(x)
    return OmegaCeBound(bounds, dict(witnesses.witnesses), counts, tuple(bad))


@dataclass(frozen=True)
class SameRealResult:
    """Transfer of obedience between two approximations of one real."""

    trace: ApproximationTrace
    stages: StageSeq
    f: dict[int, int]
    exceptions: frozenset[int] | None
    output_total: Fraction
    bound: Fraction

    @property
    def ok(self) -> bool:
        return self.output_total <= self.bound


def same_real_transfer(
    a: LeftCEReal,
    b: LeftCEReal,
    ta: ApproximationTrace,
) -> SameRealResult:
    """Move a trace obeying one approximation's cost to the other approximation.

    Builds the synchronizing stage sequence |a(s_i) - b(s_i)| <= 2^-i, the
    strictly increasing displacement f with a(x) <= b(f(x)), and the output
    trace; for enumerations also the computable exception set R with
    output = f(input - R).
    """
    horizon = min(a.horizon, b.horizon, ta.horizon)
    stages: list[int] = []
    i = 0
    s = 0
    while True:
        tol = Fraction(1) if i == 0 else pow2(i)
        found = next(
            (cand for cand in range(s, horizon + 1) if abs(a.at(cand) - b.at(cand)) <= tol),
            None,
        )
        if found is None:
            break
        stages.append(found)
        s = found + 1
        i += 1
    if len(stages) < 2:
        raise StageSeqExhausted("synchronizing stages outran the horizon")
    seq = StageSeq(tuple(stages), "real-synchronization")

    f: dict[int, int] = {}
    prev = -1
    for x in sorted(ta.positions() | {0}):
        t = next((t for t in range(horizon + 1) if b.at(t) >= a.at(x)), None)
        if t is None:
            raise StageSeqExhausted(f"f({x}) is unwitnessed at the horizon")
        f[x] = max(t, prev + 1)
        prev = f[x]

    if ta.is_enumeration and not ta.initial:
        events = []
        exceptions = set()
        for s_ev, x, _v in ta.events:
            idx = bisect.bisect_right(stages, s_ev) - 1
            if idx < 0 or f[x] > stages[idx]:
                exceptions.add(x)
                continue
            events.append((max(stages[idx], 1), f[x], 1))
        events.sort(key=lambda e: e[0])
        out: ApproximationTrace = EnumerationTrace(horizon, events)
        expected = frozenset(
            f[x] for x in ta.final_set() if x not in exceptions
        )
        _check_final(out, expected, "same-real transfer")
        exc: frozenset[int] | None = frozenset(exceptions)
    else:
        timelines: dict[int, list[tuple[int, int]]] = {}
        for x in sorted(ta.positions()):
            t = next((si for si in stages if si >= f[x]), None)
            if t is None:
                raise StageSeqExhausted(f"no synchronizing stage above f({x})")
            history = [(0, ta.value(x, t))]
            for k, si in enumerate(stages):
                if si >= t and k > 0:
                    history.append((k, ta.value(x, si)))
            timelines[f[x]] = history
        out = _blocks_to_trace(horizon, stages, timelines)
        exc = None

    cost_b = additive_from_real(LeftCEReal(b.seq[: horizon + 1], b.cap))
    cost_a = additive_from_real(LeftCEReal(a.seq[: horizon + 1], a.cap))
    total = cost_of_trace(cost_b, out).total
    bound = cost_of_trace(cost_a, ta).total + 2
    return SameRealResult(out, seq, f, exc, total, bound)


def decide_from_cost(
    c: CostFn, a: ApproximationTrace, S_total: Fraction, x: int
) -> int:
    """Final value of position x, decided from a computable total cost.

    Finds a stage t with positive cost at x and residual total below it;
    from then on the position cannot change.
    """
    ledger = cost_of_trace(c, a)
    if ledger.total != S_total:
        raise ValueError("S_total must be the exact ledger total of the trace")
    partial = ZERO
    charges = {s: amt for s, _x, amt in ledger.charges}
    for t in range(1, a.horizon + 1):
        partial += charges.get(t, ZERO)
        delta = c(x, t)
        if delta > 0 and S_total - partial < delta:
            return a.value(x, t)
    raise NoWitness(f"no decisive stage for position {x} at this horizon")
