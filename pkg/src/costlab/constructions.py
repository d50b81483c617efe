"""From-scratch construction engines.

Every engine is a deterministic stage loop over explicit finite mock inputs
(universes, adversary approximations, halting-set schedules) and returns its
full event log next to exact requirement ledgers, so each claimed bound can
be replayed and audited.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .catalog import LeftCEReal, additive_from_real, cost_from_approx, cost_k, cost_max
from .core import (
    ApproximationTrace,
    CostFn,
    EnumerationTrace,
    cost_of_trace,
    limit_estimate,
)
from .errors import (
    BudgetExceeded,
    NotErasing,
    NoWitness,
    ScheduleInsufficient,
    WeightOverflow,
)
from .machine import KProvider, RequestSet, kc_add, register_requests
from .util import ZERO, Fenwick, bits_to_nat, drop_trailing_zeros, pow2


@dataclass(frozen=True)
class Universe:
    """Explicit finite stand-in for an effective listing of c.e. sets."""

    sets: tuple[EnumerationTrace, ...]

    @property
    def size(self) -> int:
        return len(self.sets)


@dataclass
class RequirementRecord:
    index: int
    met: bool = False
    witness: tuple[int, int] | None = None  # (stage, element)
    init_count: int = 0
    init_stage: int = 0
    alpha: Fraction = ZERO
    alpha_epochs: list[Fraction] = field(default_factory=list)
    had_candidate: bool = False


@dataclass(frozen=True)
class RequirementLedger:
    records: tuple[RequirementRecord, ...]

    def met_fraction_of_candidates(self) -> Fraction:
        with_candidates = [r for r in self.records if r.had_candidate]
        if not with_candidates:
            return Fraction(1)
        return Fraction(sum(1 for r in with_candidates if r.met), len(with_candidates))


def _run_simplicity(
    c: CostFn,
    u: Universe,
    S: int,
    prompt: bool,
) -> tuple[EnumerationTrace, RequirementLedger]:
    records = [RequirementRecord(e) for e in range(u.size)]
    arrivals: list[list[tuple[int, int]]] = []  # per e: (stage, x) sorted by stage
    for w in u.sets:
        arrivals.append(sorted((s, x) for s, x, _v in w.events))
    pointers = [0] * u.size
    candidates: list[list[int]] = [[] for _ in range(u.size)]
    events = []
    in_a: set[int] = set()
    threshold = [pow2(e) for e in range(u.size)]

    for s in range(1, S + 1):
        for e in range(min(u.size, s)):
            rec = records[e]
            arr = arrivals[e]
            fresh = []
            while pointers[e] < len(arr) and arr[pointers[e]][0] <= s:
                stage_in, x = arr[pointers[e]]
                pointers[e] += 1
                if x >= 2 * e and (not prompt or stage_in == s):
                    fresh.append(x)
            if rec.met:
                continue
            if prompt:
                pool = sorted(fresh)
            elif c.props.monotone_stage:
                # failed candidates stay failed under a stage-monotone cost,
                # so only fresh arrivals and past survivors need testing
                pool = sorted(candidates[e] + fresh)
            else:
                candidates[e].extend(fresh)
                pool = sorted(candidates[e])
            chosen = None
            survivors = []
            for x in pool:
                if c(x, s) <= threshold[e]:
                    chosen = x
                    rec.had_candidate = True
                    break
                survivors.append(x)
            if not prompt and c.props.monotone_stage:
                candidates[e] = [] if chosen is not None else survivors
            if chosen is not None:
                rec.met = True
                rec.witness = (s, chosen)
                if chosen not in in_a:
                    in_a.add(chosen)
                    events.append((s, chosen, 1))
    # a starved requirement may still have had a qualifying pair at some stage
    for e, rec in enumerate(records):
        if not rec.met and not rec.had_candidate:
            for stage_in, x in arrivals[e]:
                if x >= 2 * e and c(x, stage_in) <= threshold[e]:
                    rec.had_candidate = True
                    break
    trace = EnumerationTrace(S, events)
    return trace, RequirementLedger(tuple(records))


def build_simple(
    c: CostFn, u: Universe, S: int
) -> tuple[EnumerationTrace, RequirementLedger]:
    """Meet the simplicity requirements under the cost restraint.

    At each stage, every still-unmet requirement e < s takes the least
    element x >= 2e of its set whose current cost is within 2^-e.  At most
    one element enters per requirement, so the total cost stays below 2.
    """
    return _run_simplicity(c, u, S, prompt=False)


def build_prompt_simple(
    c: CostFn, u: Universe, S: int
) -> tuple[EnumerationTrace, RequirementLedger]:
    """Prompt variant: elements qualify only at their appearance stage."""
    if not c.props.monotone_stage:
        raise ValueError("prompt simplicity needs a stage-monotone cost function")
    return _run_simplicity(c, u, S, prompt=True)


@dataclass(frozen=True)
class IntervalLedger:
    j0: int
    J: int
    per_interval: dict[int, Fraction]
    total: Fraction


def slow_enum_N(p: KProvider, J: int) -> tuple[EnumerationTrace, IntervalLedger]:
    """Enumerate the naturals in order, but so slowly that the cost diverges.

    Elements of the dyadic interval ending at 2^j wait until the provider's
    shortcut description of 2^j is in place, so each such enumeration is
    charged at least the shortcut weight; the per-interval ledger certifies
    a cost of at least 1 per delayed interval.
    """
    cfg = p.config
    if cfg is None:
        raise ScheduleInsufficient("provider has no baseline schedule configuration")
    if J < 1:
        raise ValueError("at least one interval is needed")
    j0 = None
    for j in range(1, J + 1):
        ok = True
        for jj in range(j, J + 1):
            kv = p.k(1 << jj, cfg.delay(jj))
            if kv is None or kv > jj - 1:
                ok = False
                break
        if ok:
            j0 = j
            break
    if j0 is None:
        raise ScheduleInsufficient(
            f"no interval up to {J} has its power-of-two shortcut in time"
        )
    top_stage = cfg.delay(J) + (1 << (J - 1))
    if top_stage > p.horizon:
        raise ScheduleInsufficient(
            f"horizon {p.horizon} cannot cover the delayed schedule ({top_stage})"
        )

    events = []
    for x in range(0, (1 << (j0 - 1)) + 1):
        events.append((x + 1, x, 1))
    for j in range(j0, J + 1):
        base = 1 << (j - 1)
        for offset, x in enumerate(range(base + 1, (1 << j) + 1)):
            events.append((cfg.delay(j) + 1 + offset, x, 1))
    events.sort(key=lambda e: e[0])
    trace = EnumerationTrace(p.horizon, events)

    ledger = cost_of_trace(cost_k(p), trace)
    per: dict[int, Fraction] = {j: ZERO for j in range(j0, J + 1)}
    for _s, x, amount in ledger.charges:
        if x > (1 << (j0 - 1)):
            j = max(x - 1, 1).bit_length()
            if j in per:
                per[j] += amount
    return trace, IntervalLedger(j0, J, per, sum(per.values(), ZERO))


def infinite_ce_divergence(
    f: Sequence[int], R: int, p: KProvider, d: int = 1
) -> tuple[RequestSet, list[Fraction]]:
    """Requests witnessing that limit costs summed over an infinite set diverge.

    For each r the request targets the largest value of f below index 2^(r+1),
    with length r + 1 (shifted by one so the raw schedule meets the unit
    budget).  The partial sums of limit costs over the enumerated range,
    taken against the provider extended by this set, grow with R.
    """
    needed = (1 << (R + 1)) + 1
    if len(f) < needed:
        raise ValueError(f"function table must cover indices up to {needed - 1}")
    if len(set(f[:needed])) != needed:
        raise ValueError("function table must be injective")
    rs = RequestSet()
    for r in range(R + 1):
        y = max(f[i] for i in range(0, (1 << (r + 1)) + 1))
        rs = kc_add(rs, r + 1, y, r + 1)
    extended = register_requests(p, rs, d)
    ck = cost_k(extended)
    sums = []
    for r in range(R + 1):
        members = sorted(set(f[i] for i in range(0, (1 << (r + 1)) + 1)))
        sums.append(sum((limit_estimate(ck, x) for x in members), ZERO))
    return rs, sums


class Adversary:
    """Scripted computable approximation competing against the diagonalization.

    ``step`` is called once per stage with read access to the current
    approximation and must return the adversary's stage-s finite set.
    """

    def __init__(
        self, name: str, step: Callable[[int, Callable[[int], int]], frozenset[int]]
    ):
        self.name = name
        self.step = step


def copycat_adversary(width: int = 64) -> Adversary:
    """Tracks the construction's approximation below a fixed width."""

    def step(s: int, value: Callable[[int], int]) -> frozenset[int]:
        return frozenset(x for x in range(width) if value(x) == 1)

    return Adversary(f"copycat-{width}", step)


def stubborn_adversary(members: frozenset[int] = frozenset()) -> Adversary:
    snapshot = frozenset(members)

    def step(s: int, value: Callable[[int], int]) -> frozenset[int]:
        return snapshot

    return Adversary("stubborn", step)


@dataclass(frozen=True)
class DiagonalizationResult:
    trace: ApproximationTrace
    ledger: RequirementLedger
    total: Fraction
    adversary_traces: tuple[ApproximationTrace, ...]
    adversary_totals: tuple[Fraction, ...]  # d-ledgers of the adversaries


def diagonalize_nonimplication(
    c: CostFn,
    d: CostFn,
    phis: Sequence[Adversary],
    S: int,
) -> DiagonalizationResult:
    """Build an approximation obeying c that defeats each tracking adversary under d.

    Requirement e acts at its expansionary stages, flipping the least cheap
    position where d towers over c by the factor 2^(b+e); the erasing flips
    force any adversary that keeps agreeing with the approximation to spend
    d-cost above 1.
    """
    E = len(phis)
    records = [RequirementRecord(e) for e in range(E)]
    last_exp = [0] * E
    exp_snapshot: list[frozenset[int]] = [frozenset()] * E
    seen_agreement = [False] * E
    produced: list[list[frozenset[int]]] = [[] for _ in range(E)]

    values: dict[int, int] = {}
    ones: set[int] = set()
    events: list[tuple[int, int, int]] = []

    def value(x: int) -> int:
        return values.get(x, 0)

    acted = False
    for s in range(1, S + 1):
        for i, adv in enumerate(phis):
            produced[i].append(adv.step(s, value))

        chosen_e = None
        for e in range(min(E, s)):
            rec = records[e]
            if rec.alpha > pow2(rec.init_count + e):
                continue
            if s == rec.init_stage or seen_agreement[e]:
                chosen_e = e
                break
        if chosen_e is not None:
            e = chosen_e
            rec = records[e]
            b = rec.init_count
            bound = pow2(b + e)
            x_found = None
            cv_found = None
            for x in range(rec.init_stage, s):
                cv = c(x, s)
                if cv < bound and (1 << (b + e)) * cv < d(x, s):
                    x_found = x
                    cv_found = cv
                    break
            if x_found is not None:
                acted = True
                flip = 1 - value(x_found)
                values[x_found] = flip
                (ones.add if flip else ones.discard)(x_found)
                events.append((s, x_found, flip))
                for y in sorted(yy for yy in ones if x_found < yy < s):
                    values[y] = 0
                    ones.discard(y)
                    events.append((s, y, 0))
                rec.alpha += cv_found
                if rec.alpha > bound and not rec.met:
                    rec.met = True
                    rec.witness = (s, x_found)
                rec.had_candidate = True
                last_exp[e] = s
                exp_snapshot[e] = frozenset(x for x in ones if x < s)
                seen_agreement[e] = False
                for i in range(e + 1, E):
                    records[i].alpha_epochs.append(records[i].alpha)
                    records[i].alpha = ZERO
                    records[i].init_count += 1
                    records[i].init_stage = s
                    records[i].met = False
                    last_exp[i] = s
                    exp_snapshot[i] = frozenset(x for x in ones if x < s)
                    seen_agreement[i] = False

        # agreement witnessed by this stage's adversary sets counts from the
        # next stage on (the t < s convention)
        for i in range(E):
            u = last_exp[i]
            if frozenset(x for x in produced[i][s - 1] if x < u) == exp_snapshot[i]:
                seen_agreement[i] = True

    if not acted and E > 0:
        witnessed = any(
            c(x, s) < 1 and c(x, s) < d(x, s)
            for s in range(1, S + 1)
            for x in range(0, s)
        )
        if not witnessed:
            raise NoWitness(
                "the domination-failure premise has no witness on this grid"
            )

    trace = ApproximationTrace(S, events)
    for rec in records:
        rec.alpha_epochs.append(rec.alpha)
    adv_traces = []
    adv_totals = []
    for i in range(E):
        ev = []
        prev: frozenset[int] = frozenset()
        for t, members in enumerate(produced[i], start=1):
            for x in sorted(members - prev):
                ev.append((t, x, 1))
            for x in sorted(prev - members):
                ev.append((t, x, 0))
            prev = members
        at = ApproximationTrace(S, ev)
        adv_traces.append(at)
        adv_totals.append(cost_of_trace(d, at).total)
    return DiagonalizationResult(
        trace,
        RequirementLedger(tuple(records)),
        cost_of_trace(c, trace).total,
        tuple(adv_traces),
        tuple(adv_totals),
    )


@dataclass(frozen=True)
class CompleteModelResult:
    beta: LeftCEReal
    trace: EnumerationTrace
    marker_log: tuple[tuple[int, int, int, int], ...]  # (stage, k, old, new)
    invariant_violations: tuple[tuple[int, int], ...]  # (stage, k)
    decoded: dict[int, int]
    halting_final: frozenset[int]
    total: Fraction
    requirement_actions: tuple[tuple[int, int], ...]  # (stage, k)


def build_complete_model(
    halting: EnumerationTrace,
    phis: dict[int, int],
    S: int,
) -> CompleteModelResult:
    """Movable-marker coding of a mock halting set into a cheap enumeration.

    Diagonalization bumps the real by 2^-k when the k-th mock computation
    converges (taking effect at the next stage), moving all weaker markers to
    fresh positions; the stage invariant keeps every marker enumeration
    affordable, for a total cost of at most 4, and the axiom log decodes the
    halting set exactly.
    """
    if halting.horizon > S:
        raise ValueError("halting-set horizon exceeds the run horizon")
    by_stage: dict[int, int] = {}
    for s, kk, _v in halting.events:
        if s in by_stage:
            raise ValueError("the mock halting set must enter one element per stage")
        by_stage[s] = kk
    phi_by_stage: dict[int, int] = {}
    for kk, s in phis.items():
        if s in phi_by_stage:
            raise ValueError("at most one mock computation may converge per stage")
        phi_by_stage[s] = kk

    K_max = max([kk for kk in phis] + [kk for _s, kk, _v in halting.events] + [0])
    markers = {kk: kk for kk in range(K_max + 1)}
    high_water = K_max
    beta_steps = [ZERO]
    pending_bump = ZERO
    in_a: set[int] = set()
    events: list[tuple[int, int, int]] = []
    marker_log: list[tuple[int, int, int, int]] = []
    actions: list[tuple[int, int]] = []
    axiom_log: list[tuple[int, int, frozenset[int], int]] = []  # (k, use, snap, value)
    live_axiom: dict[int, tuple[int, int] | None] = {kk: None for kk in range(K_max + 1)}
    halting_so_far: set[int] = set()
    violations: list[tuple[int, int]] = []

    def enumerate_element(x: int, s: int) -> None:
        if x in in_a:
            return
        in_a.add(x)
        events.append((s, x, 1))
        for kk, ax in live_axiom.items():
            if ax is not None and x < ax[0]:
                live_axiom[kk] = None

    for s in range(1, S + 1):
        beta_steps.append(beta_steps[-1] + pending_bump)
        pending_bump = ZERO

        k_conv = phi_by_stage.get(s)
        if k_conv is not None and k_conv <= K_max:
            enumerate_element(markers[k_conv], s)
            actions.append((s, k_conv))
            pending_bump = pow2(k_conv)  # takes effect at the next stage
            high_water = max(high_water, s, *markers.values())
            for i in range(k_conv, K_max + 1):
                high_water += 1
                marker_log.append((s, i, markers[i], high_water))
                markers[i] = high_water

        n = by_stage.get(s)
        if n is not None:
            halting_so_far.add(n)
            if n <= K_max:
                enumerate_element(markers[n], s)

        for kk in range(K_max + 1):
            if live_axiom[kk] is None:
                use = markers[kk] + 1
                val = 1 if kk in halting_so_far else 0
                axiom_log.append(
                    (kk, use, frozenset(x for x in in_a if x < use), val)
                )
                live_axiom[kk] = (use, val)

        for kk in range(K_max + 1):
            anchor = min(markers[kk], s)
            if beta_steps[s] - beta_steps[anchor] > pow2(kk):
                violations.append((s, kk))

    beta = LeftCEReal(tuple(beta_steps), cap=beta_steps[-1] + 1)
    trace = EnumerationTrace(S, sorted(events, key=lambda e: e[0]))
    total = cost_of_trace(additive_from_real(beta), trace).total

    decoded: dict[int, int] = {}
    final = frozenset(in_a)
    for kk in range(K_max + 1):
        applicable = {
            v
            for ax_k, ax_use, ax_snap, v in axiom_log
            if ax_k == kk and ax_snap == frozenset(x for x in final if x < ax_use)
        }
        if len(applicable) != 1:
            violations.append((S, kk))
        decoded[kk] = max(applicable) if applicable else 0
    return CompleteModelResult(
        beta,
        trace,
        tuple(marker_log),
        tuple(violations),
        decoded,
        frozenset(halting_so_far),
        total,
        tuple(actions),
    )


@dataclass(frozen=True)
class SjtReport:
    cost_total: Fraction
    weight: Fraction
    e0: int | None
    s0: int | None
    checked: tuple[int, ...]
    violations: tuple[int, ...]


def sjt_reduction(
    y: ApproximationTrace,
    h: Callable[[int], int],
    a: ApproximationTrace,
    u: int,
    d: int,
) -> tuple[RequestSet, SjtReport]:
    """Request-set builder for the identity-use reduction to a changing oracle.

    Each change of the approximation buys a description of the oracle's
    current prefix up to the least recently-changed oracle position; the
    budget precondition keeps the request set bounded.
    """
    if u < 0 or d < 0:
        raise ValueError("budget exponent and coding constant are naturals")
    cfn = cost_from_approx(y, h)
    ledger = cost_of_trace(cfn, a)
    if ledger.total > (1 << u):
        raise BudgetExceeded(
            f"trace cost {ledger.total} exceeds the declared budget 2^{u}"
        )
    y_changes: dict[int, list[int]] = {}
    for s, e, _v in y.events:
        y_changes.setdefault(e, []).append(s)

    rs = RequestSet()
    for s, x, _v in a.events:
        e_found = x
        for e in range(0, x):
            if any(x <= t < s for t in y_changes.get(e, ())):
                e_found = e
                break
        prefix = "".join(str(y.value(i, s)) for i in range(e_found))
        rs = kc_add(rs, u + h(e_found), bits_to_nat(prefix), s)

    e0 = next((e for e in range(y.horizon + 1) if h(e) > u + d), None)
    s0 = None
    if e0 is not None:
        s0 = 1
        for s, e, _v in y.events:
            if e < e0:
                s0 = max(s0, s)
    checked = []
    violations = []
    if s0 is not None:
        final_bits = [y.value(i, y.horizon) for i in range(y.horizon + 1)]
        for x in range(s0, min(a.horizon, y.horizon) + 1):
            t = next(
                (
                    t
                    for t in range(1, y.horizon + 1)
                    if all(y.value(i, t) == final_bits[i] for i in range(x))
                ),
                None,
            )
            if t is None:
                continue
            checked.append(x)
            if a.value(x, t) != a.value(x, a.horizon):
                violations.append(x)
    return rs, SjtReport(
        ledger.total, rs.weight, e0, s0, tuple(checked), tuple(violations)
    )


@dataclass(frozen=True)
class WeakTrivialityReport:
    weight: Fraction
    drop_requests: int
    change_requests: int
    cmax_total: Fraction
    omega_weight: Fraction


def weak_ktrivial_requests(
    a: ApproximationTrace, p: KProvider
) -> tuple[RequestSet, WeakTrivialityReport]:
    """Bounded requests describing trimmed prefixes of an erasing approximation.

    Complexity drops buy the trimmed prefix below the dropped target; changes
    buy the trimmed prefix at the change, priced by the current max cost.
    """
    top = max(a.positions(), default=0)
    for s, x, _v in a.events:
        for yy in range(x + 1, min(s, top) + 1):
            if a.value(yy, s) != 0:
                raise NotErasing(f"change at ({x}, {s}) leaves position {yy} set")
    cm = cost_max(p)
    entries: list[tuple[int, int, int]] = []
    drops = 0
    for stage, n, length in p.k_improvement_events():
        if stage > a.horizon:
            continue
        prefix = "".join(str(a.value(i, stage)) for i in range(n))
        entries.append((length + 1, bits_to_nat(drop_trailing_zeros(prefix)), stage))
        drops += 1
    changes = 0
    for s, x, _v in a.events:
        v = cm(x, s)
        if v == 0:
            continue
        r = v.denominator.bit_length() - 1
        if pow2(r) != v:
            raise ValueError("max cost is not a power of two")
        prefix = "".join(str(a.value(i, s)) for i in range(x + 1))
        entries.append((r + 1, bits_to_nat(drop_trailing_zeros(prefix)), s))
        changes += 1
    entries.sort(key=lambda e: e[2])
    rs = RequestSet()
    for r, yv, stage in entries:
        rs = kc_add(rs, r, yv, stage)
    ledger_total = cost_of_trace(cm, a).total
    return rs, WeakTrivialityReport(
        rs.weight, drops, changes, ledger_total, p.omega(p.horizon)
    )


@dataclass(frozen=True)
class SeparationResult:
    k: int
    declared_model_size: int  # 2^k: reported, never attempted
    sequence: tuple[int, ...]
    requests: RequestSet
    grants: tuple[tuple[int, int, int], ...]  # (effect stage, target, length)
    status: str
    claim_checks: tuple[tuple[int, int, Fraction, Fraction], ...]  # (p, r, lhs, rhs)
    stages_used: int

    @property
    def claim_ok(self) -> bool:
        return all(lhs >= rhs for _p, _r, lhs, rhs in self.claim_checks)


class _LiveComplexity:
    """Mutable complexity view used inside the separation run.

    Base grants come from the provider; the run's own requests (honored with
    the declared coding constant at the next stage) and the opponent's
    responses are appended as the game proceeds.  Queries replay against a
    Fenwick tree of scaled integer weights, exactly.
    """

    SCALE = 62

    def __init__(self, p: KProvider, budget_cap: Fraction):
        self.fen_size = max(p.horizon * 4, 1 << 14)
        self._fen = Fenwick(self.fen_size)
        self._events: list[tuple[int, int, int]] = sorted(p.k_improvement_events())
        self._idx = 0
        self._cursor = 0
        self._current: dict[int, int] = {}
        self._measure = p.budget_used
        self._cap = budget_cap
        self._watches: list[int] = []       # positions of interest
        self._watch_best: list[int | None] = []  # best length strictly beyond each

    def measure_left(self) -> Fraction:
        return self._cap - self._measure

    @property
    def pending_events(self) -> bool:
        return self._idx < len(self._events)

    def watch(self, x: int) -> None:
        best = None
        for w, length in self._current.items():
            if w > x and (best is None or length < best):
                best = length
        self._watches.append(x)
        self._watch_best.append(best)

    def best_beyond(self, i: int) -> int | None:
        """Best (least) description length strictly beyond the i-th watch."""
        return self._watch_best[i]

    def add_description(self, w: int, length: int, effect_stage: int) -> None:
        if w >= self.fen_size:
            raise ValueError("target outside the live view")
        weight = pow2(length)
        if self._measure + weight > self._cap:
            raise WeightOverflow("response measure exhausted")
        self._measure += weight
        bisect.insort(self._events, (max(effect_stage, w + 1), w, length))

    def advance(self, s: int) -> None:
        if s < self._cursor:
            raise ValueError("the live view only moves forward")
        self._cursor = s
        while self._idx < len(self._events) and self._events[self._idx][0] <= s:
            _stage, w, length = self._events[self._idx]
            self._idx += 1
            delta = 1 << (self.SCALE - length)
            if w in self._current:
                if length >= self._current[w]:
                    continue
                delta -= 1 << (self.SCALE - self._current[w])
            self._current[w] = length
            self._fen.add(w, delta)
            for i, x in enumerate(self._watches):
                if w > x:
                    best = self._watch_best[i]
                    if best is None or length < best:
                        self._watch_best[i] = length

    def ck(self, x: int) -> Fraction:
        """Complexity-sum cost at the cursor stage, exactly."""
        if x >= self._cursor:
            return ZERO
        acc = self._fen.prefix(self.fen_size - 1) - self._fen.prefix(x)
        return Fraction(acc, 1 << self.SCALE)

    def k_at(self, w: int, s: int) -> int | None:
        """Best length for w granted by stage s (for post-hoc claim audits)."""
        if w >= s:
            return None
        best = None
        for stage, ww, length in self._events:
            if stage > s:
                break
            if ww == w and (best is None or length < best):
                best = length
        return best


def separation_run(
    b: int,
    p: KProvider,
    d: int,
    V: int,
    *,
    x0: int | None = None,
    opponent: str | None = "greedy",
) -> SeparationResult:
    """Bounded run of the sum-versus-max separation game.

    The builder repeatedly buys cost beyond the last sequence element and
    waits for single descriptions to dominate the accumulated sums by the
    factor 2^b.  The greedy opponent plays the absurd domination hypothesis
    for as long as the unit measure allows; with no opponent the wait
    exhausts the stage budget, the expected outcome for honest providers.
    The declared full-contradiction length 2^k is reported, never attempted.
    """
    k = 1 << (b + d + 1)
    declared = 1 << min(k, 62)
    live = _LiveComplexity(p, Fraction(1))

    if x0 is None:
        probe = 1
        ckf = cost_k(p)
        while probe < p.horizon and ckf(probe, p.horizon) > pow2(min(k + d + 2, 60)):
            probe <<= 1
        if probe >= p.horizon:
            raise ScheduleInsufficient("no cheap starting point below the horizon")
        x0 = probe

    seq = [x0]
    requests = RequestSet()
    grants: list[tuple[int, int, int]] = []
    cur = x0 + 1
    live.advance(cur)
    live.watch(x0)
    status = "running"
    used = 0

    while used < V and len(seq) - 1 < declared:
        xv = seq[-1]
        try:
            requests = kc_add(requests, k, xv + 1, cur)
            live.add_description(xv + 1, k + d, cur + 1)
        except (WeightOverflow, ValueError):
            status = "measure_exhausted"
            break
        while live.ck(xv) < pow2(k + d) and used < V:
            cur += 1
            used += 1
            live.advance(cur)
        if live.ck(xv) < pow2(k + d):
            status = "budget_exhausted"
            break
        responded = False
        while used < V:
            cur += 1
            used += 1
            live.advance(cur)
            ok = True
            for i in range(len(seq)):
                need = live.ck(seq[i])
                best = live.best_beyond(i)
                if best is not None and pow2(best) * (1 << b) >= need:
                    continue
                ok = False
                if opponent != "greedy":
                    if not live.pending_events:
                        status = "budget_exhausted"  # nothing can change anymore
                    break
                if live.pending_events:
                    break  # let earlier grants register before adding more
                # cheapest self-consistent grant: 2^b * 2^-L must cover the
                # sum including the grant's own weight
                L = None
                for cand in range(0, live.SCALE):
                    if pow2(cand) * (1 << b) >= need + pow2(cand):
                        L = cand
                if L is None:
                    status = "response_impossible"
                    break
                if pow2(L) > live.measure_left():
                    status = "measure_exhausted"
                    break
                live.add_description(cur + 1, L, cur + 2)
                grants.append((cur + 2, cur + 1, L))
                break
            if status != "running":
                break
            if ok:
                seq.append(cur)
                live.watch(cur)
                responded = True
                break
        if status != "running":
            break
        if not responded:
            status = "budget_exhausted"
            break
    if status == "running":
        status = "budget_exhausted" if used >= V else "completed"

    checks = []
    v = len(seq) - 1
    for r in range(0, min(2, k) + 1):
        R = 1 << r
        for pi in range(0, v - R + 1):
            s = seq[pi + R]
            cap = pow2(k + b + d - r)
            lhs = ZERO
            for w in range(seq[pi] + 1, min(s, live.fen_size) + 1):
                kw = live.k_at(w, s)
                if kw is not None:
                    lhs += min(pow2(kw), cap)
            rhs = (r + 1) * pow2(k + b + d - r + 1)
            checks.append((pi, r, lhs, rhs))
    return SeparationResult(
        k,
        declared,
        tuple(seq),
        requests,
        tuple(grants),
        status,
        tuple(checks),
        used,
    )
