"""Toy prefix-free machine layer.

Bounded request sets, the machine-existence builder (leftmost-fit interval
allocation on the unit interval), and staged complexity providers that supply
``K_s(w)`` values and the domain measure ``omega(s)`` for everything else in
the package.  All weights are exact rationals; there is no floating point
anywhere in this module.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Iterable

from .errors import WeightOverflow
from .util import ZERO, floor_log2, pow2

INF = None  # complexity value for "no description yet"


@dataclass(frozen=True)
class RequestSet:
    """Append-only schedule of (length, target) description requests.

    The invariant ``weight == sum(2**-r)`` is maintained exactly and the
    weight never exceeds 1 (bounded request set condition).
    """

    entries: tuple[tuple[int, int, int], ...] = ()  # (length r, target y, stage)
    weight: Fraction = ZERO

    def __post_init__(self):
        w = ZERO
        last_stage = 0
        for r, y, stage in self.entries:
            if r < 0 or y < 0 or stage < 0:
                raise ValueError("request fields must be naturals")
            if stage < last_stage:
                raise ValueError("request stages must be nondecreasing")
            last_stage = stage
            w += pow2(r)
        if w != self.weight:
            raise ValueError("declared weight does not match entries")
        if w > 1:
            raise WeightOverflow(f"request weight {w} exceeds 1")

    def __len__(self) -> int:
        return len(self.entries)


def kc_add(rs: RequestSet, r: int, y: int, stage: int) -> RequestSet:
    """Append a request, updating the weight exactly.

    Raises WeightOverflow when the new weight would exceed 1, signalling that
    the caller's schedule is not a bounded request set.
    """
    if rs.entries and stage < rs.entries[-1][2]:
        raise ValueError("request stages must be nondecreasing")
    new_weight = rs.weight + pow2(r)
    if new_weight > 1:
        raise WeightOverflow(
            f"adding 2^-{r} lifts the weight to {new_weight} > 1"
        )
    return RequestSet(rs.entries + ((r, y, stage),), new_weight)


def request_set(items: Iterable[tuple[int, int, int]]) -> RequestSet:
    rs = RequestSet()
    for r, y, stage in items:
        rs = kc_add(rs, r, y, stage)
    return rs


@dataclass(frozen=True)
class PrefixMachine:
    """A finite prefix-free machine: bit-string descriptions mapped to outputs."""

    descriptions: tuple[tuple[str, int], ...]  # (description, output)
    coding_constant: int = 0

    def kraft_sum(self) -> Fraction:
        return sum((pow2(len(sigma)) for sigma, _ in self.descriptions), ZERO)

    def domain(self) -> tuple[str, ...]:
        return tuple(sigma for sigma, _ in self.descriptions)


def check_prefix_free(strings: Iterable[str]) -> list[tuple[str, str]]:
    """Return all (prefix, extension) conflicts among the given strings.

    Sorting makes this complete: if any string is a proper prefix of another,
    it is a prefix of its immediate lexicographic successor.
    """
    ordered = sorted(strings)
    conflicts = []
    for a, b in zip(ordered, ordered[1:]):
        if b.startswith(a) and a != b:
            conflicts.append((a, b))
    return conflicts


def check_prefix_free_pairwise(strings: Iterable[str]) -> list[tuple[str, str]]:
    """Quadratic reference check used to validate the sorted one."""
    items = list(strings)
    conflicts = []
    for i, a in enumerate(items):
        for b in items[i + 1 :]:
            if a != b and (b.startswith(a) or a.startswith(b)):
                conflicts.append((a, b) if b.startswith(a) else (b, a))
    return conflicts


class _IntervalAllocator:
    """Leftmost-fit allocation of dyadic subintervals of [0, 1).

    Free pieces are kept sorted by position; the construction preserves the
    invariant that piece sizes strictly increase from left to right, so the
    leftmost fitting piece is also the best fit and allocation succeeds
    whenever the remaining measure suffices.
    """

    def __init__(self):
        self._free: list[tuple[int, int]] = [(0, 0)]  # (index k, length l): [k*2^-l, (k+1)*2^-l)
        self.allocated = ZERO

    def take(self, length: int) -> str:
        for pos, (k, l) in enumerate(self._free):
            if l <= length:
                del self._free[pos]
                if l == length:
                    self.allocated += pow2(length)
                    return format(k, f"0{length}b") if length else ""
                # split: keep the leftmost sub-piece, free the siblings
                taken = k << (length - l)
                pieces = [(taken >> (length - m)) + 1 for m in range(length, l, -1)]
                self._free[pos:pos] = [
                    (piece, m) for piece, m in zip(pieces, range(length, l, -1))
                ]
                self.allocated += pow2(length)
                return format(taken, f"0{length}b") if length else ""
        raise WeightOverflow("no free interval fits the requested length")


def kc_machine(rs: RequestSet, d: int) -> PrefixMachine:
    """Realize a bounded request set as a prefix-free machine.

    Every request (r, y) receives a description of length exactly r + d.
    The assignment is deterministic given entry order.
    """
    if d < 0:
        raise ValueError("coding constant must be a natural")
    alloc = _IntervalAllocator()
    described = []
    for r, y, _stage in rs.entries:
        described.append((alloc.take(r + d), y))
    return PrefixMachine(tuple(described), d)


@dataclass(frozen=True)
class BaselineConfig:
    """Constants of the deterministic baseline schedule.

    The infinite schedule's Kraft mass is 2^-main_offset + 2^-shortcut_offset;
    the builder refuses configs where this exceeds 1.
    """

    main_offset: int = 3
    shortcut_offset: int = 5
    delay: Callable[[int], int] = field(default=lambda j: 2 ** (j + 1))

    def main_length(self, w: int) -> int:
        return 2 * floor_log2(w + 2) + self.main_offset

    def shortcut_length(self, j: int) -> int:
        return 2 * floor_log2(j + 2) + self.shortcut_offset

    def infinite_weight(self) -> Fraction:
        return pow2(self.main_offset) + pow2(self.shortcut_offset)


@dataclass(frozen=True)
class _Grant:
    """One honored description: measured at omega_stage, usable from k_stage."""

    length: int
    target: int
    omega_stage: int
    k_stage: int


class KProvider:
    """Stagewise complexity table and domain measure of a schedule-driven machine.

    ``k(w, s)`` is the least description length for w granted before or at
    stage s, with the convention that it is infinite (None) whenever w >= s.
    ``omega(s)`` is the exact domain measure after stage s.  Providers are
    immutable after construction and safe for concurrent reads.
    """

    def __init__(
        self,
        horizon: int,
        grants: Iterable[_Grant],
        budget_used: Fraction,
        config: BaselineConfig | None = None,
    ):
        if horizon < 1:
            raise ValueError("horizon must be at least 1")
        self.horizon = horizon
        self.config = config
        order = sorted(grants, key=lambda g: (g.omega_stage, g.length, g.target))
        self.grants: tuple[_Grant, ...] = tuple(order)
        self.budget_used = budget_used
        if budget_used > 1:
            raise WeightOverflow(f"schedule weight {budget_used} exceeds 1")

        self.max_length = max((g.length for g in self.grants), default=0)
        scale = self.max_length

        improvements: dict[int, list[tuple[int, int]]] = {}
        for g in self.grants:
            improvements.setdefault(g.target, []).append((g.k_stage, g.length))
        self.best_by_target: dict[int, list[tuple[int, int]]] = {}
        for w, entries in improvements.items():
            entries.sort()
            best: list[tuple[int, int]] = []
            cur = None
            for stage, length in entries:
                if cur is None or length < cur:
                    cur = length
                    if best and best[-1][0] == stage:
                        best[-1] = (stage, cur)
                    else:
                        best.append((stage, cur))
            self.best_by_target[w] = best

        omega_stages = [0]
        omega_scaled = [0]
        acc = 0
        for g in self.grants:
            acc += 1 << (scale - g.length)
            if g.omega_stage == omega_stages[-1]:
                omega_scaled[-1] = acc
            else:
                omega_stages.append(g.omega_stage)
                omega_scaled.append(acc)
        self._omega_stages = omega_stages
        self._omega_scaled = omega_scaled
        self._scale = scale

    def k(self, w: int, s: int) -> int | None:
        """K_s(w): infinite (None) for w >= s, else the best granted length."""
        if w >= s or s > self.horizon:
            return INF
        best = self.best_by_target.get(w)
        if not best:
            return INF
        value = INF
        for stage, length in best:
            if stage <= s:
                value = length
            else:
                break
        return value

    def omega(self, s: int) -> Fraction:
        """Exact domain measure of the machine at stage s."""
        if s < 0:
            raise ValueError("stage must be a natural")
        s = min(s, self.horizon)
        idx = bisect.bisect_right(self._omega_stages, s) - 1
        return Fraction(self._omega_scaled[idx], 1 << self._scale) if self._scale else Fraction(self._omega_scaled[idx])

    def request_schedule(self) -> RequestSet:
        """The full granted schedule, as a bounded request set."""
        return request_set((g.length, g.target, g.omega_stage) for g in self.grants)

    def machine(self) -> PrefixMachine:
        """Materialize the prefix-free machine behind this provider."""
        return kc_machine(self.request_schedule(), 0)

    def k_improvement_events(self) -> list[tuple[int, int, int]]:
        """All (k_stage, target, length) strict-improvement events, stage order."""
        events = []
        for w, best in self.best_by_target.items():
            for stage, length in best:
                events.append((stage, w, length))
        events.sort()
        return events


def baseline_provider(S: int, config: BaselineConfig | None = None) -> KProvider:
    """Deterministic baseline schedule up to horizon S.

    Every w is described at stage w + 1 with length 2*floor(log2(w+2)) +
    main_offset; every power 2**j additionally receives a shortcut of length
    2*floor(log2(j+2)) + shortcut_offset at stage delay(j).  The infinite
    schedule's Kraft mass has the closed form checked below.
    """
    if S < 1:
        raise ValueError("horizon must be at least 1")
    cfg = config or BaselineConfig()
    if cfg.infinite_weight() > 1:
        raise WeightOverflow(
            f"baseline offsets give infinite Kraft mass {cfg.infinite_weight()} > 1"
        )
    grants = []
    for w in range(S):
        grants.append(_Grant(cfg.main_length(w), w, w + 1, w + 1))
    j = 0
    while cfg.delay(j) <= S:
        stage = cfg.delay(j)
        w = 1 << j
        grants.append(_Grant(cfg.shortcut_length(j), w, stage, max(stage, w + 1)))
        j += 1
    return KProvider(S, grants, cfg.infinite_weight(), cfg)


def register_requests(p: KProvider, rs: RequestSet, d: int) -> KProvider:
    """Provider additionally honoring each request (r, y, t) as K_s(y) <= r + d for s > t.

    Requests enumerated at stage t take effect at stage t + 1 with the
    declared coding constant d, so the combined Kraft weight must stay
    within the unit budget.
    """
    if d < 0:
        raise ValueError("coding constant must be a natural")
    added = pow2(d) * rs.weight
    budget = p.budget_used + added
    if budget > 1:
        raise WeightOverflow(
            f"registering weight {added} on top of {p.budget_used} exceeds 1"
        )
    grants = list(p.grants)
    for r, y, t in rs.entries:
        grants.append(_Grant(r + d, y, t + 1, max(t + 1, y + 1)))
    return KProvider(p.horizon, grants, budget, p.config)


def provider_from_requests(rs: RequestSet, d: int, S: int) -> KProvider:
    """Provider backed by an explicit schedule only (no baseline)."""
    grants = [
        _Grant(r + d, y, t + 1, max(t + 1, y + 1)) for r, y, t in rs.entries
    ]
    return KProvider(S, grants, pow2(d) * rs.weight)
