"""Constructors for the named cost functions and the left-c.e. real correspondence.

The complexity-sum cost function, the domain-measure cost function, additive
cost functions and their left-c.e. real counterparts, the max variant, the
trace-derived recurrence, and the Solovay translation between approximations.
"""

from __future__ import annotations

import bisect
from dataclasses import dataclass
from fractions import Fraction
from typing import Callable, Sequence

import numpy as np

from .core import ApproximationTrace, CostFn, cost_fn, limit_estimate
from .errors import NonAdditive
from .machine import KProvider, RequestSet, kc_add
from .util import ZERO, Fenwick, least_length, pow2


@dataclass(frozen=True)
class LeftCEReal:
    """Nondecreasing rational stage sequence, bounded by a declared cap."""

    seq: tuple[Fraction, ...]
    cap: Fraction = Fraction(1)

    def __post_init__(self):
        prev = None
        for v in self.seq:
            if v < 0:
                raise ValueError("left-c.e. approximations are nonnegative")
            if prev is not None and v < prev:
                raise ValueError("left-c.e. approximations are nondecreasing")
            prev = v
        if self.seq and self.seq[-1] > self.cap:
            raise ValueError("sequence exceeds its declared cap")

    @property
    def horizon(self) -> int:
        return len(self.seq) - 1

    def at(self, s: int) -> Fraction:
        """Value at stage s, clamped to the horizon."""
        if s < 0:
            raise ValueError("stage must be a natural")
        return self.seq[min(s, self.horizon)]


def cost_k(p: KProvider) -> CostFn:
    """Complexity-sum cost: c(x, s) = sum of 2^-K_s(w) for x < w <= s.

    The pointwise evaluator walks the provider's improvement lists; ``bulk``
    replays stage-sorted queries against a Fenwick tree of scaled weights,
    and ``stage_scan`` advances s incrementally.  All three agree exactly.
    """
    scale = p.max_length
    events = p.k_improvement_events()  # (stage, w, length), stage-sorted
    horizon = p.horizon

    def ev(x: int, s: int) -> Fraction:
        if x >= s:
            return ZERO
        s_eff = min(s, horizon)
        acc = 0
        for w, best in p.best_by_target.items():
            if x < w:
                cur = None
                for stage, length in best:
                    if stage <= s_eff:
                        cur = length
                    else:
                        break
                if cur is not None:
                    acc += 1 << (scale - cur)
        return Fraction(acc, 1 << scale)

    def bulk(pairs: Sequence[tuple[int, int]]) -> list[Fraction]:
        size = horizon + 2
        fen = Fenwick(size)
        current: dict[int, int] = {}
        idx = 0
        out = []
        last_s = -1
        for x, s in pairs:
            if s < last_s:
                raise ValueError("bulk queries must be stage-sorted")
            last_s = s
            while idx < len(events) and events[idx][0] <= min(s, horizon):
                _stage, w, length = events[idx]
                delta = 1 << (scale - length)
                if w in current:
                    delta -= 1 << (scale - current[w])
                current[w] = length
                if w < size:
                    fen.add(w, delta)
                idx += 1
            if x >= s:
                out.append(ZERO)
            else:
                acc = fen.prefix(size - 1) - fen.prefix(x)
                out.append(Fraction(acc, 1 << scale))
        return out

    def stage_scan(x: int, s_from: int):
        idx = 0
        current: dict[int, int] = {}
        acc = 0
        for s in range(s_from, horizon + 1):
            while idx < len(events) and events[idx][0] <= s:
                _stage, w, length = events[idx]
                if w > x:
                    acc += 1 << (scale - length)
                    if w in current:
                        acc -= 1 << (scale - current[w])
                current[w] = length
                idx += 1
            yield s, (Fraction(acc, 1 << scale) if x < s else ZERO)

    return cost_fn(
        "complexity-sum",
        horizon,
        ev,
        monotone_main=True,
        monotone_stage=True,
        proper=True,
        bulk=bulk,
        stage_scan=stage_scan,
    )


def cost_omega(p: KProvider) -> CostFn:
    """Domain-measure cost: c(x, s) = omega(s) - omega(x) for x <= s, else 0."""

    def ev(x: int, s: int) -> Fraction:
        if x > s:
            return ZERO
        return p.omega(s) - p.omega(x)

    return cost_fn(
        "domain-measure",
        p.horizon,
        ev,
        monotone_main=True,
        monotone_stage=True,
        additive=True,
        proper=False,
    )


def additive_from_real(b: LeftCEReal) -> CostFn:
    """The additive cost function c(x, s) = b(s) - b(x) of a left-c.e. real."""

    def ev(x: int, s: int) -> Fraction:
        if x > s:
            return ZERO
        return b.at(s) - b.at(x)

    strictly = all(b.seq[i] < b.seq[i + 1] for i in range(len(b.seq) - 1))
    return cost_fn(
        "additive",
        b.horizon if b.horizon >= 1 else 1,
        ev,
        monotone_main=True,
        monotone_stage=True,
        additive=True,
        proper=strictly,
    )


def real_from_additive(c: CostFn, cap: Fraction | None = None) -> LeftCEReal:
    """Recover the stage sequence b(s) = c(0, s) of an additive cost function.

    Raises NonAdditive when the telescoping identity fails on sampled triples.
    """
    if not c.props.additive:
        raise NonAdditive(f"{c.name} is not declared additive")
    check_additivity(c, min(c.horizon, 24))
    seq = tuple(c(0, s) for s in range(c.horizon + 1))
    return LeftCEReal(seq, cap if cap is not None else max(seq, default=ZERO))


def check_additivity(c: CostFn, bound: int) -> None:
    """Exhaustive telescoping check on all triples x < y < z <= bound."""
    vals = [[c(x, s) for s in range(bound + 1)] for x in range(bound + 1)]
    for x in range(bound + 1):
        for y in range(x + 1, bound + 1):
            for z in range(y + 1, bound + 1):
                if vals[x][y] + vals[y][z] != vals[x][z]:
                    raise NonAdditive(
                        f"{c.name}: c({x},{y}) + c({y},{z}) != c({x},{z})"
                    )


def cost_g(g: Callable[[int], int], horizon: int, cap: Fraction = Fraction(1)) -> CostFn:
    """Additive cost from a length function: c(x, s) = sum of 2^-g(w), x < w <= s."""
    prefix = [ZERO]
    for w in range(1, horizon + 1):
        prefix.append(prefix[-1] + pow2(g(w)))
    if prefix[-1] > cap:
        raise ValueError(f"sum of 2^-g(w) on [0, {horizon}] exceeds the cap {cap}")

    def ev(x: int, s: int) -> Fraction:
        if x >= s:
            return ZERO
        return prefix[min(s, horizon)] - prefix[min(x, horizon)]

    return cost_fn(
        "length-sum",
        horizon,
        ev,
        monotone_main=True,
        monotone_stage=True,
        additive=True,
        proper=True,
    )


def cost_max(p: KProvider) -> CostFn:
    """Single-description cost: c(x, s) = max of 2^-K_s(w) for x < w <= s."""
    horizon = p.horizon

    def ev(x: int, s: int) -> Fraction:
        if x >= s:
            return ZERO
        s_eff = min(s, horizon)
        best = None
        for w, entries in p.best_by_target.items():
            if x < w:
                cur = None
                for stage, length in entries:
                    if stage <= s_eff:
                        cur = length
                    else:
                        break
                if cur is not None and (best is None or cur < best):
                    best = cur
        return pow2(best) if best is not None else ZERO

    return cost_fn(
        "complexity-max",
        horizon,
        ev,
        monotone_main=True,
        monotone_stage=True,
        proper=True,
    )


def cost_from_approx(z: ApproximationTrace, h: Callable[[int], int]) -> CostFn:
    """Trace-derived cost by the max recurrence.

    c(x, s) = 0 for x >= s; when e < x is the least position changed at
    stage s, c(x, s) = max(c(x, s-1), 2^-h(e)).  h = identity recovers the
    plain change-driven cost.
    """
    changes = sorted(
        (s, min(xs)) for s, xs in z.change_stages().items()
    )  # (stage, least changed position)
    stages = [s for s, _ in changes]

    def ev(x: int, s: int) -> Fraction:
        if x >= s:
            return ZERO
        best = None
        hi = bisect.bisect_right(stages, min(s, z.horizon))
        lo = bisect.bisect_right(stages, x)
        for t_idx in range(lo, hi):
            e = changes[t_idx][1]
            if e < x and (best is None or h(e) < best):
                best = h(e)
        return pow2(best) if best is not None else ZERO

    return cost_fn(
        "trace-derived", z.horizon, ev, monotone_stage=True
    )


@dataclass(frozen=True)
class SolovayCertificate:
    """Sampled evidence for a Solovay translation between two approximations."""

    phi: tuple[tuple[Fraction, Fraction], ...]  # (sample q, translated value)
    constant: int
    violations: tuple[Fraction, ...]

    @property
    def ok(self) -> bool:
        return not self.violations


def solovay_translate(
    a: LeftCEReal,
    b: LeftCEReal,
    N: int,
    samples: Sequence[Fraction] | None = None,
) -> SolovayCertificate:
    """Translate left approximations via phi(q) = b(x), x least with a(x-1) <= q < a(x).

    The default sample grid takes the midpoints of a's consecutive distinct
    values below its horizon value.  A sampled q < a(S) is a violation when
    b(S) - phi(q) >= N * (a(S) - q).  A certificate is evidence, not proof.
    """
    aS, bS = a.at(a.horizon), b.at(b.horizon)
    if samples is None:
        samples = []
        for x in range(1, a.horizon + 1):
            if a.seq[x] > a.seq[x - 1]:
                samples.append((a.seq[x - 1] + a.seq[x]) / 2)
    pairs = []
    violations = []
    for q in samples:
        if q >= aS:
            continue
        x = next(i for i in range(a.horizon + 1) if q < a.seq[i])
        val = b.at(x)
        pairs.append((q, val))
        if bS - val >= N * (aS - q):
            violations.append(q)
    return SolovayCertificate(tuple(pairs), N, tuple(violations))


def additive_requests(c: CostFn) -> RequestSet:
    """Description requests matching an additive cost function's increments.

    For every w with c(w-1, w) > 0 the entry has the least length r_w with
    2^-r_w <= c(w-1, w); the resulting weight telescopes below c's limit at 0,
    so the unit budget cannot overflow once that limit is at most 1.
    """
    if not c.props.additive:
        raise NonAdditive(f"{c.name} is not declared additive")
    if limit_estimate(c, 0) > 1:
        raise ValueError("rescale first: the limit at 0 exceeds 1")
    rs = RequestSet()
    for w in range(1, c.horizon + 1):
        v = c(w - 1, w)
        if v > 0:
            rs = kc_add(rs, least_length(v), w, w)
    return rs


def rescale_to_unit(c: CostFn) -> CostFn:
    """Divide by the least power of two at or above c(0, horizon).

    Powers of two keep dyadic values dyadic; the result has limit at 0 within
    the unit interval.
    """
    top = c(0, c.horizon)
    k = 0
    while (1 << k) < top:
        k += 1
    factor = Fraction(1, 1 << k)

    def ev(x: int, s: int) -> Fraction:
        return c(x, s) * factor

    return cost_fn(
        c.name + "-rescaled",
        c.horizon,
        ev,
        monotone_main=c.props.monotone_main,
        monotone_stage=c.props.monotone_stage,
        additive=c.props.additive,
        proper=c.props.proper,
    )


@dataclass(frozen=True)
class DominationReport:
    """Exact pointwise comparison of the three provider costs on the full grid."""

    horizon: int
    grid_points: int
    omega_violations: tuple[tuple[int, int], ...]  # complexity-sum above domain measure
    max_violations: tuple[tuple[int, int], ...]    # max above complexity-sum

    @property
    def ok(self) -> bool:
        return not (self.omega_violations or self.max_violations)


def domination_grid_report(p: KProvider) -> DominationReport:
    """Check c_sum <= omega-difference and c_max <= c_sum on all (x, s), x <= s.

    All quantities are dyadic with a common scale, so the comparison runs on
    scaled integers: exact rational comparisons, vectorized per stage column.
    """
    S = p.horizon
    scale = p.max_length
    events = p.k_improvement_events()
    omega_scaled = np.zeros(S + 1, dtype=np.int64)
    acc = 0
    grants_by_stage: dict[int, int] = {}
    for g in p.grants:
        grants_by_stage[g.omega_stage] = grants_by_stage.get(g.omega_stage, 0) + (
            1 << (scale - g.length)
        )
    for s in range(1, S + 1):
        acc += grants_by_stage.get(s, 0)
        omega_scaled[s] = acc

    m = np.zeros(S + 2, dtype=np.int64)  # current scaled weight 2^(scale - K_s(w)) per w
    current: dict[int, int] = {}
    idx = 0
    omega_bad: list[tuple[int, int]] = []
    max_bad: list[tuple[int, int]] = []
    for s in range(1, S + 1):
        while idx < len(events) and events[idx][0] <= s:
            _stage, w, length = events[idx]
            delta = 1 << (scale - length)
            if w in current:
                delta -= 1 << (scale - current[w])
            current[w] = length
            m[w] += delta
            idx += 1
        col = m[: s + 1]
        # c_sum(x, s) scaled = suffix sum over w in (x, s]
        rev = col[::-1]
        suffix = np.concatenate(([0], np.cumsum(rev)))[::-1]  # suffix[x] = sum w >= x
        ck = suffix[1 : s + 2][: s + 1].copy()  # ck[x] = sum w > x .. s
        cmx = np.concatenate(
            (np.maximum.accumulate(rev)[::-1][1:], [0])
        )  # cmx[x] = max w > x
        om = omega_scaled[s] - omega_scaled[: s + 1]
        bad1 = np.nonzero(ck > om)[0]
        bad2 = np.nonzero(cmx > ck)[0]
        omega_bad.extend((int(x), s) for x in bad1)
        max_bad.extend((int(x), s) for x in bad2)
    points = (S + 1) * (S + 2) // 2
    return DominationReport(S, points, tuple(omega_bad), tuple(max_bad))
