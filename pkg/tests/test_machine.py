"""Request sets, the machine builder, and staged complexity providers."""

from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from costlab.errors import WeightOverflow
from costlab.machine import (
    BaselineConfig,
    RequestSet,
    baseline_provider,
    check_prefix_free,
    check_prefix_free_pairwise,
    kc_add,
    kc_machine,
    provider_from_requests,
    register_requests,
    request_set,
)
from costlab.util import pow2


def test_single_request_weight():
    rs = kc_add(RequestSet(), 1, 7, 0)
    assert rs.weight == Fraction(1, 2)


def test_overflow_on_third_request():
    rs = kc_add(kc_add(RequestSet(), 1, 0, 0), 1, 1, 0)
    assert rs.weight == 1
    with pytest.raises(WeightOverflow):
        kc_add(rs, 2, 2, 0)


def test_geometric_schedule_weight():
    # oracle: direct rational summation of 2^-r for r = 1..10
    expected = sum((pow2(r) for r in range(1, 11)), Fraction(0))
    rs = RequestSet()
    for r in range(1, 11):
        rs = kc_add(rs, r, r, r)
    assert rs.weight == expected == 1 - pow2(10)


def test_stage_monotonicity_enforced():
    rs = kc_add(RequestSet(), 3, 0, 5)
    with pytest.raises(ValueError):
        kc_add(rs, 3, 1, 4)


def test_machine_single_forced_length():
    m = kc_machine(request_set([(1, 9, 0)]), 0)
    assert m.descriptions == (("0", 9),)


def test_machine_three_requests_prefix_free():
    m = kc_machine(request_set([(1, 10, 0), (2, 11, 0), (2, 12, 0)]), 0)
    lengths = sorted(len(sigma) for sigma, _ in m.descriptions)
    assert lengths == [1, 2, 2]
    assert check_prefix_free_pairwise(m.domain()) == []


def test_machine_coding_constant_offsets_lengths():
    rs = request_set([(1, 0, 0), (3, 1, 1), (2, 2, 2)])
    m = kc_machine(rs, 3)
    for (sigma, _y), (r, _t, _s) in zip(m.descriptions, rs.entries):
        assert len(sigma) == r + 3


def test_machine_deterministic():
    rs = request_set([(2, 0, 0), (1, 1, 1), (3, 2, 2)])
    assert kc_machine(rs, 0) == kc_machine(rs, 0)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.integers(min_value=1, max_value=8), min_size=1, max_size=24))
def test_machine_existence_on_random_schedules(lengths):
    rs = RequestSet()
    for i, r in enumerate(lengths):
        try:
            rs = kc_add(rs, r, i, i)
        except WeightOverflow:
            break
    m = kc_machine(rs, 0)
    assert m.kraft_sum() == rs.weight <= 1
    assert check_prefix_free(m.domain()) == []
    assert check_prefix_free(m.domain()) == check_prefix_free_pairwise(m.domain())


def test_baseline_infinity_convention():
    p = baseline_provider(32)
    for s in range(0, 33):
        for w in range(s, 34):
            assert p.k(w, s) is None


def test_baseline_shortcut_beats_main_schedule():
    # by hand: shortcut for 2^10 has length 2*floor(log2(12)) + 5 = 11,
    # while the main schedule gives 2*floor(log2(1026)) + 3 = 23
    p = baseline_provider(2**11 + 2)
    assert p.k(1024, 2**11 + 1) == 11
    assert p.k(1024, 1026) == 23


def test_baseline_omega_empty_at_zero():
    assert baseline_provider(16).omega(0) == 0


def test_baseline_omega_monotone_and_bounded():
    p = baseline_provider(128)
    prev = Fraction(0)
    for s in range(129):
        cur = p.omega(s)
        assert prev <= cur <= 1
        prev = cur


def test_baseline_k_improves_only():
    p = baseline_provider(128)
    for w in range(0, 40):
        prev = None
        for s in range(129):
            k = p.k(w, s)
            if prev is not None and k is not None:
                assert k <= prev
            if k is not None:
                prev = k


def test_baseline_rejects_overweight_config():
    with pytest.raises(WeightOverflow):
        baseline_provider(16, BaselineConfig(main_offset=0, shortcut_offset=0))


def test_register_empty_is_identity():
    p = baseline_provider(32)
    q = register_requests(p, RequestSet(), 2)
    for w in range(12):
        for s in range(33):
            assert p.k(w, s) == q.k(w, s)
    assert p.omega(32) == q.omega(32)


def test_register_takes_effect_after_stage():
    p = baseline_provider(128)
    q = register_requests(p, request_set([(4, 100, 7)]), 2)
    assert q.k(100, 7) == p.k(100, 7)
    for s in range(101, 129):
        assert q.k(100, s) == 6
    assert q.omega(8) - p.omega(8) == pow2(6)


def test_register_overflow():
    p = baseline_provider(16)
    with pytest.raises(WeightOverflow):
        register_requests(p, request_set([(0, 3, 0)]), 0)


def test_kraft_equality_at_horizon():
    p = register_requests(baseline_provider(64), request_set([(5, 9, 3), (6, 11, 4)]), 1)
    honored = sum((pow2(g.length) for g in p.grants if g.omega_stage <= 64), Fraction(0))
    assert p.omega(64) == honored
    m = p.machine()
    assert m.kraft_sum() == honored
    assert check_prefix_free(m.domain()) == []


def test_provider_from_requests_single_description():
    p = provider_from_requests(request_set([(3, 5, 1)]), 0, 16)
    assert p.k(5, 9) == 3
    assert p.k(5, 1) is None
    assert p.omega(16) == pow2(3)
