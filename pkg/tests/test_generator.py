import numpy as np
import pytest

from conftest import draw_rates, make_config
from qinet import (
    FullState,
    InventoryState,
    NetworkConfig,
    ReducibilityError,
    ServiceRateProfile,
    build_reduced_generator,
    enumerate_inventory_states,
    full_transitions,
)
from qinet.generator import _assert_strongly_connected


def test_tie_split_from_empty_state():
    # b=(1,1), lam=(1,1), nu=1: out of (0,0,2) two replenishments at nu/2.
    cfg = make_config((1, 1), (1, 1), 1.0)
    gen = build_reduced_generator(cfg)
    row = gen.rates[gen.index_of((0, 0, 2))]
    assert row[gen.index_of((1, 0, 1))] == pytest.approx(0.5)
    assert row[gen.index_of((0, 1, 1))] == pytest.approx(0.5)
    assert row[gen.index_of((0, 0, 2))] == pytest.approx(-1.0)
    assert row[gen.index_of((1, 1, 0))] == 0.0


def test_full_state_row():
    cfg = make_config((1.5, 0.5), (1, 1), 1.0)
    gen = build_reduced_generator(cfg)
    row = gen.rates[gen.index_of((1, 1, 0))]
    assert row[gen.index_of((0, 1, 1))] == pytest.approx(1.5)
    assert row[gen.index_of((1, 0, 1))] == pytest.approx(0.5)
    # no replenishment out of the all-full state
    assert row[gen.index_of((1, 1, 0))] == pytest.approx(-2.0)


@pytest.mark.parametrize("b", [(1, 1), (2, 1), (3, 2), (2, 2, 2), (1, 2, 3)])
def test_rows_sum_to_zero(b, rng):
    cfg = make_config(draw_rates(rng, len(b)), b, 1.3)
    gen = build_reduced_generator(cfg)
    assert np.abs(gen.rates.sum(axis=1)).max() < 1e-12 * np.abs(gen.rates).max()
    off = gen.rates.copy()
    np.fill_diagonal(off, 0)
    assert off.min() >= 0


def test_transitions_stay_inside_state_space(rng):
    b = (2, 3)
    cfg = make_config(draw_rates(rng, 2), b, 0.8)
    gen = build_reduced_generator(cfg)
    valid = {s.k for s in enumerate_inventory_states(b)}
    rows, cols = np.nonzero(gen.rates > 0)
    for r, c in zip(rows, cols):
        assert gen.states[r].k in valid and gen.states[c].k in valid


def test_full_transitions_depleted_state():
    # Both inventories empty: arrivals are lost, services blocked, only the
    # two replenishment moves remain.
    cfg = make_config((1, 1), (1, 1), 1.0)
    s = FullState(n=(0, 0), k=InventoryState((0, 0, 2)))
    out = full_transitions(cfg, s)
    assert len(out) == 2
    targets = {t.k.k: rate for t, rate in out}
    assert targets == {(1, 0, 1): 0.5, (0, 1, 1): 0.5}
    assert all(t.n == (0, 0) for t, _ in out)


def test_full_transitions_service_and_arrivals():
    cfg = NetworkConfig(
        lam=(1, 1),
        mu=(ServiceRateProfile.constant(2), ServiceRateProfile.constant(7)),
        b=(1, 1),
        nu=1.0,
    )
    s = FullState(n=(3, 0), k=InventoryState((1, 1, 0)))
    out = {(t.n, t.k.k): rate for t, rate in full_transitions(cfg, s)}
    assert out == {
        ((4, 0), (1, 1, 0)): 1.0,          # arrival at 1
        ((3, 1), (1, 1, 0)): 1.0,          # arrival at 2
        ((2, 0), (0, 1, 1)): 2.0,          # service at 1 consumes a unit
    }


def test_full_transitions_service_blocked_without_stock():
    # n2 = 5 customers waiting but k2 = 0: the server idles until the next
    # replenishment.
    cfg = make_config((1, 1), (1, 1), 1.0)
    s = FullState(n=(0, 5), k=InventoryState((1, 0, 1)))
    out = {(t.n, t.k.k): rate for t, rate in full_transitions(cfg, s)}
    assert ((0, 4), (1, 0, 1)) not in out and all(t[0][1] != 4 for t in out)
    # arrival only at location 1 (k2 = 0 loses demand), replenishment to 2
    assert out == {
        ((1, 5), (1, 0, 1)): 1.0,
        ((0, 5), (1, 1, 0)): 1.0,
    }


def test_aggregation_matches_reduced_generator(rng):
    # With mu_i(n) == lam_i the inventory-affecting part of the full
    # dynamics at an interior queue state is exactly the reduced generator.
    lam = draw_rates(rng, 2)
    b = (2, 2)
    cfg = NetworkConfig(
        lam=lam,
        mu=tuple(ServiceRateProfile.constant(l) for l in lam),
        b=b,
        nu=1.1,
    )
    gen = build_reduced_generator(cfg)
    for s0 in enumerate_inventory_states(b):
        full = full_transitions(cfg, FullState(n=(4, 4), k=s0))
        agg: dict[tuple, float] = {}
        for target, rate in full:
            if target.k.k != s0.k:
                agg[target.k.k] = agg.get(target.k.k, 0.0) + rate
        row = gen.rates[gen.index_of(s0)]
        expected = {
            gen.states[c].k: row[c] for c in np.nonzero(row > 0)[0]
        }
        assert agg.keys() == expected.keys()
        for key in agg:
            assert agg[key] == pytest.approx(expected[key], rel=1e-15)


def test_inventory_conservation(rng):
    b = (2, 1, 2)
    cfg = make_config(draw_rates(rng, 3), b, 1.0)
    total = sum(b)
    for s0 in enumerate_inventory_states(b):
        for target, _ in full_transitions(cfg, FullState(n=(1, 0, 2), k=s0)):
            assert sum(target.k.k) == total


def test_transfer_zero_equals_absent():
    base = make_config((1, 1), (3, 3), 1.0)
    zero = make_config((1, 1), (3, 3), 1.0, beta=0.0)
    assert np.array_equal(
        build_reduced_generator(base).rates, build_reduced_generator(zero).rates
    )


def test_transfer_adds_lateral_moves():
    cfg = make_config((1, 1), (3, 3), 1.0, beta=0.7)
    gen = build_reduced_generator(cfg)
    # gap >= 2 triggers a transfer from the richer to the poorer location
    assert gen.rates[gen.index_of((3, 0, 3)), gen.index_of((2, 1, 3))] == pytest.approx(0.7)
    assert gen.rates[gen.index_of((0, 2, 4)), gen.index_of((1, 1, 4))] == pytest.approx(0.7)
    # gap of one does not
    assert gen.rates[gen.index_of((2, 1, 3)), gen.index_of((1, 2, 3))] == 0.0

    s = FullState(n=(0, 0), k=InventoryState((3, 1, 2)))
    out = {t.k.k: rate for t, rate in full_transitions(cfg, s) if t.n == s.n and t.k != s.k}
    assert out[(2, 2, 2)] == pytest.approx(0.7)


def test_reducibility_detection():
    with pytest.raises(ReducibilityError):
        _assert_strongly_connected(
            4,
            np.array([0, 1, 2, 3]),
            np.array([1, 0, 3, 2]),
            np.array([1.0, 1.0, 1.0, 1.0]),
        )
