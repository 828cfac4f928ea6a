import itertools

import numpy as np
import pytest

import gf2
from errors import InvalidArgumentError
from flip_patterns import (R1_ORDER_EDGES, R1_PATTERNS, SPC_EVEN_PATTERNS, SPC_ODD_PATTERNS, SPC_ORDER_EDGES,
                           ErrorPattern, SortedLlrView, extend_r1, extend_spc, hard_estimate,
                           partial_order_holds, smallest_subsets)
from verify_suite import check_r1_patterns, check_spc_patterns


def brute_force_deltas(llrs, parity=None):
    mags = np.abs(llrs)
    masks = gf2.mask_table(llrs.size)
    deltas = masks.astype(float) @ mags
    if parity is not None:
        deltas = deltas[masks.sum(axis=1) % 2 == parity]
    return np.sort(deltas)


def test_pattern_sets_have_thirteen_entries():
    for patterns in (R1_PATTERNS, SPC_EVEN_PATTERNS, SPC_ODD_PATTERNS):
        assert len(patterns) == 13
        assert len(set(patterns)) == 13
        assert all(list(p) == sorted(p) for p in patterns)
    assert all(len(p) % 2 == 0 for p in SPC_EVEN_PATTERNS)
    assert all(len(p) % 2 == 1 for p in SPC_ODD_PATTERNS)


def test_error_pattern_bits():
    pattern = ErrorPattern.from_positions([0, 2, 6])
    assert pattern.mask == 0x45
    assert pattern.weight == 3
    assert pattern.positions == (0, 2, 6)
    np.testing.assert_array_equal(pattern.as_bits(8), [1, 0, 1, 0, 0, 0, 1, 0])


def test_sorted_view_is_stable_on_ties():
    view = SortedLlrView.from_llrs([2.0, -1.0, 1.0, -0.5])
    assert view.perm.tolist() == [3, 1, 2, 0]
    np.testing.assert_allclose(view.magnitudes, [0.5, 1.0, 1.0, 2.0])


def test_r1_extension_matches_brute_force(rng):
    for _ in range(20):
        llrs = rng.normal(0.0, 2.0, size=16)
        raw = hard_estimate(llrs)
        cands = extend_r1(raw, llrs)
        assert len(cands) == 8
        np.testing.assert_allclose([c.delta_pm for c in cands], brute_force_deltas(llrs)[:8])
        np.testing.assert_array_equal(cands[0].beta, raw)


@pytest.mark.parametrize("checksum", [0, 1])
def test_spc_extension_keeps_even_parity(checksum, rng):
    done = 0
    while done < 10:
        llrs = rng.normal(0.0, 2.0, size=16)
        raw = hard_estimate(llrs)
        if raw.sum() % 2 != checksum:
            continue
        cands = extend_spc(raw, llrs)
        assert len(cands) == 8
        assert all(c.beta.sum() % 2 == 0 for c in cands)
        np.testing.assert_allclose([c.delta_pm for c in cands], brute_force_deltas(llrs, checksum)[:8])
        done += 1


def test_small_blocks_fall_back_to_exact_enumeration(rng):
    llrs = rng.normal(0.0, 2.0, size=4)
    raw = hard_estimate(llrs)
    cands = extend_r1(raw, llrs)
    assert len(cands) == 8
    np.testing.assert_allclose([c.delta_pm for c in cands], brute_force_deltas(llrs)[:8])
    spc = extend_spc(raw, llrs, keep=4)
    assert all(c.beta.sum() % 2 == 0 for c in spc)
    np.testing.assert_allclose([c.delta_pm for c in spc], brute_force_deltas(llrs, int(raw.sum() % 2))[:4])


def test_other_list_sizes_fall_back_to_exact_enumeration(rng):
    llrs = rng.normal(0.0, 2.0, size=16)
    raw = hard_estimate(llrs)
    cands = extend_r1(raw, llrs, keep=16)
    assert len(cands) == 16
    np.testing.assert_allclose([c.delta_pm for c in cands], brute_force_deltas(llrs)[:16])


@pytest.mark.parametrize("parity", [None, 0, 1])
def test_smallest_subsets_against_enumeration(parity, rng):
    mags = np.sort(rng.exponential(1.0, size=7))
    found = smallest_subsets(mags, 12, parity)
    sums = []
    for r in range(8):
        if parity is not None and r % 2 != parity:
            continue
        sums.extend(mags[list(c)].sum() if c else 0.0 for c in itertools.combinations(range(7), r))
    np.testing.assert_allclose([t for t, _ in found], np.sort(sums)[:12])
    assert len({s for _, s in found}) == len(found)


def test_extension_rejects_length_mismatch():
    with pytest.raises(InvalidArgumentError):
        extend_r1(np.zeros(8, dtype=np.uint8), np.ones(16))


def test_partial_orders_hold_on_sorted_magnitudes(rng):
    for _ in range(100):
        mags = np.sort(rng.exponential(1.0, size=16))
        assert partial_order_holds(mags, R1_ORDER_EDGES)
        assert partial_order_holds(mags, SPC_ORDER_EDGES)
    assert not partial_order_holds(np.arange(16)[::-1].astype(float), R1_ORDER_EDGES)


def test_optimality_oracles_small_sample():
    assert check_r1_patterns(samples=25, seed=3).passed
    assert check_spc_patterns(samples=25, seed=3).passed


def test_r1_extension_on_increasing_magnitudes():
    llrs = np.arange(1.0, 9.0)
    cands = extend_r1(hard_estimate(llrs), llrs)
    np.testing.assert_allclose([c.delta_pm for c in cands], [0, 1, 2, 3, 3, 4, 4, 5])
    assert cands[1].beta.tolist() == [1, 0, 0, 0, 0, 0, 0, 0]
