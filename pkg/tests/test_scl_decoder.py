import math

import numpy as np
import pytest

import gf2
from code_construct import construct_hybrid
from errors import InvalidArgumentError
from polar_core import CodeSpec, awgn_llr, crc_attach, frame_rng, modulate_bpsk, polar_encode
from scl_decoder import (SclDecoder, beta_update, f_update, g_update, pm_update, prune_candidates,
                         scl_decode, select_final_path)


def test_f_update_min_sum_with_zero_sign_positive():
    np.testing.assert_allclose(f_update([-3.0, 2.0, 0.0], [2.0, 5.0, -1.0]), [-2.0, 2.0, -0.0])
    assert f_update(0.0, 4.0) == 0.0


def test_g_update():
    np.testing.assert_allclose(g_update([2.0, 2.0], [1.0, 1.0], [0, 1]), [3.0, -1.0])


def test_beta_update():
    np.testing.assert_array_equal(beta_update([1, 0], [1, 1]), [0, 1, 1, 1])
    with pytest.raises(InvalidArgumentError):
        beta_update([1, 0], [1])


def test_pm_update_hardware_rule():
    assert pm_update(1.0, -2.5, 1) == 1.0
    assert pm_update(1.0, -2.5, 0) == 3.5
    assert pm_update(0.0, 0.0, 1) == 0.0


def test_prune_tie_rule():
    keep = prune_candidates(np.array([1.0, 1.0, 0.0, 1.0]), np.array([1, 0, 1, 0]), np.array([0, 1, 1, 0]), 3)
    assert keep.tolist() == [2, 3, 1]


def test_select_final_path_prefers_crc_valid():
    spec = CodeSpec.pw(32, 8, crc_len=6)
    good = crc_attach(np.ones(8, dtype=np.uint8), 6)
    bad = good.copy()
    bad[0] ^= 1
    result = select_final_path(np.array([0.5, 1.5]), np.stack([bad, good]), spec)
    assert result.crc_ok
    assert result.selected_path_rank == 1
    assert result.final_pm == 1.5
    np.testing.assert_array_equal(result.payload, np.ones(8))


def test_select_final_path_without_valid_crc():
    spec = CodeSpec.pw(32, 8, crc_len=6)
    words = np.zeros((2, 14), dtype=np.uint8)
    words[:, 0] = 1
    result = select_final_path(np.array([2.0, 1.0]), words, spec)
    assert not result.crc_ok
    assert result.final_pm == 1.0


@pytest.mark.parametrize("list_size", [1, 4, 8])
def test_noiseless_decoding(list_size, spec_small, rng):
    payload = rng.integers(0, 2, size=spec_small.k_payload, dtype=np.uint8)
    llrs = awgn_llr(modulate_bpsk(polar_encode(crc_attach(payload, 16), spec_small)), math.inf, 0)
    result = scl_decode(llrs, spec_small, list_size)
    assert result.crc_ok
    assert result.final_pm == 0.0
    np.testing.assert_array_equal(result.payload, payload)


def test_full_list_reaches_ml_metric(rng):
    spec = CodeSpec.pw(16, 5, crc_len=0)
    codewords = polar_encode(gf2.mask_table(5), spec)
    decoder = SclDecoder(spec, 32)
    for _ in range(50):
        llrs = rng.normal(1.0, 1.0, size=16) * 2.0
        best = ((codewords != (llrs < 0)) @ np.abs(llrs)).min()
        assert decoder.decode(llrs).final_pm == pytest.approx(best, abs=1e-9)


def test_observer_sees_bounded_list(spec_small, rng):
    kept_sizes = []
    decoder = SclDecoder(spec_small, 4, observer=lambda i, cand, kept: kept_sizes.append((cand.size, kept.size)))
    decoder.decode(rng.normal(1.0, 1.0, size=64))
    assert len(kept_sizes) == spec_small.k_total
    assert all(kept <= 4 and cand <= 8 for cand, kept in kept_sizes)


def test_rejects_bad_inputs(spec_small):
    with pytest.raises(InvalidArgumentError):
        SclDecoder(spec_small, 0)
    with pytest.raises(InvalidArgumentError):
        SclDecoder(construct_hybrid(64, 16), 8)
    with pytest.raises(InvalidArgumentError):
        SclDecoder(spec_small, 8).decode(np.zeros(32))


def sc_reference(llrs, frozen):
    """Plain recursive min-sum SC decoder; returns the decided u vector."""
    def node(alpha, frozen):
        if alpha.size == 1:
            u = np.array([0 if frozen[0] else int(alpha[0] < 0)], dtype=np.uint8)
            return u, u
        half = alpha.size // 2
        a, b = alpha[:half], alpha[half:]
        f = np.where(a < 0, -1.0, 1.0) * np.where(b < 0, -1.0, 1.0) * np.minimum(np.abs(a), np.abs(b))
        beta_l, u_l = node(f, frozen[:half])
        beta_r, u_r = node(b + (1.0 - 2.0 * beta_l) * a, frozen[half:])
        return np.concatenate([beta_l ^ beta_r, beta_r]), np.concatenate([u_l, u_r])

    return node(np.asarray(llrs, dtype=np.float64), np.asarray(frozen))[1]


def test_list_of_one_is_successive_cancellation():
    spec = CodeSpec.pw(64, 16, crc_len=6)
    decoder = SclDecoder(spec, 1)
    info = list(spec.info_set)
    for f in range(300):
        rng = frame_rng(41, 0, f)
        payload = rng.integers(0, 2, size=spec.k_payload, dtype=np.uint8)
        llrs = awgn_llr(modulate_bpsk(polar_encode(crc_attach(payload, 6), spec)), 1.0, rng)
        u = sc_reference(llrs, spec.frozen_mask)
        np.testing.assert_array_equal(decoder.decode(llrs).data_word, u[info], err_msg=f"frame {f}")


def test_survivors_are_the_smallest_candidates(spec_small, rng):
    seen = []
    decoder = SclDecoder(spec_small, 4, observer=lambda i, cand, kept: seen.append((cand.copy(), kept.copy())))
    for _ in range(5):
        decoder.decode(rng.normal(1.0, 1.5, size=64))
    assert seen
    for cand, kept in seen:
        np.testing.assert_allclose(kept, np.sort(cand)[:min(4, cand.size)])
