import os
import struct
import zlib

import numpy as np
import pytest

import gf2
from code_construct import hybrid_outer_generator
from errors import InvalidArgumentError, TableFormatError
from polar_core import polar_transform
from syndrome_tables import (TableCache, build_table, format_syndrome, load_table, polar_parity_check,
                             serialize_table, syndrome_value, table_digest)
from verify_suite import GOLDEN_SYNDROME_ROWS, check_syndrome_table

FROZEN_01 = (True, True, False, False, False, False, False, False)


@pytest.fixture(scope="module")
def table_b8():
    return build_table(8, FROZEN_01, 4)


def test_table_b8_rows(table_b8):
    assert table_b8.n_rows == 4
    assert table_b8.k_local == 6
    for value, row in GOLDEN_SYNDROME_ROWS.items():
        assert table_b8.patterns_for(value) == row


def test_frozen_mask_as_integer_matches_sequence(table_b8):
    assert build_table(8, 0b11, 4) == table_b8


def test_double_error_lands_in_row_10():
    h = polar_parity_check(8, FROZEN_01)
    beta = gf2.int_to_bits(0x03, 8)
    value = int(syndrome_value(beta, h))
    assert value == 2
    assert format_syndrome(value, 2) == "10"


def test_single_error_row_01(table_b8):
    assert table_b8.patterns_for(1) == (0x01, 0x04, 0x10, 0x40)


def test_codewords_have_zero_syndrome(rng):
    h = polar_parity_check(16, 0b0000000000010111)
    frozen = [0, 1, 2, 4]
    u = rng.integers(0, 2, size=(20, 16), dtype=np.uint8)
    u[:, frozen] = 0
    assert not syndrome_value(polar_transform(u), h).any()


def test_every_pattern_sits_in_its_coset():
    table = build_table(16, 0b0000000000010111, 8)
    bits = ((table.pattern_array()[..., None] >> np.arange(16)) & 1).astype(np.uint8)
    synd = syndrome_value(bits, table.parity_check)
    np.testing.assert_array_equal(synd, np.repeat(np.arange(table.n_rows)[:, None], 8, axis=1))
    weights = bits.sum(axis=-1)
    assert (np.diff(weights, axis=1) >= 0).all()


def test_rate_one_block_has_single_row():
    table = build_table(8, 0, 4)
    assert table.n_rows == 1
    assert table.patterns_for(0) == (0x00, 0x01, 0x02, 0x04)


def test_explicit_parity_check_for_outer_code():
    code = hybrid_outer_generator(14)
    table = build_table(16, (False,) * 16, 2, parity_check=code.parity_check)
    assert table.explicit_h
    assert table.n_rows == 4
    assert table.patterns_for(0)[0] == 0
    bits = ((table.pattern_array()[..., None] >> np.arange(16)) & 1).astype(np.uint8)
    synd = syndrome_value(bits, code.parity_check)
    np.testing.assert_array_equal(synd, np.repeat(np.arange(4)[:, None], 2, axis=1))


def test_invalid_l_sd():
    with pytest.raises(InvalidArgumentError):
        build_table(8, FROZEN_01, 0)


def test_truncated_rows_are_flagged():
    table = build_table(2, 0b01, 4)
    assert table.truncated
    assert all(len(row) == 2 for row in table.rows)
    assert load_table(serialize_table(table)) == table


def test_serialization_round_trip(table_b8):
    assert load_table(serialize_table(table_b8)) == table_b8


def test_serialization_round_trip_explicit_h():
    code = hybrid_outer_generator(13)
    table = build_table(16, (False,) * 16, 4, parity_check=code.parity_check)
    loaded = load_table(serialize_table(table))
    assert loaded == table
    assert loaded.explicit_h


def test_corrupted_file_is_rejected(table_b8):
    data = bytearray(serialize_table(table_b8))
    data[20] ^= 0xFF
    with pytest.raises(TableFormatError):
        load_table(bytes(data))


def test_truncated_file_is_rejected(table_b8):
    with pytest.raises(TableFormatError):
        load_table(serialize_table(table_b8)[:-9])
    with pytest.raises(TableFormatError):
        load_table(b"PSYN")


def test_bad_magic_is_rejected(table_b8):
    body = b"XXXX" + serialize_table(table_b8)[4:-4]
    with pytest.raises(TableFormatError, match="magic"):
        load_table(body + struct.pack("<I", zlib.crc32(body) & 0xFFFFFFFF))


def test_cache_writes_once_and_reloads(table_dir, table_b8):
    cache = TableCache(table_dir)
    first = cache.get(8, FROZEN_01, 4)
    path = cache.path_for(table_digest(8, FROZEN_01, 4))
    assert os.path.exists(path)
    assert first == table_b8
    assert cache.get(8, FROZEN_01, 4) is first
    assert TableCache(table_dir).get(8, FROZEN_01, 4) == table_b8


def test_cache_rebuilds_unreadable_file(table_dir, table_b8):
    cache = TableCache(table_dir)
    path = cache.path_for(table_digest(8, FROZEN_01, 4))
    os.makedirs(table_dir, exist_ok=True)
    with open(path, "wb") as fh:
        fh.write(b"garbage")
    assert cache.get(8, FROZEN_01, 4) == table_b8


def test_golden_check_names_the_corrupted_row(table_b8):
    rows = list(table_b8.rows)
    rows[2] = (0x03, 0x09, 0x21, 0x41)
    corrupted = type(table_b8)(block_len=8, frozen_mask=table_b8.frozen_mask, l_sd=4,
                               parity_check=table_b8.parity_check, rows=rows)
    result = check_syndrome_table(corrupted)
    assert not result.passed
    assert "row 10" in result.detail
    assert check_syndrome_table().passed


@pytest.mark.parametrize("block_len,frozen", [(8, 0b11), (16, 0b0000000000010111)])
def test_first_pattern_is_a_minimum_weight_coset_leader(block_len, frozen):
    table = build_table(block_len, frozen, 4)
    words = gf2.mask_table(block_len)
    synd = syndrome_value(words, table.parity_check)
    weights = words.sum(axis=1)
    lightest = np.full(table.n_rows, block_len + 1)
    np.minimum.at(lightest, synd, weights)
    leaders = table.pattern_array()[:, 0]
    assert [bin(int(p)).count("1") for p in leaders] == lightest.tolist()


def test_half_rate_sixteen_bit_table_size():
    table = build_table(16, 0x00FF, 8)
    assert table.k_local == 8
    assert table.n_rows == 256
    assert table.pattern_array().shape == (256, 8)
    assert (table.pattern_array() >= 0).all()
