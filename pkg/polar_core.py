"""
Mother-code arithmetic shared by every encoder and decoder:
polar transform, CRC attachment, polarization-weight construction, BPSK over AWGN.

Bit vectors are numpy uint8 arrays of 0/1. LLRs are float64 with the convention
positive LLR <=> bit 0 more likely.
"""

import enum
import math
from typing import Any, Dict, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from errors import InvalidArgumentError

PW_BETA = 2 ** 0.25
NOISELESS_LLR = 1e6


class ConstructionTag(str, enum.Enum):
    pw = "pw"
    adjusted = "adjusted"
    hybrid = "hybrid"


def is_power_of_two(value: int) -> bool:
    return value >= 1 and (value & (value - 1)) == 0


class CodeSpec(BaseModel):
    """
    (N, K) polar code with its information set.
    The CRC bits are appended to, but not counted in, the K payload bits:
    |info_set| = k_payload + crc_len.
    """
    model_config = ConfigDict(frozen=True)

    n_mother: int
    k_payload: int
    crc_len: int = 16
    info_set: Tuple[int, ...]
    construction_tag: ConstructionTag = ConstructionTag.pw
    construction_params: Dict[str, Any] = Field(default_factory=dict)

    @model_validator(mode="after")
    def check_invariants(self):
        n = self.n_mother
        if n < 2 or not is_power_of_two(n):
            raise ValueError(f"n_mother must be a power of two >= 2, got {n}")
        if self.k_payload < 0 or self.crc_len < 0:
            raise ValueError("k_payload and crc_len must be non-negative")
        info = self.info_set
        if len(info) != self.k_payload + self.crc_len:
            raise ValueError(
                f"info_set has {len(info)} indices, expected {self.k_payload + self.crc_len}"
            )
        if len(set(info)) != len(info) or any(i < 0 or i >= n for i in info):
            raise ValueError("info_set indices must be unique and inside [0, N)")
        if list(info) != sorted(info):
            raise ValueError("info_set must be sorted")
        return self

    @classmethod
    def pw(cls, n_mother: int, k_payload: int, crc_len: int = 16) -> "CodeSpec":
        info = construct_pw(n_mother, k_payload + crc_len)
        return cls(n_mother=n_mother, k_payload=k_payload, crc_len=crc_len,
                   info_set=tuple(int(i) for i in info), construction_tag=ConstructionTag.pw)

    @property
    def n_stages(self) -> int:
        return self.n_mother.bit_length() - 1

    @property
    def k_total(self) -> int:
        return self.k_payload + self.crc_len

    @property
    def rate(self) -> float:
        return self.k_payload / self.n_mother

    @property
    def info_mask(self) -> np.ndarray:
        mask = np.zeros(self.n_mother, dtype=bool)
        mask[list(self.info_set)] = True
        return mask

    @property
    def frozen_mask(self) -> np.ndarray:
        return ~self.info_mask

    @property
    def first_info_bit(self) -> int:
        return self.info_set[0] if self.info_set else self.n_mother


# ---------------------------------------------------------------------------
# Polar transform
# ---------------------------------------------------------------------------
def polar_transform(u, first_stage: int = 0) -> np.ndarray:
    """
    c = u · F^{⊗n} over GF(2) on the last axis, F = [1 0; 1 1].
    first_stage > 0 applies only the butterfly stages whose half-span is at least
    2^first_stage, i.e. (F^{⊗(n-s)} ⊗ I_{2^s}), the inner stages above length-2^s blocks.
    """
    x = np.array(u, dtype=np.uint8, copy=True)
    size = x.shape[-1]
    if not is_power_of_two(size):
        raise InvalidArgumentError(f"polar_transform length must be a power of two, got {size}")
    half = 1 << first_stage
    lead = x.shape[:-1]
    while half < size:
        view = x.reshape(lead + (-1, 2, half))
        view[..., 0, :] ^= view[..., 1, :]
        half *= 2
    return x


def polar_encode(data_bits, spec: CodeSpec) -> np.ndarray:
    """Places the K+crc data word on the information set and applies the transform."""
    data = np.asarray(data_bits, dtype=np.uint8)
    if data.shape[-1] != spec.k_total:
        raise InvalidArgumentError(f"data word must have {spec.k_total} bits, got {data.shape[-1]}")
    u = np.zeros(data.shape[:-1] + (spec.n_mother,), dtype=np.uint8)
    u[..., list(spec.info_set)] = data
    return polar_transform(u)


# ---------------------------------------------------------------------------
# CRC
# ---------------------------------------------------------------------------
# width -> (polynomial without the leading term, register init)
CRC_POLYNOMIALS = {
    6: (0x21, 0x00),
    11: (0x621, 0x000),
    16: (0x1021, 0xFFFF),   # CRC-16/CCITT-FALSE
    24: (0x864CFB, 0x000000),
}


class CrcCodec:
    """Non-reflected bitwise CRC, message fed MSB-first, no final xor."""

    def __init__(self, width: int = 16, poly: Optional[int] = None, init: Optional[int] = None):
        if width not in CRC_POLYNOMIALS and poly is None:
            raise InvalidArgumentError(f"No CRC polynomial registered for width {width}")
        default_poly, default_init = CRC_POLYNOMIALS.get(width, (poly, 0))
        self.width = width
        self.poly = default_poly if poly is None else poly
        self.init = default_init if init is None else init
        self._top = 1 << (width - 1)
        self._mask = (1 << width) - 1

    def remainder(self, bits) -> int:
        reg = self.init
        for b in np.asarray(bits, dtype=np.uint8).tolist():
            feedback = bool(reg & self._top) ^ bool(b)
            reg = (reg << 1) & self._mask
            if feedback:
                reg ^= self.poly
        return reg

    def compute(self, bits) -> np.ndarray:
        reg = self.remainder(bits)
        return np.array([(reg >> (self.width - 1 - i)) & 1 for i in range(self.width)], dtype=np.uint8)

    def attach(self, payload) -> np.ndarray:
        payload = np.asarray(payload, dtype=np.uint8)
        return np.concatenate([payload, self.compute(payload)])

    def check(self, bits_with_crc) -> bool:
        bits = np.asarray(bits_with_crc, dtype=np.uint8)
        if bits.size < self.width:
            return False
        return bool(np.array_equal(self.compute(bits[:-self.width]), bits[-self.width:]))


def crc_attach(payload, crc_len: int = 16, k_payload: Optional[int] = None) -> np.ndarray:
    payload = np.asarray(payload, dtype=np.uint8)
    if k_payload is not None and payload.size != k_payload:
        raise InvalidArgumentError(f"payload must have {k_payload} bits, got {payload.size}")
    if crc_len == 0:
        return payload.copy()
    return CrcCodec(crc_len).attach(payload)


def crc_check(bits_with_crc, crc_len: int = 16) -> bool:
    if crc_len == 0:
        return True
    return CrcCodec(crc_len).check(bits_with_crc)


# ---------------------------------------------------------------------------
# Polarization-weight construction
# ---------------------------------------------------------------------------
def pw_weights(n_mother: int) -> np.ndarray:
    """w(i) = Σ_j b_j · β^j with b_j the bits of i and β = 2^{1/4}."""
    if not is_power_of_two(n_mother):
        raise InvalidArgumentError(f"N must be a power of two, got {n_mother}")
    n = n_mother.bit_length() - 1
    idx = np.arange(n_mother)
    bits = (idx[:, None] >> np.arange(n)) & 1
    return bits @ (PW_BETA ** np.arange(n))


def reliability_order(n_mother: int) -> np.ndarray:
    """Sub-channel indices from least to most reliable; equal weights put the higher index later."""
    idx = np.arange(n_mother)
    return np.lexsort((idx, pw_weights(n_mother)))


def construct_pw(n_mother: int, k_total: int) -> np.ndarray:
    if k_total < 0 or k_total > n_mother:
        raise InvalidArgumentError(f"k_total must be in [0, {n_mother}], got {k_total}")
    order = reliability_order(n_mother)
    chosen = order[n_mother - k_total:]
    return np.sort(chosen)


# ---------------------------------------------------------------------------
# Channel
# ---------------------------------------------------------------------------
def modulate_bpsk(c) -> np.ndarray:
    return 1.0 - 2.0 * np.asarray(c, dtype=np.float64)


def noise_variance(snr_db: float) -> float:
    """σ² for unit-energy BPSK at Es/N0 = snr_db."""
    return 1.0 / (2.0 * 10.0 ** (snr_db / 10.0))


def eb_to_es_db(eb_db: float, rate: float) -> float:
    return eb_db + 10.0 * math.log10(rate)


def frame_rng(seed: int, *keys: int) -> np.random.Generator:
    """Counter-based per-frame substream keyed by (seed, *keys)."""
    return np.random.Generator(np.random.Philox(np.random.SeedSequence([int(seed), *[int(k) for k in keys]])))


def awgn_llr(x, snr_db: float, rng_seed) -> np.ndarray:
    """
    y = x + n with n ~ Normal(0, σ²), σ² = 1 / (2·10^(snr_db/10)); returns 2y/σ².
    rng_seed may be an int, a sequence of ints or a numpy Generator.
    snr_db = +inf is the noiseless limit and returns x · NOISELESS_LLR.
    """
    x = np.asarray(x, dtype=np.float64)
    if math.isinf(snr_db) and snr_db > 0:
        return x * NOISELESS_LLR
    rng = rng_seed if isinstance(rng_seed, np.random.Generator) else np.random.default_rng(rng_seed)
    sigma2 = noise_variance(snr_db)
    y = x + rng.normal(0.0, math.sqrt(sigma2), size=x.shape)
    return 2.0 * y / sigma2
