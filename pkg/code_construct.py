"""
Code construction on top of the PW polar code:

  * information-bit re-adjustment that removes medium-rate length-B blocks,
  * hybrid-polar codes whose length-16 outer blocks use simplex / eBCH / dual codes,
  * distance spectra of the outer codes and a text descriptor for archived campaigns.
"""

import enum
import json
import logging
from dataclasses import dataclass
from functools import cached_property
from typing import Dict, List, Optional

import numpy as np

import gf2
from errors import ExhaustiveLimitError, InfeasibleAdjustmentError, InvalidArgumentError
from fsl_nodes import FslParams, special_kind
from polar_core import CodeSpec, ConstructionTag, construct_pw, polar_transform, pw_weights

logger = logging.getLogger(__name__)

OUTER_LEN = 16
SPECTRUM_LIMIT = 20


class OuterFamily(str, enum.Enum):
    polar = "polar"
    simplex = "simplex"
    ebch = "ebch"
    dual_ebch = "dual-ebch"
    dual_simplex = "dual-simplex"


def _rows(*lines: str) -> np.ndarray:
    return np.array([[int(ch) for ch in line] for line in lines], dtype=np.uint8)


S2 = _rows("110", "101")
S3 = _rows("1111000", "1100110", "1010101")
S4 = _rows("111111110000000", "111100001111000", "110011001100110", "101010101010101")

G2 = np.concatenate([S2] * 5 + [_rows("1", "1")], axis=1)
G3 = np.concatenate([S3, S3, _rows("11", "11", "10")], axis=1)
G4 = np.concatenate([S4, _rows("1", "1", "1", "1")], axis=1)
G6 = _rows(
    "0010010011101000",
    "1111111100000000",
    "1111000011110000",
    "1100110011001100",
    "1010101010101010",
    "1111111111111111",
)
G7 = np.concatenate([_rows("0111001000101000"), G6], axis=0)

BASE_GENERATORS = {2: G2, 3: G3, 4: G4, 6: G6, 7: G7}
# dimension k of a dual code -> base primal whose null space generates it
DUAL_PRIMALS = {9: G7, 10: G6, 12: G4, 13: G3, 14: G2}

DEFAULT_FAMILIES: Dict[int, OuterFamily] = {
    2: OuterFamily.simplex, 3: OuterFamily.simplex, 4: OuterFamily.simplex,
    6: OuterFamily.ebch, 7: OuterFamily.ebch,
    9: OuterFamily.dual_ebch,
    12: OuterFamily.dual_simplex, 13: OuterFamily.dual_simplex, 14: OuterFamily.dual_simplex,
}
EXTENDED_FAMILIES: Dict[int, OuterFamily] = {**DEFAULT_FAMILIES, 10: OuterFamily.dual_ebch}


@dataclass(frozen=True, eq=False)
class OuterCode:
    family: OuterFamily
    generator: np.ndarray

    @property
    def k_local(self) -> int:
        return self.generator.shape[0]

    @property
    def block_len(self) -> int:
        return self.generator.shape[1]

    @cached_property
    def parity_check(self) -> np.ndarray:
        return gf2.nullspace(self.generator)

    @cached_property
    def right_inverse(self) -> np.ndarray:
        return gf2.right_inverse(self.generator)

    def encode(self, message) -> np.ndarray:
        m = np.asarray(message, dtype=np.int64)
        return ((m @ self.generator.astype(np.int64)) & 1).astype(np.uint8)

    def recover(self, codeword) -> np.ndarray:
        c = np.asarray(codeword, dtype=np.int64)
        return ((c @ self.right_inverse.astype(np.int64)) & 1).astype(np.uint8)


@dataclass
class WeightSpectrum:
    counts: np.ndarray

    @property
    def min_distance(self) -> int:
        nonzero = np.nonzero(self.counts[1:])[0]
        return int(nonzero[0]) + 1 if nonzero.size else 0

    @property
    def a_dmin(self) -> int:
        d = self.min_distance
        return int(self.counts[d]) if d else 0

    def as_dict(self) -> Dict[int, int]:
        return {int(w): int(c) for w, c in enumerate(self.counts) if c}


def polar_outer_generator(k_local: int, block_len: int = OUTER_LEN, positions=None) -> np.ndarray:
    kernel = polar_transform(np.eye(block_len, dtype=np.uint8))
    if positions is None:
        positions = construct_pw(block_len, k_local)
    return kernel[list(positions)]


def hybrid_outer_generator(k_local: int, families: Optional[Dict[int, OuterFamily]] = None) -> OuterCode:
    if k_local < 0 or k_local > OUTER_LEN:
        raise InvalidArgumentError(f"k_local must be in [0, {OUTER_LEN}], got {k_local}")
    families = DEFAULT_FAMILIES if families is None else families
    family = families.get(k_local, OuterFamily.polar)
    if family in (OuterFamily.simplex, OuterFamily.ebch):
        generator = BASE_GENERATORS.get(k_local)
    elif family in (OuterFamily.dual_simplex, OuterFamily.dual_ebch):
        primal = DUAL_PRIMALS.get(k_local)
        generator = gf2.nullspace(primal) if primal is not None else None
    else:
        generator = polar_outer_generator(k_local)
    if generator is None:
        raise InvalidArgumentError(f"No {family.value} outer code of dimension {k_local}")
    return OuterCode(family=family, generator=generator.copy())


def weight_spectrum(code: OuterCode, limit: int = SPECTRUM_LIMIT) -> WeightSpectrum:
    if code.k_local > limit:
        raise ExhaustiveLimitError(f"refusing to enumerate 2^{code.k_local} codewords (limit 2^{limit})")
    messages = gf2.mask_table(code.k_local)
    weights = code.encode(messages).sum(axis=1)
    return WeightSpectrum(counts=np.bincount(weights, minlength=code.block_len + 1))


# ---------------------------------------------------------------------------
# Block rates and re-adjustment
# ---------------------------------------------------------------------------
def block_info_counts(spec: CodeSpec, block_len: int) -> np.ndarray:
    if spec.n_mother % block_len:
        raise InvalidArgumentError(f"block_len {block_len} does not divide N={spec.n_mother}")
    return spec.info_mask.reshape(-1, block_len).sum(axis=1)


def first_active_block(spec: CodeSpec, block_len: int) -> int:
    return spec.first_info_bit // block_len


def block_rate_histogram(spec: CodeSpec, block_len: int, include_skipped: bool = False) -> Dict[int, int]:
    """
    K_B -> number of length-block_len blocks. Blocks lying entirely before the first
    information bit are skipped by the decoder and left out unless include_skipped.
    """
    counts = block_info_counts(spec, block_len)
    if not include_skipped:
        counts = counts[first_active_block(spec, block_len):]
    values, freq = np.unique(counts, return_counts=True)
    return {int(v): int(f) for v, f in zip(values, freq)}


def adjust_info_bits(spec: CodeSpec, block_len: int, k_low: int, k_high: int) -> CodeSpec:
    """
    Moves every block with k_low < K_B < k_high to k_low or k_high (whichever is closer,
    k_high on a tie). If the total changed, blocks sitting at k_low (surplus) or k_high
    (deficit) step once to k_low-1 or k_high+1, adjusted blocks first, each in ascending
    index order, until the total matches. Each block is then filled with its most
    reliable positions. Blocks outside [k_low, k_high] keep their count.
    """
    if not 0 <= k_low < k_high <= block_len:
        raise InvalidArgumentError(f"need 0 <= k_low < k_high <= {block_len}, got {k_low}, {k_high}")
    original = block_info_counts(spec, block_len)
    target = int(original.sum())
    counts = original.copy()
    adjusted = np.zeros(counts.size, dtype=bool)

    for b, k in enumerate(original):
        if k_low < k < k_high:
            counts[b] = k_low if k - k_low < k_high - k else k_high
            adjusted[b] = True

    total = int(counts.sum())
    if total != target:
        step = -1 if total > target else 1
        side = k_low if step < 0 else k_high
        at_side = [b for b in range(counts.size) if counts[b] == side and 0 <= side + step <= block_len]
        for b in sorted(at_side, key=lambda b: (not adjusted[b], b)):
            if total == target:
                break
            counts[b] = side + step
            total += step
        if total != target:
            raise InfeasibleAdjustmentError(
                f"cannot rebalance {total} -> {target} info bits with one step per block at {side}")

    weights = pw_weights(spec.n_mother)
    info: List[int] = []
    for b, k in enumerate(counts):
        idx = np.arange(b * block_len, (b + 1) * block_len)
        order = idx[np.lexsort((idx, weights[idx]))]
        info.extend(int(i) for i in order[block_len - int(k):] if k)
    moved = int(np.abs(counts - original).sum())
    logger.info(f"[CONSTRUCT] re-adjusted {int(adjusted.sum())} medium-rate blocks, {moved} bit moves")
    params = {**spec.construction_params, "block_len": block_len, "k_low": k_low, "k_high": k_high}
    return CodeSpec(n_mother=spec.n_mother, k_payload=spec.k_payload, crc_len=spec.crc_len,
                    info_set=tuple(sorted(info)), construction_tag=ConstructionTag.adjusted,
                    construction_params=params)


def max_table_rows(spec: CodeSpec, params: FslParams) -> int:
    """
    Largest syndrome-table row count 2^{B-K_B} a decoder has to provision: taken over the
    non-special length-B blocks with K_B >= T + log2(L_sd), the boundary block included.
    This is the provisioning count of the complexity analysis; the decoder itself classifies
    the boundary block as ML and never builds that table (see table_footprint for the real size).
    """
    block_len = params.block_len
    frozen = spec.frozen_mask.reshape(-1, block_len)
    counts = block_info_counts(spec, block_len)
    rows = 0
    for b in range(first_active_block(spec, block_len), counts.size):
        if special_kind(frozen[b]) is not None:
            continue
        if counts[b] >= params.ml_threshold:
            rows = max(rows, 1 << (block_len - int(counts[b])))
    return rows


# ---------------------------------------------------------------------------
# Hybrid-polar codes
# ---------------------------------------------------------------------------
def family_map(spec: CodeSpec) -> Dict[int, OuterFamily]:
    raw = spec.construction_params.get("families")
    if raw is None:
        return dict(DEFAULT_FAMILIES)
    return {int(k): OuterFamily(v) for k, v in raw.items()}


def construct_hybrid(n_mother: int, k_payload: int, crc_len: int = 16,
                     families: Optional[Dict[int, OuterFamily]] = None) -> CodeSpec:
    """Block rates come from the original PW construction; the families pick each block's outer code."""
    families = DEFAULT_FAMILIES if families is None else families
    base = CodeSpec.pw(n_mother, k_payload, crc_len)
    params = {"block_len": OUTER_LEN, "families": {str(k): f.value for k, f in sorted(families.items())}}
    return CodeSpec(n_mother=n_mother, k_payload=k_payload, crc_len=crc_len, info_set=base.info_set,
                    construction_tag=ConstructionTag.hybrid, construction_params=params)


def outer_codes_for(spec: CodeSpec) -> Dict[int, OuterCode]:
    """Block index -> outer code for every length-16 block that does not keep its polar code."""
    if spec.construction_tag != ConstructionTag.hybrid:
        return {}
    families = family_map(spec)
    codes: Dict[int, OuterCode] = {}
    cache: Dict[int, OuterCode] = {}
    for b, k in enumerate(block_info_counts(spec, OUTER_LEN)):
        k = int(k)
        if families.get(k, OuterFamily.polar) == OuterFamily.polar:
            continue
        if k not in cache:
            cache[k] = hybrid_outer_generator(k, families)
        codes[b] = cache[k]
    return codes


def hybrid_polar_encode(data_word, spec: CodeSpec, block_len: int = OUTER_LEN) -> np.ndarray:
    """
    Outer-encodes each length-block_len block (data bits in ascending global index feed
    generator rows top to bottom), concatenates, then applies the inner polar stages.
    Blocks without an outer code are plain polar blocks.
    """
    data = np.asarray(data_word, dtype=np.uint8)
    if data.size != spec.k_total:
        raise InvalidArgumentError(f"data word must have {spec.k_total} bits, got {data.size}")
    codes = outer_codes_for(spec) if block_len == OUTER_LEN else {}
    kernel = polar_transform(np.eye(block_len, dtype=np.uint8))
    info = np.array(spec.info_set, dtype=np.int64)
    v = np.zeros(spec.n_mother, dtype=np.uint8)
    for b in range(spec.n_mother // block_len):
        lo, hi = b * block_len, (b + 1) * block_len
        sel = (info >= lo) & (info < hi)
        if not sel.any():
            continue
        message = data[sel]
        if b in codes:
            v[lo:hi] = codes[b].encode(message)
        else:
            generator = kernel[info[sel] - lo]
            v[lo:hi] = (message.astype(np.int64) @ generator.astype(np.int64)) & 1
    return polar_transform(v, first_stage=block_len.bit_length() - 1)


# ---------------------------------------------------------------------------
# Descriptors
# ---------------------------------------------------------------------------
def construct_spec(n_mother: int, k_payload: int, crc_len: int = 16, construction: str = "pw",
                   block_len: int = 16, k_low: Optional[int] = None, k_high: Optional[int] = None,
                   families: Optional[Dict[int, OuterFamily]] = None) -> CodeSpec:
    tag = ConstructionTag(construction)
    if tag == ConstructionTag.pw:
        return CodeSpec.pw(n_mother, k_payload, crc_len)
    if tag == ConstructionTag.adjusted:
        if k_low is None or k_high is None:
            raise InvalidArgumentError("adjusted construction needs k_low and k_high")
        return adjust_info_bits(CodeSpec.pw(n_mother, k_payload, crc_len), block_len, k_low, k_high)
    return construct_hybrid(n_mother, k_payload, crc_len, families)


def describe_construction(spec: CodeSpec, block_len: int = OUTER_LEN) -> str:
    counts = block_info_counts(spec, block_len)
    families = family_map(spec) if spec.construction_tag == ConstructionTag.hybrid else {}
    blocks = " ".join(f"{b}:{int(k)}/{families.get(int(k), OuterFamily.polar).value}"
                      for b, k in enumerate(counts))
    lines = [
        f"N: {spec.n_mother}",
        f"K: {spec.k_payload}",
        f"crc_len: {spec.crc_len}",
        f"construction: {spec.construction_tag.value}",
        f"params: {json.dumps(spec.construction_params, sort_keys=True)}",
        f"info_set: {' '.join(str(i) for i in spec.info_set)}",
        f"blocks{block_len}: {blocks}",
    ]
    return "\n".join(lines) + "\n"


def parse_construction(text: str) -> CodeSpec:
    fields = {}
    for line in text.splitlines():
        if not line.strip():
            continue
        key, _, value = line.partition(":")
        fields[key.strip()] = value.strip()
    try:
        return CodeSpec(
            n_mother=int(fields["N"]),
            k_payload=int(fields["K"]),
            crc_len=int(fields["crc_len"]),
            info_set=tuple(int(i) for i in fields["info_set"].split()),
            construction_tag=ConstructionTag(fields["construction"]),
            construction_params=json.loads(fields.get("params") or "{}"),
        )
    except (KeyError, ValueError) as e:
        raise InvalidArgumentError(f"malformed construction descriptor: {e}") from e
