"""
Monte-Carlo BLER campaigns: encode -> BPSK -> AWGN -> decode -> compare payload.

Frame f at SNR index s draws all of its randomness from frame_rng(seed, s, f), and
frames are consumed in fixed-size batches in frame order, so a campaign's result does
not depend on how many worker processes evaluate the batches.
"""

import logging
import math
import time
from concurrent.futures import ProcessPoolExecutor
from typing import Iterator, List, Optional, Tuple

import numpy as np

from code_construct import EXTENDED_FAMILIES, DEFAULT_FAMILIES, construct_spec, hybrid_polar_encode
from fsl_decoder import FslDecoder
from polar_core import (CodeSpec, ConstructionTag, awgn_llr, crc_attach, eb_to_es_db, frame_rng,
                        modulate_bpsk, polar_encode)
from schemas import BlerPoint, CampaignConfig, DecoderKind, SnrConvention
from scl_decoder import SclDecoder
from syndrome_tables import TableCache

logger = logging.getLogger(__name__)


# ---------------- Code & decoder setup ----------------
def build_code(config: CampaignConfig) -> CodeSpec:
    code = config.code
    families = EXTENDED_FAMILIES if code.dual_ebch_10 else DEFAULT_FAMILIES
    return construct_spec(code.n, code.k, code.crc_len, code.construction.value,
                          block_len=code.block_len, k_low=code.k_low, k_high=code.k_high,
                          families=families)


def build_decoder(spec: CodeSpec, config: CampaignConfig, cache: Optional[TableCache] = None):
    if config.decoder.kind == DecoderKind.scl:
        return SclDecoder(spec, config.decoder.list_size)
    return FslDecoder(spec, config.decoder.fsl_params(), mode=config.decoder.mode,
                      cache=cache or TableCache())


def encode(data_word, spec: CodeSpec) -> np.ndarray:
    if spec.construction_tag == ConstructionTag.hybrid:
        return hybrid_polar_encode(data_word, spec)
    return polar_encode(data_word, spec)


def channel_snr(snr_db: float, spec: CodeSpec, convention: SnrConvention) -> float:
    """Es/N0 actually simulated for a configured SNR point."""
    if convention == SnrConvention.eb and not math.isinf(snr_db):
        return eb_to_es_db(snr_db, spec.rate)
    return snr_db


# ---------------- Frame simulation ----------------
def simulate_frame(spec: CodeSpec, decoder, es_db: float, seed: int, snr_index: int, frame_index: int) -> bool:
    """True when the decoded payload differs from the transmitted one."""
    rng = frame_rng(seed, snr_index, frame_index)
    payload = rng.integers(0, 2, size=spec.k_payload, dtype=np.uint8)
    codeword = encode(crc_attach(payload, spec.crc_len), spec)
    llrs = awgn_llr(modulate_bpsk(codeword), es_db, rng)
    result = decoder.decode(llrs)
    return not np.array_equal(result.payload, payload)


def simulate_batch(spec: CodeSpec, decoder, es_db: float, seed: int, snr_index: int,
                   first_frame: int, count: int) -> int:
    return sum(simulate_frame(spec, decoder, es_db, seed, snr_index, f)
               for f in range(first_frame, first_frame + count))


_WORKER = {}


def _init_worker(config: CampaignConfig, cache_dir: str):
    spec = build_code(config)
    _WORKER["spec"] = spec
    _WORKER["decoder"] = build_decoder(spec, config, TableCache(cache_dir))


def _worker_batch(es_db: float, seed: int, snr_index: int, first_frame: int, count: int) -> int:
    return simulate_batch(_WORKER["spec"], _WORKER["decoder"], es_db, seed, snr_index, first_frame, count)


def batch_plan(max_frames: int, batch_size: int) -> Iterator[Tuple[int, int]]:
    start = 0
    while start < max_frames:
        count = min(batch_size, max_frames - start)
        yield start, count
        start += count


# ---------------- Campaign ----------------
def run_point(config: CampaignConfig, spec: CodeSpec, decoder, snr_index: int, snr_db: float,
              pool: Optional[ProcessPoolExecutor] = None) -> BlerPoint:
    stopping = config.stopping
    es_db = channel_snr(snr_db, spec, config.channel.convention)
    plan = list(batch_plan(stopping.max_frames, stopping.batch_size))
    frames = errors = 0
    started = time.perf_counter()

    if pool is None:
        for first, count in plan:
            errors += simulate_batch(spec, decoder, es_db, config.seed, snr_index, first, count)
            frames += count
            if errors >= stopping.min_block_errors:
                break
    else:
        window = max(1, config.workers)
        pos = 0
        done = False
        while pos < len(plan) and not done:
            chunk = plan[pos:pos + window]
            futures = [pool.submit(_worker_batch, es_db, config.seed, snr_index, first, count)
                       for first, count in chunk]
            # consume in frame order; batches past the stopping batch are discarded
            for (first, count), future in zip(chunk, futures):
                batch_errors = future.result()
                if done:
                    continue
                errors += batch_errors
                frames += count
                if errors >= stopping.min_block_errors:
                    done = True
            pos += window

    elapsed = time.perf_counter() - started
    point = BlerPoint(snr_db=snr_db, frames=frames, block_errors=errors,
                      bler=errors / frames if frames else 0.0, wall_time=elapsed)
    logger.info(f"[CAMPAIGN] {config.describe()} snr={snr_db:g} dB: {errors}/{frames} errors, "
                f"BLER={point.bler:.3e} ({elapsed:.1f}s)")
    return point


def run_campaign(config: CampaignConfig, cache: Optional[TableCache] = None) -> List[BlerPoint]:
    spec = build_code(config)
    cache = cache or TableCache()
    # builds (and caches on disk) every syndrome table before any worker starts
    decoder = build_decoder(spec, config, cache)
    logger.info(f"[CAMPAIGN] starting {config.describe()}, {len(config.channel.snr_points_db)} SNR points, "
                f"{config.workers} worker(s)")

    points = []
    if config.workers <= 1:
        for i, snr in enumerate(config.channel.snr_points_db):
            points.append(run_point(config, spec, decoder, i, snr))
        return points

    with ProcessPoolExecutor(max_workers=config.workers, initializer=_init_worker,
                             initargs=(config, cache.directory)) as pool:
        for i, snr in enumerate(config.channel.snr_points_db):
            points.append(run_point(config, spec, decoder, i, snr, pool=pool))
    return points
