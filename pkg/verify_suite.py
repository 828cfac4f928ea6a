"""
Release checks: flip-pattern optimality oracles, the B=8 syndrome table, the outer-code
distance spectra, SCL against exhaustive ML on tiny codes and the CRC check value.

Every check returns a CheckResult; run_verify() runs the selection and times each one.
"""

import logging
import time
from dataclasses import dataclass, field
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

import gf2
from code_construct import (EXTENDED_FAMILIES, OuterCode, OuterFamily, hybrid_outer_generator,
                            polar_outer_generator, weight_spectrum)
from errors import InvalidArgumentError
from flip_patterns import (R1_ORDER_EDGES, R1_PATTERNS, SPC_EVEN_PATTERNS, SPC_ODD_PATTERNS,
                           SPC_ORDER_EDGES, extend_r1, extend_spc, hard_estimate, partial_order_holds)
from fsl_decoder import block_pm_update
from polar_core import CodeSpec, CrcCodec, awgn_llr, frame_rng, modulate_bpsk, polar_encode
from scl_decoder import SclDecoder
from syndrome_tables import SyndromeTable, build_table, format_syndrome, syndrome_value

logger = logging.getLogger(__name__)

ORACLE_BLOCK = 16
KEEP = 8

# B=8, frozen positions {0,1}, four patterns per syndrome, keyed by syndrome value
GOLDEN_SYNDROME_ROWS: Dict[int, Tuple[int, ...]] = {
    0b00: (0x00, 0x05, 0x11, 0x41),
    0b01: (0x01, 0x04, 0x10, 0x40),
    0b10: (0x03, 0x09, 0x21, 0x81),
    0b11: (0x02, 0x08, 0x20, 0x80),
}

# (family, K_B) -> codeword counts for weights 1..16
GOLDEN_SPECTRA: Dict[Tuple[str, int], Tuple[int, ...]] = {
    ("polar", 2): (0, 0, 0, 0, 0, 0, 0, 2, 0, 0, 0, 0, 0, 0, 0, 1),
    ("simplex", 2): (0, 0, 0, 0, 0, 0, 0, 0, 0, 1, 2, 0, 0, 0, 0, 0),
    ("polar", 3): (0, 0, 0, 0, 0, 0, 0, 6, 0, 0, 0, 0, 0, 0, 0, 1),
    ("simplex", 3): (0, 0, 0, 0, 0, 0, 0, 1, 4, 2, 0, 0, 0, 0, 0, 0),
    ("polar", 4): (0, 0, 0, 0, 0, 0, 0, 14, 0, 0, 0, 0, 0, 0, 0, 1),
    ("simplex", 4): (0, 0, 0, 0, 0, 0, 0, 7, 8, 0, 0, 0, 0, 0, 0, 0),
    ("polar", 5): (0, 0, 0, 0, 0, 0, 0, 30, 0, 0, 0, 0, 0, 0, 0, 1),
    ("polar", 6): (0, 0, 0, 4, 0, 0, 0, 54, 0, 0, 0, 4, 0, 0, 0, 1),
    ("ebch", 6): (0, 0, 0, 0, 0, 16, 0, 30, 0, 16, 0, 0, 0, 0, 0, 1),
    ("polar", 7): (0, 0, 0, 12, 0, 0, 0, 102, 0, 0, 0, 12, 0, 0, 0, 1),
    ("ebch", 7): (0, 0, 0, 0, 0, 48, 0, 30, 0, 48, 0, 0, 0, 0, 0, 1),
    ("polar", 8): (0, 0, 0, 28, 0, 0, 0, 198, 0, 0, 0, 28, 0, 0, 0, 1),
    ("polar", 9): (0, 0, 0, 44, 0, 64, 0, 294, 0, 64, 0, 44, 0, 0, 0, 1),
    ("dual-ebch", 9): (0, 0, 0, 20, 0, 160, 0, 150, 0, 160, 0, 20, 0, 0, 0, 1),
    ("polar", 10): (0, 0, 0, 76, 0, 192, 0, 486, 0, 192, 0, 76, 0, 0, 0, 1),
    ("dual-ebch", 10): (0, 0, 0, 60, 0, 256, 0, 390, 0, 256, 0, 60, 0, 0, 0, 1),
    ("polar", 11): (0, 0, 0, 140, 0, 448, 0, 870, 0, 448, 0, 140, 0, 0, 0, 1),
    ("polar", 12): (0, 8, 0, 252, 0, 952, 0, 1670, 0, 952, 0, 252, 0, 8, 0, 1),
    ("dual-simplex", 12): (0, 1, 42, 133, 252, 469, 750, 835, 680, 483, 294, 119, 28, 7, 2, 0),
    ("polar", 13): (0, 24, 0, 476, 0, 1960, 0, 3270, 0, 1960, 0, 476, 0, 24, 0, 1),
    ("dual-simplex", 13): (0, 11, 82, 233, 516, 1003, 1470, 1595, 1400, 1017, 558, 219, 68, 17, 2, 0),
    ("polar", 14): (0, 56, 0, 924, 0, 3976, 0, 6470, 0, 3976, 0, 924, 0, 56, 0, 1),
    ("dual-simplex", 14): (0, 35, 150, 425, 1100, 2051, 2810, 3195, 2920, 1985, 1066, 475, 140, 25, 6, 0),
    ("polar", 15): (0, 120, 0, 1820, 0, 8008, 0, 12870, 0, 8008, 0, 1820, 0, 120, 0, 1),
}

# (N, payload bits) of the codes decoded against exhaustive ML, list size 2^K
ML_CODES: Tuple[Tuple[int, int], ...] = ((8, 3), (8, 4), (16, 5))
ML_SNR_DB = 1.0

CRC_CHECK_INPUT = b"123456789"
CRC_CHECK_VALUE = 0x29B1


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str
    seconds: float = 0.0


@dataclass
class VerifyReport:
    checks: List[CheckResult] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    @property
    def failures(self) -> List[CheckResult]:
        return [c for c in self.checks if not c.passed]

    def format(self) -> str:
        lines = []
        for c in self.checks:
            status = "PASS" if c.passed else "FAIL"
            lines.append(f"[{status}] {c.name:<14} {c.seconds:7.2f}s  {c.detail}")
        lines.append("all checks passed" if self.passed else f"{len(self.failures)} check(s) failed")
        return "\n".join(lines)


# ---------------- Flip-pattern oracles ----------------
def _sorted_magnitudes(rng: np.random.Generator, size: int) -> np.ndarray:
    return np.sort(rng.exponential(1.0, size=size))


def _k_smallest(values: np.ndarray, k: int) -> np.ndarray:
    k = min(k, values.size)
    return np.sort(np.partition(values, k - 1)[:k])


def _pattern_deltas(mags: np.ndarray, patterns) -> np.ndarray:
    return np.array([mags[list(p)].sum() if p else 0.0 for p in patterns])


def check_r1_patterns(samples: int = 1000, seed: int = 0, block_len: int = ORACLE_BLOCK) -> CheckResult:
    """The 8 smallest flip-mask ΔPMs over all 2^B masks are always reached by the 13 rate-1 patterns."""
    masks = gf2.mask_table(block_len).astype(np.float64)
    rng = np.random.default_rng([seed, 1])
    for s in range(samples):
        mags = _sorted_magnitudes(rng, block_len)
        brute = _k_smallest(masks @ mags, KEEP)
        listed = _k_smallest(_pattern_deltas(mags, R1_PATTERNS), KEEP)
        if not np.allclose(brute, listed, rtol=1e-12, atol=1e-12):
            return CheckResult("r1-patterns", False, f"sample {s}: brute force {brute.tolist()} vs patterns {listed.tolist()}")
    return CheckResult("r1-patterns", True, f"{samples} samples at B={block_len}, no violations")


def check_spc_patterns(samples: int = 1000, seed: int = 0, block_len: int = ORACLE_BLOCK) -> CheckResult:
    """Same oracle restricted to parity-legal masks, for both raw checksums."""
    table = gf2.mask_table(block_len)
    masks = table.astype(np.float64)
    weight_parity = table.sum(axis=1) % 2
    rng = np.random.default_rng([seed, 2])
    for s in range(samples):
        mags = _sorted_magnitudes(rng, block_len)
        deltas = masks @ mags
        for checksum, patterns in ((0, SPC_EVEN_PATTERNS), (1, SPC_ODD_PATTERNS)):
            brute = _k_smallest(deltas[weight_parity == checksum], KEEP)
            listed = _k_smallest(_pattern_deltas(mags, patterns), KEEP)
            if not np.allclose(brute, listed, rtol=1e-12, atol=1e-12):
                return CheckResult("spc-patterns", False,
                                   f"sample {s}, checksum {checksum}: brute force {brute.tolist()} "
                                   f"vs patterns {listed.tolist()}")
    return CheckResult("spc-patterns", True, f"{samples} samples at B={block_len}, both checksums, no violations")


def check_partial_order(samples: int = 1000, seed: int = 0, block_len: int = ORACLE_BLOCK) -> CheckResult:
    rng = np.random.default_rng([seed, 3])
    for s in range(samples):
        mags = _sorted_magnitudes(rng, block_len)
        for name, edges in (("rate-1", R1_ORDER_EDGES), ("SPC", SPC_ORDER_EDGES)):
            if not partial_order_holds(mags, edges):
                return CheckResult("partial-order", False, f"sample {s}: {name} ordering graph violated")
    return CheckResult("partial-order", True, f"{samples} samples, rate-1 and SPC ordering graphs hold")


def check_pattern_deltas(samples: int = 200, seed: int = 0, block_len: int = ORACLE_BLOCK) -> CheckResult:
    """Pattern ΔPMs agree with the block path-metric update applied to the flipped estimate."""
    rng = np.random.default_rng([seed, 4])
    for s in range(samples):
        llrs = rng.normal(0.0, 3.0, size=block_len)
        raw = hard_estimate(llrs)
        for name, extend in (("rate-1", extend_r1), ("SPC", extend_spc)):
            for cand in extend(raw, llrs):
                expected = float(block_pm_update(0.0, llrs, raw, cand.beta))
                if not np.isclose(expected, cand.delta_pm, rtol=1e-12, atol=1e-12):
                    return CheckResult("pattern-delta", False,
                                       f"sample {s} {name} pattern {cand.pattern}: ΔPM {cand.delta_pm} != {expected}")
                if name == "SPC" and cand.beta.sum() % 2:
                    return CheckResult("pattern-delta", False, f"sample {s} SPC pattern {cand.pattern}: odd parity")
    return CheckResult("pattern-delta", True, f"{samples} random blocks, rate-1 and SPC candidates consistent")


# ---------------- Syndrome table ----------------
def check_syndrome_table(table: Optional[SyndromeTable] = None) -> CheckResult:
    """build_table(B=8, frozen {0,1}, l_sd=4) against the golden rows, plus per-pattern syndromes."""
    table = table or build_table(8, (True, True, False, False, False, False, False, False), 4)
    width = table.n_checks
    mismatches = []
    for value, expected in GOLDEN_SYNDROME_ROWS.items():
        got = tuple(table.patterns_for(value))
        if got != expected:
            mismatches.append(f"row {format_syndrome(value, width)}: expected "
                              f"{[hex(p) for p in expected]}, got {[hex(p) for p in got]}")
            continue
        bits = np.array([gf2.int_to_bits(p, table.block_len) for p in got])
        recomputed = syndrome_value(bits, table.parity_check)
        if any(int(r) != value for r in recomputed):
            mismatches.append(f"row {format_syndrome(value, width)}: stored pattern outside its coset")
    if mismatches:
        return CheckResult("syndrome-table", False, "; ".join(mismatches))
    patterns = len(GOLDEN_SYNDROME_ROWS) * table.l_sd
    return CheckResult("syndrome-table", True, f"{len(GOLDEN_SYNDROME_ROWS)} rows, {patterns} patterns match")


# ---------------- Distance spectra ----------------
def outer_code_for_row(family: str, k_local: int) -> OuterCode:
    if family == OuterFamily.polar.value:
        return OuterCode(family=OuterFamily.polar, generator=polar_outer_generator(k_local))
    code = hybrid_outer_generator(k_local, EXTENDED_FAMILIES)
    if code.family.value != family:
        raise InvalidArgumentError(f"K_B={k_local} maps to {code.family.value}, expected {family}")
    return code


def check_outer_spectra() -> CheckResult:
    """Every golden spectrum row, and the improvement of each hybrid code over polar of the same K_B."""
    mismatches = []
    spectra = {}
    for (family, k_local), expected in GOLDEN_SPECTRA.items():
        spectrum = weight_spectrum(outer_code_for_row(family, k_local))
        spectra[(family, k_local)] = spectrum
        got = tuple(int(c) for c in spectrum.counts[1:])
        if got != expected or spectrum.counts[0] != 1:
            mismatches.append(f"{family} K_B={k_local}: expected {expected}, got {got}")
    for (family, k_local), spectrum in spectra.items():
        if family == OuterFamily.polar.value:
            continue
        polar = spectra[("polar", k_local)]
        improves = (spectrum.min_distance > polar.min_distance
                    or (spectrum.min_distance == polar.min_distance and spectrum.a_dmin < polar.a_dmin))
        if not improves:
            mismatches.append(f"{family} K_B={k_local} does not improve on polar "
                              f"(d={spectrum.min_distance}/A={spectrum.a_dmin} vs d={polar.min_distance}/A={polar.a_dmin})")
    if mismatches:
        return CheckResult("spectra", False, "; ".join(mismatches))
    return CheckResult("spectra", True, f"{len(GOLDEN_SPECTRA)} spectrum rows match")


# ---------------- Decoders ----------------
def ml_discrepancy(llrs: np.ndarray, codewords: np.ndarray) -> float:
    """Smallest Σ|llr| over positions where a codeword disagrees with the hard decision."""
    hard = (llrs < 0).astype(np.uint8)
    return float(((codewords != hard) @ np.abs(llrs)).min())


def check_scl_ml(frames: int = 10000, seed: int = 0, codes: Sequence[Tuple[int, int]] = ML_CODES,
                 snr_db: float = ML_SNR_DB) -> CheckResult:
    """SCL with L = 2^K never prunes, so its best path metric is the ML correlation discrepancy."""
    per_code = max(1, frames // len(codes))
    for c, (n, k) in enumerate(codes):
        spec = CodeSpec.pw(n, k, crc_len=0)
        decoder = SclDecoder(spec, 1 << spec.k_total)
        codewords = polar_encode(gf2.mask_table(spec.k_total), spec)
        for f in range(per_code):
            rng = frame_rng(seed, c, f)
            message = rng.integers(0, 2, size=spec.k_total, dtype=np.uint8)
            llrs = awgn_llr(modulate_bpsk(polar_encode(message, spec)), snr_db, rng)
            result = decoder.decode(llrs)
            best = ml_discrepancy(llrs, codewords)
            if not np.isclose(result.final_pm, best, rtol=1e-9, atol=1e-9):
                return CheckResult("scl-ml", False, f"N={n} K={k} frame {f}: SCL PM {result.final_pm} != ML {best}")
    return CheckResult("scl-ml", True, f"{per_code * len(codes)} frames over {len(codes)} codes, zero mismatches")


def check_crc() -> CheckResult:
    bits = np.unpackbits(np.frombuffer(CRC_CHECK_INPUT, dtype=np.uint8))
    value = gf2.bits_to_int(CrcCodec(16).compute(bits)[::-1])
    if value != CRC_CHECK_VALUE:
        return CheckResult("crc", False, f"CRC-16 of {CRC_CHECK_INPUT!r} is {value:#06x}, expected {CRC_CHECK_VALUE:#06x}")
    return CheckResult("crc", True, f"CRC-16 check value {value:#06x}")


# ---------------- Runner ----------------
CHECK_NAMES = ("r1-patterns", "spc-patterns", "partial-order", "pattern-delta", "syndrome-table", "spectra",
               "scl-ml", "crc")


def run_verify(samples: int = 1000, ml_frames: int = 10000, seed: int = 0,
               table: Optional[SyndromeTable] = None, only: Optional[Sequence[str]] = None) -> VerifyReport:
    checks: Dict[str, Callable[[], CheckResult]] = {
        "r1-patterns": lambda: check_r1_patterns(samples, seed),
        "spc-patterns": lambda: check_spc_patterns(samples, seed),
        "partial-order": lambda: check_partial_order(samples, seed),
        "pattern-delta": lambda: check_pattern_deltas(max(1, samples // 5), seed),
        "syndrome-table": lambda: check_syndrome_table(table),
        "spectra": check_outer_spectra,
        "scl-ml": lambda: check_scl_ml(ml_frames, seed),
        "crc": check_crc,
    }
    selected = list(only) if only else list(CHECK_NAMES)
    unknown = [name for name in selected if name not in checks]
    if unknown:
        raise InvalidArgumentError(f"unknown check(s): {', '.join(unknown)}")

    report = VerifyReport()
    for name in selected:
        started = time.perf_counter()
        result = checks[name]()
        result.seconds = time.perf_counter() - started
        report.checks.append(result)
        log = logger.info if result.passed else logger.error
        log(f"[VERIFY] {name}: {'pass' if result.passed else 'FAIL'} ({result.seconds:.2f}s) {result.detail}")
    return report
