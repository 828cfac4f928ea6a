"""
One-shot path extension for rate-1 and single-parity-check nodes.

Pattern positions refer to the reliability order of the block: position p is the
block index holding the p-th smallest |α| (see SortedLlrView). A pattern flips those
positions in the raw hard estimate; its ΔPM is the sum of the flipped magnitudes.
"""

import heapq
from dataclasses import dataclass
from typing import Iterable, List, Optional, Sequence, Tuple

import numpy as np

from errors import InvalidArgumentError

PROVEN_LIST_SIZE = 8
PROVEN_MIN_BLOCK = 8

R1_PATTERNS: Tuple[Tuple[int, ...], ...] = (
    (),
    (0,), (1,), (2,), (3,), (4,), (5,), (6,),
    (0, 1), (0, 2), (1, 2), (0, 3),
    (0, 1, 2),
)

SPC_EVEN_PATTERNS: Tuple[Tuple[int, ...], ...] = (
    (),
    (0, 1), (0, 2), (0, 3), (0, 4), (0, 5), (0, 6), (0, 7),
    (1, 2), (1, 3), (1, 4), (2, 3),
    (0, 1, 2, 3),
)

SPC_ODD_PATTERNS: Tuple[Tuple[int, ...], ...] = (
    (0,), (1,), (2,), (3,), (4,), (5,), (6,), (7,),
    (0, 1, 2), (0, 1, 3), (0, 2, 3), (1, 2, 3),
    (0, 1, 4),
)

# (smaller, larger) pattern pairs of the R1 ordering graph; both sides are sorted positions
R1_ORDER_EDGES: Tuple[Tuple[Tuple[int, ...], Tuple[int, ...]], ...] = (
    ((), (0,)),
    ((0,), (1,)), ((1,), (2,)), ((2,), (3,)), ((3,), (4,)), ((4,), (5,)), ((5,), (6,)),
    ((1,), (0, 1)), ((2,), (0, 2)), ((3,), (0, 3)),
    ((0, 1), (0, 2)), ((0, 2), (0, 3)),
    ((0, 2), (1, 2)), ((0, 3), (1, 3)), ((1, 2), (1, 3)),
    ((1, 2), (0, 1, 2)),
)

# SPC ordering table: each row and each column grows to the right and downward
SPC_ORDER_EDGES: Tuple[Tuple[Tuple[int, ...], Tuple[int, ...]], ...] = (
    ((), (0, 1)), ((0, 1), (0, 2)), ((0, 2), (0, 3)), ((0, 3), (0, 4)),
    ((0, 2), (1, 2)), ((0, 3), (1, 3)), ((1, 2), (1, 3)), ((1, 3), (2, 3)),
    ((2, 3), (0, 1, 2, 3)), ((0, 4), (1, 4)),
    ((0,), (1,)), ((1,), (2,)), ((2,), (3,)), ((3,), (4,)),
    ((2,), (0, 1, 2)), ((3,), (0, 1, 3)), ((0, 1, 2), (0, 1, 3)),
    ((0, 1, 3), (0, 2, 3)), ((0, 2, 3), (1, 2, 3)), ((4,), (0, 1, 4)), ((0, 1, 3), (0, 1, 4)),
)


@dataclass(frozen=True)
class ErrorPattern:
    mask: int

    @classmethod
    def from_positions(cls, positions: Iterable[int]) -> "ErrorPattern":
        mask = 0
        for p in positions:
            mask ^= 1 << int(p)
        return cls(mask)

    @property
    def weight(self) -> int:
        return bin(self.mask).count("1")

    @property
    def positions(self) -> Tuple[int, ...]:
        return tuple(p for p in range(self.mask.bit_length()) if (self.mask >> p) & 1)

    def as_bits(self, width: int) -> np.ndarray:
        return ((self.mask >> np.arange(width)) & 1).astype(np.uint8)


@dataclass(frozen=True)
class SortedLlrView:
    perm: np.ndarray
    magnitudes: np.ndarray

    @classmethod
    def from_llrs(cls, llrs_block) -> "SortedLlrView":
        mags = np.abs(np.asarray(llrs_block, dtype=np.float64))
        perm = np.argsort(mags, kind="stable")
        return cls(perm=perm, magnitudes=mags[perm])

    def __len__(self):
        return self.perm.size


@dataclass
class Candidate:
    beta: np.ndarray
    delta_pm: float
    pattern: Tuple[int, ...] = ()


def hard_estimate(llrs_block) -> np.ndarray:
    return (np.asarray(llrs_block, dtype=np.float64) < 0).astype(np.uint8)


def pattern_delta(view: SortedLlrView, positions: Sequence[int]) -> float:
    return float(view.magnitudes[list(positions)].sum()) if positions else 0.0


def apply_pattern(beta_raw: np.ndarray, view: SortedLlrView, positions: Sequence[int]) -> np.ndarray:
    beta = beta_raw.copy()
    if positions:
        beta[view.perm[list(positions)]] ^= 1
    return beta


def extend_with_patterns(beta_raw, view: SortedLlrView, patterns, keep: int) -> List[Candidate]:
    """Evaluates every pattern and keeps the `keep` smallest ΔPMs; equal ΔPMs keep table order."""
    deltas = np.array([pattern_delta(view, p) for p in patterns])
    order = np.lexsort((np.arange(len(patterns)), deltas))[:keep]
    return [Candidate(beta=apply_pattern(beta_raw, view, patterns[t]), delta_pm=float(deltas[t]),
                      pattern=patterns[t]) for t in order]


def smallest_subsets(magnitudes: np.ndarray, count: int, parity: Optional[int] = None) -> List[Tuple[float, Tuple[int, ...]]]:
    """
    The `count` subsets of sorted positions with the smallest magnitude sums, in ascending
    order (ties by position tuple). parity restricts the subset size to that parity.
    Best-first search: a subset ending at j spawns "append j+1" and "replace j by j+1".
    """
    size = magnitudes.size
    found: List[Tuple[float, Tuple[int, ...]]] = []
    if parity in (None, 0):
        found.append((0.0, ()))
    if size == 0:
        return found[:count]
    heap = [(float(magnitudes[0]), (0,))]
    while heap and len(found) < count:
        total, subset = heapq.heappop(heap)
        if parity is None or len(subset) % 2 == parity:
            found.append((total, subset))
        last = subset[-1]
        if last + 1 < size:
            heapq.heappush(heap, (total + float(magnitudes[last + 1]), subset + (last + 1,)))
            heapq.heappush(heap, (total - float(magnitudes[last]) + float(magnitudes[last + 1]),
                                  subset[:-1] + (last + 1,)))
    return found[:count]


def best_flip_candidates(beta_raw, llrs_block, keep: int, parity: Optional[int] = None,
                         view: Optional[SortedLlrView] = None) -> List[Candidate]:
    """Exact `keep` best flip masks over the whole block, for sizes and list sizes without a fixed pattern set."""
    beta_raw = np.asarray(beta_raw, dtype=np.uint8)
    view = view or SortedLlrView.from_llrs(llrs_block)
    return [Candidate(beta=apply_pattern(beta_raw, view, subset), delta_pm=total, pattern=subset)
            for total, subset in smallest_subsets(view.magnitudes, keep, parity)]


def extend_r1(beta_raw, llrs_block, view: Optional[SortedLlrView] = None,
              keep: int = PROVEN_LIST_SIZE) -> List[Candidate]:
    beta_raw = np.asarray(beta_raw, dtype=np.uint8)
    view = view or SortedLlrView.from_llrs(llrs_block)
    if len(view) != beta_raw.size:
        raise InvalidArgumentError("beta and LLR block lengths differ")
    if len(view) < PROVEN_MIN_BLOCK or keep != PROVEN_LIST_SIZE:
        return best_flip_candidates(beta_raw, llrs_block, keep, view=view)
    return extend_with_patterns(beta_raw, view, R1_PATTERNS, keep)


def extend_spc(beta_raw, llrs_block, view: Optional[SortedLlrView] = None,
               keep: int = PROVEN_LIST_SIZE) -> List[Candidate]:
    """Every candidate has even parity; the raw checksum picks the pattern set."""
    beta_raw = np.asarray(beta_raw, dtype=np.uint8)
    view = view or SortedLlrView.from_llrs(llrs_block)
    if len(view) != beta_raw.size:
        raise InvalidArgumentError("beta and LLR block lengths differ")
    checksum = int(beta_raw.sum() % 2)
    if len(view) < PROVEN_MIN_BLOCK or keep != PROVEN_LIST_SIZE:
        return best_flip_candidates(beta_raw, llrs_block, keep, parity=checksum, view=view)
    patterns = SPC_ODD_PATTERNS if checksum else SPC_EVEN_PATTERNS
    return extend_with_patterns(beta_raw, view, patterns, keep)


def partial_order_holds(magnitudes, edges=R1_ORDER_EDGES) -> bool:
    mags = np.asarray(magnitudes, dtype=np.float64)
    return all(mags[list(lo)].sum() <= mags[list(hi)].sum() for lo, hi in edges)
