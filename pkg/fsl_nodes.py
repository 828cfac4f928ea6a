"""
Node model of the pruned SC tree: node kinds, FSL parameters and tree segmentation.
"""

import enum
import math
from collections import Counter
from dataclasses import dataclass
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

from polar_core import CodeSpec, is_power_of_two


class NodeKind(str, enum.Enum):
    r0 = "R0"
    rep = "Rep"
    ml = "ML"
    gen = "Gen"
    spc = "SPC"
    r1 = "R1"


class SegmentMode(str, enum.Enum):
    four_bit_ml = "4b-ml"
    fast_sscl = "fast-sscl"
    fsl8 = "fsl8"
    fsl16 = "fsl16"


class FslParams(BaseModel):
    model_config = ConfigDict(frozen=True)

    block_len: int = 16
    flip_budget: int = 3
    patterns_per_syndrome: int = 8
    list_size: int = 8
    saturation_llr: float = 1e9
    b_max: int = 32
    # largest K_B enumerated exhaustively before refusing
    exhaustive_limit: int = 12

    @model_validator(mode="after")
    def check_ranges(self):
        if self.block_len not in (2, 4, 8, 16):
            raise ValueError(f"block_len must be one of 2, 4, 8, 16, got {self.block_len}")
        if self.flip_budget < 0 or self.flip_budget > self.block_len:
            raise ValueError(f"flip_budget must be in [0, {self.block_len}], got {self.flip_budget}")
        if self.patterns_per_syndrome < 1:
            raise ValueError("patterns_per_syndrome must be >= 1")
        if self.list_size < 1:
            raise ValueError("list_size must be >= 1")
        if not is_power_of_two(self.b_max) or self.b_max < self.block_len:
            raise ValueError(f"b_max must be a power of two >= block_len, got {self.b_max}")
        if self.saturation_llr <= 0:
            raise ValueError("saturation_llr must be positive")
        return self

    @classmethod
    def preset(cls, block_len: int, list_size: int = 8) -> "FslParams":
        """Default budgets for 8-bit (T=2, L_sd=4) and 16-bit (T=3, L_sd=8) parallel decoding."""
        if block_len == 8:
            return cls(block_len=8, flip_budget=2, patterns_per_syndrome=4, list_size=list_size)
        if block_len == 16:
            return cls(block_len=16, flip_budget=3, patterns_per_syndrome=8, list_size=list_size)
        return cls(block_len=block_len, flip_budget=min(2, block_len), patterns_per_syndrome=1,
                   list_size=list_size)

    @property
    def ml_threshold(self) -> float:
        return self.flip_budget + math.log2(self.patterns_per_syndrome)

    @property
    def max_extension(self) -> int:
        return (1 << self.flip_budget) * self.patterns_per_syndrome


@dataclass(frozen=True)
class NodeDescriptor:
    start: int
    length: int
    kind: NodeKind
    k_local: int
    frozen_mask: Tuple[bool, ...]
    outer: Optional[Any] = None

    @property
    def bit_range(self) -> Tuple[int, int]:
        return self.start, self.start + self.length

    @property
    def frozen_positions(self) -> List[int]:
        return [i for i, f in enumerate(self.frozen_mask) if f]

    @property
    def frozen_bits(self) -> int:
        """Frozen mask as an integer, position 0 in the least significant bit."""
        return sum(1 << i for i, f in enumerate(self.frozen_mask) if f)

    @property
    def label(self) -> str:
        tag = f"/{self.outer.family.value}" if self.outer is not None else ""
        return f"{self.kind.value}[{self.start}:{self.start + self.length}] K={self.k_local}{tag}"

    @property
    def table_key(self) -> Tuple:
        if self.outer is not None:
            return (self.length, "outer", self.outer.family.value, self.k_local)
        return (self.length, self.frozen_bits)


def special_kind(frozen_mask) -> Optional[NodeKind]:
    """R0 / R1 / Rep / SPC when the frozen pattern matches one, else None."""
    mask = np.asarray(frozen_mask, dtype=bool)
    info = ~mask
    if mask.all():
        return NodeKind.r0
    if info.all():
        return NodeKind.r1
    if info[-1] and info.sum() == 1:
        return NodeKind.rep
    if mask[0] and mask.sum() == 1:
        return NodeKind.spc
    return None


def classify_block(frozen_mask, params: FslParams, allow_special: bool = True) -> NodeKind:
    mask = np.asarray(frozen_mask, dtype=bool)
    if allow_special:
        kind = special_kind(mask)
        if kind is not None:
            return kind
    k_local = int((~mask).sum())
    return NodeKind.ml if k_local <= params.ml_threshold else NodeKind.gen


def leaf_length(params: FslParams, mode: Optional[SegmentMode]) -> int:
    if mode == SegmentMode.four_bit_ml:
        return 4
    if mode == SegmentMode.fast_sscl:
        return 1
    if mode == SegmentMode.fsl8:
        return 8
    if mode == SegmentMode.fsl16:
        return 16
    return params.block_len


def segment_tree(spec: CodeSpec, params: FslParams, mode: Optional[SegmentMode] = None,
                 outer_codes: Optional[Dict[int, Any]] = None, allow_special: bool = True,
                 outer_len: int = 16) -> List[NodeDescriptor]:
    """
    Leaf nodes of the pruned SC tree in decoding order.

    Subtrees lying entirely before the first information bit are skipped. A subtree
    matching R0/Rep/SPC/R1 becomes one node if it is no longer than b_max; otherwise
    recursion continues down to the leaf length, where the remaining span becomes an
    ML or Gen node. outer_codes maps a length-outer_len block index to its outer code;
    such blocks are always emitted whole.
    """
    frozen = spec.frozen_mask
    first_info = spec.first_info_bit
    leaf = leaf_length(params, mode)
    outer_codes = outer_codes or {}
    four_bit = mode == SegmentMode.four_bit_ml
    nodes: List[NodeDescriptor] = []

    def emit(start, size, kind, outer=None):
        mask = frozen[start:start + size]
        nodes.append(NodeDescriptor(start=start, length=size, kind=kind, k_local=int((~mask).sum()),
                                    frozen_mask=tuple(bool(f) for f in mask), outer=outer))

    def covers_outer(start, size):
        if not outer_codes:
            return False
        first, last = start // outer_len, (start + size - 1) // outer_len
        return any(b in outer_codes for b in range(first, last + 1))

    def visit(start, size):
        if start + size <= first_info:
            return
        mask = frozen[start:start + size]
        if size == outer_len and start // outer_len in outer_codes:
            code = outer_codes[start // outer_len]
            kind = NodeKind.ml if code.k_local <= params.ml_threshold else NodeKind.gen
            emit(start, size, kind, outer=code)
            return
        if allow_special and size <= params.b_max and not covers_outer(start, size):
            kind = special_kind(mask)
            if four_bit and kind is not None and kind != NodeKind.r0:
                kind = None
            if kind is not None:
                emit(start, size, kind)
                return
        if size <= leaf and not covers_outer(start, size):
            if four_bit:
                emit(start, size, NodeKind.ml)
            else:
                emit(start, size, classify_block(mask, params, allow_special=False))
            return
        half = size // 2
        visit(start, half)
        visit(start + half, half)

    visit(0, spec.n_mother)
    return nodes


def census(nodes: List[NodeDescriptor]) -> Dict[str, int]:
    counts = Counter(node.kind for node in nodes)
    report = {kind.value: counts.get(kind, 0) for kind in NodeKind}
    report["Total"] = len(nodes)
    return report
