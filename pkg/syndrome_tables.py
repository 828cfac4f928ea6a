"""
Syndrome -> error-pattern lookup tables for general (Gen) nodes.

For a polar block with frozen positions F the parity-check matrix is H = G_B[:, F]ᵀ
with G_B = F^{⊗log2 B}; hybrid blocks pass their outer code's parity-check matrix.
Syndrome bit r is the r-th row of H applied to β; the syndrome value is Σ d_r·2^r and is
printed most significant bit first. Pattern bit p is the 2^p place of its integer.
"""

import hashlib
import itertools
import logging
import os
import struct
import zlib
from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np

import settings
from errors import InvalidArgumentError, TableFormatError
from fsl_nodes import FslParams, NodeDescriptor, NodeKind
from polar_core import is_power_of_two, polar_transform

logger = logging.getLogger(__name__)

TABLE_MAGIC = b"PSYN"
TABLE_VERSION = 1
PAD_WORD = 0xFFFFFFFF
FLAG_EXPLICIT_H = 0x1
FLAG_TRUNCATED = 0x2
_HEADER = struct.Struct("<4sHBBHHI")
_CHECKSUM = struct.Struct("<I")


def kernel_matrix(block_len: int) -> np.ndarray:
    """G_B = F^{⊗log2 B}; row i is the image of e_i."""
    if not is_power_of_two(block_len):
        raise InvalidArgumentError(f"block length must be a power of two, got {block_len}")
    return polar_transform(np.eye(block_len, dtype=np.uint8))


def frozen_tuple(frozen_mask, block_len: int) -> Tuple[bool, ...]:
    if isinstance(frozen_mask, (int, np.integer)):
        return tuple(bool((int(frozen_mask) >> i) & 1) for i in range(block_len))
    mask = tuple(bool(f) for f in frozen_mask)
    if len(mask) != block_len:
        raise InvalidArgumentError(f"frozen mask has {len(mask)} entries, expected {block_len}")
    return mask


def polar_parity_check(block_len: int, frozen_mask) -> np.ndarray:
    mask = frozen_tuple(frozen_mask, block_len)
    frozen = [i for i, f in enumerate(mask) if f]
    return kernel_matrix(block_len)[:, frozen].T.copy()


def node_parity_check(node: NodeDescriptor) -> np.ndarray:
    if node.outer is not None:
        return node.outer.parity_check
    return polar_parity_check(node.length, node.frozen_mask)


def syndrome_bits(beta, parity_check: np.ndarray) -> np.ndarray:
    beta = np.asarray(beta, dtype=np.uint8)
    if beta.shape[-1] != parity_check.shape[1]:
        raise InvalidArgumentError(
            f"vector length {beta.shape[-1]} does not match block length {parity_check.shape[1]}")
    return ((beta.astype(np.int64) @ parity_check.T.astype(np.int64)) & 1).astype(np.uint8)


def syndrome_value(beta, parity_check: np.ndarray):
    d = syndrome_bits(beta, parity_check).astype(np.int64)
    return d @ (1 << np.arange(parity_check.shape[0], dtype=np.int64))


def compute_syndrome(beta, node: NodeDescriptor) -> np.ndarray:
    return syndrome_bits(beta, node_parity_check(node))


def format_syndrome(value: int, width: int) -> str:
    return format(int(value), f"0{width}b") if width else ""


@dataclass
class SyndromeTable:
    block_len: int
    frozen_mask: Tuple[bool, ...]
    l_sd: int
    parity_check: np.ndarray
    rows: List[Tuple[int, ...]]
    explicit_h: bool = False
    truncated: bool = False
    _array: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    @property
    def n_checks(self) -> int:
        return self.parity_check.shape[0]

    @property
    def k_local(self) -> int:
        return self.block_len - self.n_checks

    @property
    def n_rows(self) -> int:
        return len(self.rows)

    @property
    def footprint(self) -> int:
        return self.n_rows * self.l_sd

    def patterns_for(self, syndrome: int) -> Tuple[int, ...]:
        return self.rows[int(syndrome)]

    def pattern_array(self) -> np.ndarray:
        """(rows, l_sd) int64 view, missing entries as -1."""
        if self._array is None:
            arr = np.full((self.n_rows, self.l_sd), -1, dtype=np.int64)
            for r, row in enumerate(self.rows):
                arr[r, :len(row)] = row
            self._array = arr
        return self._array

    def __eq__(self, other):
        if not isinstance(other, SyndromeTable):
            return NotImplemented
        return (self.block_len == other.block_len and self.frozen_mask == other.frozen_mask
                and self.l_sd == other.l_sd and np.array_equal(self.parity_check, other.parity_check)
                and self.rows == other.rows and self.truncated == other.truncated)


def build_table(block_len: int, frozen_mask, l_sd: int, parity_check: Optional[np.ndarray] = None) -> SyndromeTable:
    """
    Keeps, for every syndrome, the l_sd lightest patterns: ascending weight, then
    lexicographic order of the sorted flip positions.
    """
    if l_sd < 1:
        raise InvalidArgumentError(f"l_sd must be >= 1, got {l_sd}")
    mask = frozen_tuple(frozen_mask, block_len)
    explicit = parity_check is not None
    h = np.asarray(parity_check, dtype=np.uint8) if explicit else polar_parity_check(block_len, mask)
    if h.shape[1] != block_len:
        raise InvalidArgumentError("parity-check matrix width does not match the block length")
    n_rows = 1 << h.shape[0]
    rows: List[List[int]] = [[] for _ in range(n_rows)]
    missing = n_rows * l_sd

    for weight in range(block_len + 1):
        if missing == 0:
            break
        if weight == 0:
            masks = np.zeros(1, dtype=np.int64)
        else:
            combos = np.array(list(itertools.combinations(range(block_len), weight)), dtype=np.int64)
            masks = (np.int64(1) << combos).sum(axis=1)
        bits = ((masks[:, None] >> np.arange(block_len)) & 1).astype(np.uint8)
        synd = syndrome_value(bits, h)
        order = np.argsort(synd, kind="stable")
        values, starts = np.unique(synd[order], return_index=True)
        ends = list(starts[1:]) + [order.size]
        for value, lo, hi in zip(values, starts, ends):
            row = rows[int(value)]
            take = min(l_sd - len(row), hi - lo)
            if take > 0:
                row.extend(int(m) for m in masks[order[lo:lo + take]])
                missing -= take

    truncated = missing > 0
    if truncated:
        logger.warning(f"[TABLES] B={block_len} K_B={block_len - h.shape[0]}: cosets smaller than l_sd={l_sd}, rows truncated")
    return SyndromeTable(block_len=block_len, frozen_mask=mask, l_sd=l_sd, parity_check=h,
                         rows=[tuple(r) for r in rows], explicit_h=explicit, truncated=truncated)


def build_node_table(node: NodeDescriptor, l_sd: int) -> SyndromeTable:
    parity_check = node.outer.parity_check if node.outer is not None else None
    return build_table(node.length, node.frozen_mask, l_sd, parity_check=parity_check)


# ---------------------------------------------------------------------------
# File format
# ---------------------------------------------------------------------------
def _mask_word(bits: Sequence[bool]) -> int:
    return sum(1 << i for i, b in enumerate(bits) if b)


def serialize_table(table: SyndromeTable) -> bytes:
    flags = (FLAG_EXPLICIT_H if table.explicit_h else 0) | (FLAG_TRUNCATED if table.truncated else 0)
    header = _HEADER.pack(TABLE_MAGIC, TABLE_VERSION, table.block_len, table.k_local, table.l_sd,
                          flags, _mask_word(table.frozen_mask))
    h_words = np.array([_mask_word(row) for row in table.parity_check], dtype="<u4")
    words = table.pattern_array().copy()
    words[words < 0] = PAD_WORD
    body = header + h_words.tobytes() + words.astype("<u4").tobytes()
    return body + _CHECKSUM.pack(zlib.crc32(body) & 0xFFFFFFFF)


def load_table(data: bytes) -> SyndromeTable:
    if len(data) < _HEADER.size + _CHECKSUM.size:
        raise TableFormatError("table file is truncated")
    body, (stored,) = data[:-_CHECKSUM.size], _CHECKSUM.unpack(data[-_CHECKSUM.size:])
    if zlib.crc32(body) & 0xFFFFFFFF != stored:
        raise TableFormatError("table checksum mismatch")
    magic, version, block_len, k_local, l_sd, flags, frozen_word = _HEADER.unpack(body[:_HEADER.size])
    if magic != TABLE_MAGIC:
        raise TableFormatError(f"bad magic {magic!r}")
    if version != TABLE_VERSION:
        raise TableFormatError(f"unsupported table version {version}")
    n_checks = block_len - k_local
    n_rows = 1 << n_checks
    expected = _HEADER.size + 4 * n_checks + 4 * n_rows * l_sd
    if len(body) != expected:
        raise TableFormatError(f"table body has {len(body)} bytes, expected {expected}")
    offset = _HEADER.size
    h_words = np.frombuffer(body[offset:offset + 4 * n_checks], dtype="<u4")
    offset += 4 * n_checks
    words = np.frombuffer(body[offset:], dtype="<u4").reshape(n_rows, l_sd)
    parity_check = ((h_words.astype(np.int64)[:, None] >> np.arange(block_len)) & 1).astype(np.uint8)
    rows = [tuple(int(w) for w in row if w != PAD_WORD) for row in words]
    return SyndromeTable(block_len=block_len, frozen_mask=frozen_tuple(int(frozen_word), block_len),
                         l_sd=l_sd, parity_check=parity_check.reshape(n_checks, block_len), rows=rows,
                         explicit_h=bool(flags & FLAG_EXPLICIT_H), truncated=bool(flags & FLAG_TRUNCATED))


# ---------------------------------------------------------------------------
# Cache
# ---------------------------------------------------------------------------
def table_digest(block_len: int, frozen_mask, l_sd: int, parity_check: Optional[np.ndarray] = None) -> str:
    mask = frozen_tuple(frozen_mask, block_len)
    h = np.asarray(parity_check, dtype=np.uint8) if parity_check is not None \
        else polar_parity_check(block_len, mask)
    content = f"{block_len}:{_mask_word(mask)}:{l_sd}:{parity_check is not None}:".encode() + h.tobytes()
    return hashlib.sha256(content).hexdigest()


class TableCache:
    """Tables on disk under `directory`, one file per content digest, memoised in process."""

    def __init__(self, directory: Optional[str] = None):
        self.directory = directory or settings.TABLE_CACHE_DIR
        self._memory: Dict[str, SyndromeTable] = {}

    def path_for(self, digest: str) -> str:
        return os.path.join(self.directory, f"{digest}.psyn")

    def get(self, block_len: int, frozen_mask, l_sd: int, parity_check: Optional[np.ndarray] = None) -> SyndromeTable:
        digest = table_digest(block_len, frozen_mask, l_sd, parity_check)
        if digest in self._memory:
            return self._memory[digest]
        path = self.path_for(digest)
        table = None
        if os.path.exists(path):
            try:
                with open(path, "rb") as fh:
                    table = load_table(fh.read())
                logger.debug(f"[TABLES] loaded {path}")
            except TableFormatError as e:
                logger.warning(f"[TABLES] discarding unreadable cache file {path}: {e}")
        if table is None:
            table = build_table(block_len, frozen_mask, l_sd, parity_check)
            os.makedirs(self.directory, exist_ok=True)
            with open(path, "wb") as fh:
                fh.write(serialize_table(table))
            logger.info(f"[TABLES] built B={block_len} K_B={table.k_local} l_sd={l_sd} rows={table.n_rows} -> {path}")
        self._memory[digest] = table
        return table


def tables_for_segmentation(nodes: Iterable[NodeDescriptor], params: FslParams,
                            cache: Optional[TableCache] = None) -> Dict[Tuple, SyndromeTable]:
    """One table per distinct Gen-node shape, keyed by NodeDescriptor.table_key."""
    tables: Dict[Tuple, SyndromeTable] = {}
    for node in nodes:
        if node.kind != NodeKind.gen or node.table_key in tables:
            continue
        parity_check = node.outer.parity_check if node.outer is not None else None
        if cache is not None:
            tables[node.table_key] = cache.get(node.length, node.frozen_mask, params.patterns_per_syndrome, parity_check)
        else:
            tables[node.table_key] = build_table(node.length, node.frozen_mask, params.patterns_per_syndrome, parity_check)
    return tables


def table_footprint(tables: Dict[Tuple, SyndromeTable]) -> int:
    return sum(t.footprint for t in tables.values())
