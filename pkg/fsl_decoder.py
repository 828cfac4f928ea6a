"""
Flip-syndrome-list decoder.

LLRs propagate with the usual f/g rules only down to each leaf node of the segmented
tree. There the raw hard decision is extended once per path (flip patterns for R1/SPC,
syndrome lookup for Gen, full enumeration for ML and small nodes), every path's
sub-paths are pooled, and one global prune keeps L survivors.
"""

import logging
from dataclasses import dataclass
from typing import Dict, List, Optional, Tuple

import numpy as np

import gf2
from code_construct import outer_codes_for
from errors import ExhaustiveLimitError, InvalidArgumentError, TableNotBuiltError
from flip_patterns import Candidate, SortedLlrView, extend_r1, extend_spc
from fsl_nodes import FslParams, NodeDescriptor, NodeKind, SegmentMode, segment_tree
from polar_core import CodeSpec, is_power_of_two, polar_transform
from scl_decoder import DecodeResult, beta_update, f_update, g_update, select_final_path
from syndrome_tables import (SyndromeTable, TableCache, syndrome_value,
                             tables_for_segmentation)

logger = logging.getLogger(__name__)


def hard_decision(llrs_block) -> np.ndarray:
    """β = (1 - sgn(α)) / 2 with sgn(0) = +1."""
    return (np.asarray(llrs_block, dtype=np.float64) < 0).astype(np.uint8)


def recover_info(beta_hat_block) -> np.ndarray:
    beta = np.asarray(beta_hat_block, dtype=np.uint8)
    if not is_power_of_two(beta.shape[-1]):
        raise InvalidArgumentError(f"block length must be a power of two, got {beta.shape[-1]}")
    return polar_transform(beta)


def block_pm_update(pm, llrs_block, beta_raw, beta_hat):
    llrs = np.asarray(llrs_block, dtype=np.float64)
    beta_raw = np.asarray(beta_raw, dtype=np.uint8)
    beta_hat = np.asarray(beta_hat, dtype=np.uint8)
    if not (llrs.shape[-1] == beta_raw.shape[-1] == beta_hat.shape[-1]):
        raise InvalidArgumentError("LLR block and estimates must have equal lengths")
    return pm + ((beta_raw != beta_hat) * np.abs(llrs)).sum(axis=-1)


def node_generator(node: NodeDescriptor) -> np.ndarray:
    if node.outer is not None:
        return node.outer.generator
    info = [i for i, f in enumerate(node.frozen_mask) if not f]
    return polar_transform(np.eye(node.length, dtype=np.uint8))[info]


def extend_exhaustive(beta_raw, llrs_block, node: NodeDescriptor, limit: int = 12) -> List[Candidate]:
    """All 2^{K_B} local codewords ordered by ΔPM, equal ΔPMs by message index."""
    if node.k_local > limit:
        raise ExhaustiveLimitError(f"{node.label}: 2^{node.k_local} candidates exceed the limit 2^{limit}")
    beta_raw = np.asarray(beta_raw, dtype=np.uint8)
    mags = np.abs(np.asarray(llrs_block, dtype=np.float64))
    generator = node_generator(node).astype(np.int64)
    codewords = ((gf2.mask_table(node.k_local).astype(np.int64) @ generator) & 1).astype(np.uint8)
    deltas = (codewords != beta_raw) @ mags
    order = np.lexsort((np.arange(deltas.size), deltas))
    return [Candidate(beta=codewords[i], delta_pm=float(deltas[i])) for i in order]


def extend_general(beta_raw, llrs_block, node: NodeDescriptor, params: FslParams,
                   table: Optional[SyndromeTable]) -> List[Candidate]:
    """
    Flips every subset of the T least reliable positions, looks up the L_sd patterns of
    each flipped vector's syndrome and returns the distinct resulting codewords.
    Positions in the flipping set are costed with saturated LLRs (sign of the flipped
    bit), so undoing a budget flip is never competitive. Duplicate codewords keep their
    smallest ΔPM.
    """
    if table is None:
        raise TableNotBuiltError(node.label)
    beta_raw = np.asarray(beta_raw, dtype=np.uint8)
    size = beta_raw.size
    view = SortedLlrView.from_llrs(llrs_block)
    mags = np.abs(np.asarray(llrs_block, dtype=np.float64))
    budget = min(params.flip_budget, size)
    in_budget = np.zeros(size, dtype=bool)
    in_budget[view.perm[:budget]] = True

    flips = np.zeros((1 << budget, size), dtype=np.uint8)
    flips[:, view.perm[:budget]] = gf2.mask_table(budget)
    flipped = beta_raw ^ flips
    synd = syndrome_value(flipped, table.parity_check)
    patterns = table.pattern_array()[synd]
    valid = patterns >= 0
    pattern_bits = ((np.where(valid, patterns, 0)[..., None] >> np.arange(size)) & 1).astype(np.uint8)
    cands = flipped[:, None, :] ^ pattern_bits

    outside = ((cands != beta_raw) & ~in_budget) @ mags
    budget_cost = (flips.astype(bool) @ mags)[:, None]
    undone = (pattern_bits.astype(bool) & in_budget).sum(axis=-1) * params.saturation_llr
    deltas = (outside + budget_cost + undone)[valid]
    cands = cands[valid]

    order = np.lexsort((np.arange(deltas.size), deltas))
    keys = cands.astype(np.int64) @ (1 << np.arange(size, dtype=np.int64))
    seen = set()
    result = []
    for i in order:
        if keys[i] in seen:
            continue
        seen.add(keys[i])
        result.append(Candidate(beta=cands[i], delta_pm=float(deltas[i])))
    return result


@dataclass
class ExtendedPath:
    parent: int
    ext_index: int
    beta: np.ndarray
    pm: float


def prune_global(candidates: List[ExtendedPath], list_size: int) -> List[ExtendedPath]:
    """The list_size smallest total PMs; ties go to the lower parent, then the lower extension index."""
    if not candidates:
        raise InvalidArgumentError("prune_global needs at least one candidate")
    pm = np.array([c.pm for c in candidates])
    parents = np.array([c.parent for c in candidates])
    ext = np.array([c.ext_index for c in candidates])
    order = np.lexsort((ext, parents, pm))[:list_size]
    return [candidates[i] for i in order]


def plan_segmentation(spec: CodeSpec, params: FslParams, mode: Optional[SegmentMode] = None,
                      allow_special: bool = True) -> List[NodeDescriptor]:
    return segment_tree(spec, params, mode, outer_codes=outer_codes_for(spec), allow_special=allow_special)


class FslDecoder:
    """
    One decoder per (code, parameters); decode() may be called repeatedly.
    Missing Gen-node tables are built on construction (through `cache` when given).
    """

    def __init__(self, spec: CodeSpec, params: FslParams, tables: Optional[Dict[Tuple, SyndromeTable]] = None,
                 mode: Optional[SegmentMode] = None, allow_special: bool = True,
                 cache: Optional[TableCache] = None):
        self.spec = spec
        self.params = params
        self.list_size = params.list_size
        self.nodes = plan_segmentation(spec, params, mode, allow_special)
        self._node_at = {(n.start, n.length): n for n in self.nodes}
        if tables is None:
            tables = tables_for_segmentation(self.nodes, params, cache)
        self.tables = tables
        self.pm = np.zeros(1)
        self.decided = np.zeros((1, spec.n_mother), dtype=np.uint8)
        logger.debug(f"[FSL] {len(self.nodes)} leaf nodes, {len(tables)} syndrome tables")

    def decode(self, llrs) -> DecodeResult:
        llrs = np.asarray(llrs, dtype=np.float64)
        if llrs.shape != (self.spec.n_mother,):
            raise InvalidArgumentError(f"expected {self.spec.n_mother} LLRs, got shape {llrs.shape}")
        self.pm = np.zeros(1)
        self.decided = np.zeros((1, self.spec.n_mother), dtype=np.uint8)
        self._decode(0, llrs[None, :])
        data_words = self.decided[:, list(self.spec.info_set)]
        return select_final_path(self.pm, data_words, self.spec)

    def _decode(self, start: int, alpha: np.ndarray):
        paths, size = alpha.shape
        if start + size <= self.spec.first_info_bit:
            # skipped frozen prefix, decoded as R0
            self.pm = self.pm + np.where(alpha < 0, -alpha, 0.0).sum(axis=1)
            return np.zeros((paths, size), dtype=np.uint8), np.arange(paths)
        node = self._node_at.get((start, size))
        if node is not None:
            return self._leaf(node, alpha)
        half = size // 2
        a, b = alpha[:, :half], alpha[:, half:]
        beta_l, origin_l = self._decode(start, f_update(a, b))
        a, b = a[origin_l], b[origin_l]
        beta_r, origin_r = self._decode(start + half, g_update(a, b, beta_l))
        return beta_update(beta_l[origin_r], beta_r), origin_l[origin_r]

    def _extend(self, node: NodeDescriptor, beta_raw: np.ndarray, llrs: np.ndarray) -> List[Candidate]:
        keep = self.list_size
        if node.outer is None and node.kind == NodeKind.r1:
            return extend_r1(beta_raw, llrs, keep=keep)
        if node.outer is None and node.kind == NodeKind.spc:
            return extend_spc(beta_raw, llrs, keep=keep)
        if node.kind == NodeKind.gen:
            return extend_general(beta_raw, llrs, node, self.params, self.tables.get(node.table_key))
        return extend_exhaustive(beta_raw, llrs, node, self.params.exhaustive_limit)[:keep]

    def _leaf(self, node: NodeDescriptor, alpha: np.ndarray):
        paths = alpha.shape[0]
        raw = hard_decision(alpha)
        if node.kind == NodeKind.r0 and node.outer is None:
            self.pm = block_pm_update(self.pm, alpha, raw, np.zeros_like(raw))
            return np.zeros_like(raw), np.arange(paths)

        candidates: List[ExtendedPath] = []
        for p in range(paths):
            for t, cand in enumerate(self._extend(node, raw[p], alpha[p])):
                candidates.append(ExtendedPath(parent=p, ext_index=t, beta=cand.beta,
                                               pm=float(self.pm[p]) + cand.delta_pm))
        survivors = prune_global(candidates, self.list_size)
        origin = np.array([c.parent for c in survivors])
        betas = np.stack([c.beta for c in survivors]).astype(np.uint8)
        self.pm = np.array([c.pm for c in survivors])
        self.decided = self.decided[origin]
        lo, hi = node.bit_range
        if node.outer is not None:
            info = [lo + i for i, f in enumerate(node.frozen_mask) if not f]
            self.decided[:, lo:hi] = 0
            self.decided[:, info] = node.outer.recover(betas)
        else:
            self.decided[:, lo:hi] = recover_info(betas)
        return betas, origin


def fsl_decode(llrs, spec: CodeSpec, params: FslParams, tables: Optional[Dict[Tuple, SyndromeTable]] = None,
               mode: Optional[SegmentMode] = None) -> DecodeResult:
    return FslDecoder(spec, params, tables=tables, mode=mode).decode(llrs)
