"""
CRC-aided successive-cancellation list decoder (min-sum f/g, hardware PM rule).

This is the reference decoder the FSL decoder is measured against, so it walks the
SC tree bit by bit and keeps every rule explicit.
"""

from dataclasses import dataclass
from typing import Callable, Optional

import numpy as np

from errors import InvalidArgumentError
from polar_core import CodeSpec, ConstructionTag, crc_check


def f_update(a, b):
    """α = sgn(a)·sgn(b)·min(|a|,|b|), with sgn(0) = +1."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    sign = np.where(a < 0, -1.0, 1.0) * np.where(b < 0, -1.0, 1.0)
    return sign * np.minimum(np.abs(a), np.abs(b))


def g_update(a, b, bit):
    return (1.0 - 2.0 * np.asarray(bit, dtype=np.float64)) * np.asarray(a, dtype=np.float64) \
        + np.asarray(b, dtype=np.float64)


def beta_update(left, right) -> np.ndarray:
    """Merges two child estimates into the parent estimate (left ⊕ right, right) on the last axis."""
    left = np.asarray(left, dtype=np.uint8)
    right = np.asarray(right, dtype=np.uint8)
    if left.shape != right.shape:
        raise InvalidArgumentError(f"beta_update needs equal shapes, got {left.shape} and {right.shape}")
    return np.concatenate([left ^ right, right], axis=-1)


def pm_update(pm, llr, u_hat, beta=None):
    """
    Hardware PM rule: the metric is unchanged when the decision u_hat agrees with
    the hard value beta of the LLR, otherwise it grows by |llr|.
    beta defaults to the hard decision of llr.
    """
    llr = np.asarray(llr, dtype=np.float64)
    if beta is None:
        beta = (llr < 0).astype(np.uint8)
    mismatch = np.asarray(u_hat) != np.asarray(beta)
    return pm + np.where(mismatch, np.abs(llr), 0.0)


@dataclass
class DecodeResult:
    payload: np.ndarray
    crc_ok: bool
    final_pm: float
    selected_path_rank: int
    data_word: Optional[np.ndarray] = None


def select_final_path(pm: np.ndarray, data_words: np.ndarray, spec: CodeSpec) -> DecodeResult:
    """Lowest-PM path that passes CRC, else the lowest-PM path flagged crc_ok=False."""
    order = np.lexsort((np.arange(pm.size), pm))
    for rank, p in enumerate(order):
        if crc_check(data_words[p], spec.crc_len):
            return DecodeResult(payload=data_words[p, :spec.k_payload].copy(), crc_ok=True,
                                final_pm=float(pm[p]), selected_path_rank=rank,
                                data_word=data_words[p].copy())
    best = order[0]
    return DecodeResult(payload=data_words[best, :spec.k_payload].copy(), crc_ok=False,
                        final_pm=float(pm[best]), selected_path_rank=0,
                        data_word=data_words[best].copy())


def prune_candidates(cand_pm: np.ndarray, parents: np.ndarray, ext_index: np.ndarray, list_size: int) -> np.ndarray:
    """Indices of the list_size smallest candidates; ties go to lower parent, then lower extension index."""
    order = np.lexsort((ext_index, parents, cand_pm))
    return order[:list_size]


class SclDecoder:
    """
    One decoder per code. Paths are stacked on axis 0 of every array; the recursion
    returns, along with the node's β, the origin index of each surviving path so the
    caller can re-align whatever it holds for the left child.
    """

    def __init__(self, spec: CodeSpec, list_size: int,
                 observer: Optional[Callable[[int, np.ndarray, np.ndarray], None]] = None):
        if spec.construction_tag == ConstructionTag.hybrid:
            raise InvalidArgumentError("SCL decodes plain polar codes only; use the FSL decoder for hybrid codes")
        if list_size < 1:
            raise InvalidArgumentError(f"list_size must be >= 1, got {list_size}")
        self.spec = spec
        self.list_size = list_size
        self.observer = observer
        self._frozen = spec.frozen_mask
        self.pm = np.zeros(1)
        self.decided = np.zeros((1, spec.n_mother), dtype=np.uint8)

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
        size = alpha.shape[1]
        if size == 1:
            return self._leaf(start, alpha[:, 0])
        half = size // 2
        a, b = alpha[:, :half], alpha[:, half:]
        beta_l, origin_l = self._decode(start, f_update(a, b))
        a, b = a[origin_l], b[origin_l]
        beta_r, origin_r = self._decode(start + half, g_update(a, b, beta_l))
        beta_l = beta_l[origin_r]
        return beta_update(beta_l, beta_r), origin_l[origin_r]

    def _leaf(self, i: int, llr: np.ndarray):
        paths = llr.size
        hard = (llr < 0).astype(np.uint8)
        if self._frozen[i]:
            zeros = np.zeros(paths, dtype=np.uint8)
            self.pm = pm_update(self.pm, llr, zeros, hard)
            self.decided[:, i] = 0
            return zeros[:, None], np.arange(paths)

        parents = np.repeat(np.arange(paths), 2)
        bits = np.tile(np.array([0, 1], dtype=np.uint8), paths)
        cand_pm = pm_update(self.pm[parents], llr[parents], bits, hard[parents])
        keep = prune_candidates(cand_pm, parents, bits, self.list_size)
        if self.observer is not None:
            self.observer(i, cand_pm, cand_pm[keep])
        origin = parents[keep]
        self.pm = cand_pm[keep]
        self.decided = self.decided[origin]
        self.decided[:, i] = bits[keep]
        return bits[keep][:, None], origin


def scl_decode(llrs, spec: CodeSpec, list_size: int) -> DecodeResult:
    return SclDecoder(spec, list_size).decode(llrs)
