"""Interval conditions for numerical attributes: target binarization + MDLP cuts.

The discretizer binarizes the target at its median into large-value (LV) and
small-value (SV) classes, then recursively splits each numerical attribute at
the boundary cut of minimum class entropy, accepting a cut only when its
information gain clears the Fayyad-Irani MDL criterion

    gain > (log2(N - 1) + delta) / N,
    delta = log2(3^k - 2) - (k * Ent(S) - k1 * Ent(S1) - k2 * Ent(S2)).
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .data import NUMERICAL, DataError, Dataset
from .patterns import Condition, Interval


class DegenerateTarget(DataError):
    """Target binarization produced an empty class; discretization is skipped."""


@dataclass(frozen=True)
class TargetBinarization:
    threshold: float
    rows: np.ndarray  # the binarized row indices, sorted
    labels: np.ndarray  # aligned with rows; True = LV (value above threshold)


@dataclass(frozen=True)
class CutPointSet:
    attribute: str
    cuts: tuple[float, ...]  # strictly increasing


def binarize_target(rows, d: Dataset, y: str) -> TargetBinarization:
    """Median split of the target over the rows; ties at the median go to SV."""
    idx = np.asarray(sorted(rows), dtype=int)
    if len(idx) < 2:
        raise DataError("target binarization needs at least 2 rows")
    values = d.column(y)[idx]
    threshold = float(np.median(values))
    labels = values > threshold
    if labels.all() or not labels.any():
        raise DegenerateTarget(f"target {y!r} has a one-sided median split on these rows")
    return TargetBinarization(threshold=threshold, rows=idx, labels=labels)


def _entropy(n_pos: int, n: int) -> float:
    if n == 0:
        return 0.0
    out = 0.0
    for c in (n_pos, n - n_pos):
        if c:
            p = c / n
            out -= p * math.log2(p)
    return out


def _n_classes(n_pos: int, n: int) -> int:
    return int(n_pos > 0) + int(n_pos < n)


def _mdl_accepts(n: int, pos: int, n1: int, pos1: int) -> tuple[bool, float]:
    """Fayyad-Irani test for splitting (n, pos) into (n1, pos1) and the rest."""
    n2, pos2 = n - n1, pos - pos1
    ent = _entropy(pos, n)
    ent1 = _entropy(pos1, n1)
    ent2 = _entropy(pos2, n2)
    gain = ent - (n1 * ent1 + n2 * ent2) / n
    k, k1, k2 = _n_classes(pos, n), _n_classes(pos1, n1), _n_classes(pos2, n2)
    delta = math.log2(3**k - 2) - (k * ent - k1 * ent1 - k2 * ent2)
    return gain > (math.log2(n - 1) + delta) / n, gain


def mdlp_cuts(attribute: str, rows, d: Dataset, labels: TargetBinarization) -> CutPointSet:
    """Recursive entropy partitioning of one attribute against the LV/SV labels.

    Candidate cuts are midpoints between consecutive distinct values whose label
    sets differ; within a segment the boundary of minimum weighted entropy is
    tried first and kept only if the MDL criterion accepts it (smallest cut wins
    entropy ties). An empty cut set is a valid result.
    """
    if d.attribute(attribute).kind != NUMERICAL:
        raise DataError(f"cannot discretize non-numerical attribute {attribute!r}")
    idx = np.asarray(sorted(rows), dtype=int)
    if len(idx) < 2:
        raise DataError("discretization needs at least 2 rows")
    if not np.array_equal(idx, labels.rows):
        raise DataError("labels were binarized on a different row set")

    values = d.column(attribute)[idx]
    order = np.argsort(values, kind="stable")
    values = values[order]
    lab = labels.labels[order].astype(int)

    # collapse to distinct-value groups: counts and LV counts per group
    uniq, start = np.unique(values, return_index=True)
    group_n = np.diff(np.append(start, len(values)))
    group_pos = np.add.reduceat(lab, start)

    cuts: list[float] = []
    stack = [(0, len(uniq))]  # half-open group ranges
    while stack:
        lo, hi = stack.pop()
        total_n = int(group_n[lo:hi].sum())
        total_pos = int(group_pos[lo:hi].sum())
        best: tuple[float, float, int] | None = None  # (entropy, cut, split group)
        acc_n = 0
        acc_pos = 0
        for g in range(lo, hi - 1):
            acc_n += int(group_n[g])
            acc_pos += int(group_pos[g])
            left_set = (group_pos[g] > 0, group_pos[g] < group_n[g])
            right_set = (group_pos[g + 1] > 0, group_pos[g + 1] < group_n[g + 1])
            if left_set == right_set:
                continue  # not a boundary point
            e = (
                acc_n * _entropy(acc_pos, acc_n)
                + (total_n - acc_n) * _entropy(total_pos - acc_pos, total_n - acc_n)
            ) / total_n
            cut = (uniq[g] + uniq[g + 1]) / 2.0
            if best is None or e < best[0]:
                best = (e, cut, g + 1)
        if best is None:
            continue
        _, cut, split = best
        n1 = int(group_n[lo:split].sum())
        pos1 = int(group_pos[lo:split].sum())
        accepted, _gain = _mdl_accepts(total_n, total_pos, n1, pos1)
        if accepted:
            cuts.append(float(cut))
            stack.append((lo, split))
            stack.append((split, hi))
    return CutPointSet(attribute=attribute, cuts=tuple(sorted(cuts)))


def conditions_from_cuts(cp: CutPointSet) -> list[Condition]:
    """k cuts -> k+1 half-open interval conditions partitioning the real line.

    Zero cuts yield zero conditions, never a trivial full-range condition.
    """
    if not cp.cuts:
        return []
    bounds = (-math.inf,) + cp.cuts + (math.inf,)
    return [Interval(cp.attribute, bounds[i], bounds[i + 1]) for i in range(len(bounds) - 1)]
