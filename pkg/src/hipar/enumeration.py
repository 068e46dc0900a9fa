"""Hierarchical depth-first enumeration of closed-pattern hybrid rule candidates.

The search is rooted at the empty pattern and extends patterns one condition at
a time in canonical order. Each extension is support- and interclass-variance
pruned, closed over the in-scope condition universe, deduplicated with the
prefix-preserving leftmost-parent check, fitted with the local LASSO/OMP
contest, and accepted only if it strictly out-predicts every immediate ancestor
rule on its holdout slice. Accepted nodes re-discretize the numerical
attributes they leave free and recurse.
"""

from __future__ import annotations

import math
import zlib
from dataclasses import dataclass, field
from typing import Callable, Iterable, Sequence

import numpy as np

from .data import DataError, Dataset
from .discretization import DegenerateTarget, binarize_target, conditions_from_cuts, mdlp_cuts
from .patterns import (
    TOP,
    Condition,
    Equals,
    Interval,
    Pattern,
    closure,
    condition_key,
    condition_tids,
    iv_from_region,
    region,
)
from .regression import FittedRuleModel, best_local_model, check_metric, evaluate

Trace = Callable[[str], None]


@dataclass(frozen=True)
class HybridRule:
    """A pattern antecedent paired with its fitted local model."""

    pattern: Pattern
    fitted: FittedRuleModel
    support_abs: int
    support_rel: float
    is_default: bool = False

    @property
    def key(self) -> str:
        return self.pattern.key


@dataclass(frozen=True)
class EnumConfig:
    theta: float  # relative support threshold in (0, 1]
    iv_percentile: float = 85.0
    metric: str = "rmse"
    seed: int = 0
    # Re-discretized conditions are support-filtered on the full dataset by
    # default; True reads the threshold against the node's region instead.
    regional_rediscretization_support: bool = False
    # True explores subtrees below rules that fail the parent-improvement test
    # (the early-stopping heuristic switched off).
    exhaustive: bool = False


@dataclass
class EnumStats:
    visited: int = 0
    pruned_support: int = 0
    pruned_iv: int = 0
    pruned_leftmost: int = 0
    rejected_occam: int = 0
    accepted: int = 0
    visited_keys: list[str] = field(default_factory=list)


@dataclass(frozen=True)
class CandidateSet:
    rules: list[HybridRule]
    default_rule: HybridRule
    stats: EnumStats


def derive_seed(seed: int, key: str) -> int:
    """Stable per-pattern seed so fits are order-independent and reproducible."""
    return (zlib.crc32(key.encode("utf-8")) ^ (seed * 2654435761)) % 2**32


def _frequent(count: int, theta_abs: float) -> bool:
    return count + 1e-9 >= theta_abs


def _validate(d: Dataset, y: str, cfg: EnumConfig) -> None:
    if y != d.target:
        raise DataError(f"y={y!r} is not the dataset's designated target {d.target!r}")
    if not 0.0 < cfg.theta <= 1.0:
        raise DataError(f"theta must lie in (0, 1], got {cfg.theta}")
    if cfg.theta * d.n < 1.0 - 1e-9:
        raise DataError(f"theta*n = {cfg.theta * d.n:.3g} is below one row")
    if not 0.0 <= cfg.iv_percentile <= 100.0:
        raise DataError(f"iv_percentile must lie in [0, 100], got {cfg.iv_percentile}")
    check_metric(cfg.metric)


def _interval_conditions(
    d: Dataset, y: str, rows: np.ndarray, attrs: Sequence[str], cfg: EnumConfig
) -> list[Interval]:
    """MDLP intervals for the attributes, frequency-filtered and imbalance-guarded.

    An attribute whose filtered partition collapses to a single interval is
    dropped entirely for this node.
    """
    try:
        labels = binarize_target(rows, d, y)
    except DegenerateTarget:
        return []
    theta_abs = cfg.theta * (len(rows) if cfg.regional_rediscretization_support else d.n)
    out: list[Interval] = []
    for attr in attrs:
        conds = conditions_from_cuts(mdlp_cuts(attr, rows, d, labels))
        col = d.column(attr)
        base = col[rows] if cfg.regional_rediscretization_support else col
        survivors = [
            c for c in conds if _frequent(int(((base >= c.lo) & (base < c.hi)).sum()), theta_abs)
        ]
        if len(survivors) > 1:
            out.extend(survivors)
    return out


def hipar_init(d: Dataset, y: str, cfg: EnumConfig) -> list[Condition]:
    """Bootstrap conditions: frequent categorical equalities plus MDLP intervals
    derived on the full dataset, in canonical order. May be empty."""
    _validate(d, y, cfg)
    theta_abs = cfg.theta * d.n
    conditions: list[Condition] = []
    for attr in d.categorical_features():
        values, counts = np.unique(d.column(attr), return_counts=True)
        conditions.extend(
            Equals(attr, str(v)) for v, c in zip(values, counts) if _frequent(int(c), theta_abs)
        )
    rows = np.arange(d.n)
    conditions.extend(_interval_conditions(d, y, rows, d.numerical_features(), cfg))
    return sorted(conditions, key=condition_key)


def leftmost_parent_check(p: Pattern, c_prime: Condition, p_closed: Pattern) -> bool:
    """Prefix-preservation test: every condition of the closure that precedes
    c_prime in canonical order must already belong to p."""
    ck = condition_key(c_prime)
    own = set(p.conditions)
    for cond in p_closed.conditions:
        if condition_key(cond) < ck and cond not in own:
            return False
    return True


def occam_test(
    rule: HybridRule,
    parents: Sequence[HybridRule],
    eval_rows: np.ndarray,
    d: Dataset,
    y: str,
    metric: str,
) -> bool:
    """Accept the rule iff its model is strictly better than every parent's
    model on the same evaluation rows."""
    child = evaluate(rule.fitted.model, eval_rows, d, y, metric)
    for parent in parents:
        if not child < evaluate(parent.fitted.model, eval_rows, d, y, metric):
            return False
    return True


class _Search:
    def __init__(self, d: Dataset, y: str, cfg: EnumConfig, trace: Trace | None):
        self.d = d
        self.y = y
        self.cfg = cfg
        self.trace = trace
        self.yv = d.column(y)
        self.theta_abs = cfg.theta * d.n
        self.stats = EnumStats()
        self.accepted: list[HybridRule] = []
        self._tids: dict[Condition, np.ndarray] = {}
        self._iv1: dict[Condition, float] = {}
        self._memo: dict[str, HybridRule] = {}
        self._visited: set[str] = set()
        self.cat_universe: list[Condition] = []
        self.default_rule: HybridRule | None = None

    def tids(self, c: Condition) -> np.ndarray:
        t = self._tids.get(c)
        if t is None:
            t = condition_tids(c, self.d)
            self._tids[c] = t
        return t

    def iv_single(self, c: Condition) -> float:
        v = self._iv1.get(c)
        if v is None:
            v = iv_from_region(self.tids(c), self.yv)
            self._iv1[c] = v
        return v

    def rule_for(self, pattern: Pattern, rows: np.ndarray | None = None) -> HybridRule:
        rule = self._memo.get(pattern.key)
        if rule is not None:
            return rule
        if rows is None:
            rows = region(pattern, self.d)
        fitted = best_local_model(
            rows, self.d, self.y, self.cfg.metric, derive_seed(self.cfg.seed, pattern.key)
        )
        rule = HybridRule(
            pattern=pattern,
            fitted=fitted,
            support_abs=len(rows),
            support_rel=len(rows) / self.d.n,
            is_default=pattern.is_empty,
        )
        self._memo[pattern.key] = rule
        return rule

    def node_universe(self, p_hat_conditions: Iterable[Condition], conds: Sequence[Condition]):
        universe = list(self.cat_universe)
        universe.extend(c for c in conds if isinstance(c, Interval))
        universe.extend(p_hat_conditions)
        universe = list(dict.fromkeys(universe))
        for c in universe:
            self.tids(c)
        return universe

    def parent_rules(self, p_closed: Pattern, universe: Sequence[Condition]) -> list[HybridRule]:
        """Rules of the immediate closed ancestors (closure of the pattern minus
        one condition); the default rule stands in when nothing else remains."""
        parents: dict[str, HybridRule] = {}
        for c in p_closed.conditions:
            sub = p_closed.without(c)
            if sub.is_empty:
                parents[TOP.key] = self.default_rule
                continue
            par = closure(sub, self.d, universe, _tids=self._tids)
            if par == p_closed:
                continue  # c is implied by the rest; not a proper ancestor
            parents[par.key] = self.rule_for(par)
        if not parents:
            parents[TOP.key] = self.default_rule
        return list(parents.values())

    def emit(self, rendered: str, support: int, iv: float, decision: str) -> None:
        if self.trace is not None:
            self.trace(f"{rendered}\t{support}\t{iv:.6g}\t{decision}")

    def walk(self, pattern: Pattern, rows: np.ndarray, conds: Sequence[Condition]) -> None:
        ivs = [self.iv_single(c) for c in conds if isinstance(c, Interval)]
        # a percentile of fewer than two values is unstable; disable iv pruning
        nu = float(np.percentile(ivs, self.cfg.iv_percentile)) if len(ivs) >= 2 else -math.inf
        taken = pattern.attributes()
        for i, c in enumerate(conds):
            if c.attribute in taken:
                # sibling condition on a pinned attribute: the region is empty
                self.stats.pruned_support += 1
                self.emit(_render_with(pattern, c), 0, 0.0, "pruned-support")
                continue
            ext = np.intersect1d(rows, self.tids(c), assume_unique=True)
            iv = iv_from_region(ext, self.yv)
            if not _frequent(len(ext), self.theta_abs):
                self.stats.pruned_support += 1
                self.emit(_render_with(pattern, c), len(ext), iv, "pruned-support")
                continue
            if not iv > nu:
                self.stats.pruned_iv += 1
                self.emit(_render_with(pattern, c), len(ext), iv, "pruned-iv")
                continue
            p_hat = pattern.extend(c)
            universe = self.node_universe(p_hat.conditions, conds)
            p_closed = closure(p_hat, self.d, universe, _tids=self._tids)
            if not leftmost_parent_check(pattern, c, p_closed) or p_closed.key in self._visited:
                # second clause: independently re-discretized branches can in
                # principle converge on one closed pattern; visit it once
                self.stats.pruned_leftmost += 1
                self.emit(p_closed.key, len(ext), iv, "pruned-leftmost")
                continue
            self.stats.visited += 1
            self._visited.add(p_closed.key)
            self.stats.visited_keys.append(p_closed.key)
            rule = self.rule_for(p_closed, rows=ext)
            parents = self.parent_rules(p_closed, universe)
            ok = occam_test(
                rule, parents, rule.fitted.holdout_rows, self.d, self.y, self.cfg.metric
            )
            if ok:
                self.accepted.append(rule)
                self.stats.accepted += 1
                self.emit(p_closed.key, len(ext), iv, "accepted")
            else:
                self.stats.rejected_occam += 1
                self.emit(p_closed.key, len(ext), iv, "rejected-occam")
            if ok or self.cfg.exhaustive:
                closed_conds = set(p_closed.conditions)
                child_cat = [
                    cc for cc in conds[i + 1 :] if isinstance(cc, Equals) and cc not in closed_conds
                ]
                free_numeric = [
                    a for a in self.d.numerical_features() if a not in p_closed.attributes()
                ]
                child_num = _interval_conditions(self.d, self.y, ext, free_numeric, self.cfg)
                children = sorted(child_cat + child_num, key=condition_key)
                if children:
                    self.walk(p_closed, ext, children)


def _render_with(pattern: Pattern, c: Condition) -> str:
    conds = sorted(pattern.conditions + (c,), key=condition_key)
    return " & ".join(x.render() for x in conds)


def enumerate_candidates(
    d: Dataset,
    y: str,
    init_conditions: Sequence[Condition],
    cfg: EnumConfig,
    trace: Trace | None = None,
) -> CandidateSet:
    """Run the full candidate enumeration; the default rule is fitted first.

    Returns the accepted rules (closed, frequent, each strictly beating its
    evaluated parents), the default rule, and per-decision search statistics.
    """
    _validate(d, y, cfg)
    search = _Search(d, y, cfg, trace)
    search.default_rule = search.rule_for(TOP, rows=np.arange(d.n))
    search.cat_universe = sorted(
        (c for c in init_conditions if isinstance(c, Equals)), key=condition_key
    )
    conds = sorted(init_conditions, key=condition_key)
    if conds:
        search.walk(TOP, np.arange(d.n), conds)
    return CandidateSet(rules=search.accepted, default_rule=search.default_rule, stats=search.stats)
