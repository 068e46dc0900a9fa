"""Conditions, patterns and regions: support, closure, interclass variance, Jaccard."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, Sequence, Union

import numpy as np

from .data import CATEGORICAL, NUMERICAL, DataError, Dataset


def _num(x: float) -> str:
    if x == math.inf:
        return "inf"
    if x == -math.inf:
        return "-inf"
    return "%.6g" % x


@dataclass(frozen=True)
class Equals:
    """Categorical equality condition ``attr = value``."""

    attribute: str
    value: str

    def render(self) -> str:
        return f'{self.attribute}="{self.value}"'

    def matches_value(self, v: object) -> bool:
        return v == self.value


@dataclass(frozen=True)
class Interval:
    """Numerical membership condition with half-open semantics lo <= v < hi.

    lo = -inf / hi = +inf encode unbounded sides. The three rendered shapes are
    (-inf,a), [a,b] and (b,inf); membership is decided here, not by the rendering.
    """

    attribute: str
    lo: float
    hi: float

    def __post_init__(self):
        if not self.lo < self.hi:
            raise DataError(f"interval bounds must satisfy lo < hi, got [{self.lo}, {self.hi})")

    def render(self) -> str:
        if self.lo == -math.inf:
            return f"{self.attribute} in (-inf,{_num(self.hi)})"
        if self.hi == math.inf:
            return f"{self.attribute} in ({_num(self.lo)},inf)"
        return f"{self.attribute} in [{_num(self.lo)},{_num(self.hi)}]"

    def matches_value(self, v: object) -> bool:
        x = float(v)  # type: ignore[arg-type]
        return self.lo <= x < self.hi


Condition = Union[Equals, Interval]


def condition_key(c: Condition) -> tuple[str, str]:
    """Total order on conditions: attribute name, then rendered predicate."""
    return (c.attribute, c.render())


class Pattern:
    """Conjunction of conditions, at most one per attribute; the empty pattern
    matches everything and renders as TRUE."""

    __slots__ = ("conditions", "key")

    def __init__(self, conditions: Iterable[Condition] = ()):
        conds = tuple(sorted(conditions, key=condition_key))
        attrs = [c.attribute for c in conds]
        if len(set(attrs)) != len(attrs):
            raise DataError("pattern holds more than one condition on an attribute")
        object.__setattr__(self, "conditions", conds)
        object.__setattr__(self, "key", " & ".join(c.render() for c in conds) or "TRUE")

    def __setattr__(self, *a):  # immutable
        raise AttributeError("Pattern is immutable")

    def __eq__(self, other):
        return isinstance(other, Pattern) and self.conditions == other.conditions

    def __hash__(self):
        return hash(self.conditions)

    def __repr__(self):
        return f"Pattern({self.key})"

    def __len__(self):
        return len(self.conditions)

    @property
    def is_empty(self) -> bool:
        return not self.conditions

    def attributes(self) -> set[str]:
        return {c.attribute for c in self.conditions}

    def extend(self, c: Condition) -> "Pattern":
        return Pattern(self.conditions + (c,))

    def without(self, c: Condition) -> "Pattern":
        return Pattern(tuple(x for x in self.conditions if x != c))

    def render(self) -> str:
        return self.key

    def matches(self, obs: Mapping[str, object]) -> bool:
        for c in self.conditions:
            if c.attribute not in obs:
                raise DataError(f"observation is missing attribute {c.attribute!r}")
            if not c.matches_value(obs[c.attribute]):
                return False
        return True


TOP = Pattern()


@dataclass(frozen=True)
class Region:
    pattern: Pattern
    row_indices: np.ndarray


def _check_condition(c: Condition, d: Dataset) -> None:
    attr = d.attribute(c.attribute)
    if isinstance(c, Equals) and attr.kind != CATEGORICAL:
        raise DataError(f"equality condition on non-categorical attribute {c.attribute!r}")
    if isinstance(c, Interval) and attr.kind != NUMERICAL:
        raise DataError(f"interval condition on non-numerical attribute {c.attribute!r}")


def matches(c: Condition, row: Mapping[str, object], d: Dataset | None = None) -> bool:
    """Does the condition hold on the observation? Kind-checked when d is given."""
    if d is not None:
        _check_condition(c, d)
    if c.attribute not in row:
        raise DataError(f"observation is missing attribute {c.attribute!r}")
    return c.matches_value(row[c.attribute])


def condition_tids(c: Condition, d: Dataset) -> np.ndarray:
    """Sorted row indices where the condition holds."""
    _check_condition(c, d)
    col = d.column(c.attribute)
    if isinstance(c, Equals):
        mask = col == c.value
    else:
        mask = (col >= c.lo) & (col < c.hi)
    return np.nonzero(mask)[0]


def region(p: Pattern, d: Dataset) -> np.ndarray:
    """Sorted row indices of the pattern's region (all rows for the empty pattern)."""
    mask = np.ones(d.n, dtype=bool)
    for c in p.conditions:
        _check_condition(c, d)
        col = d.column(c.attribute)
        if isinstance(c, Equals):
            mask &= col == c.value
        else:
            mask &= (col >= c.lo) & (col < c.hi)
    return np.nonzero(mask)[0]


def region_of(p: Pattern, d: Dataset) -> Region:
    return Region(pattern=p, row_indices=region(p, d))


def support(p: Pattern, d: Dataset) -> tuple[int, float]:
    """(absolute, relative) support of the pattern on the dataset."""
    s = len(region(p, d))
    return s, s / d.n


def _contains_sorted(tids: np.ndarray, rows: np.ndarray) -> bool:
    # rows subset-of tids, both sorted unique
    if len(rows) > len(tids):
        return False
    pos = np.searchsorted(tids, rows)
    if len(tids) == 0:
        return len(rows) == 0
    pos = np.minimum(pos, len(tids) - 1)
    return bool(np.all(tids[pos] == rows))


def closure(
    p: Pattern,
    d: Dataset,
    universe: Sequence[Condition],
    *,
    _tids: dict[Condition, np.ndarray] | None = None,
) -> Pattern:
    """Closed pattern of p's region relative to an explicit condition universe.

    Adds every universe condition that holds on every row of the region; the
    region is unchanged and the operation is idempotent. Raises on an empty
    region. Should a universe carry two conditions on one attribute that both
    cover the region (nested intervals), canonical order wins to preserve the
    one-condition-per-attribute invariant.
    """
    rows = region(p, d)
    if len(rows) == 0:
        raise DataError(f"closure of pattern with empty region: {p.key}")
    taken = {c.attribute: c for c in p.conditions}
    for c in sorted(universe, key=condition_key):
        if c.attribute in taken:
            continue
        tids = _tids[c] if _tids is not None else condition_tids(c, d)
        if _contains_sorted(tids, rows):
            taken[c.attribute] = c
    return Pattern(taken.values())


def interclass_variance(p: Pattern, d: Dataset, y: str) -> float:
    """|D_p| (mu_D - mu_Dp)^2 + |D_not_p| (mu_D - mu_Dnotp)^2 for target y.

    Zero by convention when the region or its complement is empty.
    """
    if d.attribute(y).kind != NUMERICAL:
        raise DataError(f"interclass variance target {y!r} must be numerical")
    rows = region(p, d)
    yv = d.column(y)
    return iv_from_region(rows, yv)


def iv_from_region(rows: np.ndarray, y_values: np.ndarray) -> float:
    """Interclass variance of a region given as row indices into the full target column."""
    n = len(y_values)
    s = len(rows)
    if s == 0 or s == n:
        return 0.0
    total = float(np.sum(y_values))
    part = float(np.sum(y_values[rows]))
    mu = total / n
    mu_in = part / s
    mu_out = (total - part) / (n - s)
    return s * (mu - mu_in) ** 2 + (n - s) * (mu - mu_out) ** 2


def jaccard(p: Pattern, q: Pattern, d: Dataset) -> float:
    """Jaccard coefficient of the two regions; 0 when both are empty."""
    rp = region(p, d)
    rq = region(q, d)
    inter = len(np.intersect1d(rp, rq, assume_unique=True))
    union = len(rp) + len(rq) - inter
    return inter / union if union else 0.0
