"""Shortcut detection and sub-digraph (level partition) construction.

A weak shortcut at (k, l) means the chain, on entering S_[0,l] from S_k,
almost never lands exactly on S_l; a strong shortcut means the whole block
S_[l,k-1] is skipped when moving up.  Strong shortcuts make full-path
product coefficients collapse, which is what the sub-digraph construction
repairs: keep a chosen subset of non-optimal levels, absorb everything else
into level 0, and bound the (smaller) hitting time of the new chain.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import UnsupportedPartitionError
from .levels import (LEVEL_PARTITION, Level, LevelKernel, LevelPartition,
                     ProblemSpec, kernel_rows_numerators, _convert_rows)
from .numerics import default_precision, precision_context


@dataclass(frozen=True)
class ShortcutPair:
    k: int
    l: int
    ratio: object


@dataclass(frozen=True)
class ShortcutReport:
    epsilon: object
    weak: tuple[ShortcutPair, ...]
    strong: tuple[ShortcutPair, ...]
    classification: str     # "none" | "weak_only" | "strong"

    def has_weak(self, k: int, l: int) -> bool:
        return any(p.k == k and p.l == l for p in self.weak)

    def has_strong(self, k: int, l: int) -> bool:
        return any(p.k == k and p.l == l for p in self.strong)


def detect_shortcuts(kernel: LevelKernel, epsilon=None) -> ShortcutReport:
    """Classify the kernel's shortcut structure at a finite-n threshold.

    Weak pair (k, l): p(k, S_l) / p(k, S_[0,l]) <= epsilon (given positive
    mass at or above S_l).  Strong pair (k, l): p(k, S_[l,k-1]) / p(k,
    S_[0,k-1]) <= epsilon.  Default epsilon is 1/n, standing in for the
    asymptotic o(1) of the definitions.
    """
    n = kernel.n
    with precision_context(kernel.precision):
        if epsilon is None:
            epsilon = 1 / (kernel.p(0, 0) * 0 + n)
        elif not 0 < epsilon < 1:
            raise ValueError(f"epsilon must be in (0,1), got {epsilon}")
        weak = []
        strong = []
        for k in range(2, kernel.K + 1):
            prefix = kernel.p(k, 0)
            for l in range(1, k):
                prefix = prefix + kernel.p(k, l)
                if prefix and kernel.p(k, l) / prefix <= epsilon:
                    weak.append(ShortcutPair(k, l, kernel.p(k, l) / prefix))
            up = kernel.p_up(k)
            if not up:
                continue
            segment = kernel.p(k, 0) * 0
            for l in range(k - 1, 0, -1):
                segment = segment + kernel.p(k, l)
                if segment / up <= epsilon:
                    strong.append(ShortcutPair(k, l, segment / up))
    if strong:
        classification = "strong"
    elif weak:
        classification = "weak_only"
    else:
        classification = "none"
    key = lambda p: (p.k, p.l)
    return ShortcutReport(epsilon, tuple(sorted(weak, key=key)),
                          tuple(sorted(strong, key=key)), classification)


# ---------------------------------------------------------------------------
# sub-digraphs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SubDigraphSpec:
    """Ordered retained weight classes; everything else becomes level 0."""

    weights: tuple[int, ...]

    def __post_init__(self):
        if len(set(self.weights)) != len(self.weights):
            raise ValueError("retained weights must be distinct")
        if not self.weights:
            raise ValueError("at least one retained weight class is required")


def preset_subset(function: str, n: int) -> SubDigraphSpec:
    """The worked-example sub-level selections.

    TwoMax1: the climbing ladder S_1..S_{n/2} (weights n-1..n/2) plus the
    start level S_{n-1} (weight n/2-1).  Deceptive: the deceptive-basin
    ladder of weights n..n/2+1 followed by weight n/2 as the final retained
    level (which breaks descending-fitness order; a warning records that).
    """
    if n < 4 or n % 2:
        raise ValueError(f"presets need even n >= 4, got {n}")
    if function == "twomax1":
        return SubDigraphSpec(tuple(range(n - 1, n // 2 - 1, -1)) + (n // 2 - 1,))
    if function == "deceptive":
        return SubDigraphSpec(tuple(range(n, n // 2, -1)) + (n // 2,))
    raise UnsupportedPartitionError(f"no preset sub-digraph for function {function!r}")


def build_subdigraph(spec: ProblemSpec, subset: SubDigraphSpec, *,
                     mode: str = "mpfr", precision: int | None = None):
    """Modified absorbing chain over a retained subset of non-optimal levels.

    Retained levels keep their original outgoing probabilities; mass to any
    unretained state joins the absorbing complement (level 0).  The result
    feeds every bounds-engine and oracle operation that accepts a level
    partition.
    """
    fit = spec.fitness_table()
    opt = max(fit)
    warnings = []
    for w in subset.weights:
        if not 0 <= w <= spec.n:
            raise ValueError(f"retained weight {w} out of range [0, {spec.n}]")
        if fit[w] == opt:
            raise ValueError(f"retained weight {w} is optimal; subsets must be non-optimal")
    for i in range(len(subset.weights) - 1):
        a, b = subset.weights[i], subset.weights[i + 1]
        if fit[b] >= fit[a]:
            warnings.append(
                f"level ordering violates descending fitness between retained "
                f"levels {i + 1} (weight {a}, fitness {fit[a]}) and "
                f"{i + 2} (weight {b}, fitness {fit[b]})")
    retained = set(subset.weights)
    complement = tuple(w for w in range(spec.n + 1) if w not in retained)
    levels = [Level(complement, None)]
    levels += [Level((w,), fit[w]) for w in subset.weights]
    partition = LevelPartition(spec.n, tuple(levels), kind=LEVEL_PARTITION,
                               warnings=tuple(warnings))
    level_of = {w: i + 1 for i, w in enumerate(subset.weights)}
    level_weights = [list(lv.weights) for lv in partition.levels]
    nums = kernel_rows_numerators(spec.n, fit, level_weights, level_of)
    if precision is None and mode == "mpfr":
        precision = default_precision()
    rows = _convert_rows(nums, spec.n ** spec.n, mode, precision)
    kernel = LevelKernel(partition, rows, mode, precision)
    return partition, kernel
