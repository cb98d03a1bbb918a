"""Fitness-level partitions and exact transition kernels of the (1+1) EA.

The chain under study is the elitist (1+1) EA with bitwise mutation at rate
1/n (each bit flips independently, offspring accepted iff its fitness is at
least the parent's).  All four shipped benchmark functions depend on a bit
string only through its Hamming weight, so the chain lumps exactly onto
weight classes and every transition probability is a rational number with
denominator n**n.  Kernels are therefore accumulated in exact integer
arithmetic and only converted to the working representation (mpq or mpfr)
at the end.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb

import gmpy2

from .errors import AbsorbingLevelError, UnsupportedPartitionError
from .numerics import clamp01, default_precision, precision_context

FUNCTIONS = ("onemax", "fullydeceptive", "twomax1", "deceptive", "custom")

FITNESS_PARTITION = "fitness_partition"
LEVEL_PARTITION = "level_partition"


@dataclass(frozen=True)
class ProblemSpec:
    """Benchmark selection: function name, bit-string length, fixed 1/n mutation.

    ``weight_fitness`` is only consulted for ``custom`` and must map every
    Hamming weight 0..n to a fitness value.
    """

    function: str
    n: int
    weight_fitness: tuple[Fraction, ...] | None = None

    def __post_init__(self):
        if self.function not in FUNCTIONS:
            raise ValueError(f"unknown function {self.function!r}; expected one of {FUNCTIONS}")
        if self.n < 2:
            raise ValueError(f"n must be >= 2, got {self.n}")
        if self.function in ("twomax1", "deceptive") and self.n % 2:
            raise ValueError(f"{self.function} requires even n, got {self.n}")
        if self.function == "custom":
            if self.weight_fitness is None:
                raise ValueError("custom function requires a weight_fitness map")
            wf = tuple(Fraction(v) for v in self.weight_fitness)
            if len(wf) != self.n + 1:
                raise ValueError(
                    f"weight_fitness must cover all weights 0..{self.n} "
                    f"(got {len(wf)} values)")
            object.__setattr__(self, "weight_fitness", wf)
        elif self.weight_fitness is not None:
            raise ValueError("weight_fitness is only meaningful for the custom function")

    def fitness(self, w: int) -> Fraction:
        """Fitness of any string of Hamming weight w."""
        n = self.n
        if not 0 <= w <= n:
            raise ValueError(f"weight {w} out of range [0, {n}]")
        if self.function == "onemax":
            return Fraction(w)
        if self.function == "fullydeceptive":
            return Fraction(n + 1 if w == 0 else w)
        if self.function == "twomax1":
            if w in (0, n):
                return Fraction(n)
            return Fraction(w if w >= n // 2 else n // 2 - w)
        if self.function == "deceptive":
            return Fraction(n - 2 * w if w <= n // 2 else w - n - 1)
        return self.weight_fitness[w]

    def fitness_table(self) -> tuple[Fraction, ...]:
        return tuple(self.fitness(w) for w in range(self.n + 1))


@dataclass(frozen=True)
class Level:
    weights: tuple[int, ...]
    fitness: Fraction | None  # None only for the complement level of a level partition


@dataclass(frozen=True)
class LevelPartition:
    """Ordered ranks S_0..S_K.

    ``fitness_partition``: levels cover all weights and fitness strictly
    decreases with the index.  ``level_partition``: levels 1..K are a chosen
    subset of non-optimal weight classes and level 0 absorbs everything else;
    ordering violations are recorded as warnings rather than rejected.
    """

    n: int
    levels: tuple[Level, ...]
    kind: str = FITNESS_PARTITION
    warnings: tuple[str, ...] = ()

    def __post_init__(self):
        seen = set()
        for lv in self.levels:
            for w in lv.weights:
                if w in seen:
                    raise ValueError(f"weight {w} appears in more than one level")
                seen.add(w)
        if self.kind == FITNESS_PARTITION:
            if seen != set(range(self.n + 1)):
                raise ValueError("fitness partition must cover all weights 0..n")
            fits = [lv.fitness for lv in self.levels]
            if any(f is None for f in fits):
                raise ValueError("fitness partition levels need fitness values")
            if any(fits[i] <= fits[i + 1] for i in range(len(fits) - 1)):
                raise ValueError("fitness must strictly decrease with the level index")

    @property
    def K(self) -> int:
        return len(self.levels) - 1

    def level_of_weight(self) -> dict[int, int]:
        return {w: k for k, lv in enumerate(self.levels) for w in lv.weights}


def build_partition(spec: ProblemSpec) -> LevelPartition:
    """Group weights by fitness value, ranked from the optimum downward."""
    fit = spec.fitness_table()
    values = sorted(set(fit), reverse=True)
    levels = []
    for v in values:
        ws = tuple(w for w in range(spec.n + 1) if fit[w] == v)
        levels.append(Level(ws, v))
    return LevelPartition(spec.n, tuple(levels))


# ---------------------------------------------------------------------------
# bitwise-mutation transition mass
# ---------------------------------------------------------------------------

@lru_cache(maxsize=None)
def mutation_mass_numerators(n: int, w: int) -> tuple[int, ...]:
    """Integer numerators (over n**n) of the weight->weight mutation mass.

    Entry w2 sums C(w,a)*C(n-w,b)*(n-1)**(n-a-b) over flip counts with
    w - a + b = w2.  The tuple sums to exactly n**n.
    """
    if not 0 <= w <= n:
        raise ValueError(f"weight {w} out of range [0, {n}]")
    powers = [(n - 1) ** j for j in range(n + 1)]
    ones = [comb(w, a) for a in range(w + 1)]
    zeros = [comb(n - w, b) for b in range(n - w + 1)]
    out = [0] * (n + 1)
    for a in range(w + 1):
        for b in range(n - w + 1):
            out[w - a + b] += ones[a] * zeros[b] * powers[n - a - b]
    assert sum(out) == n ** n
    return tuple(out)


def weight_transition_probability_exact(n: int, w: int, w_after: int) -> gmpy2.mpq:
    """Exact probability of mutating a weight-w string to weight w_after."""
    if not 0 <= w_after <= n:
        raise ValueError(f"weight {w_after} out of range [0, {n}]")
    return gmpy2.mpq(mutation_mass_numerators(n, w)[w_after], n ** n)


def weight_transition_probability(n: int, w: int, w_after: int,
                                  precision: int | None = None) -> gmpy2.mpfr:
    """Same mass rounded to an mpfr at the given precision (default 256 bits)."""
    q = weight_transition_probability_exact(n, w, w_after)
    with precision_context(precision):
        return gmpy2.mpfr(q)


# ---------------------------------------------------------------------------
# level kernel
# ---------------------------------------------------------------------------

class LevelKernel:
    """Level-to-level transition table of the elitist chain.

    Rows are exact for every kernel this package constructs, so the p_min and
    p_max tables coincide (``exact`` is always True); both names are kept for
    interface symmetry with bound providers.  Entries above the diagonal can
    be positive only for level partitions whose index order disagrees with
    the fitness order (the Deceptive preset); ``index_monotone`` records this.
    """

    def __init__(self, partition: LevelPartition, rows, mode: str, precision: int | None):
        self.partition = partition
        self.rows = rows
        self.mode = mode
        self.precision = precision
        self.exact = True
        K = partition.K
        with precision_context(precision):
            self.up = tuple(sum(rows[k][:k], _zero(mode, precision)) for k in range(K + 1))
        self.index_monotone = all(
            not rows[k][l] for k in range(K + 1) for l in range(k + 1, K + 1))

    @property
    def K(self) -> int:
        return self.partition.K

    @property
    def n(self) -> int:
        return self.partition.n

    def p(self, k: int, l: int):
        return self.rows[k][l]

    # p_min/p_max aliases: exact kernels carry a single table.
    p_min = p
    p_max = p

    def p_up(self, k: int):
        """p(k, S_[0,k-1]): total mass to lower-indexed levels."""
        return self.up[k]

    def p_segment(self, k: int, lo: int, hi: int):
        """p(k, S_[lo,hi]) for an index range."""
        if not 0 <= lo <= hi <= self.K:
            raise ValueError(f"bad segment [{lo},{hi}] for K={self.K}")
        with precision_context(self.precision):
            return sum(self.rows[k][lo:hi + 1], _zero(self.mode, self.precision))

    def r(self, k: int, l: int):
        """Conditional transition probability r(k, l) = p(k,l)/p(k,[0,k-1])."""
        if not self.up[k]:
            raise AbsorbingLevelError(f"level {k} cannot reach higher levels")
        with precision_context(self.precision):
            return self.rows[k][l] / self.up[k]


def _zero(mode: str, precision: int | None):
    if mode == "exact":
        return gmpy2.mpq(0)
    with precision_context(precision):
        return gmpy2.mpfr(0)


def _convert_rows(num_rows, den: int, mode: str, precision: int | None):
    if mode == "exact":
        return tuple(tuple(gmpy2.mpq(x, den) for x in row) for row in num_rows)
    with precision_context(precision):
        d = gmpy2.mpfr(den)
        return tuple(tuple(gmpy2.mpfr(x) / d for x in row) for row in num_rows)


def kernel_rows_numerators(n: int, fit, level_weights, level_of):
    """Integer-numerator rows of the lumped elitist chain.

    ``level_weights[k]`` lists the weight classes of level k; every
    non-absorbing level must be a single class.  ``level_of`` maps a target
    weight to its level, defaulting to 0 (the absorbing complement of a level
    partition).  Rejected proposals and equal-weight moves fold into the
    self-loop.  Every row sums to exactly n**n.
    """
    K = len(level_weights) - 1
    den = n ** n
    rows = [[0] * (K + 1) for _ in range(K + 1)]
    rows[0][0] = den
    for k in range(1, K + 1):
        if len(level_weights[k]) != 1:
            raise UnsupportedPartitionError(
                f"non-absorbing level {k} holds {len(level_weights[k])} weight classes; "
                "lumping is only guaranteed for single-class levels")
        w = level_weights[k][0]
        mass = mutation_mass_numerators(n, w)
        self_mass = mass[w]
        for w2 in range(n + 1):
            if w2 == w:
                continue
            if fit[w2] >= fit[w]:
                target = level_of.get(w2, 0)
                if target == k:
                    self_mass += mass[w2]
                else:
                    rows[k][target] += mass[w2]
            else:
                self_mass += mass[w2]
        rows[k][k] = self_mass
        assert sum(rows[k]) == den
    return rows


def build_kernel(spec: ProblemSpec, partition: LevelPartition | None = None, *,
                 mode: str = "mpfr", precision: int | None = None) -> LevelKernel:
    """Exact transition kernel of the (1+1) EA on the fitness-level partition.

    ``mode="exact"`` keeps entries as rationals; ``mode="mpfr"`` rounds once
    at the end to the requested precision.  Either way p_min equals p_max.
    """
    if mode not in ("exact", "mpfr"):
        raise ValueError(f"mode must be 'exact' or 'mpfr', got {mode!r}")
    if partition is None:
        partition = build_partition(spec)
    if partition.n != spec.n:
        raise ValueError("partition and spec disagree on n")
    fit = spec.fitness_table()
    level_weights = [list(lv.weights) for lv in partition.levels]
    nums = kernel_rows_numerators(spec.n, fit, level_weights, partition.level_of_weight())
    if precision is None and mode == "mpfr":
        precision = default_precision()
    rows = _convert_rows(nums, spec.n ** spec.n, mode, precision)
    return LevelKernel(partition, rows, mode, precision)


def conditional_probability(kernel: LevelKernel, k: int, lo: int, hi: int):
    """(r_min, r_max) for p(k, S_[lo,hi]) / p(k, S_[0,k-1]), clamped to [0,1].

    The two coincide for the exact kernels built here.
    """
    if not 0 <= lo <= hi < k <= kernel.K:
        raise ValueError(f"need 0 <= lo <= hi < k <= K, got lo={lo} hi={hi} k={k} K={kernel.K}")
    up = kernel.p_up(k)
    if not up:
        raise AbsorbingLevelError(f"level {k} cannot reach higher levels")
    with precision_context(kernel.precision):
        r = clamp01(kernel.p_segment(k, lo, hi) / up, "conditional probability")
    return r, r


# ---------------------------------------------------------------------------
# level digraph
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LevelDigraph:
    """Vertices are levels; an arc (k, l) exists iff p_min(k, l) > 0."""

    partition: LevelPartition
    arcs: tuple[tuple[int, int], ...]
    probability: dict = field(repr=False)

    @property
    def K(self) -> int:
        return self.partition.K

    def successors(self, k: int) -> tuple[int, ...]:
        return tuple(l for (a, l) in self.arcs if a == k)


def build_digraph(kernel: LevelKernel) -> LevelDigraph:
    arcs = []
    probs = {}
    for k in range(kernel.K + 1):
        for l in range(kernel.K + 1):
            if l != k and kernel.p(k, l):
                arcs.append((k, l))
                probs[(k, l)] = kernel.p(k, l)
    return LevelDigraph(kernel.partition, tuple(arcs), probs)
