"""Coefficient families and linear hitting-time bounds.

Every bound has the shape

    d_k = 1/p(k, S_[0,k-1]) + sum_{l=1}^{k-1} c(k,l) / p(l, S_[0,l-1])

and the methods differ only in the coefficient rule: constants 0/1, a single
scalar (viscosity), a per-level vector (visit probability), the recursive
tables evaluated with equality, the non-recursive full-path product of
conditional probabilities, and its two-probability ratio form.  Lower bounds
divide by upper bounds on the level-leaving probabilities and vice versa;
for the exact kernels built here the two coincide.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from math import comb

import gmpy2

from .errors import AbsorbingLevelError, UnsupportedPartitionError
from .levels import FITNESS_PARTITION, LevelKernel
from .numerics import clamp01, default_precision, precision_context


class Method(str, Enum):
    TYPE0 = "type0"
    TYPE1 = "type1"
    VISCOSITY_C = "viscosity-c"
    VISIT_CL = "visit-cl"
    RECURSIVE_LOWER = "recursive-lower"
    RECURSIVE_UPPER = "recursive-upper"
    DIGRAPH_PRODUCT_LOWER = "digraph-product"
    RATIO_LOWER = "ratio-lower"
    CONDITIONAL_UPPER = "conditional-upper"
    RATIO_UPPER = "ratio-upper"
    PAPER_ANALYTIC = "paper-analytic"


LOWER_METHODS = (Method.TYPE0, Method.VISCOSITY_C, Method.VISIT_CL,
                 Method.RECURSIVE_LOWER, Method.DIGRAPH_PRODUCT_LOWER,
                 Method.RATIO_LOWER, Method.PAPER_ANALYTIC)
UPPER_METHODS = (Method.TYPE1, Method.RECURSIVE_UPPER, Method.CONDITIONAL_UPPER,
                 Method.RATIO_UPPER)


def method_direction(method: Method) -> str:
    return "lower" if method in LOWER_METHODS else "upper"


@dataclass
class CoefficientTable:
    """c(k, l) for 1 <= l < k <= K, with c(k, k) = 1 by convention.

    Constant families avoid materializing K**2 entries via ``default``; the
    visit-probability family stores one value per target level.
    """

    method: Method
    K: int
    values: dict | None = None
    default = 0
    scalar_c = None
    visit_c: tuple | None = None

    def get(self, k: int, l: int):
        if not 1 <= l <= k <= self.K:
            raise ValueError(f"coefficient ({k},{l}) out of range for K={self.K}")
        if l == k:
            return 1
        if self.visit_c is not None:
            return self.visit_c[l]
        if self.values is not None and (k, l) in self.values:
            return self.values[(k, l)]
        return self.default

    def minimum(self):
        """Smallest stored off-diagonal coefficient (None for constant families)."""
        if self.visit_c is not None:
            vals = self.visit_c[1:self.K]
            return min(vals) if vals else None
        if self.values:
            return min(self.values.values())
        return None


def _require_fitness_partition(kernel: LevelKernel, what: str):
    if kernel.partition.kind != FITNESS_PARTITION:
        raise UnsupportedPartitionError(
            f"{what} is only valid on fitness level partitions, not on the "
            "level partitions used for sub-digraphs")


def _require_live_levels(kernel: LevelKernel):
    for k in range(1, kernel.K + 1):
        if not kernel.p_up(k):
            raise AbsorbingLevelError(f"level {k} cannot reach higher levels")


def _prefixes(kernel: LevelKernel):
    """pref[k][l] = p(k, S_[0,l]) for l < k, accumulated without cancellation."""
    pref = []
    with precision_context(kernel.precision):
        for k in range(kernel.K + 1):
            row = []
            acc = kernel.p(k, 0) * 0
            for l in range(k):
                acc = acc + kernel.p(k, l)
                row.append(acc)
            pref.append(row)
    return pref


def _suffixes(kernel: LevelKernel):
    """suf[k][l] = p(k, S_[l,k-1]) for 1 <= l <= k-1."""
    suf = []
    with precision_context(kernel.precision):
        for k in range(kernel.K + 1):
            row = {}
            acc = kernel.p(k, 0) * 0
            for l in range(k - 1, 0, -1):
                acc = acc + kernel.p(k, l)
                row[l] = acc
            suf.append(row)
    return suf


# ---------------------------------------------------------------------------
# coefficient rules
# ---------------------------------------------------------------------------

def coeff_constant(kernel: LevelKernel, which: int) -> CoefficientTable:
    """Type-0 (all zero) or Type-1 (all one) coefficients."""
    if which not in (0, 1):
        raise ValueError("which must be 0 or 1")
    table = CoefficientTable(Method.TYPE0 if which == 0 else Method.TYPE1, kernel.K)
    table.default = which
    return table


def coeff_viscosity(kernel: LevelKernel) -> CoefficientTable:
    """Single scalar c = min over pairs of p(k,l) / p(k, S_[0,l])."""
    _require_live_levels(kernel)
    c = None
    with precision_context(kernel.precision):
        pref = _prefixes(kernel)
        for k in range(2, kernel.K + 1):
            for l in range(1, k):
                denom = pref[k][l]
                if not denom:
                    continue  # no mass at or above S_l: unconstrained pair
                ratio = kernel.p(k, l) / denom
                c = ratio if c is None else min(c, ratio)
    c = clamp01(c if c is not None else 1, "viscosity")
    table = CoefficientTable(Method.VISCOSITY_C, kernel.K)
    table.default = c
    table.scalar_c = c
    return table


def coeff_visit_probability(kernel: LevelKernel, start=None) -> CoefficientTable:
    """Per-level visit probabilities c_l.

    ``start`` is a distribution over levels 0..K (default: deterministic at
    level K).  The start condition contributes start[l] / start[S_[0,l]] with
    the 0/0 case read as 0, which makes a fixed-start run degenerate to the
    Type-0 bound exactly as in the degenerate case discussed alongside the
    visit-probability method.
    """
    if not kernel.index_monotone:
        raise UnsupportedPartitionError(
            "visit probabilities need the level index to follow the fitness order")
    _require_live_levels(kernel)
    K = kernel.K
    if start is None:
        start = tuple(1 if k == K else 0 for k in range(K + 1))
    start = tuple(start)
    if len(start) != K + 1:
        raise ValueError(f"start distribution needs {K + 1} entries, got {len(start)}")
    with precision_context(kernel.precision):
        total = sum(gmpy2.mpfr(s) if isinstance(s, float) else s for s in start)
        if abs(total - 1) > 1e-9 or any(s < 0 for s in start):
            raise ValueError("start distribution must be nonnegative and sum to 1")
        pref = _prefixes(kernel)
        visit = [1] * (K + 1)
        for l in range(1, K + 1):
            best = None
            for k in range(l + 1, K + 1):
                denom = pref[k][l]
                if not denom:
                    continue
                ratio = kernel.p(k, l) / denom
                best = ratio if best is None else min(best, ratio)
            mass_at_or_above = sum(start[:l + 1], start[0] * 0)
            if not start[l]:
                start_term = 0
            else:
                start_term = start[l] / mass_at_or_above
            candidates = [start_term] if best is None else [best, start_term]
            visit[l] = clamp01(min(candidates), "visit probability")
    table = CoefficientTable(Method.VISIT_CL, K)
    table.visit_c = tuple(visit)
    return table


def coeff_recursive(kernel: LevelKernel, direction: str) -> CoefficientTable:
    """Recursive tables evaluated with equality, lower-triangular in k.

    c(k,l) = r(k,l) + sum_{j=l+1}^{k-1} r(k,j) c(j,l); on exact kernels the
    lower and upper variants coincide and the assembled bound is the exact
    hitting time.
    """
    if direction not in ("lower", "upper"):
        raise ValueError("direction must be 'lower' or 'upper'")
    if direction == "upper":
        _require_fitness_partition(kernel, "the recursive upper bound")
    _require_live_levels(kernel)
    K = kernel.K
    values = {}
    with precision_context(kernel.precision):
        r = [[kernel.p(k, j) / kernel.p_up(k) for j in range(k)] for k in range(1, K + 1)]
        for l in range(1, K):
            col = {}
            for k in range(l + 1, K + 1):
                acc = r[k - 1][l]
                for j in range(l + 1, k):
                    cj = col.get(j)
                    if cj:
                        acc = acc + r[k - 1][j] * cj
                col[k] = clamp01(acc, "recursive coefficient")
            for k, v in col.items():
                values[(k, l)] = v
    method = Method.RECURSIVE_LOWER if direction == "lower" else Method.RECURSIVE_UPPER
    table = CoefficientTable(method, K, values)
    return table


def coeff_digraph_product(kernel: LevelKernel) -> CoefficientTable:
    """Non-recursive coefficients: the full-path product of conditional steps.

    c(k,l) = prod_{i=l+1}^{k} r(i, S_[l,i-1]), built in O(K^2) by extending
    one running product per l.
    """
    _require_live_levels(kernel)
    K = kernel.K
    values = {}
    with precision_context(kernel.precision):
        suf = _suffixes(kernel)
        for l in range(1, K):
            running = None
            for k in range(l + 1, K + 1):
                seg = suf[k].get(l, kernel.p(k, 0) * 0)
                factor = seg / kernel.p_up(k)
                running = factor if running is None else running * factor
                values[(k, l)] = clamp01(running, "digraph coefficient")
    return CoefficientTable(Method.DIGRAPH_PRODUCT_LOWER, K, values)


def coeff_conditional_upper(kernel: LevelKernel) -> CoefficientTable:
    """Single-factor upper coefficients c(k,l) = r(k, S_[l,k-1])."""
    _require_fitness_partition(kernel, "the conditional upper bound")
    _require_live_levels(kernel)
    K = kernel.K
    values = {}
    with precision_context(kernel.precision):
        suf = _suffixes(kernel)
        for k in range(2, K + 1):
            for l in range(1, k):
                values[(k, l)] = clamp01(suf[k][l] / kernel.p_up(k),
                                         "conditional upper coefficient")
    return CoefficientTable(Method.CONDITIONAL_UPPER, K, values)


def coeff_ratio(provider, direction: str) -> CoefficientTable:
    """Two-probability ratio coefficients.

    Lower: c(k,l) = prod_{i=l+1}^{k} 1/(1 + skip(i,l)/step(i,l)) where skip
    bounds p(x_i, S_[0,l-1]) from above and step bounds p(x_i, S_[l,i-1])
    from below; a zero step breaks the path and yields factor 0, a zero skip
    yields factor 1.  Upper: the single-factor form at (k,l) with the bound
    directions swapped.
    """
    if direction not in ("lower", "upper"):
        raise ValueError("direction must be 'lower' or 'upper'")
    K = provider.K
    values = {}
    with precision_context(provider.precision):
        one = gmpy2.mpfr(1) if getattr(provider, "mode", "mpfr") == "mpfr" else gmpy2.mpq(1)
        if direction == "lower":
            for l in range(1, K):
                running = None
                for k in range(l + 1, K + 1):
                    skip = provider.skip_upper(k, l)
                    step = provider.step_lower(k, l)
                    if not step:
                        factor = one * 0
                    elif not skip:
                        factor = one
                    else:
                        factor = one / (1 + skip / step)
                    running = factor if running is None else running * factor
                    values[(k, l)] = clamp01(running, "ratio coefficient")
            return CoefficientTable(Method.RATIO_LOWER, K, values)
        if not provider.supports_upper:
            raise UnsupportedPartitionError(
                "this probability provider has no upper-direction bounds")
        if not getattr(provider, "fitness_partition", True):
            raise UnsupportedPartitionError(
                "upper ratio coefficients are only valid on fitness level partitions")
        for k in range(2, K + 1):
            for l in range(1, k):
                skip = provider.skip_lower(k, l)
                step = provider.step_upper(k, l)
                if not step:
                    values[(k, l)] = one * 0
                elif not skip:
                    values[(k, l)] = one
                else:
                    values[(k, l)] = clamp01(one / (1 + skip / step), "ratio coefficient")
        return CoefficientTable(Method.RATIO_UPPER, K, values)


# ---------------------------------------------------------------------------
# probability providers
# ---------------------------------------------------------------------------

class KernelProvider:
    """Segment probabilities of an exact kernel, in provider form."""

    supports_upper = True

    def __init__(self, kernel: LevelKernel):
        self.kernel = kernel
        self.K = kernel.K
        self.n = kernel.n
        self.precision = kernel.precision
        self.mode = kernel.mode
        self.fitness_partition = kernel.partition.kind == FITNESS_PARTITION
        self._pref = _prefixes(kernel)
        self._suf = _suffixes(kernel)
        self._zero = kernel.p(0, 0) * 0

    def skip_upper(self, i, l):
        return self._pref[i][l - 1] if l >= 1 else self._zero

    skip_lower = skip_upper

    def step_lower(self, i, l):
        return self._suf[i].get(l, self._zero)

    step_upper = step_lower

    def up_upper(self, l):
        return self.kernel.p_up(l)

    up_lower = up_upper


def _upper_only(name):
    def missing(self, *a):
        raise UnsupportedPartitionError(
            f"the printed bounds for {self.function} cover the lower direction only")
    missing.__name__ = name
    return missing


class PaperProvider:
    """Binomial-sum probability bounds exactly as printed in the worked examples.

    These reproduce the printed inequalities even where the exact kernel
    shows them to be loose or inconsistent (Deceptive); discrepancies are
    surfaced by :func:`provider_discrepancies`, never silently corrected.
    """

    supports_upper = False
    mode = "mpfr"
    #: printed coefficient product omits the start-level factor (Deceptive)
    printed_top_omitted = False
    #: printed coefficient product carries a separate start-level factor (TwoMax1)
    separate_top_factor = False

    def __init__(self, function: str, n: int, precision: int | None = None):
        self.function = function
        self.n = n
        self.precision = precision if precision is not None else default_precision()

    skip_lower = _upper_only("skip_lower")
    step_upper = _upper_only("step_upper")
    up_lower = _upper_only("up_lower")


def _cumsums(row):
    """(prefix, suffix) cumulative sums of row[0..m]; prefix excludes j=0."""
    m = len(row) - 1
    pref = [row[0] * 0] * (m + 1)
    acc = row[0] * 0
    for j in range(1, m + 1):
        acc = acc + row[j]
        pref[j] = acc
    suf = [row[0] * 0] * (m + 2)
    acc = row[0] * 0
    for j in range(m, -1, -1):
        acc = acc + row[j]
        suf[j] = acc
    return pref, suf


class OneMaxPaper(PaperProvider):
    """x_i carries i zero bits; printed forms cover both directions."""

    supports_upper = True

    def __init__(self, n, precision=None):
        super().__init__("onemax", n, precision)
        self.K = n
        with precision_context(self.precision):
            q = gmpy2.mpfr(1) / n
            self._p1 = []
            self._s1 = []
            self._p2 = []
            self._s2 = []
            for i in range(n + 1):
                t1 = [comb(i, j) * q ** j * (1 - q) ** (i - j) for j in range(i + 1)]
                t2 = [comb(i, j) * q ** j * (1 - q) ** (n - j) for j in range(i + 1)]
                p1, s1 = _cumsums(t1)
                p2, s2 = _cumsums(t2)
                self._p1.append(p1)
                self._s1.append(s1)
                self._p2.append(p2)
                self._s2.append(s2)

    def skip_upper(self, i, l):
        return self._s1[i][i - l + 1]

    def step_lower(self, i, l):
        return self._p2[i][i - l]

    def skip_lower(self, i, l):
        return self._s2[i][i - l + 1]

    def step_upper(self, i, l):
        return self._p2[i][i - l]

    def up_upper(self, l):
        return self._p1[l][l]

    def up_lower(self, l):
        return self._p2[l][l]


class FullyDeceptivePaper(PaperProvider):
    """x_i carries i-1 zero bits; lower direction only."""

    def __init__(self, n, precision=None):
        super().__init__("fullydeceptive", n, precision)
        self.K = n
        with precision_context(self.precision):
            q = gmpy2.mpfr(1) / n
            self._q = q
            self._p2 = []
            for i in range(n + 1):
                z = max(i - 1, 0)
                t2 = [comb(z, j) * q ** j * (1 - q) ** (n - j) for j in range(z + 1)]
                p2, _ = _cumsums(t2)
                self._p2.append(p2)

    def skip_upper(self, i, l):
        q = self._q
        return (comb(i - 1, i - l + 1) * q ** (i - l + 1)
                + q ** (self.n - i + 1) * (1 - q) ** (i - 1))

    def step_lower(self, i, l):
        return self._p2[i][min(i - l, i - 1)]

    def up_upper(self, l):
        q = self._q
        if l == 1:
            return q ** self.n
        return (l - 1) * q + q ** (self.n - l + 1)


class TwoMax1Paper(PaperProvider):
    """Level-partition bounds: S'_l = S_l for l <= n/2, S'_{n/2+1} = S_{n-1}.

    x'_i carries i zero bits below the top level; the top level's printed
    step bound is the single-bit-flip mass C(n,1)(1/n)(1-1/n)^(n-1).
    """

    separate_top_factor = True

    def __init__(self, n, precision=None):
        super().__init__("twomax1", n, precision)
        self.K = n // 2 + 1
        with precision_context(self.precision):
            q = gmpy2.mpfr(1) / n
            self._q = q
            self._p2 = []
            for i in range(n // 2 + 1):
                t2 = [comb(i, j) * q ** j * (1 - q) ** (n - j) for j in range(i + 1)]
                p2, _ = _cumsums(t2)
                self._p2.append(p2)

    def skip_upper(self, i, l):
        q = self._q
        if i == self.K:
            return q * 0 + 1
        return comb(i, i - l + 1) * q ** (i - l + 1) + q ** (self.n - i) * (1 - q) ** i

    def step_lower(self, i, l):
        q = self._q
        if i == self.K:
            return (1 - q) ** (self.n - 1)
        return self._p2[i][i - l]

    def up_upper(self, l):
        q = self._q
        if l == self.K:
            return q * 0 + 1
        return l * q + q ** (self.n - l) * (1 - q) ** l


class DeceptivePaper(PaperProvider):
    """Level-partition bounds: S'_l = S_{2l-1}, S'_{n/2+1} = S_n as printed.

    x'_i carries i-1 zero bits.  The printed coefficient product stops at
    i = n/2 (no start-level factor), which ``printed_top_omitted`` records.
    """

    printed_top_omitted = True

    def __init__(self, n, precision=None):
        super().__init__("deceptive", n, precision)
        self.K = n // 2 + 1
        with precision_context(self.precision):
            q = gmpy2.mpfr(1) / n
            self._q = q
            self._p2 = []
            for i in range(n // 2 + 2):
                z = max(i - 1, 0)
                t2 = [comb(z, j) * q ** j * (1 - q) ** (n - j) for j in range(z + 1)]
                p2, _ = _cumsums(t2)
                self._p2.append(p2)

    def skip_upper(self, i, l):
        q, n = self._q, self.n
        return (comb(i - 1, i - l + 1) * q ** (i - l + 1)
                + comb(n - i + 1, n - 2 * i + 2) * q ** (n - 2 * i + 2))

    def step_lower(self, i, l):
        return self._p2[i][min(i - l, max(i - 1, 0))]

    def up_upper(self, l):
        q, n = self._q, self.n
        if l == 1:
            return q ** n
        if l == self.K:
            return q * 0 + 1
        return (l - 1) * q + comb(n - l + 1, n - 2 * l + 2) * q ** (n - 2 * l + 2)


def paper_analytic_provider(function: str, n: int, precision: int | None = None):
    """Printed probability bounds for one of the four benchmark functions."""
    providers = {
        "onemax": OneMaxPaper,
        "fullydeceptive": FullyDeceptivePaper,
        "twomax1": TwoMax1Paper,
        "deceptive": DeceptivePaper,
    }
    if function not in providers:
        raise UnsupportedPartitionError(
            f"no printed probability bounds for function {function!r}")
    return providers[function](n, precision)


def printed_coefficient(provider, l: int):
    """The printed coefficient product c(K, l) of a paper provider.

    OneMax/FullyDeceptive: product over i = l+1..n.  TwoMax1: separate
    start-level factor times the product up to n/2 (the printed lower index
    l is off by one: the step sum is empty there).  Deceptive: the printed
    product stops at n/2 with no start-level factor.
    """
    K = provider.K
    with precision_context(provider.precision):
        top = None
        if provider.printed_top_omitted:
            ks = range(l + 1, K)
        elif provider.separate_top_factor:
            ks = range(l + 1, K)
            top = 1 / (1 + provider.skip_upper(K, l) / provider.step_lower(K, l))
        else:
            ks = range(l + 1, K + 1)
        prod = gmpy2.mpfr(1) if top is None else top
        for i in ks:
            skip = provider.skip_upper(i, l)
            step = provider.step_lower(i, l)
            if not step:
                return prod * 0
            prod = prod * (1 / (1 + skip / step))
        return clamp01(prod, "printed coefficient")


# ---------------------------------------------------------------------------
# bound assembly
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BoundReport:
    method: Method
    direction: str
    d: tuple    # per level 0..K; None where a denominator vanished
    coefficient_min: object = None


def assemble_bound(source, coeffs: CoefficientTable, direction: str) -> BoundReport:
    """d_k = 1/p(k, up) + sum_l c(k,l)/p(l, up), with direction-matched bounds.

    ``source`` is an exact kernel or a probability provider: lower bounds
    divide by its upper estimates of the leaving probabilities, upper bounds
    by the lower estimates.
    """
    if direction not in ("lower", "upper"):
        raise ValueError("direction must be 'lower' or 'upper'")
    if isinstance(source, LevelKernel):
        if direction == "upper":
            _require_fitness_partition(source, "an upper bound")
        K = source.K
        denom = source.p_up
        precision = source.precision
    else:
        K = source.K
        denom = source.up_upper if direction == "lower" else source.up_lower
        precision = source.precision
    if coeffs.K != K:
        raise ValueError(f"coefficient table has K={coeffs.K}, source has K={K}")
    d = [None] * (K + 1)
    with precision_context(precision):
        d[0] = gmpy2.mpfr(0) if not isinstance(source, LevelKernel) or source.mode == "mpfr" \
            else gmpy2.mpq(0)
        inv = [None] * (K + 1)
        for l in range(1, K + 1):
            pl = denom(l)
            inv[l] = (1 / pl) if pl else None
        for k in range(1, K + 1):
            if inv[k] is None:
                continue
            acc = inv[k]
            ok = True
            for l in range(1, k):
                c = coeffs.get(k, l)
                if not c:
                    continue
                if inv[l] is None:
                    ok = False
                    break
                acc = acc + c * inv[l]
            d[k] = acc if ok else None
    return BoundReport(coeffs.method, direction, tuple(d), coeffs.minimum())


def paper_analytic_bound(function: str, n: int, precision: int | None = None) -> BoundReport:
    """The printed lower bound pipeline for one benchmark function.

    OneMax and FullyDeceptive get a full per-level vector on the fitness
    partition.  TwoMax1 and Deceptive are analyzed on their preset level
    partitions and the printed bound exists only at the start level
    K' = n/2 + 1; other entries are None.
    """
    provider = paper_analytic_provider(function, n, precision)
    with precision_context(provider.precision):
        if function in ("onemax", "fullydeceptive"):
            coeffs = coeff_ratio(provider, "lower")
            report = assemble_bound(provider, coeffs, "lower")
            return BoundReport(Method.PAPER_ANALYTIC, "lower", report.d,
                               report.coefficient_min)
        K = provider.K
        cs = [None] * (K + 1)
        for l in range(1, K):
            cs[l] = printed_coefficient(provider, l)
        d = [None] * (K + 1)
        d[0] = gmpy2.mpfr(0)
        acc = 1 / provider.up_upper(K)
        for l in range(1, K):
            acc = acc + cs[l] / provider.up_upper(l)
        d[K] = acc
        cmin = min(c for c in cs if c is not None)
        return BoundReport(Method.PAPER_ANALYTIC, "lower", tuple(d), cmin)


def provider_discrepancies(provider, kernel: LevelKernel, limit: int = 8) -> tuple[str, ...]:
    """Where the printed bounds contradict the exact kernel.

    A printed upper bound falling below the exact probability (or a printed
    lower bound exceeding it) means the printed inequality is wrong for the
    function as defined; these are reported, never corrected.
    """
    if provider.K != kernel.K:
        raise ValueError("provider and kernel disagree on the number of levels")
    notes = []
    kp = KernelProvider(kernel)
    with precision_context(kernel.precision):
        slack = gmpy2.mpfr(2) ** -128  # ignore rounding-level differences
        for l in range(1, provider.K + 1):
            claimed = provider.up_upper(l)
            exact = kp.up_upper(l)
            if claimed < exact * (1 - slack):
                notes.append(
                    f"printed p_max(x_{l}, S_[0,{l - 1}]) = {float(claimed):.3e} is below "
                    f"the exact probability {float(exact):.3e}")
        for l in range(1, provider.K):
            for i in range(l + 1, provider.K + 1):
                claimed = provider.step_lower(i, l)
                exact = kp.step_lower(i, l)
                if claimed > exact * (1 + slack):
                    notes.append(
                        f"printed p_min(x_{i}, S_[{l},{i - 1}]) exceeds the exact "
                        f"probability ({float(claimed):.3e} > {float(exact):.3e})")
    if len(notes) > limit:
        notes = notes[:limit] + [f"... {len(notes) - limit} more discrepancies"]
    return tuple(notes)


# ---------------------------------------------------------------------------
# appendix products
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class AppendixProducts:
    C: object
    n: int
    product1: object
    floor1: object          # None when n <= C + 1 (floor undefined)
    product2: object
    floor2: object

    @property
    def ok1(self):
        return None if self.floor1 is None else bool(self.product1 >= self.floor1)

    @property
    def ok2(self):
        return bool(self.product2 >= self.floor2)


def appendix_products(C, n: int, precision: int | None = None) -> AppendixProducts:
    """The two perturbation products and their analytic floors.

    product1 = prod_{i=2}^{n} 1/(1 + C/((i-1) n^(n-i))), floored by
    (1 - C/(n-1))^(n-1) for n > C+1; product2 = prod_{i=1}^{n} 1/(1 + C/i!),
    floored by exp(-C(e-1)).
    """
    if n < 2:
        raise ValueError("n must be >= 2")
    with precision_context(precision):
        C = gmpy2.mpfr(C)
        if C <= 0:
            raise ValueError("C must be positive")
        one = gmpy2.mpfr(1)
        npow = gmpy2.mpfr(n) ** (n - 2)
        product1 = one
        for i in range(2, n + 1):
            product1 *= one / (1 + C / ((i - 1) * npow))
            npow /= n
        floor1 = (1 - C / (n - 1)) ** (n - 1) if n > C + 1 else None
        product2 = one
        for i in range(1, n + 1):
            product2 *= one / (1 + C / gmpy2.fac(i))
        floor2 = gmpy2.exp(-C * (gmpy2.exp(1) - 1))
        return AppendixProducts(C, n, product1, floor1, product2, floor2)


@dataclass(frozen=True)
class FloorCheckReport:
    function: str
    n: int
    k: int                   # the level whose printed coefficients are evaluated
    values: tuple            # c(k, l) for l = 1..k-1 per the printed product
    minimum: object
    argmin: int
    notes: tuple[str, ...] = ()


def coefficient_floor_check(function: str, n: int,
                            precision: int | None = None) -> FloorCheckReport:
    """Evaluate the printed coefficient products for all l; report the minimum."""
    provider = paper_analytic_provider(function, n, precision)
    K = provider.K
    values = []
    with precision_context(provider.precision):
        for l in range(1, K):
            values.append(printed_coefficient(provider, l))
    best = min(values)
    notes = ()
    if provider.printed_top_omitted:
        notes = ("printed product omits the start-level factor i = K",)
    return FloorCheckReport(function, n, K, tuple(values), best,
                            1 + values.index(best), notes)
