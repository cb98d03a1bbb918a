"""Independent ground truth for hitting times.

Two routes: first-step backward substitution on the level chain, and a brute
force over all 2**n bit strings that never trusts the lumped kernel.  The
full-state route enumerates every mutation mask per state (n <= 12), checks
that states of equal Hamming weight have identical aggregated transition
rows, and solves the chain at weight-class granularity; for 13 <= n <= 20
the mask enumeration runs on sampled states per class instead of all of them.

Leaving masses are always accumulated as direct sums of the outgoing terms,
never as ``1 - self_loop``: quantities like n**-n would be wiped out by
cancellation otherwise.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations

import gmpy2
import numpy as np

from .errors import AbsorbingLevelError, GuardError, UnsupportedPartitionError
from .levels import FITNESS_PARTITION, LevelKernel, ProblemSpec, build_partition
from .numerics import precision_context, to_float

FULL_STATE_GUARD = 20       # hard refusal above this
FULL_ENUM_LIMIT = 12        # exhaustive per-state mask enumeration up to here
RATIONAL_GUARD = 12
PATH_SUM_GUARD = 12


@dataclass(frozen=True)
class OracleResult:
    mode: str                       # "level_chain" | "full_state"
    m: tuple                        # per-level mean hitting times; None = unreachable
    lumpability_deviation: float | None = None
    m_by_weight: tuple | None = None
    notes: tuple[str, ...] = ()

    @property
    def unreachable(self) -> tuple[int, ...]:
        return tuple(k for k, v in enumerate(self.m) if v is None)


def _zero_like(kernel: LevelKernel):
    if kernel.mode == "exact":
        return gmpy2.mpq(0)
    with precision_context(kernel.precision):
        return gmpy2.mpfr(0)


def exact_level_hitting(kernel: LevelKernel) -> OracleResult:
    """First-step backward substitution on the level chain.

    Rows are processed in dependency order, so level partitions whose index
    order disagrees with the fitness order (the Deceptive preset) are solved
    correctly too.  A non-optimal level with no way out gets an infinite
    hitting time (None) and poisons every level that can reach it.
    """
    K = kernel.K
    m = [None] * (K + 1)
    m[0] = _zero_like(kernel)
    pending = set(range(1, K + 1))
    with precision_context(kernel.precision):
        while pending:
            progressed = False
            for k in sorted(pending):
                deps = [l for l in range(1, K + 1) if l != k and kernel.p(k, l)]
                if any(d in pending for d in deps):
                    continue
                leave = kernel.p_segment(k, 0, k - 1)
                if k < K:
                    leave = leave + kernel.p_segment(k, k + 1, K)
                if not leave or any(m[d] is None for d in deps):
                    m[k] = None
                else:
                    acc = _zero_like(kernel)
                    for d in deps:
                        acc += kernel.p(k, d) * m[d]
                    m[k] = (1 + acc) / leave
                pending.discard(k)
                progressed = True
            if not progressed:  # pragma: no cover - elitist chains are acyclic
                raise UnsupportedPartitionError("level digraph contains a cycle")
    notes = ()
    if any(v is None for v in m):
        notes = ("some levels cannot reach the optimum; their hitting time is infinite",)
    return OracleResult("level_chain", tuple(m), notes=notes)


# ---------------------------------------------------------------------------
# full-state brute force
# ---------------------------------------------------------------------------

def _popcounts(limit: int) -> np.ndarray:
    vals = np.arange(limit, dtype=np.uint32)
    pc = np.zeros(limit, dtype=np.uint8)
    while vals.any():
        pc += (vals & 1).astype(np.uint8)
        vals >>= 1
    return pc


def _state_class_row(x: int, n: int, masks, pc, flip_mass, accept_row):
    """Transition row of state x aggregated over target weight classes.

    Enumerates every mutation mask; ``flip_mass[d]`` is the mass of a mask
    flipping d bits (a probability, or an integer numerator held exactly in
    float64 while below 2**53).  Rejected proposals fold into x's own class.
    """
    targets = pc[np.bitwise_xor(np.uint32(x), masks)]
    mass = flip_mass[pc[masks]]
    acc = accept_row[targets]
    row = np.bincount(targets[acc], weights=mass[acc], minlength=n + 1)
    row[pc[x]] += mass[~acc].sum()
    return row


def exact_full_hitting(spec: ProblemSpec, *, rational: bool = False,
                       sample_per_class: int = 2, seed: int = 0) -> OracleResult:
    """Ground truth from the 2**n-state chain.

    n <= 12: every state's row is enumerated and checked against its weight
    class; in float mode the per-state first-step system is additionally
    solved group by group, so the lumpability deviation is a genuine spread
    of hitting times.  In rational mode bitwise-equal integer rows certify a
    zero deviation and the class chain is solved exactly.
    13 <= n <= 20: rows are verified on sampled states per class and the
    class chain is solved in float64.
    """
    n = spec.n
    if n > FULL_STATE_GUARD:
        raise GuardError(f"full-state oracle refuses n={n} > {FULL_STATE_GUARD}")
    if rational and n > RATIONAL_GUARD:
        raise GuardError(f"rational full-state oracle refuses n={n} > {RATIONAL_GUARD}")

    fit = spec.fitness_table()
    partition = build_partition(spec)
    masks = np.arange(1 << n, dtype=np.uint32)
    pc = _popcounts(1 << n)
    if rational:
        assert float(n) ** n < 2.0 ** 53  # integer numerators stay exact in float64
        flip_mass = np.array([float((n - 1) ** (n - d)) for d in range(n + 1)])
    else:
        q = 1.0 / n
        flip_mass = np.array([q ** d * (1 - q) ** (n - d) for d in range(n + 1)])

    accept = np.zeros((n + 1, n + 1), dtype=bool)
    for w in range(n + 1):
        for w2 in range(n + 1):
            accept[w, w2] = fit[w2] >= fit[w]

    states_by_weight = [np.flatnonzero(pc == w).astype(np.uint32) for w in range(n + 1)]
    notes = []

    class_rows = np.zeros((n + 1, n + 1), dtype=np.float64)
    row_dev = 0.0
    rng = np.random.default_rng(seed)
    for w in range(n + 1):
        members = states_by_weight[w]
        if n <= FULL_ENUM_LIMIT:
            checked = members
        else:
            take = min(sample_per_class, len(members))
            checked = members[rng.choice(len(members), size=take, replace=False)]
        ref = None
        for x in checked:
            row = _state_class_row(int(x), n, masks, pc, flip_mass, accept[w])
            if ref is None:
                ref = row
                class_rows[w] = row
            else:
                scale = np.maximum(np.abs(ref), 1.0 if rational else 1e-300)
                row_dev = max(row_dev, float(np.max(np.abs(row - ref) / scale)))
    if rational and row_dev != 0.0:
        raise UnsupportedPartitionError(
            "states of equal weight have different transition rows; not lumpable")
    if n > FULL_ENUM_LIMIT:
        notes.append(f"within-class symmetry verified on <= {sample_per_class} "
                     f"sampled states per class (n > {FULL_ENUM_LIMIT})")

    opt_fit = max(fit)
    if rational:
        den = n ** n
        rows_q = [[gmpy2.mpq(int(round(x)), den) for x in class_rows[w]]
                  for w in range(n + 1)]
        m_weight = _solve_class_chain_exact(n, fit, opt_fit, rows_q)
        deviation = 0.0
        notes.append("rational mode: identical in-class integer rows certify zero deviation")
    else:
        m_weight = _solve_class_chain_float(n, fit, opt_fit, class_rows)
        if n <= FULL_ENUM_LIMIT:
            deviation = _per_state_deviation(n, fit, opt_fit, masks, pc, flip_mass,
                                             accept, states_by_weight)
        else:
            deviation = row_dev
            notes.append("deviation is the sampled row spread; per-state hitting "
                         f"times are only solved for n <= {FULL_ENUM_LIMIT}")

    m_level = []
    for lv in partition.levels:
        vals = [m_weight[w] for w in lv.weights]
        floats = [to_float(v) for v in vals]
        if max(floats) - min(floats) > 1e-9 * max(1.0, max(map(abs, floats))):
            notes.append(f"weight classes of the level with fitness {lv.fitness} "
                         "disagree on hitting time")
        m_level.append(vals[0])
    return OracleResult("full_state", tuple(m_level), deviation, tuple(m_weight),
                        tuple(notes))


def _fitness_groups(n, fit, opt_fit):
    """Non-optimal weights grouped by fitness, best first."""
    groups = {}
    for w in range(n + 1):
        if fit[w] != opt_fit:
            groups.setdefault(fit[w], []).append(w)
    return [groups[f] for f in sorted(groups, reverse=True)]


def _solve_class_chain_exact(n, fit, opt_fit, rows_q):
    m = [gmpy2.mpq(0) if fit[w] == opt_fit else None for w in range(n + 1)]
    for group in _fitness_groups(n, fit, opt_fit):
        size = len(group)
        A = [[(gmpy2.mpq(1) if i == j else gmpy2.mpq(0)) - rows_q[group[i]][group[j]]
              for j in range(size)] for i in range(size)]
        b = []
        for i in range(size):
            acc = gmpy2.mpq(1)
            for w2 in range(n + 1):
                if m[w2] is not None and fit[w2] > fit[group[i]]:
                    acc += rows_q[group[i]][w2] * m[w2]
            b.append(acc)
        sol = _gauss_mpq(A, b)
        for i, w in enumerate(group):
            m[w] = sol[i]
    return m


def _gauss_mpq(A, b):
    size = len(b)
    for col in range(size):
        piv = next((r for r in range(col, size) if A[r][col] != 0), None)
        if piv is None:
            raise AbsorbingLevelError("class chain cannot reach the optimum")
        A[col], A[piv] = A[piv], A[col]
        b[col], b[piv] = b[piv], b[col]
        inv = 1 / A[col][col]
        A[col] = [x * inv for x in A[col]]
        b[col] = b[col] * inv
        for r in range(size):
            if r != col and A[r][col] != 0:
                f = A[r][col]
                A[r] = [x - f * y for x, y in zip(A[r], A[col])]
                b[r] = b[r] - f * b[col]
    return b


def _solve_class_chain_float(n, fit, opt_fit, class_rows):
    """Group-by-group solve with cancellation-free diagonals.

    The system matrix gets Sum_{w2 != w} p(w, w2) on the diagonal (a direct
    sum of outgoing masses) instead of 1 - p(w, w), which float64 could not
    represent for leaving masses near n**-n.
    """
    m = np.zeros(n + 1)
    solved = np.array([fit[w] == opt_fit for w in range(n + 1)])
    for group in _fitness_groups(n, fit, opt_fit):
        idx = np.array(group)
        size = len(idx)
        M = np.zeros((size, size))
        b = np.ones(size)
        for i, w in enumerate(group):
            M[i, i] = float(np.sum(np.delete(class_rows[w], w)))
            for j, w2 in enumerate(group):
                if j != i:
                    M[i, j] = -class_rows[w][w2]
            for w2 in range(n + 1):
                if solved[w2] and fit[w2] > fit[w]:
                    b[i] += class_rows[w][w2] * m[w2]
        if not np.all(M.diagonal() > 0):
            raise AbsorbingLevelError("class chain cannot reach the optimum")
        m[idx] = np.linalg.solve(M, b)
        solved[idx] = True
    return [float(v) for v in m]


def _per_state_deviation(n, fit, opt_fit, masks, pc, flip_mass, accept, states_by_weight):
    """Solve the full per-state system; report the in-class hitting-time spread."""
    total = 1 << n
    m = np.zeros(total)
    solved = np.zeros(total, dtype=bool)
    w_of = pc[:total]
    for w in range(n + 1):
        if fit[w] == opt_fit:
            solved[states_by_weight[w]] = True
    for group in _fitness_groups(n, fit, opt_fit):
        gs = np.concatenate([states_by_weight[w] for w in group])
        d = pc[np.bitwise_xor(gs[:, None].astype(np.uint32), masks[None, :])]
        pr = flip_mass[d]
        acc_row = accept[group[0]][w_of]  # equal fitness -> shared acceptance row
        pr_acc = pr * acc_row[None, :]
        # leaving mass per state: direct masked sum of accepted non-self targets
        M = -pr_acc[:, gs]
        for i, s in enumerate(gs):
            row = pr_acc[i].copy()
            row[s] = 0.0
            M[i, i] = row.sum()
        b = 1.0 + pr_acc[:, solved] @ m[solved]
        sol = np.linalg.solve(M, b)
        m[gs] = sol
        solved[gs] = True
    dev = 0.0
    for w in range(n + 1):
        vals = m[states_by_weight[w]]
        if len(vals) > 1:
            spread = float(vals.max() - vals.min()) / max(float(np.mean(vals)), 1.0)
            dev = max(dev, spread)
    return dev


# ---------------------------------------------------------------------------
# path-sum expansion and visit probabilities
# ---------------------------------------------------------------------------

def path_sum_coefficient(kernel: LevelKernel, k: int, l: int):
    """Sum over all digraph paths k -> l of the product of conditional steps.

    Explicit enumeration over the 2**(k-l-1) descending paths; the point is
    to stay independent of the recursive coefficient computation it checks.
    """
    if kernel.K > PATH_SUM_GUARD:
        raise GuardError(f"path enumeration refuses K={kernel.K} > {PATH_SUM_GUARD}")
    if not 1 <= l < k <= kernel.K:
        raise ValueError(f"need 1 <= l < k <= K, got l={l} k={k}")
    inner = range(l + 1, k)
    with precision_context(kernel.precision):
        total = _zero_like(kernel)
        for size in range(len(inner) + 1):
            for combo in combinations(inner, size):
                path = (k, *sorted(combo, reverse=True), l)
                prod = _zero_like(kernel) + 1
                for a, b in zip(path, path[1:]):
                    if not kernel.p(a, b):
                        prod = None
                        break
                    prod *= kernel.r(a, b)
                if prod is not None:
                    total += prod
        return total


def exact_visit_probabilities(kernel: LevelKernel, start_level: int):
    """Probability each level is ever occupied, starting from a fixed level.

    Elitism means a level below the start is entered exactly once or never,
    always from above, so on the embedded jump chain
    u_j = sum_{k > j} u_k r(k, j).
    """
    if not kernel.index_monotone or kernel.partition.kind != FITNESS_PARTITION:
        raise UnsupportedPartitionError("visit probabilities need a fitness partition")
    if not 0 <= start_level <= kernel.K:
        raise ValueError(f"start level {start_level} out of range")
    u = [_zero_like(kernel) for _ in range(kernel.K + 1)]
    u[start_level] = u[start_level] + 1
    with precision_context(kernel.precision):
        for j in range(start_level - 1, -1, -1):
            acc = _zero_like(kernel)
            for k in range(j + 1, start_level + 1):
                if kernel.p(k, j):
                    acc += u[k] * kernel.r(k, j)
            u[j] = acc
    return tuple(u)
