"""Monte Carlo runner for the (1+1) EA at the bit-string level.

Each trial draws its own generator from SeedSequence(seed, trial), starts at
a uniform member of the start level, and simulates bitwise mutation with
elitist acceptance until the optimum level or a generation cap.  Results are
bit-for-bit reproducible from (seed, trial index) regardless of which engine
runs the inner loop: the compiled Cython kernel and the pure-Python fallback
consume the generator identically and are selected at import time.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass
from math import comb

import numpy as np

from . import _ea_python
from .levels import LevelPartition, ProblemSpec, build_partition
from .numerics import to_float

try:  # pragma: no cover - depends on the build environment
    from . import _ea_kernel
except ImportError:  # pragma: no cover
    _ea_kernel = None

ENGINE_ENV_VAR = "LEVELBOUND_SIM_ENGINE"


def available_engines() -> tuple[str, ...]:
    return ("compiled", "python") if _ea_kernel is not None else ("python",)


def _resolve_engine(name: str):
    if name == "auto":
        name = os.environ.get(ENGINE_ENV_VAR, "").strip() or \
            ("compiled" if _ea_kernel is not None else "python")
    if name == "compiled":
        if _ea_kernel is None:
            raise RuntimeError("compiled simulation kernel is not built")
        return _ea_kernel
    if name == "python":
        return _ea_python
    raise ValueError(f"unknown engine {name!r}; expected auto, compiled or python")


@dataclass(frozen=True)
class SimulationConfig:
    spec: ProblemSpec
    start: object            # level index, or a distribution over levels 0..K
    trials: int
    seed: int
    max_generations: int | None = None
    engine: str = "auto"

    def __post_init__(self):
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        if self.max_generations is not None and self.max_generations < 1:
            raise ValueError("max_generations must be >= 1")

    def generation_cap(self) -> int:
        if self.max_generations is not None:
            return self.max_generations
        n = self.spec.n
        return math.ceil(1e4 * n * math.log(n + 1))


@dataclass(frozen=True)
class SimulationResult:
    config: SimulationConfig
    hitting: np.ndarray            # per-trial generation counts; -1 = censored
    visit_frequency: tuple         # fraction of trials ever occupying each level
    mean: float
    std: float
    stderr: float
    censored_fraction: float
    unreliable: bool               # censoring fraction above 1/2
    engine: str
    generator: str

    @property
    def uncensored(self) -> np.ndarray:
        return self.hitting[self.hitting >= 0]


def _start_probabilities(start, partition: LevelPartition):
    K = partition.K
    if isinstance(start, (int, np.integer)):
        if not 0 <= start <= K:
            raise ValueError(f"start level {start} does not exist (K={K})")
        probs = np.zeros(K + 1)
        probs[start] = 1.0
        return probs
    probs = np.array([to_float(s) for s in start], dtype=float)
    if len(probs) != K + 1 or probs.min() < 0 or abs(probs.sum() - 1.0) > 1e-9:
        raise ValueError("start must be a level index or a distribution over levels")
    return probs


def run_trials(config: SimulationConfig) -> SimulationResult:
    """Simulate the configured number of independent (1+1) EA runs."""
    spec = config.spec
    n = spec.n
    partition = build_partition(spec)
    K = partition.K
    fit = spec.fitness_table()
    accept = np.zeros((n + 1, n + 1), dtype=np.uint8)
    for w in range(n + 1):
        for w2 in range(n + 1):
            accept[w, w2] = fit[w2] >= fit[w]
    level_of = np.zeros(n + 1, dtype=np.int64)
    for k, lv in enumerate(partition.levels):
        for w in lv.weights:
            level_of[w] = k

    start_probs = _start_probabilities(config.start, partition)
    start_cum = np.cumsum(start_probs)
    class_choice = {}
    for k, lv in enumerate(partition.levels):
        if start_probs[k] > 0 and len(lv.weights) > 1:
            sizes = np.array([comb(n, w) for w in lv.weights], dtype=float)
            class_choice[k] = np.cumsum(sizes / sizes.sum())

    engine = _resolve_engine(config.engine)
    cap = config.generation_cap()
    q = 1.0 / n

    hitting = np.empty(config.trials, dtype=np.int64)
    visited_total = np.zeros(K + 1, dtype=np.int64)
    for t in range(config.trials):
        ss = np.random.SeedSequence(entropy=config.seed, spawn_key=(t,))
        rng = np.random.Generator(np.random.PCG64(ss))
        # start-state sampling happens here, outside the engines, so engine
        # choice cannot influence the stream
        level = int(np.searchsorted(start_cum, rng.random(), side="right"))
        weights = partition.levels[level].weights
        if len(weights) > 1:
            w = weights[int(np.searchsorted(class_choice[level], rng.random(), side="right"))]
        else:
            w = weights[0]
        x = np.zeros(n, dtype=np.uint8)
        if w:
            x[rng.permutation(n)[:w]] = 1
        visited = np.zeros(K + 1, dtype=np.uint8)
        visited[level] = 1
        if level == 0:
            hitting[t] = 0
        else:
            hitting[t] = engine.run_chain(rng, x, int(w), q, cap, accept,
                                          level_of, visited)
        visited_total += visited

    unc = hitting[hitting >= 0]
    censored_fraction = 1.0 - len(unc) / config.trials
    if len(unc):
        mean = float(unc.mean())
        std = float(unc.std(ddof=1)) if len(unc) > 1 else 0.0
        stderr = std / math.sqrt(len(unc)) if len(unc) > 1 else float("inf")
    else:
        mean = std = float("nan")
        stderr = float("nan")
    return SimulationResult(
        config=config,
        hitting=hitting,
        visit_frequency=tuple(visited_total / config.trials),
        mean=mean,
        std=std,
        stderr=stderr,
        censored_fraction=censored_fraction,
        unreliable=censored_fraction > 0.5,
        engine=engine.ENGINE_NAME,
        generator="pcg64(seedsequence(seed, spawn_key=(trial,)))",
    )
