import sys
from functools import lru_cache
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from levelbound import ProblemSpec, build_kernel

BENCHMARKS = ("onemax", "fullydeceptive", "twomax1", "deceptive")


@lru_cache(maxsize=None)
def cached_kernel(function, n, mode="mpfr"):
    return build_kernel(ProblemSpec(function, n), mode=mode)


@pytest.fixture
def kernel_of():
    return cached_kernel
