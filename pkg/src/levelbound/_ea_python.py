"""Pure-Python (1+1) EA inner loop.

Must stay in lockstep with the compiled engine in ``_ea_kernel.pyx``: one
generation consumes exactly n uniform doubles from the generator (bit j
flips when the j-th double falls below q), so both engines produce
bit-identical trajectories from the same generator state.
"""

from __future__ import annotations

import numpy as np

ENGINE_NAME = "python"


def run_chain(rng, x, w, q, max_gens, accept, level_of, visited):
    """Run one trial from string x (weight w) until level 0 or the cap.

    Mutates x and visited in place; returns the hitting generation or -1.
    """
    n = x.shape[0]
    for t in range(1, max_gens + 1):
        flips = rng.random(n) < q
        a = int(np.count_nonzero(flips & (x == 1)))
        b = int(np.count_nonzero(flips)) - a
        w2 = w - a + b
        if accept[w, w2]:
            np.bitwise_xor(x, flips.view(np.uint8), out=x)
            w = w2
            lvl = level_of[w]
            visited[lvl] = 1
            if lvl == 0:
                return t
    return -1
