# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled (1+1) EA inner loop.

Consumes the generator exactly like the pure-Python engine (n uniform
doubles per generation, bit j flips when the j-th double is below q), so
both engines produce bit-identical trajectories from the same seed.
"""

import numpy as np

cimport numpy as cnp
from cpython.pycapsule cimport PyCapsule_GetPointer
from numpy.random cimport bitgen_t

ENGINE_NAME = "compiled"


def run_chain(rng, unsigned char[::1] x, int w, double q, long max_gens,
              unsigned char[:, ::1] accept, long[::1] level_of,
              unsigned char[::1] visited):
    """Run one trial from string x (weight w) until level 0 or the cap.

    Mutates x and visited in place; returns the hitting generation or -1.
    """
    cdef bitgen_t *bg
    capsule = rng.bit_generator.capsule
    bg = <bitgen_t *> PyCapsule_GetPointer(capsule, "BitGenerator")
    cdef int n = x.shape[0]
    flips_arr = np.empty(n, dtype=np.uint8)
    cdef unsigned char[::1] flips = flips_arr
    cdef long t
    cdef int j, a, b, w2
    cdef long lvl
    cdef unsigned char f
    for t in range(1, max_gens + 1):
        a = 0
        b = 0
        for j in range(n):
            f = 1 if bg.next_double(bg.state) < q else 0
            flips[j] = f
            if f:
                if x[j]:
                    a += 1
                else:
                    b += 1
        w2 = w - a + b
        if accept[w, w2]:
            for j in range(n):
                x[j] ^= flips[j]
            w = w2
            lvl = level_of[w]
            visited[lvl] = 1
            if lvl == 0:
                return t
    return -1
