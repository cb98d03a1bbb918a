"""Extended-precision arithmetic helpers.

Probabilities like ``n**-n`` underflow 64-bit floats already around n = 150,
so every quantitative result in this package is computed either with exact
rationals (``gmpy2.mpq``) or with MPFR floats (``gmpy2.mpfr``) at a
configurable precision.  Conversions to machine floats happen only at the
reporting boundary and are explicitly lossy.
"""

from __future__ import annotations

import logging
import os

import gmpy2

log = logging.getLogger("levelbound")

DEFAULT_PRECISION_BITS = 256
PRECISION_ENV_VAR = "LEVELBOUND_PRECISION_BITS"

#: Union of the number types flowing through the package.
Number = (gmpy2.mpfr, gmpy2.mpq, gmpy2.mpz, int)


def default_precision() -> int:
    """Precision in bits, honoring the LEVELBOUND_PRECISION_BITS override."""
    raw = os.environ.get(PRECISION_ENV_VAR)
    if raw is None:
        return DEFAULT_PRECISION_BITS
    try:
        bits = int(raw)
    except ValueError as exc:
        raise ValueError(f"{PRECISION_ENV_VAR} must be an integer, got {raw!r}") from exc
    if bits < 2:
        raise ValueError(f"{PRECISION_ENV_VAR} must be >= 2, got {bits}")
    return bits


def precision_context(bits: int | None = None) -> gmpy2.context:
    """Context manager running mpfr arithmetic at the requested precision."""
    return gmpy2.context(precision=bits if bits is not None else default_precision())


def to_mpfr(x, bits: int | None = None):
    """Convert to mpfr at the given precision (mpq-safe, unlike float())."""
    with precision_context(bits):
        return gmpy2.mpfr(x)


def to_float(x) -> float:
    """Lossy conversion to a 64-bit float; overflows become inf, never raise."""
    if isinstance(x, float):
        return x
    if isinstance(x, gmpy2.mpq) or isinstance(x, (int, type(gmpy2.mpz(0)))):
        # float(mpq) raises OverflowError out of range; go through mpfr.
        return float(gmpy2.mpfr(x, 53))
    return float(x)


def log_float(x) -> float:
    """Natural log as a 64-bit float; -inf at zero."""
    if to_float(x) == 0.0 and gmpy2.sign(x) == 0:
        return float("-inf")
    with precision_context(64):
        return float(gmpy2.log(x))


def decimal_str(x, bits: int | None = None) -> str:
    """Full-precision decimal string (scientific notation for mpfr)."""
    if isinstance(x, gmpy2.mpq):
        return str(x)
    with precision_context(bits):
        return str(gmpy2.mpfr(x))


def number_triple(x) -> dict:
    """Reporting form of a number: exact-ish decimal, float64, natural log."""
    return {"decimal": decimal_str(x), "float": to_float(x), "log": log_float(x)}


def clamp01(x, what: str = "value"):
    """Clamp into [0, 1]; out-of-range inputs (rounding artifacts) are logged."""
    if x < 0:
        log.debug("clamping %s %s below 0", what, x)
        return type(x)(0) if not isinstance(x, int) else 0
    if x > 1:
        log.debug("clamping %s %s above 1", what, x)
        return type(x)(1) if not isinstance(x, int) else 1
    return x
