"""Boys function F_m(x) = int_0^1 t^(2m) exp(-x t^2) dt."""
import math

import numpy as np
from numba import njit

_SERIES_LIMIT = 35.0


@njit(cache=True)
def boys_into(mmax, x, out):
    """Fill ``out[0..mmax]`` with F_0(x)..F_mmax(x)."""
    if x < _SERIES_LIMIT:
        # positive-term series for the top order, then stable downward recursion
        ex = math.exp(-x)
        denom = 2.0 * mmax + 1.0
        term = 1.0 / denom
        total = term
        k = 0
        while True:
            k += 1
            denom += 2.0
            term *= 2.0 * x / denom
            total += term
            if term < 1e-17 * total:
                break
            if k > 2000:
                break
        out[mmax] = ex * total
        for m in range(mmax, 0, -1):
            out[m - 1] = (2.0 * x * out[m] + ex) / (2.0 * m - 1.0)
    else:
        ex = math.exp(-x)
        sx = math.sqrt(x)
        out[0] = 0.5 * math.sqrt(math.pi) / sx * math.erf(sx)
        for m in range(mmax):
            out[m + 1] = ((2.0 * m + 1.0) * out[m] - ex) / (2.0 * x)


@njit(cache=True)
def boys_array(mmax, x):
    out = np.empty(mmax + 1)
    boys_into(mmax, x, out)
    return out


def boys_function(m: int, x: float) -> float:
    """F_m(x) for a single order; accurate to ~1e-14 relative for m <= 32."""
    if m < 0 or x < 0:
        raise ValueError("Boys function needs m >= 0 and x >= 0")
    return float(boys_array(int(m), float(x))[m])
