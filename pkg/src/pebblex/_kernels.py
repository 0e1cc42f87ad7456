"""Compiled inner loops for high-volume path solvability checks."""

import numba
import numpy as np


@numba.njit(cache=True)
def path_solvable_rows(Z):
    """Row-wise path solvability for an integer matrix of shape (samples, n).

    ``d >> 1`` after adding the current count is exactly the floor of the
    one-sided weighted sum, so the comparison with 1 is exact.
    """
    k, n = Z.shape
    out = np.empty(k, np.bool_)
    left = np.empty(n, np.int64)
    for r in range(k):
        d = 0
        for i in range(n):
            left[i] = d
            d = (d + Z[r, i]) >> 1
        d = 0
        ok = True
        for i in range(n - 1, -1, -1):
            if Z[r, i] == 0 and d == 0 and left[i] == 0:
                ok = False
                break
            d = (d + Z[r, i]) >> 1
        out[r] = ok
    return out
