"""Deterministic golden-section minimization for smooth 1-D objectives."""

from __future__ import annotations

import math

_INVPHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_min(f, lo, hi, *, xtol, max_iter=200):
    """Minimize f on [lo, hi]; returns (argmin, min, neval).

    Plain golden-section with endpoint evaluation, so a monotone objective
    returns the better endpoint.  Fully deterministic for fixed inputs.
    """
    if hi <= lo:
        v = f(lo)
        return lo, v, 1
    x1 = hi - _INVPHI * (hi - lo)
    x2 = lo + _INVPHI * (hi - lo)
    f1, f2 = f(x1), f(x2)
    flo, fhi = f(lo), f(hi)
    neval = 4
    it = 0
    while hi - lo > xtol and it < max_iter:
        if f1 <= f2:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - _INVPHI * (hi - lo)
            f1 = f(x1)
        else:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + _INVPHI * (hi - lo)
            f2 = f(x2)
        neval += 1
        it += 1
    candidates = [(f1, x1), (f2, x2), (flo, lo), (fhi, hi)]
    best_f, best_x = min(candidates, key=lambda p: p[0])
    return best_x, best_f, neval
