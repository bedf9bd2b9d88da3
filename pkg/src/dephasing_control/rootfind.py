"""Bracketed bisection for the transcendental equations in this package.

Bisection is deliberately preferred over Newton or secant steps: the recovery
equations mix exponentials with trigonometric terms, and open methods happily
jump to roots in later oscillation periods.  A sign-change bracket cannot.
"""

from __future__ import annotations

from typing import Callable


def bisect_root(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    *,
    residual_tol: float = 1e-12,
    rel_tol: float = 1e-12,
    max_iter: int = 200,
) -> float:
    """Root of f in [lo, hi], where f(lo) and f(hi) have opposite signs.

    Halves the bracket until the residual is within residual_tol and the
    bracket width is within rel_tol relative to the abscissa (or float
    precision is exhausted).  Returns the endpoint with the smallest |f|.
    """
    flo = f(lo)
    fhi = f(hi)
    if flo == 0.0:
        return lo
    if fhi == 0.0:
        return hi
    if (flo < 0.0) == (fhi < 0.0):
        raise ValueError(f"no sign change on [{lo!r}, {hi!r}]: f={flo!r}, {fhi!r}")

    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break  # float precision exhausted
        fmid = f(mid)
        if fmid == 0.0:
            return mid
        if (fmid < 0.0) == (flo < 0.0):
            lo, flo = mid, fmid
        else:
            hi, fhi = mid, fmid
        if abs(fmid) <= residual_tol and (hi - lo) <= rel_tol * max(abs(mid), 1e-300):
            break

    return lo if abs(flo) <= abs(fhi) else hi
