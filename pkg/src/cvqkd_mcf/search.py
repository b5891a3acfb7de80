"""Scalar root bracketing and maximisation used by the rate optimisers."""

from __future__ import annotations

import math
from typing import Callable

INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def bisect_decreasing(f: Callable[[float], float], lo: float, hi: float,
                      ftol: float = 1e-9, xtol: float = 0.0,
                      max_iter: int = 400) -> float:
    """Root of a decreasing function with f(lo) > 0 >= f(hi).

    Stops once |f(x)| < ftol or the bracket is narrower than xtol; the
    returned point is always the midpoint of the final bracket.
    """
    flo, fhi = f(lo), f(hi)
    if not (flo > 0.0 >= fhi):
        raise ValueError(f"root not bracketed: f({lo})={flo}, f({hi})={fhi}")
    mid = 0.5 * (lo + hi)
    for _ in range(max_iter):
        mid = 0.5 * (lo + hi)
        fm = f(mid)
        if abs(fm) < ftol or (hi - lo) <= xtol or mid in (lo, hi):
            return mid
        if fm > 0.0:
            lo = mid
        else:
            hi = mid
    return mid


def golden_section_max(f: Callable[[float], float], lo: float, hi: float,
                       tol: float = 1e-10, max_iter: int = 500) -> tuple[float, float]:
    """Maximise a unimodal f on [lo, hi]; returns (argmax, fmax)."""
    x1 = hi - INV_PHI * (hi - lo)
    x2 = lo + INV_PHI * (hi - lo)
    f1, f2 = f(x1), f(x2)
    for _ in range(max_iter):
        if hi - lo <= tol:
            break
        if f1 < f2:
            lo, x1, f1 = x1, x2, f2
            x2 = lo + INV_PHI * (hi - lo)
            f2 = f(x2)
        else:
            hi, x2, f2 = x2, x1, f1
            x1 = hi - INV_PHI * (hi - lo)
            f1 = f(x1)
    return (x1, f1) if f1 >= f2 else (x2, f2)
