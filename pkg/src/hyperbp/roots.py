"""Vectorized bracketing root finder (Illinois variant of regula falsi)."""
from __future__ import annotations

import numpy as np


def bracket_root(f, lo, hi, xtol: float = 1e-15, maxiter: int = 100):
    """Roots of a vectorized f, one per bracket [lo, hi] with a sign change.

    Every third step is a plain bisection, which bounds the worst case; the
    other steps are Illinois-modified secant steps and converge superlinearly
    for smooth f.
    """
    a = np.array(lo, dtype=float, copy=True)
    b = np.array(hi, dtype=float, copy=True)
    fa = np.asarray(f(a), dtype=float).copy()
    fb = np.asarray(f(b), dtype=float).copy()
    if np.any(fa * fb > 0.0):
        raise ValueError("bracket_root: some brackets have no sign change")
    x = np.where(fa == 0.0, a, b)
    side = np.zeros(a.shape, dtype=int)
    done = (fa == 0.0) | (fb == 0.0)
    for it in range(maxiter):
        with np.errstate(divide="ignore", invalid="ignore"):
            sec = (a * fb - b * fa) / (fb - fa)
        mid = 0.5 * (a + b)
        use_mid = (it % 3 == 2) | ~np.isfinite(sec) | (sec <= np.minimum(a, b)) | (sec >= np.maximum(a, b))
        xn = np.where(use_mid, mid, sec)
        xn = np.where(done, x, xn)
        fx = np.asarray(f(xn), dtype=float)
        same_b = fx * fb > 0.0
        same_a = (fx * fa > 0.0) & ~same_b
        exact = fx == 0.0
        # Illinois: halve the stale endpoint value when the same side moves twice
        fa = np.where(same_b & (side == -1) & ~use_mid, 0.5 * fa, fa)
        fb = np.where(same_a & (side == 1) & ~use_mid, 0.5 * fb, fb)
        b = np.where(same_b & ~done, xn, b)
        fb = np.where(same_b & ~done, fx, fb)
        a = np.where(same_a & ~done, xn, a)
        fa = np.where(same_a & ~done, fx, fa)
        side = np.where(same_b, -1, np.where(same_a, 1, side))
        x = xn
        width = np.abs(b - a)
        done = done | exact | (width <= xtol * np.maximum(1.0, np.abs(x)))
        if np.all(done):
            break
    return np.where(np.abs(fa) < np.abs(fb), a, b) if np.any(~done) else x
