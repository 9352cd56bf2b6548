"""Rank correlation between expected and realized centralities.

Kendall's tau in the tau-a form: tied pairs contribute zero to the numerator
while the denominator counts all n(n-1)/2 pairs. The fast path counts
discordant pairs by merge sort and is exactly equivalent to the quadratic
definition; tau-b is available for tie-heavy realized scores.
"""

from __future__ import annotations

import math
from typing import Sequence

import numpy as np


def _merge_count(z: np.ndarray) -> int:
    """Number of strict inversions in z (equal elements are not inversions)."""
    n = z.shape[0]
    buf = z.copy()
    tmp = np.empty_like(buf)
    inversions = 0
    width = 1
    while width < n:
        for lo in range(0, n, 2 * width):
            mid = min(lo + width, n)
            hi = min(lo + 2 * width, n)
            if mid >= hi:
                continue
            i, j, k = lo, mid, lo
            while i < mid and j < hi:
                if buf[j] < buf[i]:
                    tmp[k] = buf[j]
                    inversions += mid - i
                    j += 1
                else:
                    tmp[k] = buf[i]
                    i += 1
                k += 1
            while i < mid:
                tmp[k] = buf[i]
                i += 1
                k += 1
            while j < hi:
                tmp[k] = buf[j]
                j += 1
                k += 1
            buf[lo:hi] = tmp[lo:hi]
        width *= 2
    return inversions


def _tie_pair_count(sorted_vals: np.ndarray) -> int:
    total = 0
    run = 1
    for i in range(1, sorted_vals.shape[0]):
        if sorted_vals[i] == sorted_vals[i - 1]:
            run += 1
        else:
            total += run * (run - 1) // 2
            run = 1
    total += run * (run - 1) // 2
    return total


def concordance_excess(y: Sequence[float], z: Sequence[float]) -> tuple[int, dict[str, int]]:
    """Concordant minus discordant pair count, with tie statistics.

    Uses Knight's decomposition: sort by (y, z), count strict inversions of z
    by merge sort; pairs tied in y or z are neither concordant nor discordant.
    """
    y = np.asarray(y)
    z = np.asarray(z)
    if y.shape != z.shape or y.ndim != 1:
        raise ValueError("inputs must be equal-length one-dimensional sequences")
    n = y.shape[0]
    if n < 2:
        raise ValueError("need at least two observations")
    order = np.lexsort((z, y))
    ys, zs = y[order], z[order]
    n0 = n * (n - 1) // 2
    ties_y = _tie_pair_count(ys)
    ties_z = _tie_pair_count(np.sort(z))
    both = 0
    run = 1
    for i in range(1, n):
        if ys[i] == ys[i - 1] and zs[i] == zs[i - 1]:
            run += 1
        else:
            both += run * (run - 1) // 2
            run = 1
    both += run * (run - 1) // 2
    discordant = _merge_count(zs)
    excess = (n0 - ties_y - ties_z + both) - 2 * discordant
    return excess, {"n0": n0, "ties_y": ties_y, "ties_z": ties_z, "ties_both": both}


def kendall_tau(y: Sequence[float], z: Sequence[float], variant: str = "a") -> float:
    """Kendall rank correlation in [-1, 1]."""
    excess, c = concordance_excess(y, z)
    if variant == "a":
        return excess / c["n0"]
    if variant == "b":
        denom = (c["n0"] - c["ties_y"]) * (c["n0"] - c["ties_z"])
        if denom == 0:
            raise ValueError("tau-b undefined for a constant input")
        return excess / math.sqrt(denom)
    raise ValueError("variant must be 'a' or 'b'")


def kendall_tau_naive(y: Sequence[float], z: Sequence[float]) -> float:
    """Quadratic evaluation of the printed sgn-product formula (reference path)."""
    y = np.asarray(y)
    z = np.asarray(z)
    if y.shape != z.shape or y.ndim != 1:
        raise ValueError("inputs must be equal-length one-dimensional sequences")
    n = y.shape[0]
    if n < 2:
        raise ValueError("need at least two observations")
    total = 0
    for i in range(n):
        for j in range(i + 1, n):
            dy = y[i] - y[j]
            dz = z[i] - z[j]
            sy = 1 if dy > 0 else (-1 if dy < 0 else 0)
            sz = 1 if dz > 0 else (-1 if dz < 0 else 0)
            total += sy * sz
    return 2.0 * total / (n * (n - 1))


def correlation_report(
    tau: float, n: int, measure: str, simulation: str, **extras
) -> dict:
    report = {"tau": float(tau), "n": int(n), "measure": measure, "simulation": simulation}
    report.update(extras)
    return report
