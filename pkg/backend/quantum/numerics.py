from __future__ import annotations

import math
from typing import Callable, Tuple

import numpy as np


INV_PHI = (math.sqrt(5) - 1) / 2  # 1 / phi
INV_PHI_SQUARE = (3 - math.sqrt(5)) / 2  # 1 / phi^2


def golden_section_maximize(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float = 1e-10,
) -> Tuple[float, float]:
    """
    Golden-section search for the maximum of a unimodal f on [a, b].

    Returns (x, f(x)) where x is the best evaluated point once the bracket
    is narrower than tol. The end points are evaluated too, so a maximum
    sitting on the boundary of [a, b] is never lost.
    """
    a, b = min(a, b), max(a, b)
    best_x, best_y = a, f(a)
    yb = f(b)
    if yb > best_y:
        best_x, best_y = b, yb

    h = b - a
    if h <= tol:
        return best_x, best_y

    n = int(math.ceil(math.log(tol / h) / math.log(INV_PHI)))
    c = a + INV_PHI_SQUARE * h
    d = a + INV_PHI * h
    yc = f(c)
    yd = f(d)

    for _ in range(max(n - 1, 0)):
        if yc > yd:
            b = d
            d, yd = c, yc
            h = INV_PHI * h
            c = a + INV_PHI_SQUARE * h
            yc = f(c)
        else:
            a = c
            c, yc = d, yd
            h = INV_PHI * h
            d = a + INV_PHI * h
            yd = f(d)

    for x, y in ((c, yc), (d, yd)):
        if y > best_y:
            best_x, best_y = x, y
    return best_x, best_y


def fibonacci_sphere(n_points: int) -> np.ndarray:
    """Deterministic, nearly uniform (n_points, 3) lattice on the unit sphere."""
    idx = np.arange(n_points, dtype=float) + 0.5
    z = 1.0 - 2.0 * idx / n_points
    phi = math.pi * (1.0 + math.sqrt(5.0)) * idx
    rho = np.sqrt(np.clip(1.0 - z * z, 0.0, None))
    return np.column_stack((rho * np.cos(phi), rho * np.sin(phi), z))
