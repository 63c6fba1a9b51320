"""
One-dimensional search helpers used by every solver.

    golden_section_min   bracket-shrinking minimizer for unimodal objectives
    grid_then_refine     coarse grid followed by golden refinement of the best cell
    bracketed_root       scipy root finding with an explicit sign check
    scan_roots           sign-change scan plus root polishing on every cell
"""

import logging
import math
from typing import Callable, List, Sequence, Tuple

import numpy as np
from scipy import optimize

from scripts.errors import SolverError

logger = logging.getLogger(__name__)

# =============================================================================
# CONFIGURATION
# =============================================================================

INV_PHI = (math.sqrt(5) - 1) / 2  # 1 / phi
INV_PHI_SQUARE = (3 - math.sqrt(5)) / 2  # 1 / phi^2

CONFIG = {
    'golden_tol': 1e-11,
    'root_xtol': 1e-13,
    'max_golden_steps': 200,
}


def golden_section_min(
    f: Callable[[float], float],
    a: float,
    b: float,
    tol: float = None,
) -> Tuple[float, float]:
    """
    Golden-section search for the minimum of f on [a, b].

    Args:
        f: objective with a single local minimum in [a, b]
        a, b: interval ends (order does not matter)
        tol: final bracket width

    Returns:
        (x, f(x)) at the best point visited
    """
    tol = CONFIG['golden_tol'] if tol is None else tol
    a, b = min(a, b), max(a, b)
    h = b - a
    if h <= tol:
        x = 0.5 * (a + b)
        return x, f(x)

    n = int(math.ceil(math.log(tol / h) / math.log(INV_PHI)))
    n = min(n, CONFIG['max_golden_steps'])

    c = a + INV_PHI_SQUARE * h
    d = a + INV_PHI * h
    yc = f(c)
    yd = f(d)

    for _ in range(n - 1):
        if yc < yd:
            b = d
            d = c
            yd = yc
            h = INV_PHI * h
            c = a + INV_PHI_SQUARE * h
            yc = f(c)
        else:
            a = c
            c = d
            yc = yd
            h = INV_PHI * h
            d = a + INV_PHI * h
            yd = f(d)

    if yc < yd:
        return c, yc
    return d, yd


def golden_section_max(f: Callable[[float], float], a: float, b: float, tol: float = None) -> Tuple[float, float]:
    x, y = golden_section_min(lambda t: -f(t), a, b, tol)
    return x, -y


def grid_then_refine(
    f: Callable[[float], float],
    lo: float,
    hi: float,
    grid_size: int,
    tol: float = None,
) -> Tuple[float, float]:
    """
    Minimize f over [lo, hi] by a uniform grid followed by golden-section
    refinement on the two cells around the best grid point.

    Infeasible points should return +inf; they never win.

    Returns:
        (x, f(x)); f(x) is +inf when no grid point was finite
    """
    grid = np.linspace(lo, hi, grid_size)
    values = np.array([f(float(t)) for t in grid])
    k = int(np.argmin(values))
    best_x, best_y = float(grid[k]), float(values[k])
    if not np.isfinite(best_y):
        return best_x, best_y

    left = float(grid[max(k - 1, 0)])
    right = float(grid[min(k + 1, grid_size - 1)])
    x, y = golden_section_min(f, left, right, tol)
    if y < best_y:
        return x, y
    return best_x, best_y


def bracketed_root(
    f: Callable[[float], float],
    a: float,
    b: float,
    xtol: float = None,
) -> float:
    """
    Root of f in [a, b] via Brent's bracketing method.

    Raises:
        SolverError: f(a) and f(b) have the same strict sign
    """
    xtol = CONFIG['root_xtol'] if xtol is None else xtol
    fa, fb = f(a), f(b)
    if fa == 0.0:
        return a
    if fb == 0.0:
        return b
    if np.sign(fa) == np.sign(fb):
        raise SolverError(f"No sign change on [{a:.6g}, {b:.6g}] (f={fa:.3g}, {fb:.3g})")
    return float(optimize.brentq(f, a, b, xtol=xtol, rtol=4 * np.finfo(float).eps, maxiter=500))


def scan_roots(
    f_vec: Callable[[np.ndarray], np.ndarray],
    f_scalar: Callable[[float], float],
    lo: float,
    hi: float,
    cells: int,
) -> List[float]:
    """
    Every root of f on [lo, hi] that shows up as a sign change between
    neighbouring cell edges. Non-finite cell values break the chain.

    Args:
        f_vec: vectorized evaluation over the cell edges
        f_scalar: scalar evaluation for root polishing
        cells: number of cells

    Returns:
        Sorted root locations
    """
    edges = np.linspace(lo, hi, cells + 1)
    values = np.asarray(f_vec(edges), dtype=float)
    roots: List[float] = []
    for i in range(cells):
        va, vb = values[i], values[i + 1]
        if not (np.isfinite(va) and np.isfinite(vb)):
            continue
        if va == 0.0:
            roots.append(float(edges[i]))
            continue
        if va * vb < 0.0:
            roots.append(bracketed_root(f_scalar, float(edges[i]), float(edges[i + 1])))
    if np.isfinite(values[-1]) and values[-1] == 0.0:
        roots.append(float(edges[-1]))
    return roots


def second_differences(values: Sequence[float]) -> np.ndarray:
    v = np.asarray(values, dtype=float)
    return v[2:] - 2.0 * v[1:-1] + v[:-2]
