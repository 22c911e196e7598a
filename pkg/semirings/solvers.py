"""
Numeric engine shared by the deformed additions.

Everything here minimises over probabilities: a batch of one-dimensional
objectives on [0, 1] (one row per input pair), or a single objective on the
probability simplex. Objectives are numpy callables; nothing in this module
knows which measure produced them.
"""
import logging
from dataclasses import dataclass
from functools import lru_cache
from itertools import combinations
from math import sqrt
from typing import Callable, Optional, Tuple

import numpy as np

from .exceptions import NumericalError, SemiringValidationError

logger = logging.getLogger(__name__)

INVPHI = (sqrt(5) - 1) / 2
BRACKETS = 3
CHUNK_ROWS = 2048
MAX_SWEEPS = 50
PAIR_GRID_N = 65

# Simplex grid resolution per dimension when SolverSettings.grid_simplex is unset.
DEFAULT_SIMPLEX_STEPS = {3: 200, 4: 80, 5: 50, 6: 30}


@dataclass(frozen=True)
class SolverSettings:
    grid_n: int = 512
    refine_iters: int = 80
    tol: float = 1e-10
    grid_simplex: Optional[int] = None

    def __post_init__(self):
        if int(self.grid_n) < 64:
            raise SemiringValidationError(f"grid_n must be at least 64, got {self.grid_n!r}.")
        if int(self.refine_iters) < 1:
            raise SemiringValidationError(f"refine_iters must be positive, got {self.refine_iters!r}.")
        if not self.tol > 0:
            raise SemiringValidationError(f"tol must be positive, got {self.tol!r}.")
        if self.grid_simplex is not None and int(self.grid_simplex) < 2:
            raise SemiringValidationError(f"grid_simplex must be at least 2, got {self.grid_simplex!r}.")

    def simplex_steps(self, n: int) -> int:
        if self.grid_simplex is not None:
            return int(self.grid_simplex)
        return DEFAULT_SIMPLEX_STEPS.get(n, self.grid_n - 1)


@dataclass(frozen=True)
class BatchMinimum:
    """Row-wise minima of a batch of objectives on [0, 1]."""
    values: np.ndarray
    argmins: np.ndarray
    multiple: np.ndarray


def _golden_section(objective, a, b, fixed, settings: SolverSettings):
    """Shrink every bracket [a, b] in lockstep; returns (points, values, widths)."""
    c = b - INVPHI * (b - a)
    d = a + INVPHI * (b - a)
    fc = objective(c, *fixed)
    fd = objective(d, *fixed)
    for _ in range(int(settings.refine_iters)):
        if np.max(b - a) <= settings.tol:
            break
        left = fc < fd
        a = np.where(left, a, c)
        b = np.where(left, d, b)
        kept = np.where(left, c, d)
        f_kept = np.where(left, fc, fd)
        fresh = np.where(left, b - INVPHI * (b - a), a + INVPHI * (b - a))
        f_fresh = objective(fresh, *fixed)
        c = np.where(left, fresh, kept)
        fc = np.where(left, f_fresh, f_kept)
        d = np.where(left, kept, fresh)
        fd = np.where(left, f_kept, f_fresh)
    points = np.where(fc < fd, c, d)
    values = np.minimum(fc, fd)
    return points, values, b - a


def _minimize_chunk(objective, fixed, rows, settings: SolverSettings, grid_n: int):
    grid = np.linspace(0.0, 1.0, grid_n)
    sampled = objective(np.broadcast_to(grid, (rows, grid_n)), *fixed)

    lower_left = np.ones_like(sampled, dtype=bool)
    lower_left[:, 1:] = sampled[:, 1:] <= sampled[:, :-1]
    lower_right = np.ones_like(sampled, dtype=bool)
    lower_right[:, :-1] = sampled[:, :-1] <= sampled[:, 1:]
    score = np.where(lower_left & lower_right, sampled, np.inf)

    picks = np.argsort(score, axis=1, kind='stable')[:, :BRACKETS]
    valid = np.isfinite(np.take_along_axis(score, picks, axis=1))
    a = grid[np.clip(picks - 1, 0, grid_n - 1)]
    b = grid[np.clip(picks + 1, 0, grid_n - 1)]

    points, values, widths = _golden_section(objective, a, b, fixed, settings)
    if np.any(widths[valid] > settings.tol):
        logger.warning("golden section stopped after %s iterations with bracket width %.3g",
                       settings.refine_iters, float(np.max(widths[valid])))
        raise NumericalError(
            f"golden-section refinement did not reach tol={settings.tol!r} "
            f"in {settings.refine_iters} iterations."
        )
    values = np.where(valid, values, np.inf)

    # Grid minimum competes too; it wins on exact boundary minimisers.
    grid_best = np.argmin(sampled, axis=1)
    grid_values = sampled[np.arange(rows), grid_best]
    refined_best = np.argmin(values, axis=1)
    best_values = values[np.arange(rows), refined_best]
    best_points = points[np.arange(rows), refined_best]
    use_grid = grid_values < best_values
    best_values = np.where(use_grid, grid_values, best_values)
    best_points = np.where(use_grid, grid[grid_best], best_points)

    spacing = 1.0 / (grid_n - 1)
    tied = valid & (values <= best_values[:, None] + settings.tol)
    separate = tied & (np.abs(points - best_points[:, None]) > 2 * spacing)
    multiple = np.any(separate, axis=1)
    if np.any(multiple):
        # Several distinct minimisers: report the smallest p among them.
        candidates = np.where(separate, points, np.inf)
        smallest = np.min(candidates, axis=1)
        best_points = np.where(multiple, np.minimum(best_points, smallest), best_points)
        logger.debug("%d of %d rows have tied minimisers", int(np.sum(multiple)), rows)
    return best_values, best_points, multiple


def minimize_unit_interval(objective: Callable, *params: np.ndarray,
                           settings: SolverSettings, grid_n: Optional[int] = None,
                           rows: Optional[int] = None) -> BatchMinimum:
    """
    Minimise a batch of objectives over p in [0, 1].

    Args:
        objective: callable f(p, *params) -> values. ``p`` has shape
            (rows, k) and each entry of ``params`` is a (rows, 1) column,
            so each row is its own objective.
        params: one-dimensional per-row parameters of equal length.
        settings: grid size, golden-section iterations and tolerance.
        grid_n: overrides settings.grid_n for the coarse grid.
        rows: batch size when no params are given (defaults to 1).

    Returns:
        BatchMinimum with one value, argmin and multiplicity flag per row.
    """
    grid_n = int(grid_n or settings.grid_n)
    arrays = [np.asarray(param, dtype=float) for param in params]
    total = arrays[0].shape[0] if arrays else (rows or 1)

    values = np.empty(total)
    argmins = np.empty(total)
    multiple = np.zeros(total, dtype=bool)
    for start in range(0, total, CHUNK_ROWS):
        stop = min(start + CHUNK_ROWS, total)
        fixed = tuple(param[start:stop, None] for param in arrays)
        chunk = _minimize_chunk(objective, fixed, stop - start, settings, grid_n)
        values[start:stop], argmins[start:stop], multiple[start:stop] = chunk
    return BatchMinimum(values=values, argmins=argmins, multiple=multiple)


@lru_cache(maxsize=16)
def simplex_grid(n: int, steps: int) -> np.ndarray:
    """Every point of the n-simplex whose coordinates are multiples of 1/steps."""
    if n == 1:
        grid = np.ones((1, 1))
    else:
        bars = np.array(list(combinations(range(steps + n - 1), n - 1)), dtype=np.int64)
        edges = np.concatenate([
            np.full((bars.shape[0], 1), -1),
            bars,
            np.full((bars.shape[0], 1), steps + n - 1),
        ], axis=1)
        grid = (np.diff(edges, axis=1) - 1) / steps
    grid.flags.writeable = False
    return grid


def _pair_line_search(objective, p: np.ndarray, i: int, j: int, settings: SolverSettings):
    mass = p[i] + p[j]

    def along(s):
        flat = s.reshape(-1)
        points = np.repeat(p[None, :], flat.size, axis=0)
        points[:, i] = flat * mass
        points[:, j] = (1.0 - flat) * mass
        return objective(points).reshape(s.shape)

    found = minimize_unit_interval(along, settings=settings, grid_n=PAIR_GRID_N)
    return float(found.values[0]), float(found.argmins[0]) * mass


def coordinate_descent(objective: Callable, start: np.ndarray,
                       settings: SolverSettings) -> Tuple[float, np.ndarray]:
    """
    Refine a simplex point by moving mass between pairs of coordinates.

    Each pair is solved exactly along its segment; sweeps repeat until one
    improves the objective by less than settings.tol.
    """
    p = np.array(start, dtype=float)
    best = float(objective(p[None, :])[0])
    n = p.size
    for sweep in range(MAX_SWEEPS):
        before = best
        for i, j in combinations(range(n), 2):
            if p[i] + p[j] <= 0:
                continue
            value, share = _pair_line_search(objective, p, i, j, settings)
            if value < best:
                p[j] = p[i] + p[j] - share
                p[i] = share
                best = value
        if before - best < settings.tol:
            logger.debug("coordinate descent settled after %d sweeps", sweep + 1)
            break
    return best, p


def minimize_simplex(objective: Callable, n: int, settings: SolverSettings,
                     steps: Optional[int] = None) -> Tuple[float, np.ndarray]:
    """Brute-force simplex grid search followed by pairwise refinement."""
    grid = simplex_grid(n, int(steps or settings.simplex_steps(n)))
    sampled = objective(grid)
    start = grid[int(np.argmin(sampled))]
    return coordinate_descent(objective, start, settings)
