"""
Legendre-Fenchel conjugation of sampled functions.

Conjugates are grid suprema, f*(x) = max_i a_i x - f(a_i); no interpolation
or root finding, so the error is bounded by grid step times slope.
"""
import csv
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import TextIO, Union

import numpy as np

from .exceptions import SemiringValidationError

logger = logging.getLogger(__name__)

CHUNK = 512


@dataclass(frozen=True, eq=False)
class SampledFunction:
    grid: np.ndarray
    values: np.ndarray

    def __post_init__(self):
        grid = np.asarray(self.grid, dtype=float)
        values = np.asarray(self.values, dtype=float)
        if grid.ndim != 1 or grid.size < 2:
            raise SemiringValidationError("A sampled function needs at least two grid points.")
        if values.shape != grid.shape:
            raise SemiringValidationError("grid and values must have the same length.")
        if not np.all(np.isfinite(grid)) or np.any(np.diff(grid) <= 0):
            raise SemiringValidationError("grid must be finite and strictly increasing.")
        if np.any(np.isnan(values)) or np.any(values == -np.inf):
            raise SemiringValidationError("values must not be NaN or -inf.")
        object.__setattr__(self, 'grid', grid)
        object.__setattr__(self, 'values', values)

    @classmethod
    def sample(cls, func, grid) -> 'SampledFunction':
        grid = np.asarray(grid, dtype=float)
        return cls(grid, np.asarray(func(grid), dtype=float))


def _strictly_increasing(points) -> np.ndarray:
    points = np.asarray(points, dtype=float)
    if points.ndim != 1 or points.size < 2 or np.any(np.diff(points) <= 0):
        raise SemiringValidationError("A dual or primal grid must be strictly increasing with at least two points.")
    return points


def conjugate(f: SampledFunction, dual_grid) -> SampledFunction:
    """f*(x_j) = max_i a_i x_j - f(a_i) over the finite samples of f."""
    xs = _strictly_increasing(dual_grid)
    finite = np.isfinite(f.values)
    if not np.any(finite):
        raise SemiringValidationError("The conjugate of an everywhere-infinite function is -inf.")
    a, fa = f.grid[finite], f.values[finite]
    result = np.empty(xs.size)
    for start in range(0, xs.size, CHUNK):
        block = xs[start:start + CHUNK]
        result[start:start + CHUNK] = np.max(block[:, None] * a[None, :] - fa[None, :], axis=1)
    return SampledFunction(xs, result)


def biconjugate(f: SampledFunction, dual_grid, primal_grid) -> SampledFunction:
    """f** on primal_grid through the dual samples; the lower closed convex envelope of f."""
    primal = _strictly_increasing(primal_grid)
    if primal[0] < f.grid[0] or primal[-1] > f.grid[-1]:
        raise SemiringValidationError("primal_grid must lie within the hull of the function's grid.")
    return conjugate(conjugate(f, dual_grid), primal)


def convexity_defect(f: SampledFunction) -> float:
    """
    max over consecutive triples of f(mid) minus the chord through the outer
    two points at mid, clamped at 0. Grids need not be uniform. An infinite
    sample between finite ones gives inf.
    """
    left, mid, right = f.grid[:-2], f.grid[1:-1], f.grid[2:]
    weight = (right - mid) / (right - left)
    with np.errstate(invalid='ignore'):
        chord = weight * f.values[:-2] + (1.0 - weight) * f.values[2:]
        excess = f.values[1:-1] - chord
    excess = np.where(np.isinf(chord) | np.isnan(excess), 0.0, excess)
    if excess.size == 0:
        return 0.0
    return float(max(0.0, np.max(excess)))


def read_csv(source: Union[str, Path, TextIO]) -> SampledFunction:
    """Read a sampled function from CSV with header ``x,f``; ``inf`` is accepted."""
    if isinstance(source, (str, Path)):
        with open(source, newline='') as stream:
            return read_csv(stream)
    reader = csv.reader(source)
    header = next(reader, None)
    if header is None or [cell.strip() for cell in header] != ['x', 'f']:
        raise SemiringValidationError("CSV input must start with the header 'x,f'.")
    grid, values = [], []
    for line, row in enumerate(reader, start=2):
        if not row:
            continue
        try:
            x, value = (float(cell) for cell in row)
        except ValueError:
            raise SemiringValidationError(f"Line {line}: expected two numbers, got {row!r}.")
        grid.append(x)
        values.append(value)
    return SampledFunction(np.array(grid), np.array(values))


def write_csv(f: SampledFunction, target: Union[str, Path, TextIO]) -> None:
    if isinstance(target, (str, Path)):
        with open(target, 'w', newline='') as stream:
            write_csv(f, stream)
        return
    writer = csv.writer(target, lineterminator='\n')
    writer.writerow(['x', 'f'])
    for x, value in zip(f.grid, f.values):
        writer.writerow([repr(float(x)), 'inf' if math.isinf(value) else repr(float(value))])
