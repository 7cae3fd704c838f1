"""Planar point patterns and Strauss sufficient statistics.

A pattern lives in a closed rectangular window. The statistics are the point
count ``n(y)`` and the number of unordered pairs at distance ``<= r``; no edge
correction and no periodic wrap are applied.
"""
from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import NamedTuple

import numpy as np


class PatternError(ValueError):
    """Raised for points outside the window, bad indices or bad radii."""


class PatternParseError(PatternError):
    """Raised when a pattern CSV cannot be parsed; carries the line number."""

    def __init__(self, path, lineno: int, msg: str):
        self.path = path
        self.lineno = lineno
        super().__init__(f"{path}:{lineno}: {msg}")


class Point(NamedTuple):
    x: float
    y: float


@dataclass(frozen=True)
class Window:
    """Closed axis-aligned rectangle ``[x_min, x_max] x [y_min, y_max]``."""

    x_min: float = 0.0
    x_max: float = 1.0
    y_min: float = 0.0
    y_max: float = 1.0

    def __post_init__(self):
        bounds = (self.x_min, self.x_max, self.y_min, self.y_max)
        if not all(math.isfinite(b) for b in bounds):
            raise PatternError(f"window bounds must be finite, got {bounds}")
        if not (self.x_min < self.x_max and self.y_min < self.y_max):
            raise PatternError(f"degenerate window {bounds}")

    @property
    def area(self) -> float:
        return (self.x_max - self.x_min) * (self.y_max - self.y_min)

    def contains(self, x: float, y: float) -> bool:
        return self.x_min <= x <= self.x_max and self.y_min <= y <= self.y_max

    def as_tuple(self) -> tuple[float, float, float, float]:
        return (self.x_min, self.x_max, self.y_min, self.y_max)


UNIT_SQUARE = Window()


class PointPattern:
    """Ordered, finite list of points inside a window.

    Coordinates are held in an ``(n, 2)`` float array which is marked
    read-only, so a pattern can be shared freely once built.
    """

    __slots__ = ("window", "_xy")

    def __init__(self, window: Window, points=(), *, check: bool = True):
        xy = np.array(points, dtype=float).reshape(-1, 2)
        if check:
            if not np.all(np.isfinite(xy)):
                raise PatternError("point coordinates must be finite")
            x, y = xy[:, 0], xy[:, 1]
            inside = (
                (x >= window.x_min) & (x <= window.x_max)
                & (y >= window.y_min) & (y <= window.y_max)
            )
            if not np.all(inside):
                bad = int(np.flatnonzero(~inside)[0])
                raise PatternError(
                    f"point {bad} at ({x[bad]}, {y[bad]}) lies outside window {window.as_tuple()}"
                )
        xy.setflags(write=False)
        self.window = window
        self._xy = xy

    @classmethod
    def empty(cls, window: Window = UNIT_SQUARE) -> "PointPattern":
        return cls(window, np.empty((0, 2)), check=False)

    @classmethod
    def uniform(cls, window: Window, n: int, rng: np.random.Generator) -> "PointPattern":
        """``n`` independent uniform points in ``window`` (binomial process)."""
        u = rng.random((n, 2))
        xy = np.column_stack(
            [
                window.x_min + (window.x_max - window.x_min) * u[:, 0],
                window.y_min + (window.y_max - window.y_min) * u[:, 1],
            ]
        )
        return cls(window, xy, check=False)

    @property
    def xy(self) -> np.ndarray:
        return self._xy

    @property
    def n(self) -> int:
        return self._xy.shape[0]

    def __len__(self) -> int:
        return self._xy.shape[0]

    def __iter__(self):
        for x, y in self._xy:
            yield Point(float(x), float(y))

    def __getitem__(self, i: int) -> Point:
        x, y = self._xy[i]
        return Point(float(x), float(y))

    def __eq__(self, other):
        if not isinstance(other, PointPattern):
            return NotImplemented
        return self.window == other.window and np.array_equal(self._xy, other._xy)

    def __repr__(self):
        return f"PointPattern(n={self.n}, window={self.window.as_tuple()})"

    def with_point(self, u: Point) -> "PointPattern":
        _check_inside(self.window, u)
        return PointPattern(self.window, np.vstack([self._xy, [u]]), check=False)

    def without_point(self, index: int) -> "PointPattern":
        _check_index(self, index)
        return PointPattern(self.window, np.delete(self._xy, index, axis=0), check=False)


def _check_radius(r) -> float:
    r = float(r)
    if not (math.isfinite(r) and r > 0):
        raise PatternError(f"interaction radius must be finite and > 0, got {r}")
    return r


def _check_inside(window: Window, u) -> None:
    x, y = u
    if not (math.isfinite(x) and math.isfinite(y) and window.contains(x, y)):
        raise PatternError(f"candidate ({x}, {y}) lies outside window {window.as_tuple()}")


def _check_index(pattern: PointPattern, index: int) -> None:
    if not (0 <= index < pattern.n):
        raise PatternError(f"point index {index} out of range for pattern of {pattern.n} points")


def _close(dx: float, dy: float, r2: float) -> bool:
    # every pair test in the package (kernels included) uses this predicate
    return dx * dx + dy * dy <= r2


def count_close_pairs_bruteforce(pattern: PointPattern, r: float) -> int:
    """O(n^2) reference count of pairs ``i < j`` with distance ``<= r``."""
    r2 = _check_radius(r) ** 2
    pts = pattern.xy.tolist()
    total = 0
    for i in range(len(pts)):
        xi, yi = pts[i]
        for j in range(i + 1, len(pts)):
            if _close(xi - pts[j][0], yi - pts[j][1], r2):
                total += 1
    return total


class GridIndex:
    """Uniform grid with cell side ``r`` for fixed-radius neighbour queries.

    Only the 3x3 block of cells around a query point can hold neighbours
    within ``r``, so queries cost O(local density) instead of O(n).
    """

    def __init__(self, pattern: PointPattern, r: float):
        self.r = _check_radius(r)
        self._r2 = self.r * self.r
        # slightly wider than r so rounding in the cell lookup never splits a close pair
        self._side = self.r * (1.0 + 1e-9)
        self.window = pattern.window
        self._pts = pattern.xy.tolist()
        self._cells: dict[tuple[int, int], list[int]] = {}
        for i, (x, y) in enumerate(self._pts):
            self._cells.setdefault(self._cell(x, y), []).append(i)

    def _cell(self, x: float, y: float) -> tuple[int, int]:
        return (
            int(math.floor((x - self.window.x_min) / self._side)),
            int(math.floor((y - self.window.y_min) / self._side)),
        )

    def neighbours(self, x: float, y: float, exclude: int = -1) -> list[int]:
        cx, cy = self._cell(x, y)
        out = []
        for ix in (cx - 1, cx, cx + 1):
            for iy in (cy - 1, cy, cy + 1):
                for j in self._cells.get((ix, iy), ()):
                    if j != exclude and _close(x - self._pts[j][0], y - self._pts[j][1], self._r2):
                        out.append(j)
        return out

    def count_pairs(self) -> int:
        total = 0
        for i, (x, y) in enumerate(self._pts):
            total += sum(1 for j in self.neighbours(x, y) if j > i)
        return total


def count_close_pairs(pattern: PointPattern, r: float) -> int:
    """Number of unordered pairs of points at Euclidean distance ``<= r``."""
    r = _check_radius(r)
    if pattern.n < 2:
        return 0
    return GridIndex(pattern, r).count_pairs()


def suff_stats(pattern: PointPattern, r: float) -> np.ndarray:
    """Strauss sufficient statistics ``[n(y), s_r(y)]`` as a float vector."""
    return np.array([pattern.n, count_close_pairs(pattern, r)], dtype=float)


def _neighbour_count(pattern: PointPattern, x: float, y: float, r: float, exclude: int = -1) -> int:
    r2 = r * r
    k = 0
    for j, (px, py) in enumerate(pattern.xy.tolist()):
        if j != exclude and _close(x - px, y - py, r2):
            k += 1
    return k


def stat_delta_insert(pattern: PointPattern, candidate, r: float) -> np.ndarray:
    """``t(y + u) - t(y)``; the pattern is left untouched."""
    r = _check_radius(r)
    _check_inside(pattern.window, candidate)
    x, y = candidate
    return np.array([1.0, _neighbour_count(pattern, x, y, r)])


def stat_delta_remove(pattern: PointPattern, index: int, r: float) -> np.ndarray:
    """``t(y) - t(y - p_index)``."""
    r = _check_radius(r)
    _check_index(pattern, index)
    x, y = pattern.xy[index]
    return np.array([1.0, _neighbour_count(pattern, float(x), float(y), r, exclude=index)])


def read_pattern_csv(path, window: Window = UNIT_SQUARE) -> PointPattern:
    """Read a ``x,y`` CSV file. The window comes from the caller, not the file."""
    path = Path(path)
    rows = []
    with path.open(newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader, None)
        if header is None or [h.strip() for h in header] != ["x", "y"]:
            raise PatternParseError(path, 1, f"expected header 'x,y', got {header!r}")
        for row in reader:
            lineno = reader.line_num
            if not row or all(not c.strip() for c in row):
                continue
            if len(row) != 2:
                raise PatternParseError(path, lineno, f"expected 2 fields, got {len(row)}")
            try:
                x, y = float(row[0]), float(row[1])
            except ValueError:
                raise PatternParseError(path, lineno, f"non-numeric row {row!r}") from None
            if not (math.isfinite(x) and math.isfinite(y)):
                raise PatternParseError(path, lineno, "non-finite coordinate")
            if not window.contains(x, y):
                raise PatternParseError(path, lineno, f"point ({x}, {y}) outside window {window.as_tuple()}")
            rows.append((x, y))
    return PointPattern(window, rows, check=False)


def write_pattern_csv(pattern: PointPattern, path) -> None:
    with Path(path).open("w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(["x", "y"])
        for x, y in pattern.xy.tolist():
            w.writerow([repr(x), repr(y)])

