"""Grid sensing map, per-cell sensing requirements and hover-time allocation.

Cells are indexed row-major from the top-left corner, starting at 0.  The
cell centre of index ``n`` sits at ``((col + 0.5) * pitch_x, (row + 0.5) *
pitch_y)`` with x growing along columns and y along rows.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np

from .errors import ConfigError, InvalidRequirementsError

PathLike = Union[str, Path]

#: Constant sensing altitude in metres. Travel is modelled as horizontal.
SENSING_HEIGHT = 0.40


@dataclass(frozen=True)
class SensingMap:
    rows: int
    cols: int
    width: float
    height: float
    departure_cell: int = 0
    altitude: float = SENSING_HEIGHT

    def __post_init__(self):
        if self.rows < 1 or self.cols < 1:
            raise ConfigError(f"map needs at least one row and column, got {self.rows}x{self.cols}")
        if not (self.width > 0 and self.height > 0):
            raise ConfigError(f"map dimensions must be positive, got {self.width}x{self.height}")
        if not 0 <= self.departure_cell < self.rows * self.cols:
            raise ConfigError(
                f"departure cell {self.departure_cell} outside 0..{self.rows * self.cols - 1}"
            )

    @property
    def N(self) -> int:
        return self.rows * self.cols

    @property
    def pitch_x(self) -> float:
        return self.width / self.cols

    @property
    def pitch_y(self) -> float:
        return self.height / self.rows

    def _check(self, n: int) -> int:
        n = int(n)
        if not 0 <= n < self.N:
            raise IndexError(f"cell index {n} outside 0..{self.N - 1}")
        return n

    def row_col(self, n: int) -> tuple[int, int]:
        return divmod(self._check(n), self.cols)

    def index(self, row: int, col: int) -> int:
        if not (0 <= row < self.rows and 0 <= col < self.cols):
            raise IndexError(f"cell ({row}, {col}) outside {self.rows}x{self.cols} grid")
        return row * self.cols + col

    def cell_center(self, n: int) -> tuple[float, float]:
        row, col = self.row_col(n)
        return ((col + 0.5) * self.pitch_x, (row + 0.5) * self.pitch_y)

    def distance(self, a: int, b: int) -> float:
        xa, ya = self.cell_center(a)
        xb, yb = self.cell_center(b)
        return math.hypot(xb - xa, yb - ya)

    def distance_matrix(self) -> np.ndarray:
        """All pairwise centre distances, shape ``(N, N)``."""
        centers = np.array([self.cell_center(n) for n in range(self.N)])
        diff = centers[:, None, :] - centers[None, :, :]
        return np.hypot(diff[..., 0], diff[..., 1])

    def as_grid(self, values) -> np.ndarray:
        values = np.asarray(values, dtype=float)
        if values.shape != (self.N,):
            raise ValueError(f"expected {self.N} values, got shape {values.shape}")
        return values.reshape(self.rows, self.cols)


def build_map(rows, cols, width, height, departure_cell=0) -> SensingMap:
    return SensingMap(int(rows), int(cols), float(width), float(height), int(departure_cell))


def cell_center(smap: SensingMap, n: int) -> tuple[float, float]:
    return smap.cell_center(n)


def distance(smap: SensingMap, a: int, b: int) -> float:
    return smap.distance(a, b)


@dataclass(frozen=True)
class Requirements:
    """Required sensing seconds per cell plus optional density estimates."""

    values: np.ndarray
    densities: Optional[np.ndarray] = None

    def __post_init__(self):
        values = _as_nonneg_vector(self.values, "requirements")
        if not values.any():
            raise InvalidRequirementsError("requirements are all zero")
        object.__setattr__(self, "values", values)
        if self.densities is not None:
            dens = _as_nonneg_vector(self.densities, "densities")
            if dens.shape != values.shape:
                raise InvalidRequirementsError(
                    f"density vector has {dens.size} entries, requirements have {values.size}"
                )
            object.__setattr__(self, "densities", dens)

    @property
    def N(self) -> int:
        return self.values.size

    @property
    def positive_cells(self) -> tuple[int, ...]:
        return tuple(int(n) for n in np.flatnonzero(self.values > 0))

    @property
    def total(self) -> float:
        return float(self.values.sum())


@dataclass(frozen=True)
class HoverAllocation:
    t: np.ndarray
    T: float


def _as_nonneg_vector(values, what) -> np.ndarray:
    arr = np.array(values, dtype=float).ravel()
    if arr.size == 0:
        raise InvalidRequirementsError(f"{what} vector is empty")
    if not np.all(np.isfinite(arr)):
        raise InvalidRequirementsError(f"{what} contain non-finite entries")
    if np.any(arr < 0):
        raise InvalidRequirementsError(f"{what} contain negative entries")
    arr.setflags(write=False)
    return arr


def allocate_hover_time(densities, T: float) -> HoverAllocation:
    """Split a total operating-time budget ``T`` across cells in proportion to density.

    ``densities`` may be a :class:`Requirements` carrying densities, or a raw
    vector of non-negative density estimates.
    """
    if isinstance(densities, Requirements):
        if densities.densities is None:
            raise InvalidRequirementsError("requirements carry no density estimates")
        densities = densities.densities
    f = np.asarray(densities, dtype=float)
    if np.any(f < 0) or not np.all(np.isfinite(f)):
        raise InvalidRequirementsError("densities must be finite and non-negative")
    if T < 0:
        raise InvalidRequirementsError(f"operating-time budget must be >= 0, got {T}")
    total = f.sum()
    if not total > 0:
        raise InvalidRequirementsError("density vector sums to zero")
    return HoverAllocation(t=f / total * T, T=float(T))


def _read_grid_csv(path: PathLike) -> np.ndarray:
    path = Path(path)
    try:
        with path.open(newline="") as fh:
            rows = [r for r in csv.reader(fh) if r and any(c.strip() for c in r)]
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from exc
    try:
        return np.array([float(c) for r in rows for c in r if c.strip()], dtype=float)
    except ValueError as exc:
        raise InvalidRequirementsError(f"{path}: unparsable value ({exc})") from exc


def load_requirements(
    path: PathLike,
    smap: Optional[SensingMap] = None,
    densities_path: Optional[PathLike] = None,
) -> Requirements:
    """Read a requirements CSV (one line per grid row) and optional density CSV."""
    values = _read_grid_csv(path)
    dens = _read_grid_csv(densities_path) if densities_path is not None else None
    if smap is not None:
        for what, arr in (("requirements", values), ("densities", dens)):
            if arr is not None and arr.size != smap.N:
                raise InvalidRequirementsError(
                    f"{what} file has {arr.size} values, map has {smap.N} cells"
                )
    return Requirements(values, dens)


def write_requirements(path: PathLike, values: Sequence[float], smap: SensingMap) -> None:
    grid = smap.as_grid(values)
    with Path(path).open("w", newline="") as fh:
        writer = csv.writer(fh)
        for row in grid:
            writer.writerow([repr(float(v)) for v in row])
