"""Gridded marine environment: bathymetry, monthly SST and habitat queries.

Rasters are ESRI-ASCII-style grids (``ncols``/``nrows``/``xllcorner``/
``yllcorner``/``cellsize``/``NODATA_value`` header then row-major values,
row 0 = northernmost). An environment directory holds ``bathy.asc`` plus
either a 12-layer monthly climatology (``sst_clim_01.asc`` .. ``_12.asc``)
or a multi-year series (``sst_YYYY_MM.asc``). NODATA in the bathymetry
marks land; depth is meters, positive downward.

The grid is immutable after load and safe to share between runs. A uniform
climate offset (delta_sst, degC) is stored at load time and applied lazily
by every SST query.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

MONTH_LENGTHS = (31, 28, 31, 30, 31, 30, 31, 31, 30, 31, 30, 31)  # non-leap calendar
HOURS_PER_YEAR = 8760
CELL_AREA_KM2 = 100.0

# Physical plausibility band for SST on sea cells, after climate offset.
SST_MIN_C = 10.0
SST_MAX_C = 40.0


class EnvironmentError_(Exception):
    """Raised when environment rasters are missing, inconsistent or invalid."""


@dataclass
class SimClock:
    """Simulation calendar: 1-hour steps, real month lengths, no leap years."""

    year: int = 2001
    month: int = 1
    day_of_month: int = 1
    hour: int = 0
    absolute_hour: int = 0      # hours since simulation start
    month_index: int = 0        # whole months elapsed since simulation start

    def advance_hour(self) -> None:
        self.absolute_hour += 1
        self.hour += 1
        if self.hour < 24:
            return
        self.hour = 0
        self.day_of_month += 1
        if self.day_of_month <= MONTH_LENGTHS[self.month - 1]:
            return
        self.day_of_month = 1
        self.month += 1
        self.month_index += 1
        if self.month > 12:
            self.month = 1
            self.year += 1

    @property
    def date_str(self) -> str:
        return f"{self.year:04d}-{self.month:02d}-{self.day_of_month:02d}"

    def copy(self) -> "SimClock":
        return SimClock(self.year, self.month, self.day_of_month, self.hour,
                        self.absolute_hour, self.month_index)


def _parse_asc(path: Path) -> tuple[dict, np.ndarray]:
    """Parse one ESRI ASCII grid. Returns (header dict, float array with NaN for NODATA)."""
    if not path.exists():
        raise EnvironmentError_(f"missing raster file: {path}")
    header_keys = {"ncols", "nrows", "xllcorner", "yllcorner", "cellsize", "nodata_value"}
    header: dict[str, float] = {}
    data_lines = []
    with open(path) as fh:
        for line in fh:
            parts = line.split()
            if not parts:
                continue
            if len(parts) == 2 and parts[0].lower() in header_keys:
                header[parts[0].lower()] = float(parts[1])
            else:
                data_lines.append(line)
    for key in ("ncols", "nrows", "cellsize"):
        if key not in header:
            raise EnvironmentError_(f"{path}: missing header field '{key}'")
    ncols = int(header["ncols"])
    nrows = int(header["nrows"])
    values = np.array(" ".join(data_lines).split(), dtype=float)
    if values.size != nrows * ncols:
        raise EnvironmentError_(
            f"{path}: expected {nrows * ncols} values, found {values.size}")
    arr = values.reshape(nrows, ncols)
    nodata = header.get("nodata_value")
    if nodata is not None:
        arr = np.where(arr == nodata, np.nan, arr)
    return header, arr


def write_asc(path: Path, arr: np.ndarray, xllcorner: float, yllcorner: float,
              cellsize: float, nodata: float = -9999.0) -> None:
    """Write an array (row 0 = north) as an ESRI ASCII grid."""
    nrows, ncols = arr.shape
    out = np.where(np.isnan(arr), nodata, arr)
    with open(path, "w") as fh:
        fh.write(f"ncols {ncols}\n")
        fh.write(f"nrows {nrows}\n")
        fh.write(f"xllcorner {xllcorner}\n")
        fh.write(f"yllcorner {yllcorner}\n")
        fh.write(f"cellsize {cellsize}\n")
        fh.write(f"NODATA_value {nodata}\n")
        for row in out:
            fh.write(" ".join(f"{v:.4f}" for v in row) + "\n")


@dataclass
class EnvironmentGrid:
    """Bathymetry + monthly SST raster stack with a uniform climate offset.

    Row 0 is the northernmost row; (origin_lat, origin_lon) is the center of
    cell (0, 0). ``bathy`` holds depth in meters (positive down) with NaN on
    land. ``sst_layers`` is (n_layers, nrows, ncols); 12 layers cycle as a
    climatology, a longer stack is a (year, month) series starting at
    ``series_start_year``.
    """

    nrows: int
    ncols: int
    origin_lat: float
    origin_lon: float
    cell_size_deg: float
    bathy: np.ndarray
    sst_layers: np.ndarray
    delta_sst: float = 0.0
    series_start_year: int | None = None    # None => 12-layer climatology
    cell_area: float = CELL_AREA_KM2

    cell_lats: np.ndarray = field(init=False, repr=False)
    cell_lons: np.ndarray = field(init=False, repr=False)
    sea: np.ndarray = field(init=False, repr=False)
    _mask_cache: dict = field(init=False, repr=False, default_factory=dict)

    def __post_init__(self) -> None:
        rows = np.arange(self.nrows)
        cols = np.arange(self.ncols)
        lat_axis = self.origin_lat - rows * self.cell_size_deg
        lon_axis = self.origin_lon + cols * self.cell_size_deg
        self.cell_lats = np.repeat(lat_axis, self.ncols)
        self.cell_lons = np.tile(lon_axis, self.nrows)
        self.sea = ~np.isnan(self.bathy)

    # -- layer bookkeeping -------------------------------------------------

    @property
    def climatology(self) -> bool:
        return self.series_start_year is None

    def layer_index(self, year: int, month: int) -> int:
        """SST layer in force for a given calendar (year, month)."""
        if self.climatology:
            return month - 1
        idx = (year - self.series_start_year) * 12 + (month - 1)
        if idx < 0 or idx >= self.sst_layers.shape[0]:
            raise EnvironmentError_(
                f"no SST layer for {year}-{month:02d}: series covers "
                f"{self.series_start_year}..{self.series_start_year + self.sst_layers.shape[0] // 12 - 1}")
        return idx

    def sst_at(self, cell: tuple[int, int], clock: SimClock) -> float:
        """SST (degC) at a sea cell for the clock's month, offset included.

        Querying a land cell is a caller bug and raises.
        """
        r, c = cell
        if not self.sea[r, c]:
            raise EnvironmentError_(f"SST queried on LAND cell ({r}, {c})")
        layer = self.layer_index(clock.year, clock.month)
        return float(self.sst_layers[layer, r, c]) + self.delta_sst

    def depth_at(self, cell: tuple[int, int]) -> float:
        r, c = cell
        return float(self.bathy[r, c])

    def cell_center(self, flat: int) -> tuple[float, float]:
        return float(self.cell_lats[flat]), float(self.cell_lons[flat])

    def with_delta(self, delta_sst: float) -> "EnvironmentGrid":
        """Shallow copy sharing the raster arrays but with another offset."""
        return EnvironmentGrid(
            nrows=self.nrows, ncols=self.ncols, origin_lat=self.origin_lat,
            origin_lon=self.origin_lon, cell_size_deg=self.cell_size_deg,
            bathy=self.bathy, sst_layers=self.sst_layers, delta_sst=delta_sst,
            series_start_year=self.series_start_year, cell_area=self.cell_area)

    # -- habitat -----------------------------------------------------------

    def habitat_arrays(self, sp, year: int, month: int) -> tuple[np.ndarray, tuple, np.ndarray]:
        """(bool mask, tuple of flat habitat cells, same as int array) for a species.

        Habitat = sea cells with t_min <= SST <= t_max and
        depth_min <= depth <= depth_max (closed intervals). Cached per
        (species id, SST layer, offset).
        """
        layer = self.layer_index(year, month)
        key = (sp.id, layer, self.delta_sst)
        hit = self._mask_cache.get(key)
        if hit is not None:
            return hit
        sst = self.sst_layers[layer] + self.delta_sst
        mask = (self.sea
                & (sst >= sp.t_min) & (sst <= sp.t_max)
                & (self.bathy >= sp.depth_min) & (self.bathy <= sp.depth_max))
        arr = np.flatnonzero(mask.ravel())
        cells = tuple(int(i) for i in arr)
        self._mask_cache[key] = (mask, cells, arr)
        return mask, cells, arr


def habitat_mask(grid: EnvironmentGrid, sp, clock: SimClock) -> set[tuple[int, int]]:
    """Sea cells satisfying a species' temperature and depth envelope."""
    mask, _, _ = grid.habitat_arrays(sp, clock.year, clock.month)
    rows, cols = np.nonzero(mask)
    return {(int(r), int(c)) for r, c in zip(rows, cols)}


def sst_at(grid: EnvironmentGrid, cell: tuple[int, int], clock: SimClock) -> float:
    return grid.sst_at(cell, clock)


_CLIM_RE = re.compile(r"^sst_clim_(\d{2})\.asc$")
_SERIES_RE = re.compile(r"^sst_(\d{4})_(\d{2})\.asc$")


def load_environment(dir_path: str | Path, delta_sst: float = 0.0) -> EnvironmentGrid:
    """Load an environment directory into an immutable grid.

    The directory must contain ``bathy.asc`` and either 12 climatology
    layers or a contiguous ``sst_YYYY_MM.asc`` series. All rasters must
    share header dimensions; sea cells must have finite depth > 0 and
    finite SST within a plausible band in every layer.
    """
    dir_path = Path(dir_path)
    bathy_path = dir_path / "bathy.asc"
    header, bathy = _parse_asc(bathy_path)
    nrows, ncols = bathy.shape
    cellsize = header["cellsize"]
    origin_lat = header["yllcorner"] + (nrows - 1) * cellsize + cellsize / 2.0
    origin_lon = header["xllcorner"] + cellsize / 2.0

    clim = sorted(p for p in dir_path.iterdir() if _CLIM_RE.match(p.name))
    series = sorted(p for p in dir_path.iterdir() if _SERIES_RE.match(p.name))
    series_start_year = None
    if clim:
        if len(clim) != 12:
            raise EnvironmentError_(
                f"{dir_path}: climatology needs 12 sst_clim_MM.asc files, found {len(clim)}")
        layer_paths = clim
    elif series:
        if len(series) % 12 != 0:
            raise EnvironmentError_(
                f"{dir_path}: SST series must cover whole years, found {len(series)} files")
        first = _SERIES_RE.match(series[0].name)
        series_start_year = int(first.group(1))
        layer_paths = series
    else:
        raise EnvironmentError_(
            f"{dir_path}: no SST rasters (sst_clim_MM.asc or sst_YYYY_MM.asc)")

    sea = ~np.isnan(bathy)
    if not sea.any():
        raise EnvironmentError_(f"{bathy_path}: grid has no sea cells")
    bad = sea & ~(bathy > 0)
    if bad.any():
        r, c = np.argwhere(bad)[0]
        raise EnvironmentError_(
            f"{bathy_path}: sea cell ({r}, {c}) has non-positive depth {bathy[r, c]}")

    layers = np.empty((len(layer_paths), nrows, ncols))
    for i, p in enumerate(layer_paths):
        hd, arr = _parse_asc(p)
        if arr.shape != (nrows, ncols):
            raise EnvironmentError_(
                f"header mismatch between {bathy_path.name} ({nrows}x{ncols}) "
                f"and {p.name} ({arr.shape[0]}x{arr.shape[1]})")
        bad = sea & ~np.isfinite(arr)
        if bad.any():
            r, c = np.argwhere(bad)[0]
            raise EnvironmentError_(f"{p}: non-finite SST on sea cell ({r}, {c})")
        offs = arr[sea] + delta_sst
        if offs.min() < SST_MIN_C or offs.max() > SST_MAX_C:
            raise EnvironmentError_(
                f"{p}: offset SST outside [{SST_MIN_C}, {SST_MAX_C}] degC "
                f"(range {offs.min():.2f}..{offs.max():.2f})")
        layers[i] = arr

    return EnvironmentGrid(
        nrows=nrows, ncols=ncols, origin_lat=origin_lat, origin_lon=origin_lon,
        cell_size_deg=cellsize, bathy=bathy, sst_layers=layers,
        delta_sst=delta_sst, series_start_year=series_start_year)
