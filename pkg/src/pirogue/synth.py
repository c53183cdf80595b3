"""Synthetic environment generator: desk fixture and full-scale grids.

Both presets share the same recipe: a meridional SST gradient (colder
north) with a seasonal cosine cycle peaking in early autumn, and a shelf
bathymetry deepening offshore from a coastline running down the eastern
edge. The full-scale preset threads the coast through the real landing
site coordinates so every port faces a plausible shelf; the desk preset is
a 14 x 10 toy with an exaggerated gradient so all four species fit on a
postage stamp.

``generate_preset`` emits a complete runnable bundle: rasters, sites,
species and fleet CSVs plus a ready ``run.cfg``.
"""

from __future__ import annotations

from pathlib import Path

import numpy as np

from pirogue.config import RunConfig, write_run_config
from pirogue.env_grid import write_asc
from pirogue.ports import DEFAULT_SITES_ROWS, SITES_CSV_HEADER
from pirogue.species import DEFAULT_SPECIES_ROWS, SPECIES_CSV_HEADER

SEASON_PEAK_MONTH = 9.5         # warm season peaks between September and October


def _seasonal(month: int) -> float:
    return float(np.cos(2.0 * np.pi * (month - SEASON_PEAK_MONTH) / 12.0))


# -- full-scale synthetic --------------------------------------------------------

_FULL_CELL = 0.09
_FULL_TOP_LAT = 28.0
_FULL_BOT_LAT = 8.0
_FULL_WEST_LON = -20.0
_FULL_EAST_LON = -13.0

# coastline anchors (lat, lon): landing sites plus end extensions
_COAST_ANCHORS = sorted(
    [(lat, lon) for _, lat, lon, _, _ in DEFAULT_SITES_ROWS]
    + [(8.0, -13.2), (23.0, -16.3), (25.5, -15.2), (28.0, -13.5)])


def _coast_lon(lat: float) -> float:
    lats = [a[0] for a in _COAST_ANCHORS]
    lons = [a[1] for a in _COAST_ANCHORS]
    return float(np.interp(lat, lats, lons))


def _shelf_width_factor(lat: float) -> float:
    # broad banks around the northern ports and the southern archipelago,
    # narrow shelf off the central peninsula
    return (1.6
            + 1.6 * np.exp(-(((lat - 22.0) / 4.0) ** 2))
            + 1.5 * np.exp(-(((lat - 18.5) / 3.0) ** 2))
            + 0.8 * np.exp(-(((lat - 11.5) / 2.0) ** 2))
            - 0.35 * np.exp(-(((lat - 14.8) / 1.0) ** 2)))


def _coast_depth(lat: float) -> float:
    # the far-northern bank drops off quickly: mostly 100-300 m bottom,
    # thin nearshore strip
    return 10.0 + 25.0 * np.exp(-(((lat - 21.3) / 2.8) ** 2))


def _full_sst_mean(lat) -> np.ndarray:
    # gentle meridional gradient in the tropical south, steep across the
    # subtropical transition where the cold-affinity habitat edges live
    lat = np.asarray(lat, dtype=float)
    south = 27.45 + 0.25 * (16.0 - lat)
    north = 27.45 - 1.2 * (lat - 16.0)
    return np.where(lat <= 16.0, south, north)


def _full_sst_amp(lat) -> np.ndarray:
    # seasonal range grows toward the northern upwelling zone
    lat = np.asarray(lat, dtype=float)
    return 0.8 + 0.9 / (1.0 + np.exp(-(lat - 19.5) / 0.7))


def build_fullscale_arrays() -> tuple[np.ndarray, np.ndarray, float, float, float]:
    """(bathy, sst12, top_lat, west_lon, cellsize) for the full-scale grid."""
    cell = _FULL_CELL
    nrows = int(round((_FULL_TOP_LAT - _FULL_BOT_LAT) / cell))
    ncols = int(round((_FULL_EAST_LON - _FULL_WEST_LON) / cell))
    lats = _FULL_TOP_LAT - np.arange(nrows) * cell
    lons = _FULL_WEST_LON + np.arange(ncols) * cell

    bathy = np.full((nrows, ncols), np.nan)
    for r, lat in enumerate(lats):
        coast_col = int(round((_coast_lon(lat) - _FULL_WEST_LON) / cell))
        coast_col = min(ncols - 1, max(1, coast_col))
        w = _shelf_width_factor(lat)
        d0 = _coast_depth(lat)
        for c in range(coast_col + 1):
            x = (coast_col - c) / w
            bathy[r, c] = min(3500.0, d0 + 30.0 * x + 8.0 * x ** 3)

    sst = np.empty((12, nrows, ncols))
    mean = _full_sst_mean(lats)[:, None]
    amp = _full_sst_amp(lats)[:, None]
    for m in range(1, 13):
        sst[m - 1] = mean + amp * _seasonal(m)
    return bathy, sst, _FULL_TOP_LAT, _FULL_WEST_LON, cell


# -- desk fixture ----------------------------------------------------------------

_DESK_CELL = 0.09
_DESK_TOP_LAT = 16.0
_DESK_WEST_LON = -17.8
_DESK_NROWS = 14
_DESK_NCOLS = 10
_DESK_DEPTHS = (2500.0, 1200.0, 600.0, 250.0, 150.0, 80.0, 40.0, 15.0)  # cols 0..7

# capacities sum to more than the fleet can land in one day, so at least
# one site always stays open; Sine still saturates on single big landings
DESK_SITES = [
    ("Ndar", 15.82, -17.17, "Mauritania", 70.0),
    ("Teranga", 15.37, -17.17, "Senegal", 85.0),
    ("Sine", 15.01, -17.17, "Senegal", 25.0),
]

# stocks sized so the fleet's catch ceiling can outpace growth at the
# default (Table-6-level) catchability but not at q_scale = 0.01
DESK_SPECIES = [
    ("guinean_demersal", "demersal", 24.0, 29.0, 0.0, 100.0, 6_000.0, 20.0, 0.5, 3_000.0),
    ("saharan_demersal", "demersal", 18.0, 25.0, 0.0, 100.0, 10_000.0, 30.0, 0.5, 5_000.0),
    ("guinean_pelagic", "pelagic", 24.0, 29.0, 0.0, 100.0, 30_000.0, 20.0, 1.5, 15_000.0),
    ("saharan_pelagic", "pelagic", 18.0, 25.0, 0.0, 300.0, 60_000.0, 20.0, 1.5, 30_000.0),
]

DESK_FLEET = [
    ("Ndar", 2, 2, 1),
    ("Teranga", 2, 2, 2),
    ("Sine", 2, 2, 1),
]


def build_desk_arrays() -> tuple[np.ndarray, np.ndarray, float, float, float]:
    nrows, ncols = _DESK_NROWS, _DESK_NCOLS
    lats = _DESK_TOP_LAT - np.arange(nrows) * _DESK_CELL
    bathy = np.full((nrows, ncols), np.nan)
    for c, depth in enumerate(_DESK_DEPTHS):
        bathy[:, c] = depth
    mean = 20.0 + (_DESK_TOP_LAT - lats) * 6.0     # exaggerated desk gradient
    sst = np.empty((12, nrows, ncols))
    for m in range(1, 13):
        sst[m - 1] = (mean + 1.5 * _seasonal(m))[:, None]
    return bathy, sst, _DESK_TOP_LAT, _DESK_WEST_LON, _DESK_CELL


# -- full-scale fleet ------------------------------------------------------------

# share of the Senegalese artisanal fleet based at each home site
_FULL_FLEET_SHARES = [
    ("Saint-Louis", 0.16), ("Fass Boye", 0.055), ("Kayar", 0.09),
    ("Dakar", 0.14), ("Mbour", 0.20), ("Joal", 0.20),
    ("Kafountine", 0.10), ("Cap Skiring", 0.055),
]
_FULL_MODEL_UNITS = 1300            # 13 000 canoes at 10 real per model unit
_CAT_SHARES = (0.46, 0.47, 0.07)    # line/longline, gillnet, rotating seine


def fullscale_fleet_rows() -> list[tuple[str, int, int, int]]:
    total_share = sum(s for _, s in _FULL_FLEET_SHARES)
    rows = []
    for name, share in _FULL_FLEET_SHARES:
        n = int(round(_FULL_MODEL_UNITS * share / total_share))
        n3 = max(1, int(round(n * _CAT_SHARES[2])))
        n1 = int(round(n * _CAT_SHARES[0]))
        n2 = n - n1 - n3
        rows.append((name, n1, n2, n3))
    return rows


# -- bundle writer ---------------------------------------------------------------


def _write_csv(path: Path, header: list[str], rows) -> None:
    with open(path, "w", newline="") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(str(v) for v in row) + "\n")


def generate_preset(out_dir: str | Path, preset: str) -> Path:
    """Write a runnable input bundle; returns the path of its run.cfg."""
    out = Path(out_dir)
    env = out / "env"
    env.mkdir(parents=True, exist_ok=True)

    if preset == "desk":
        bathy, sst, top_lat, west_lon, cell = build_desk_arrays()
        sites_rows = DESK_SITES
        species_rows = DESK_SPECIES
        fleet_rows = DESK_FLEET
        cfg = dict(seed=42, years=2, representation_factor=1.0)
    elif preset == "fullscale-synthetic":
        bathy, sst, top_lat, west_lon, cell = build_fullscale_arrays()
        sites_rows = DEFAULT_SITES_ROWS
        species_rows = DEFAULT_SPECIES_ROWS
        fleet_rows = fullscale_fleet_rows()
        cfg = dict(seed=42, years=8, representation_factor=10.0)
    else:
        raise ValueError(f"unknown preset: {preset!r} (desk, fullscale-synthetic)")

    nrows = bathy.shape[0]
    yll = top_lat - (nrows - 1) * cell - cell / 2.0
    xll = west_lon - cell / 2.0
    write_asc(env / "bathy.asc", bathy, xll, yll, cell)
    for m in range(1, 13):
        write_asc(env / f"sst_clim_{m:02d}.asc", sst[m - 1], xll, yll, cell)

    _write_csv(out / "sites.csv", SITES_CSV_HEADER, sites_rows)
    _write_csv(out / "species.csv", SPECIES_CSV_HEADER, species_rows)
    _write_csv(out / "fleet.csv", ["site", "cat1", "cat2", "cat3"], fleet_rows)

    config = RunConfig(
        env_dir=str(env), sites_file=str(out / "sites.csv"),
        fleet_file=str(out / "fleet.csv"), species_file=str(out / "species.csv"),
        **cfg)
    cfg_path = out / "run.cfg"
    write_run_config(config, cfg_path)
    return cfg_path
