"""Landing sites: coastal nodes with a daily processing capacity.

A site that receives at least its capacity in one day is saturated and
stops attracting landings until the daily counter resets at midnight.
Capacity never clips intake: a saturated site still accepts fish when a
unit has nowhere better to go.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path


class SitesConfigError(Exception):
    pass


@dataclass
class LandingSite:
    name: str
    lat: float
    lon: float
    country: str
    capacity: float                 # tons/day
    landed_today: float = 0.0
    cumulative_by_day: list = field(default_factory=list)
    fu_count_by_day: list = field(default_factory=list)
    index: int = -1

    def is_saturated(self) -> bool:
        return self.landed_today >= self.capacity


def record_landing(site: LandingSite, tons: float, clock=None) -> None:
    if tons < 0:
        raise ValueError(f"negative landing at {site.name}: {tons}")
    site.landed_today += tons


def is_saturated(site: LandingSite) -> bool:
    return site.is_saturated()


def reset_daily(sites: list[LandingSite], clock=None) -> None:
    """Archive the day's totals and zero the daily counters (every 24 h)."""
    for site in sites:
        site.cumulative_by_day.append(site.landed_today)
        site.landed_today = 0.0


SITES_CSV_HEADER = ["name", "lat", "lon", "country", "capacity_tons_per_day"]

# 15 north-west African artisanal landing sites with daily processing
# capacities estimated from 2020 reports (fishmeal factories dominate the
# Mauritanian figures).
DEFAULT_SITES_ROWS = [
    ("Nouadhibou", 21.00, -17.00, "Mauritania", 15400.0),
    ("Tiouilit", 18.82, -16.16, "Mauritania", 700.0),
    ("Nouakchott", 18.10, -16.02, "Mauritania", 9400.0),
    ("Saint-Louis", 16.02, -16.51, "Senegal", 450.0),
    ("Fass Boye", 15.25, -16.85, "Senegal", 100.0),
    ("Kayar", 14.92, -17.12, "Senegal", 450.0),
    ("Dakar", 14.76, -17.48, "Senegal", 750.0),
    ("Mbour", 14.41, -16.97, "Senegal", 750.0),
    ("Joal", 14.17, -16.85, "Senegal", 400.0),
    ("Tanji", 13.36, -16.80, "Gambia", 350.0),
    ("Gunjur", 13.15, -16.78, "Gambia", 650.0),
    ("Kafountine", 12.92, -16.75, "Senegal", 350.0),
    ("Cap Skiring", 12.38, -16.74, "Senegal", 30.0),
    ("Bissau", 11.80, -15.58, "Guinee Bissau", 10.0),
    ("Conakry", 9.51, -13.71, "Guinea", 10.0),
]


def default_sites() -> list[LandingSite]:
    sites = [LandingSite(*row) for row in DEFAULT_SITES_ROWS]
    for i, s in enumerate(sites):
        s.index = i
    return sites


def load_sites_csv(path: str | Path) -> list[LandingSite]:
    path = Path(path)
    if not path.exists():
        raise SitesConfigError(f"sites file not found: {path}")
    sites: list[LandingSite] = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != SITES_CSV_HEADER:
            raise SitesConfigError(
                f"{path}: expected header {','.join(SITES_CSV_HEADER)}, "
                f"got {','.join(reader.fieldnames or [])}")
        for i, row in enumerate(reader):
            try:
                capacity = float(row["capacity_tons_per_day"])
                if capacity < 0:
                    raise ValueError("capacity must be >= 0")
                sites.append(LandingSite(
                    name=row["name"], lat=float(row["lat"]), lon=float(row["lon"]),
                    country=row["country"], capacity=capacity, index=i))
            except (ValueError, KeyError) as exc:
                raise SitesConfigError(f"{path} line {i + 2}: {exc}") from exc
    if not sites:
        raise SitesConfigError(f"{path}: no landing sites")
    names = [s.name for s in sites]
    if len(set(names)) != len(names):
        raise SitesConfigError(f"{path}: duplicate site names")
    return sites


def write_sites_csv(path: str | Path, sites: list[LandingSite]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SITES_CSV_HEADER)
        for s in sites:
            writer.writerow([s.name, s.lat, s.lon, s.country, s.capacity])
