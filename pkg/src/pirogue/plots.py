"""Static plots from run output CSVs: catch, biomass, fleet, migrations."""

from __future__ import annotations

import csv
import json
from collections import defaultdict
from pathlib import Path

import matplotlib
matplotlib.use("Agg")
import matplotlib.pyplot as plt

PLOT_KINDS = ("catch", "biomass", "fleet", "migrations")


class PlotError(Exception):
    pass


def _read_csv(path: Path) -> list[dict]:
    if not path.exists():
        raise PlotError(f"missing output CSV: {path}")
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def _site_countries(run_dir: Path) -> dict[str, str]:
    meta = run_dir / "run_meta.json"
    if not meta.exists():
        raise PlotError(f"missing manifest: {meta}")
    manifest = json.loads(meta.read_text())
    return {s["name"]: s["country"] for s in manifest["sites"]}


def plot(run_dir: str | Path, kind: str) -> list[Path]:
    """Render one plot kind to PNG files in the run directory."""
    run_dir = Path(run_dir)
    if kind not in PLOT_KINDS:
        raise PlotError(f"unknown plot kind: {kind} (choose from {PLOT_KINDS})")
    return {"catch": _plot_catch, "biomass": _plot_biomass,
            "fleet": _plot_fleet, "migrations": _plot_migrations}[kind](run_dir)


def _daily_series(rows: list[dict], key_field: str, value_field: str):
    dates: list[str] = []
    seen = set()
    series: dict[str, list[float]] = defaultdict(list)
    for row in rows:
        if row["date"] not in seen:
            seen.add(row["date"])
            dates.append(row["date"])
    index = {d: i for i, d in enumerate(dates)}
    for key in {row[key_field] for row in rows}:
        series[key] = [0.0] * len(dates)
    for row in rows:
        series[row[key_field]][index[row["date"]]] += float(row[value_field])
    return dates, series


def _x(dates: list[str]):
    return range(len(dates))


def _plot_catch(run_dir: Path) -> list[Path]:
    rows = _read_csv(run_dir / "landings_daily.csv")
    countries = _site_countries(run_dir)
    dates, by_site = _daily_series(rows, "site", "tons")
    fig, (ax1, ax2) = plt.subplots(1, 2, figsize=(13, 5))
    order = sorted(by_site)
    ax1.stackplot(_x(dates), [by_site[s] for s in order], labels=order)
    ax1.set_title("daily landings per site")
    ax1.set_ylabel("tons/day")
    ax1.legend(fontsize=6, ncol=2)
    by_country: dict[str, list[float]] = defaultdict(lambda: [0.0] * len(dates))
    for site, values in by_site.items():
        c = countries.get(site, "?")
        for i, v in enumerate(values):
            by_country[c][i] += v
    for country, values in sorted(by_country.items()):
        cum = 0.0
        cum_series = []
        for v in values:
            cum += v
            cum_series.append(cum)
        ax2.plot(_x(dates), cum_series, label=country)
    ax2.set_title("cumulative catch per country")
    ax2.set_ylabel("tons")
    ax2.legend(fontsize=8)
    for ax in (ax1, ax2):
        ax.set_xlabel("day")
    out = run_dir / "plot_catch.png"
    fig.tight_layout()
    fig.savefig(out, dpi=110)
    plt.close(fig)
    return [out]


def _plot_biomass(run_dir: Path) -> list[Path]:
    rows = _read_csv(run_dir / "biomass_daily.csv")
    dates, by_species = _daily_series(rows, "species", "tons")
    fig, ax = plt.subplots(figsize=(9, 5))
    for species, values in sorted(by_species.items()):
        ax.plot(_x(dates), values, label=species)
    ax.set_title("fish biomass per model-species")
    ax.set_xlabel("day")
    ax.set_ylabel("tons")
    ax.legend(fontsize=8)
    out = run_dir / "plot_biomass.png"
    fig.tight_layout()
    fig.savefig(out, dpi=110)
    plt.close(fig)
    return [out]


def _plot_fleet(run_dir: Path) -> list[Path]:
    rows = _read_csv(run_dir / "fleet_daily.csv")
    dates, by_site = _daily_series(rows, "site", "count")
    fig, ax = plt.subplots(figsize=(9, 5))
    for site, values in sorted(by_site.items()):
        ax.plot(_x(dates), values, label=site)
    ax.set_title("fishing units based at each landing site")
    ax.set_xlabel("day")
    ax.set_ylabel("units")
    ax.legend(fontsize=6, ncol=2)
    out = run_dir / "plot_fleet.png"
    fig.tight_layout()
    fig.savefig(out, dpi=110)
    plt.close(fig)
    return [out]


def _plot_migrations(run_dir: Path) -> list[Path]:
    rows = _read_csv(run_dir / "totals_daily.csv")
    dates = [row["date"] for row in rows]
    fig, (ax1, ax2) = plt.subplots(2, 1, figsize=(9, 6), sharex=True)
    ax1.plot(_x(dates), [int(r["short_migrations"]) for r in rows], color="tab:blue")
    ax1.set_title("cumulative short-term migrations (saturation diversions)")
    ax2.plot(_x(dates), [int(r["long_migrations"]) for r in rows], color="tab:red")
    ax2.set_title("cumulative long-term migrations (campaigns)")
    ax2.set_xlabel("day")
    out = run_dir / "plot_migrations.png"
    fig.tight_layout()
    fig.savefig(out, dpi=110)
    plt.close(fig)
    return [out]
