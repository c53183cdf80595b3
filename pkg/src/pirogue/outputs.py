"""Run output serialization: daily CSVs, ledger and a replayable manifest.

Every CSV is loadable by a naive comma splitter: no embedded commas,
ISO-8601 dates, '.' decimals, LF line endings. Writing is fully
deterministic (no timestamps), so identical runs produce byte-identical
files.
"""

from __future__ import annotations

import json
from pathlib import Path

from pirogue import __version__
from pirogue.config import RunConfig, write_run_config
from pirogue.engine import RunOutputs


def _fmt(x: float) -> str:
    return repr(float(x))


def write_outputs(outputs: RunOutputs, out_dir: str | Path) -> Path:
    """Write landings/fleet/biomass/migrations/ledger CSVs plus manifest."""
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    frames = outputs.frames
    sites = outputs.site_names

    with open(out / "landings_daily.csv", "w", newline="") as fh:
        fh.write("date,site,tons\n")
        for fr in frames:
            for i, name in enumerate(sites):
                fh.write(f"{fr.date},{name},{_fmt(fr.site_landings[i])}\n")

    with open(out / "fleet_daily.csv", "w", newline="") as fh:
        fh.write("date,site,cat,count\n")
        for fr in frames:
            for i, name in enumerate(sites):
                for cat in (1, 2, 3):
                    fh.write(f"{fr.date},{name},{cat},{fr.site_fu_counts[i][cat - 1]}\n")

    with open(out / "biomass_daily.csv", "w", newline="") as fh:
        fh.write("date,species,tons\n")
        for fr in frames:
            for j, name in enumerate(outputs.species_names):
                fh.write(f"{fr.date},{name},{_fmt(fr.species_biomass[j])}\n")

    with open(out / "migrations.csv", "w", newline="") as fh:
        fh.write("date,fu_id,kind,from,to\n")
        for date, fu_id, kind, src, dst in outputs.migrations:
            fh.write(f"{date},{fu_id},{kind},{src},{dst}\n")

    with open(out / "country_catch_daily.csv", "w", newline="") as fh:
        fh.write("date,country,cumulative_tons\n")
        for fr in frames:
            for country, tons in fr.country_catch.items():
                fh.write(f"{fr.date},{country},{_fmt(tons)}\n")

    with open(out / "totals_daily.csv", "w", newline="") as fh:
        fh.write("date,short_migrations,long_migrations\n")
        for fr in frames:
            fh.write(f"{fr.date},{fr.short_migrations},{fr.long_migrations}\n")

    with open(out / "ledger.csv", "w", newline="") as fh:
        fh.write("species,b0_tons,growth_tons,harvested_tons,senescence_tons,final_biomass_tons\n")
        for row in outputs.ledgers:
            fh.write(f"{row['species']},{_fmt(row['b0_tons'])},{_fmt(row['growth_tons'])},"
                     f"{_fmt(row['harvested_tons'])},{_fmt(row['senescence_tons'])},"
                     f"{_fmt(row['final_biomass_tons'])}\n")

    write_run_config(outputs.config, out / "config_used.cfg")

    manifest = {
        "version": __version__,
        "seed": outputs.config.seed,
        "years": outputs.config.years,
        "invalid": outputs.invalid,
        "error": outputs.error,
        "spin_up_years": 1,
        "frames": len(frames),
        "config": _config_dict(outputs.config),
        "sites": [{"name": n, "country": c}
                  for n, c in zip(outputs.site_names, outputs.site_countries)],
        "species": outputs.species_names,
        "interventions": [{"effective_date": d, "command": cmd}
                          for d, cmd in outputs.interventions],
    }
    with open(out / "run_meta.json", "w") as fh:
        json.dump(manifest, fh, indent=1, sort_keys=True)
        fh.write("\n")
    return out


def _config_dict(config: RunConfig) -> dict:
    d = {
        "env_dir": config.env_dir,
        "sites": config.sites_file,
        "fleet": config.fleet_file,
        "species": config.species_file,
        "seed": config.seed,
        "years": config.years,
        "s": config.s,
        "b_crit": config.b_crit,
        "delta_sst": config.delta_sst,
        "representation_factor": config.representation_factor,
        "q_scale": config.q_scale,
        "start_year": config.start_year,
        "cat3_incidental_always": config.cat3_incidental_always,
    }
    d.update(config.category_overrides)
    return d
