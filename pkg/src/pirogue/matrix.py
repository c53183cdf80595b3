"""Scenario matrix: climate x infrastructure x fleet x catchability batches.

Infrastructure variants rewrite the sites file (reference capacities,
homogeneous redistribution of the same total, or homogeneous divided by
ten); fleet variants scale unit counts (x2, half). Every combination runs
for every replicate seed; failures are recorded and the matrix continues.
"""

from __future__ import annotations

import csv
import hashlib
from dataclasses import dataclass, field, replace
from pathlib import Path

from pirogue.config import RunConfig
from pirogue.engine import run as run_full
from pirogue.outputs import write_outputs
from pirogue.ports import load_sites_csv, write_sites_csv
from pirogue.fleet import FLEET_CSV_HEADER

INFRA_VARIANTS = ("reference", "homogeneous", "homogeneous_x01")
FLEET_VARIANTS = ("reference", "x2", "x05")


class MatrixError(Exception):
    pass


@dataclass
class ScenarioMatrix:
    climate: list = field(default_factory=lambda: [0.0])          # delta SST degC
    infrastructure: list = field(default_factory=lambda: ["reference"])
    fleet: list = field(default_factory=lambda: ["reference"])
    catchability: list = field(default_factory=lambda: [1.0])     # q_scale factors
    replicates: int = 1
    base_seed: int = 42

    def validate(self) -> None:
        if not (self.climate and self.infrastructure and self.fleet and self.catchability):
            raise MatrixError("every axis needs at least one value")
        if self.replicates < 1:
            raise MatrixError("replicates must be >= 1")
        for v in self.infrastructure:
            if v not in INFRA_VARIANTS:
                raise MatrixError(f"unknown infrastructure variant: {v}")
        for v in self.fleet:
            if v not in FLEET_VARIANTS:
                raise MatrixError(f"unknown fleet variant: {v}")

    def combinations(self):
        for climate in self.climate:
            for infra in self.infrastructure:
                for fleet in self.fleet:
                    for q_scale in self.catchability:
                        for rep in range(self.replicates):
                            yield climate, infra, fleet, q_scale, rep


def parse_matrix_spec(path: str | Path) -> ScenarioMatrix:
    """Flat key = comma-separated-values format, like run configs."""
    path = Path(path)
    if not path.exists():
        raise MatrixError(f"matrix spec not found: {path}")
    matrix = ScenarioMatrix()
    for lineno, line in enumerate(open(path), start=1):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        if "=" not in text:
            raise MatrixError(f"{path} line {lineno}: expected 'key = values'")
        key, value = (part.strip() for part in text.split("=", 1))
        values = [v.strip() for v in value.split(",") if v.strip()]
        if key == "climate":
            matrix.climate = [float(v) for v in values]
        elif key == "infrastructure":
            matrix.infrastructure = values
        elif key == "fleet":
            matrix.fleet = values
        elif key == "catchability":
            matrix.catchability = [float(v) for v in values]
        elif key == "replicates":
            matrix.replicates = int(values[0])
        elif key == "base_seed":
            matrix.base_seed = int(values[0])
        else:
            raise MatrixError(f"{path} line {lineno}: unknown key '{key}'")
    matrix.validate()
    return matrix


def _infra_variant_file(base_sites: str, variant: str, work_dir: Path) -> str:
    if variant == "reference":
        return base_sites
    sites = load_sites_csv(base_sites)
    total = sum(s.capacity for s in sites)
    per_site = total / len(sites)
    if variant == "homogeneous_x01":
        per_site /= 10.0
    for s in sites:
        s.capacity = per_site
    out = work_dir / f"sites_{variant}.csv"
    write_sites_csv(out, sites)
    return str(out)


def _fleet_variant_file(base_fleet: str, variant: str, work_dir: Path) -> str:
    if variant == "reference":
        return base_fleet
    factor = 2.0 if variant == "x2" else 0.5
    rows = list(csv.DictReader(open(base_fleet, newline="")))
    out = work_dir / f"fleet_{variant}.csv"
    with open(out, "w", newline="") as fh:
        fh.write(",".join(FLEET_CSV_HEADER) + "\n")
        for row in rows:
            counts = [max(0, int(round(int(row[f"cat{c}"]) * factor))) for c in (1, 2, 3)]
            fh.write(f"{row['site']},{counts[0]},{counts[1]},{counts[2]}\n")
    return str(out)


def _config_hash(config: RunConfig) -> str:
    text = "|".join(str(v) for v in (
        config.env_dir, config.sites_file, config.fleet_file, config.species_file,
        config.years, config.s, config.b_crit, config.delta_sst,
        config.representation_factor, config.q_scale,
        sorted(config.category_overrides.items())))
    return hashlib.sha256(text.encode()).hexdigest()[:12]


def run_matrix(base_config: RunConfig, matrix: ScenarioMatrix,
               out_dir: str | Path, progress=None) -> list[dict]:
    """Execute every combination x replicate; returns the summary rows.

    Per-run outputs land in subdirectories; a cross-run summary.csv gets
    final-year catch per country, a collapse flag (total biomass under 5%
    of initial) and years-to-collapse.
    """
    matrix.validate()
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    combos = list(matrix.combinations())
    summary: list[dict] = []
    for i, (climate, infra, fleet, q_scale, rep) in enumerate(combos):
        run_id = f"c{climate:+.1f}_i-{infra}_f-{fleet}_q{q_scale:g}_r{rep}"
        config = replace(
            base_config,
            delta_sst=climate,
            sites_file=_infra_variant_file(base_config.sites_file, infra, out),
            fleet_file=_fleet_variant_file(base_config.fleet_file, fleet, out),
            q_scale=base_config.q_scale * q_scale,
            seed=matrix.base_seed + rep)
        row = {"run_id": run_id, "climate": climate, "infrastructure": infra,
               "fleet": fleet, "catchability": q_scale, "replicate": rep,
               "seed": config.seed, "config_hash": _config_hash(config)}
        try:
            outputs = run_full(config)
            write_outputs(outputs, out / run_id)
            frames = outputs.frames
            b0 = sum(led["b0_tons"] for led in outputs.ledgers)
            series = [sum(fr.species_biomass) for fr in frames]
            collapse_day = next((j for j, b in enumerate(series) if b < 0.05 * b0), None)
            days = len(frames) - 1
            year_start = frames[max(0, days - 365)]
            for country in frames[-1].country_catch:
                final_year = frames[-1].country_catch[country] - year_start.country_catch.get(country, 0.0)
                row[f"final_year_catch_{country.replace(' ', '_')}"] = final_year
            row["collapsed"] = collapse_day is not None
            row["years_to_collapse"] = round(collapse_day / 365.0, 3) if collapse_day is not None else ""
            row["total_catch_tons"] = sum(led["harvested_tons"] for led in outputs.ledgers)
            row["error"] = outputs.error or ""
        except Exception as exc:   # record and continue with the next run
            row["collapsed"] = ""
            row["years_to_collapse"] = ""
            row["total_catch_tons"] = ""
            row["error"] = str(exc)
        summary.append(row)
        if progress is not None:
            progress(i + 1, len(combos), run_id)

    keys: list[str] = []
    for row in summary:
        for key in row:
            if key not in keys:
                keys.append(key)
    with open(out / "summary.csv", "w", newline="") as fh:
        writer = csv.DictWriter(fh, fieldnames=keys, lineterminator="\n")
        writer.writeheader()
        for row in summary:
            writer.writerow(row)
    return summary
