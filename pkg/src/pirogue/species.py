"""Model-species parameters: habitat envelopes and logistic growth constants.

Each model-species aggregates real target species sharing a stratum
(pelagic/demersal) and a thermal affinity (cold "Saharan" vs warm
"Guinean" waters). Parameters come from a CSV with header::

    name,stratum,t_min,t_max,depth_min,depth_max,K_tons,k_tons_per_km2,r_per_year,B0_tons
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from pathlib import Path

from pirogue.env_grid import CELL_AREA_KM2

PELAGIC = "pelagic"
DEMERSAL = "demersal"

# Biomass below which a patch is deleted (1 ton per km over a 100 km2 cell).
PATCH_DELETION_THRESHOLD_TONS = 100.0


class SpeciesConfigError(Exception):
    pass


@dataclass(frozen=True)
class SpeciesParams:
    id: int
    name: str
    stratum: str               # "pelagic" | "demersal"
    t_min: float               # degC
    t_max: float
    depth_min: float           # m, positive down
    depth_max: float
    K: float                   # carrying capacity, tons
    k_density: float           # max local biomass density, tons/km2
    r: float                   # per-year logistic growth rate
    B0: float                  # initial biomass, tons

    @property
    def patch_capacity(self) -> float:
        """Maximum biomass of one patch: density x constant cell area."""
        return self.k_density * CELL_AREA_KM2

    def validate(self) -> None:
        if self.stratum not in (PELAGIC, DEMERSAL):
            raise SpeciesConfigError(f"{self.name}: stratum must be pelagic or demersal")
        if not self.t_min < self.t_max:
            raise SpeciesConfigError(f"{self.name}: need t_min < t_max")
        if not self.depth_min < self.depth_max:
            raise SpeciesConfigError(f"{self.name}: need depth_min < depth_max")
        if self.K <= 0 or self.r <= 0 or self.k_density <= 0:
            raise SpeciesConfigError(f"{self.name}: K, k and r must be positive")
        if self.patch_capacity <= PATCH_DELETION_THRESHOLD_TONS:
            raise SpeciesConfigError(
                f"{self.name}: patch capacity {self.patch_capacity} must exceed the "
                f"{PATCH_DELETION_THRESHOLD_TONS} t deletion threshold")
        if not 0 < self.B0 <= self.K:
            raise SpeciesConfigError(f"{self.name}: need 0 < B0 <= K (B0={self.B0}, K={self.K})")


SPECIES_CSV_HEADER = ["name", "stratum", "t_min", "t_max", "depth_min", "depth_max",
                      "K_tons", "k_tons_per_km2", "r_per_year", "B0_tons"]

# Four default model-species: warm/cold x demersal/pelagic aggregates for
# the north-west African shelf. B0 defaults to a quarter of the carrying
# capacity (depleted-but-recovering 2010s state).
DEFAULT_SPECIES_ROWS = [
    ("guinean_demersal", DEMERSAL, 24.0, 29.0, 0.0, 100.0, 300_000.0, 30.0, 0.5, 75_000.0),
    ("saharan_demersal", DEMERSAL, 18.0, 25.0, 0.0, 100.0, 500_000.0, 50.0, 0.5, 125_000.0),
    ("guinean_pelagic", PELAGIC, 24.0, 29.0, 0.0, 100.0, 1_000_000.0, 100.0, 1.5, 250_000.0),
    ("saharan_pelagic", PELAGIC, 18.0, 25.0, 0.0, 300.0, 3_000_000.0, 100.0, 1.5, 750_000.0),
]


def default_species() -> list[SpeciesParams]:
    return [SpeciesParams(i, *row) for i, row in enumerate(DEFAULT_SPECIES_ROWS)]


def load_species_csv(path: str | Path) -> list[SpeciesParams]:
    path = Path(path)
    if not path.exists():
        raise SpeciesConfigError(f"species file not found: {path}")
    out: list[SpeciesParams] = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != SPECIES_CSV_HEADER:
            raise SpeciesConfigError(
                f"{path}: expected header {','.join(SPECIES_CSV_HEADER)}, "
                f"got {','.join(reader.fieldnames or [])}")
        for i, row in enumerate(reader):
            try:
                sp = SpeciesParams(
                    id=i, name=row["name"], stratum=row["stratum"],
                    t_min=float(row["t_min"]), t_max=float(row["t_max"]),
                    depth_min=float(row["depth_min"]), depth_max=float(row["depth_max"]),
                    K=float(row["K_tons"]), k_density=float(row["k_tons_per_km2"]),
                    r=float(row["r_per_year"]), B0=float(row["B0_tons"]))
            except (ValueError, KeyError) as exc:
                raise SpeciesConfigError(f"{path} line {i + 2}: {exc}") from exc
            sp.validate()
            out.append(sp)
    if not out:
        raise SpeciesConfigError(f"{path}: no species rows")
    return out


def write_species_csv(path: str | Path, species: list[SpeciesParams]) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(SPECIES_CSV_HEADER)
        for sp in species:
            writer.writerow([sp.name, sp.stratum, sp.t_min, sp.t_max, sp.depth_min,
                             sp.depth_max, sp.K, sp.k_density, sp.r, sp.B0])
