"""Fish population dynamics: biomass patches, logistic growth, movement.

Each model-species lives as biomass patches of at most ``patch_capacity``
tons, one patch per cell. Growth is logistic at the population level,
applied ``s`` times a year and distributed as new patches in unoccupied
habitat cells. Patches whose biomass falls below 100 t are deleted
(senescence). Pelagic patches random-walk to adjacent habitat cells daily;
demersal patches jump to a random habitat cell monthly.

Per species the module keeps an exact conservation ledger:

    B0 + growth - harvested - senescence == sum of live patch biomass
"""

from __future__ import annotations

from dataclasses import dataclass

from pirogue.env_grid import EnvironmentGrid, SimClock
from pirogue.species import (DEMERSAL, PATCH_DELETION_THRESHOLD_TONS, PELAGIC,
                             SpeciesParams)


class InitializationError(Exception):
    pass


@dataclass(frozen=True)
class FishPatch:
    """Read-only view of one biomass patch."""
    species_id: int
    cell: tuple[int, int]
    biomass: float


@dataclass
class SpeciesLedger:
    b0: float = 0.0
    growth: float = 0.0          # logistic growth computed (placed or not)
    harvested: float = 0.0       # biomass removed as catch
    senescence: float = 0.0      # deletion residuals + growth that found no room

    def expected_biomass(self) -> float:
        return self.b0 + self.growth - self.harvested - self.senescence


class PopulationState:
    """Patch collections plus conservation ledgers for every model-species."""

    def __init__(self, species: list[SpeciesParams], ncols: int):
        self.species = species
        self.ncols = ncols
        # per species: flat cell index -> biomass (one patch per cell)
        self.patches: list[dict[int, float]] = [dict() for _ in species]
        self.ledgers: list[SpeciesLedger] = [SpeciesLedger() for _ in species]
        self.biomass: list[float] = [0.0 for _ in species]
        # per stratum: flat cell -> number of patches of that stratum there
        self.stratum_cells: dict[str, dict[int, int]] = {PELAGIC: {}, DEMERSAL: {}}
        # bumped on any patch create/delete/move; lets callers cache scans
        self.epoch: dict[str, int] = {PELAGIC: 0, DEMERSAL: 0}

    # -- low-level patch bookkeeping ----------------------------------------

    def _add_patch(self, sp: SpeciesParams, cell: int, biomass: float) -> None:
        self.patches[sp.id][cell] = biomass
        self.biomass[sp.id] += biomass
        counts = self.stratum_cells[sp.stratum]
        counts[cell] = counts.get(cell, 0) + 1
        self.epoch[sp.stratum] += 1

    def _remove_patch(self, sp: SpeciesParams, cell: int) -> float:
        biomass = self.patches[sp.id].pop(cell)
        self.biomass[sp.id] -= biomass
        counts = self.stratum_cells[sp.stratum]
        n = counts[cell] - 1
        if n:
            counts[cell] = n
        else:
            del counts[cell]
        self.epoch[sp.stratum] += 1
        return biomass

    def _move_patch(self, sp: SpeciesParams, src: int, dst: int) -> None:
        patches = self.patches[sp.id]
        patches[dst] = patches.pop(src)
        counts = self.stratum_cells[sp.stratum]
        n = counts[src] - 1
        if n:
            counts[src] = n
        else:
            del counts[src]
        counts[dst] = counts.get(dst, 0) + 1
        self.epoch[sp.stratum] += 1

    # -- queries -------------------------------------------------------------

    def total_biomass(self, species_id: int) -> float:
        return sum(self.patches[species_id].values())

    def patch_view(self, species_id: int) -> list[FishPatch]:
        ncols = self.ncols
        return [FishPatch(species_id, (c // ncols, c % ncols), b)
                for c, b in self.patches[species_id].items()]

    # -- harvest ---------------------------------------------------------------

    def harvest(self, species_id: int, cell: int, amount: float) -> float:
        """Remove up to ``amount`` tons from the patch at ``cell``.

        Returns the tons actually removed. If the residual drops below the
        deletion threshold the patch is deleted and the residual is counted
        as senescence.
        """
        sp = self.species[species_id]
        patches = self.patches[species_id]
        biomass = patches[cell]
        removed = amount if amount < biomass else biomass
        ledger = self.ledgers[species_id]
        ledger.harvested += removed
        residual = biomass - removed
        if residual < PATCH_DELETION_THRESHOLD_TONS:
            self._remove_patch(sp, cell)
            ledger.senescence += residual
        else:
            patches[cell] = residual
            self.biomass[species_id] -= removed
        return removed


def harvest_patch(pop: PopulationState, patch: FishPatch, amount: float) -> float:
    """Public harvest entry point keyed by a patch view."""
    if amount < 0:
        raise ValueError(f"negative harvest amount {amount}")
    r, c = patch.cell
    return pop.harvest(patch.species_id, r * pop.ncols + c, amount)


# -- growth -------------------------------------------------------------------


def logistic_increment(biomass: float, K: float, r: float, s: int) -> float:
    """Biomass growth of one reproduction event: (r/s) * B * (1 - B/K).

    Zero at B = 0 (extinction is absorbing) and at B = K; clamped at zero
    if placement slack ever pushes B slightly above K.
    """
    g = (r / s) * biomass * (1.0 - biomass / K)
    return g if g > 0.0 else 0.0


def _place_biomass(pop: PopulationState, sp: SpeciesParams, total: float,
                   habitat_cells: tuple, rng) -> float:
    """Distribute ``total`` tons as new patches in random free habitat cells.

    Full patches of patch_capacity first, then one remainder patch if it
    clears the deletion threshold. Returns the tons actually placed; the
    caller ledgers the shortfall.
    """
    cap = sp.patch_capacity
    n_full = int(total / cap)
    remainder = total - n_full * cap
    wanted = n_full + (1 if remainder >= PATCH_DELETION_THRESHOLD_TONS else 0)
    if wanted == 0:
        return 0.0
    occupied = pop.patches[sp.id]
    free = [c for c in habitat_cells if c not in occupied]
    placed = 0.0
    n_free = len(free)
    for i in range(min(wanted, n_free)):
        j = rng.randrange(n_free - i)
        cell = free[j]
        free[j] = free[n_free - 1 - i]
        biomass = cap if i < n_full else remainder
        pop._add_patch(sp, cell, biomass)
        placed += biomass
    return placed


def init_populations(species: list[SpeciesParams], grid: EnvironmentGrid,
                     clock: SimClock, rng, b0_override: dict[int, float] | None = None,
                     ) -> PopulationState:
    """Place each species' initial biomass as random patches in its habitat."""
    pop = PopulationState(species, grid.ncols)
    for sp in species:
        b0 = b0_override.get(sp.id, sp.B0) if b0_override else sp.B0
        if not 0 < b0 <= sp.K:
            raise InitializationError(f"{sp.name}: need 0 < B0 <= K (B0={b0}, K={sp.K})")
        _, cells, _ = grid.habitat_arrays(sp, clock.year, clock.month)
        if not cells:
            raise InitializationError(
                f"{sp.name}: empty habitat at {clock.year}-{clock.month:02d} "
                f"(delta_sst={grid.delta_sst})")
        ledger = pop.ledgers[sp.id]
        ledger.b0 = b0
        placed = _place_biomass(pop, sp, b0, cells, rng)
        ledger.senescence += b0 - placed
    return pop


def reproduce(pop: PopulationState, sp: SpeciesParams, s: int,
              grid: EnvironmentGrid, clock: SimClock, rng) -> None:
    """One logistic reproduction event: grow and scatter new patches."""
    biomass = pop.biomass[sp.id]
    growth = logistic_increment(biomass, sp.K, sp.r, s)
    ledger = pop.ledgers[sp.id]
    ledger.growth += growth
    if growth <= 0.0:
        return
    _, cells, _ = grid.habitat_arrays(sp, clock.year, clock.month)
    placed = _place_biomass(pop, sp, growth, cells, rng)
    ledger.senescence += growth - placed


# -- movement -------------------------------------------------------------------


def _nearest_free_habitat_cell(pop: PopulationState, sp: SpeciesParams, cell: int,
                               cells_arr, grid: EnvironmentGrid, rng) -> int | None:
    """Closest unoccupied habitat cell by haversine, random tie-break."""
    import numpy as np

    from pirogue.geo import distance_km_grid
    occupied = pop.patches[sp.id]
    dists = distance_km_grid(grid.cell_lats[cell], grid.cell_lons[cell],
                             grid.cell_lats[cells_arr], grid.cell_lons[cells_arr])
    free = np.fromiter((c not in occupied for c in cells_arr), dtype=bool,
                       count=len(cells_arr))
    if not free.any():
        return None
    dists = np.where(free, dists, np.inf)
    best = np.flatnonzero(dists == dists.min())
    pick = best[0] if len(best) == 1 else best[rng.randrange(len(best))]
    return int(cells_arr[pick])


def move_patches(pop: PopulationState, sp: SpeciesParams, grid: EnvironmentGrid,
                 clock: SimClock, rng) -> None:
    """Relocate the species' patches for this tick.

    Pelagic (called daily): step to a random free 8-neighbor habitat cell,
    stay if blocked; a patch stranded outside its habitat relocates to the
    nearest free habitat cell. Demersal (called monthly): jump to a random
    free habitat cell anywhere; stay if the habitat is empty.
    """
    mask, cells, cells_arr = grid.habitat_arrays(sp, clock.year, clock.month)
    patches = pop.patches[sp.id]
    if sp.stratum == DEMERSAL:
        if not cells:
            return
        n_cells = len(cells)
        for cell in list(patches):
            # rejection-sample a free cell; fall back to an explicit scan
            dest = -1
            for _ in range(64):
                cand = cells[rng.randrange(n_cells)]
                if cand not in patches or cand == cell:
                    dest = cand
                    break
            else:
                free = [c for c in cells if c not in patches or c == cell]
                if free:
                    dest = free[rng.randrange(len(free))]
            if dest >= 0 and dest != cell:
                pop._move_patch(sp, cell, dest)
        return

    # pelagic daily walk
    mflat = mask.ravel()
    ncols = grid.ncols
    nrows = grid.nrows
    for cell in list(patches):
        row, col = divmod(cell, ncols)
        if not mflat[cell]:
            if not cells:
                continue                      # habitat vanished: hold position
            dest = _nearest_free_habitat_cell(pop, sp, cell, cells_arr, grid, rng)
            if dest is not None:
                pop._move_patch(sp, cell, dest)
            continue
        candidates = []
        for dr in (-1, 0, 1):
            r2 = row + dr
            if r2 < 0 or r2 >= nrows:
                continue
            for dc in (-1, 0, 1):
                if dr == 0 and dc == 0:
                    continue
                c2 = col + dc
                if c2 < 0 or c2 >= ncols:
                    continue
                nbr = r2 * ncols + c2
                if mflat[nbr] and nbr not in patches:
                    candidates.append(nbr)
        if candidates:
            dest = candidates[rng.randrange(len(candidates))]
            pop._move_patch(sp, cell, dest)
