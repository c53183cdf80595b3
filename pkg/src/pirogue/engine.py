"""Deterministic hourly scheduler driving environment, fish and fleet.

Fixed per-hour order: at hour 0 of each day first emit the previous day's
monitor frame, reset daily site counters, drain queued interventions, run
the daily per-unit accounting, move pelagic patches, and on month
boundaries move demersal patches, expire campaigns and fire reproduction
events; then step every fishing unit in ascending id; then advance the
clock. All stochastic draws go through one seeded PRNG in that fixed
order, so outputs are a pure function of (config, input files, seed,
intervention log).

Units carry a ``next_wake`` hour and hours in between are provable no-ops,
letting the engine skip them via wake buckets without changing results.
"""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field

import numpy as np

from pirogue import ports as ports_mod
from pirogue.config import RunConfig
from pirogue.env_grid import MONTH_LENGTHS, SimClock, load_environment
from pirogue.fish import init_populations, move_patches, reproduce
from pirogue.fleet import AT_PORT, FishingUnit, build_fleet, load_fleet_csv, step_fu
from pirogue.geo import distance_km, distance_km_grid
from pirogue.species import DEMERSAL, PELAGIC, load_species_csv

SPEED_KMH = 10.0


class SimulationInvariantError(Exception):
    """A runtime invariant broke; the run aborts with partial outputs."""


class InterventionError(Exception):
    pass


@dataclass
class MonitorFrame:
    """Daily observation record (the archived simulation variables)."""

    date: str
    site_landings: list          # tons landed that day, per site
    site_fu_counts: list         # [cat1, cat2, cat3] units based at each site
    species_biomass: list        # tons, per species
    species_harvested: list      # cumulative tons caught, per species
    species_growth: list         # cumulative logistic growth computed
    species_senescence: list     # cumulative senescence losses
    short_migrations: int        # cumulative over the run
    long_migrations: int
    country_catch: dict          # cumulative landed tons per country

    def to_dict(self) -> dict:
        return {
            "date": self.date,
            "landings": self.site_landings,
            "fleet": self.site_fu_counts,
            "biomass": self.species_biomass,
            "short_migrations": self.short_migrations,
            "long_migrations": self.long_migrations,
            "country_catch": dict(self.country_catch),
        }


@dataclass
class RunOutputs:
    frames: list
    migrations: list             # (date, fu_id, kind, from_site, to_site)
    ledgers: list                # per species dict of ledger fields
    species_names: list
    site_names: list
    site_countries: list
    config: RunConfig
    interventions: list          # (effective_date, command dict)
    invalid: bool = False
    error: str | None = None
    world: "WorldState" = field(default=None, repr=False)


class WorldState:
    """Mutable state of one simulation run."""

    def __init__(self, grid, species, sites, fleet_rows, cat_params, config: RunConfig):
        self.grid = grid
        self.species = species
        self.sites = sites
        self.cat_params = cat_params
        self.config = config
        self.b_crit = config.b_crit
        self.representation_factor = config.representation_factor
        self.s = config.s
        self.cat3_incidental_always = config.cat3_incidental_always
        self.rng = random.Random(config.seed)
        self.clock = SimClock(year=config.start_year)
        self.hour = 0

        self.species_by_stratum = {
            PELAGIC: [sp for sp in species if sp.stratum == PELAGIC],
            DEMERSAL: [sp for sp in species if sp.stratum == DEMERSAL],
        }
        self.units: list[FishingUnit] = build_fleet(fleet_rows)
        self.dead: set[int] = set()
        self.next_uid = len(self.units)

        # distance tables: site -> every cell, and site -> site (km)
        self.site_cell_dist = [
            distance_km_grid(s.lat, s.lon, grid.cell_lats, grid.cell_lons)
            for s in sites]
        self.site_site_dist = [
            [distance_km((a.lat, a.lon), (b.lat, b.lon)) for b in sites]
            for a in sites]

        self.ground_cache: dict = {}
        self.campaign_cache: dict = {}

        self.pop = init_populations(species, grid, self.clock, self.rng)

        self.country_catch: dict[str, float] = {}
        for s in sites:
            self.country_catch.setdefault(s.country, 0.0)
        self.total_landed = 0.0
        self.frames: list[MonitorFrame] = []
        self.migrations: list = []
        self.pending_interventions: list = []
        self.intervention_log: list = []
        self.frame_sinks: list = []

        self.wake_buckets: dict[int, list[int]] = {0: [fu.id for fu in self.units]}

    # -- helpers used by the fleet state machine ---------------------------

    def next_day_start(self, hour: int) -> int:
        return hour - hour % 24 + 24

    def travel_hours(self, site_idx: int, cell: int) -> int:
        return int(math.ceil(self.site_cell_dist[site_idx][cell] / SPEED_KMH))

    @property
    def month_index(self) -> int:
        return self.clock.month_index

    def log_migration(self, fu_id: int, kind: str, origin: int, dest: int) -> None:
        self.migrations.append((self.clock.date_str, fu_id, kind,
                                self.sites[origin].name, self.sites[dest].name))

    def schedule(self, fu: FishingUnit) -> None:
        self.wake_buckets.setdefault(fu.next_wake, []).append(fu.id)

    # -- observation ---------------------------------------------------------

    def _yesterday_str(self) -> str:
        c = self.clock
        if c.day_of_month > 1:
            return f"{c.year:04d}-{c.month:02d}-{c.day_of_month - 1:02d}"
        month = c.month - 1 or 12
        year = c.year - 1 if c.month == 1 else c.year
        return f"{year:04d}-{month:02d}-{MONTH_LENGTHS[month - 1]:02d}"

    def emit_frame(self, initial: bool = False) -> MonitorFrame:
        """Snapshot the day that just ended (daily unit accounting included)."""
        counts = [[0, 0, 0] for _ in self.sites]
        dead = self.dead
        for fu in self.units:
            if fu.id in dead:
                continue
            counts[fu.site][fu.cat - 1] += 1
            if not initial:
                if fu.state != AT_PORT:
                    fu.days_at_sea += 1
                elif fu.pending_revert >= 0:
                    # short-term migrants head back to their pre-trip site
                    fu.site = fu.pending_revert
                    fu.pending_revert = -1
        short = sum(fu.short_migrations for fu in self.units if fu.id not in dead)
        long_ = sum(fu.long_migrations for fu in self.units if fu.id not in dead)
        frame = MonitorFrame(
            date=self.clock.date_str if initial else self._yesterday_str(),
            site_landings=[s.landed_today for s in self.sites],
            site_fu_counts=counts,
            species_biomass=list(self.pop.biomass),
            species_harvested=[self.pop.ledgers[sp.id].harvested for sp in self.species],
            species_growth=[self.pop.ledgers[sp.id].growth for sp in self.species],
            species_senescence=[self.pop.ledgers[sp.id].senescence for sp in self.species],
            short_migrations=short,
            long_migrations=long_,
            country_catch=dict(self.country_catch),
        )
        self._check_invariants(frame)
        self.frames.append(frame)
        for sink in self.frame_sinks:
            sink(frame)
        return frame

    def _check_invariants(self, frame: MonitorFrame) -> None:
        for sp in self.species:
            ledger = self.pop.ledgers[sp.id]
            expected = ledger.expected_biomass()
            actual = self.pop.biomass[sp.id]
            if abs(expected - actual) > 1e-6 * max(1.0, ledger.b0):
                raise SimulationInvariantError(
                    f"{frame.date}: conservation breach for {sp.name}: "
                    f"ledger expects {expected!r}, patches hold {actual!r}")
        for fu in self.units:
            if fu.id in self.dead:
                continue
            cap = self.cat_params[fu.cat].storage_capacity * self.representation_factor
            if fu.hold < 0 or fu.hold > cap + 1e-9:
                raise SimulationInvariantError(
                    f"{frame.date}: unit {fu.id} hold {fu.hold} outside [0, {cap}]")


# -- interventions ---------------------------------------------------------------

INTERVENTION_KINDS = {"set_site_capacity", "scale_catchability", "set_campaign_prob",
                      "add_units", "remove_units"}


def validate_intervention(world: WorldState, cmd: dict) -> None:
    kind = cmd.get("kind")
    if kind not in INTERVENTION_KINDS:
        raise InterventionError(f"unknown intervention kind: {kind!r}")
    if kind in ("set_site_capacity", "add_units", "remove_units"):
        names = [s.name for s in world.sites]
        if cmd.get("site") not in names:
            raise InterventionError(f"unknown site: {cmd.get('site')!r}")
    if kind in ("scale_catchability", "set_campaign_prob", "add_units", "remove_units"):
        cat = cmd.get("category")
        if kind == "scale_catchability" and cat is None:
            pass                                  # applies to all categories
        elif cat not in (1, 2, 3):
            raise InterventionError(f"unknown category: {cat!r}")
    if kind == "set_site_capacity" and not cmd.get("capacity", -1) >= 0:
        raise InterventionError("capacity must be >= 0")
    if kind == "scale_catchability" and not cmd.get("factor", 0) > 0:
        raise InterventionError("factor must be > 0")
    if kind == "set_campaign_prob" and not 0 <= cmd.get("p", -1) <= 1:
        raise InterventionError("p must be in [0, 1]")
    if kind == "add_units" and not int(cmd.get("n", 0)) > 0:
        raise InterventionError("n must be > 0")
    if kind == "remove_units":
        n = cmd.get("n", "all")
        if n != "all" and not int(n) > 0:
            raise InterventionError("n must be > 0 or 'all'")


def apply_intervention(world: WorldState, cmd: dict) -> str:
    """Validate and queue a command; it takes effect at the next day boundary.

    Returns the effective date (ISO). The clock reads hour 0 exactly when
    the upcoming step will process a day boundary, so that date is the
    effective one.
    """
    validate_intervention(world, cmd)
    world.pending_interventions.append(dict(cmd))
    nxt = world.clock.copy()
    while nxt.hour != 0:
        nxt.advance_hour()
    return nxt.date_str


def _force_land(world: WorldState, fu: FishingUnit) -> None:
    """Accounting-only landing: no migration counters, no campaign draws.

    Saturated sites stay unattractive even here, so the catch goes to the
    nearest open site (lowest index on ties; no RNG involved).
    """
    if fu.hold > 0.0:
        site = world.sites[fu.site]
        if site.is_saturated():
            dist_row = world.site_site_dist[fu.site]
            best = None
            best_d = math.inf
            for i, s in enumerate(world.sites):
                if i != fu.site and not s.is_saturated() and dist_row[i] < best_d:
                    best = i
                    best_d = dist_row[i]
            if best is not None:
                site = world.sites[best]
        site.landed_today += fu.hold
        world.country_catch[site.country] = world.country_catch.get(site.country, 0.0) + fu.hold
        world.total_landed += fu.hold
        fu.hold = 0.0
    fu.state = AT_PORT


def _apply_intervention_now(world: WorldState, cmd: dict) -> None:
    kind = cmd["kind"]
    if kind == "set_site_capacity":
        idx = next(i for i, s in enumerate(world.sites) if s.name == cmd["site"])
        world.sites[idx].capacity = float(cmd["capacity"])
    elif kind == "scale_catchability":
        cats = (cmd["category"],) if cmd.get("category") else (1, 2, 3)
        for cat in cats:
            world.cat_params[cat].q *= float(cmd["factor"])
    elif kind == "set_campaign_prob":
        world.cat_params[cmd["category"]].campaign_prob = float(cmd["p"])
    elif kind == "add_units":
        idx = next(i for i, s in enumerate(world.sites) if s.name == cmd["site"])
        for _ in range(int(cmd["n"])):
            fu = FishingUnit(world.next_uid, cmd["category"], idx)
            world.next_uid += 1
            fu.next_attempt_hour = fu.next_wake = world.hour
            world.units.append(fu)
            world.wake_buckets.setdefault(world.hour, []).append(fu.id)
    elif kind == "remove_units":
        idx = next(i for i, s in enumerate(world.sites) if s.name == cmd["site"])
        n = cmd.get("n", "all")
        matching = [fu for fu in world.units
                    if fu.id not in world.dead and fu.site == idx
                    and fu.cat == cmd["category"]]
        if n != "all":
            matching = sorted(matching, key=lambda f: -f.id)[:int(n)]
        for fu in matching:
            _force_land(world, fu)
            world.dead.add(fu.id)
    world.intervention_log.append((world.clock.date_str, dict(cmd)))


# -- stepping ---------------------------------------------------------------------


def _day_boundary(world: WorldState) -> None:
    clock = world.clock
    world.emit_frame(initial=clock.absolute_hour == 0)
    ports_mod.reset_daily(world.sites, clock)
    if world.pending_interventions:
        pending = world.pending_interventions
        world.pending_interventions = []
        for cmd in pending:
            _apply_intervention_now(world, cmd)
    for sp in world.species_by_stratum[PELAGIC]:
        move_patches(world.pop, sp, world.grid, clock, world.rng)
    if clock.day_of_month == 1:
        for sp in world.species_by_stratum[DEMERSAL]:
            move_patches(world.pop, sp, world.grid, clock, world.rng)
        mi = clock.month_index
        for fu in world.units:
            if (fu.campaign_until != -1 and fu.campaign_until <= mi
                    and fu.state == AT_PORT and fu.id not in world.dead):
                fu.campaign_until = -1
                fu.pending_revert = -1
                fu.site = fu.home_site
        if mi % (12 // world.s) == 0:
            for sp in world.species:
                reproduce(world.pop, sp, world.s, world.grid, clock, world.rng)


def step_hour(world: WorldState) -> None:
    """Advance the world by one simulated hour in the documented fixed order."""
    hour = world.hour
    if world.clock.hour == 0:
        _day_boundary(world)
    due = world.wake_buckets.pop(hour, None)
    if due:
        units = world.units
        dead = world.dead
        for uid in sorted(due):
            if uid in dead:
                continue
            fu = units[uid]
            step_fu(fu, world, hour)
            if fu.next_wake <= hour:
                fu.next_wake = hour + 1
            world.wake_buckets.setdefault(fu.next_wake, []).append(uid)
    world.clock.advance_hour()
    world.hour = hour + 1


def run_hours(world: WorldState, n: int) -> None:
    for _ in range(n):
        step_hour(world)


def finalize_run(world: WorldState) -> None:
    """Flush at-sea holds (accounting landings) and emit the final frame."""
    if world.clock.absolute_hour == 0:
        world.emit_frame(initial=True)
        return
    for fu in world.units:
        if fu.id not in world.dead and fu.state != AT_PORT:
            _force_land(world, fu)
    world.emit_frame()
    ports_mod.reset_daily(world.sites, world.clock)


def build_world(config: RunConfig) -> WorldState:
    grid = load_environment(config.env_dir, config.delta_sst)
    species = load_species_csv(config.species_file)
    sites = ports_mod.load_sites_csv(config.sites_file)
    site_names = {s.name: s.index for s in sites}
    fleet_rows = load_fleet_csv(config.fleet_file, site_names)
    cat_params = config.build_category_params()
    return WorldState(grid, species, sites, fleet_rows, cat_params, config)


def collect_outputs(world: WorldState, invalid: bool = False,
                    error: str | None = None) -> RunOutputs:
    return RunOutputs(
        frames=world.frames,
        migrations=list(world.migrations),
        ledgers=[{"species": sp.name,
                  "b0_tons": world.pop.ledgers[sp.id].b0,
                  "growth_tons": world.pop.ledgers[sp.id].growth,
                  "harvested_tons": world.pop.ledgers[sp.id].harvested,
                  "senescence_tons": world.pop.ledgers[sp.id].senescence,
                  "final_biomass_tons": world.pop.total_biomass(sp.id)}
                 for sp in world.species],
        species_names=[sp.name for sp in world.species],
        site_names=[s.name for s in world.sites],
        site_countries=[s.country for s in world.sites],
        config=world.config,
        interventions=list(world.intervention_log),
        invalid=invalid,
        error=error,
        world=world,
    )


def run(config: RunConfig, interventions: list | None = None,
        frame_sink=None) -> RunOutputs:
    """Build a world from config and execute the full run.

    ``interventions`` is an optional list of (day_index, command) pairs
    applied at those day boundaries. A runtime invariant breach stops the
    simulation and returns partial outputs flagged invalid.
    """
    world = build_world(config)
    if frame_sink is not None:
        world.frame_sinks.append(frame_sink)
    by_day: dict[int, list[dict]] = {}
    for day, cmd in interventions or ():
        validate_intervention(world, cmd)
        by_day.setdefault(day, []).append(cmd)
    total_hours = config.years * 8760
    try:
        for h in range(total_hours):
            if h % 24 == 0 and (h // 24) in by_day:
                for cmd in by_day[h // 24]:
                    world.pending_interventions.append(cmd)
            step_hour(world)
        finalize_run(world)
    except SimulationInvariantError as exc:
        return collect_outputs(world, invalid=True, error=str(exc))
    return collect_outputs(world)


def run_months(config: RunConfig, months: int) -> RunOutputs:
    """Run a partial horizon of whole months (used by the sensitivity harness)."""
    world = build_world(config)
    hours = 24 * sum(MONTH_LENGTHS[m % 12] for m in range(months))
    try:
        run_hours(world, hours)
        finalize_run(world)
    except SimulationInvariantError as exc:
        return collect_outputs(world, invalid=True, error=str(exc))
    return collect_outputs(world)
