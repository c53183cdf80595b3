"""Fishing-unit agents: hourly trip state machine, catch law, migrations.

Three canoe categories differ in storage, action radius, trip length,
catchability and propensity to migrate. A unit cycles through
AtPort -> Outbound -> Fishing -> Inbound; landing chooses the nearest
non-saturated site when the home site is full (short-term migration), and
fruitless trips can trigger a multi-month campaign at another landing site
(long-term migration).

Catch per fishing hour follows a Holling-type-III-like law::

    C = q * b^2 / (b + b_crit)

which degrades to the linear C = q * b when b_crit = 0.

States are encoded against absolute simulation hours so that calling
`step_fu` during a no-event hour (mid-transit, resting at port) is a pure
no-op; the engine exploits this by waking units only at `next_wake`.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

from pirogue.species import DEMERSAL, PELAGIC

AT_PORT = 0
OUTBOUND = 1
FISHING = 2
INBOUND = 3

STATE_NAMES = {AT_PORT: "AtPort", OUTBOUND: "Outbound", FISHING: "Fishing", INBOUND: "Inbound"}

SPEED_KMH = 10.0

EMPTY: tuple = ()


class FleetConfigError(Exception):
    pass


@dataclass
class FleetCategoryParams:
    """Per-category parameters; storage is per model unit before the
    representation factor is applied."""

    category: int
    storage_capacity: float        # tons
    radius_km: float
    max_trip: int                  # hours
    q: float                       # fraction of patch biomass per fishing hour
    campaign_prob: float
    campaign_max_months: int
    demersal_access_fraction: float = 0.0   # category 3 only
    speed_kmh: float = SPEED_KMH

    def validate(self) -> None:
        if self.storage_capacity <= 0 or self.radius_km <= 0 or self.max_trip <= 0:
            raise FleetConfigError(f"cat {self.category}: storage/radius/max_trip must be positive")
        if self.q < 0:
            raise FleetConfigError(f"cat {self.category}: q must be >= 0")
        if not 0.0 <= self.campaign_prob <= 1.0:
            raise FleetConfigError(f"cat {self.category}: campaign_prob must be in [0, 1]")
        if self.campaign_max_months < 1:
            raise FleetConfigError(f"cat {self.category}: campaign_max_months must be >= 1")
        if not 0.0 <= self.demersal_access_fraction <= 1.0:
            raise FleetConfigError(f"cat {self.category}: demersal_access_fraction in [0, 1]")


def default_category_params() -> dict[int, FleetCategoryParams]:
    """Line/longline, gillnet and rotating-seine canoe defaults."""
    return {
        1: FleetCategoryParams(1, storage_capacity=0.5, radius_km=50.0, max_trip=12,
                               q=1e-4, campaign_prob=0.1, campaign_max_months=4),
        2: FleetCategoryParams(2, storage_capacity=5.0, radius_km=100.0, max_trip=240,
                               q=1e-3, campaign_prob=0.2, campaign_max_months=8),
        3: FleetCategoryParams(3, storage_capacity=30.0, radius_km=1000.0, max_trip=240,
                               q=1e-2, campaign_prob=0.3, campaign_max_months=12,
                               demersal_access_fraction=0.3),
    }


class FishingUnit:
    """One canoe + crew + gear agent."""

    __slots__ = ("id", "cat", "home_site", "site", "state", "hold", "trip_target",
                 "dest_cell", "fish_cell", "depart_hour", "arrival_hour",
                 "deadline_hour", "land_hour", "travel_back", "path",
                 "pending_revert", "campaign_until", "next_attempt_hour",
                 "next_wake", "days_at_sea", "short_migrations", "long_migrations")

    def __init__(self, uid: int, cat: int, site: int):
        self.id = uid
        self.cat = cat
        self.home_site = site
        self.site = site
        self.state = AT_PORT
        self.hold = 0.0
        self.trip_target = DEMERSAL
        self.dest_cell = -1
        self.fish_cell = -1
        self.depart_hour = -1
        self.arrival_hour = -1
        self.deadline_hour = -1
        self.land_hour = -1
        self.travel_back = 0
        self.path = EMPTY            # hourly cells of the outbound leg (cat 3)
        self.pending_revert = -1     # site to return to the day after a diversion
        self.campaign_until = -1     # month_index when the campaign expires
        self.next_attempt_hour = 0
        self.next_wake = 0
        self.days_at_sea = 0
        self.short_migrations = 0
        self.long_migrations = 0

    def at_sea(self) -> bool:
        return self.state != AT_PORT


def catch_step(q: float, b: float, b_crit: float) -> float:
    """Tons caught in one fishing hour on a patch of biomass ``b``."""
    if b <= 0.0:
        return 0.0
    return q * b * b / (b + b_crit)


def select_trip_target(fu: FishingUnit, rng) -> str:
    """Stratum targeted by the next trip.

    Small units rig for demersal fish, large seiners for pelagic schools;
    medium units flip a fair coin every trip.
    """
    if fu.cat == 1:
        return DEMERSAL
    if fu.cat == 3:
        return PELAGIC
    return PELAGIC if rng.random() < 0.5 else DEMERSAL


def find_fishing_grounds(world, fu: FishingUnit, stratum: str | None = None) -> list:
    """Cells holding a patch of the trip's target stratum, reachable in time.

    A ground is feasible when it lies within the category radius of the
    unit's current site and a round trip plus one fishing hour fits in the
    trip budget. Returns [(flat_cell, travel_hours), ...].
    """
    stratum = stratum or fu.trip_target
    params = world.cat_params[fu.cat]
    key = (fu.site, fu.cat, stratum)
    cached = world.ground_cache.get(key)
    epoch = world.pop.epoch[stratum]
    if cached is not None and cached[0] == world.hour and cached[1] == epoch:
        return cached[2]
    dist = world.site_cell_dist[fu.site]
    radius = params.radius_km
    max_trip = params.max_trip
    grounds = []
    for cell in world.pop.stratum_cells[stratum]:
        d = dist[cell]
        if d > radius:
            continue
        travel = int(math.ceil(d / params.speed_kmh))
        if 2 * travel + 1 <= max_trip:
            grounds.append((cell, travel))
    world.ground_cache[key] = (world.hour, epoch, grounds)
    return grounds


def _outbound_path(world, fu: FishingUnit, travel: int) -> tuple:
    """Cell under the canoe at the end of each outbound travel hour."""
    site = world.sites[fu.site]
    grid = world.grid
    lat1, lon1 = site.lat, site.lon
    lat2 = grid.cell_lats[fu.dest_cell]
    lon2 = grid.cell_lons[fu.dest_cell]
    cells = []
    for j in range(1, travel + 1):
        f = j / travel
        lat = lat1 + (lat2 - lat1) * f
        lon = lon1 + (lon2 - lon1) * f
        r = min(grid.nrows - 1, max(0, int(round((grid.origin_lat - lat) / grid.cell_size_deg))))
        c = min(grid.ncols - 1, max(0, int(round((lon - grid.origin_lon) / grid.cell_size_deg))))
        cells.append(r * grid.ncols + c)
    return tuple(cells)


def _first_detection_hour(world, fu: FishingUnit, from_hour: int) -> int:
    """Next hour at which a cat-3 outbound unit crosses a pelagic patch.

    Scans the remaining path against current patch positions; returns the
    arrival hour when nothing is detected. Valid until patches move again,
    so the engine re-checks at day boundaries.
    """
    pelagic = world.pop.stratum_cells[PELAGIC]
    path = fu.path
    depart = fu.depart_hour
    start = max(from_hour, depart)
    for t in range(start, fu.arrival_hour):
        if path[t - depart] in pelagic:
            return t
    return fu.arrival_hour

# -- campaign migration ---------------------------------------------------------


def _campaign_site_table(world, stratum: str) -> list | None:
    """Per-site minimum distance to any patch of a stratum (cached)."""
    epoch = world.pop.epoch[stratum]
    cached = world.campaign_cache.get(stratum)
    if cached is not None and cached[0] == epoch:
        return cached[1]
    cells = world.pop.stratum_cells[stratum]
    if not cells:
        table = None
    else:
        import numpy as np
        arr = np.fromiter(cells.keys(), dtype=np.int64, count=len(cells))
        table = [float(world.site_cell_dist[i][arr].min()) for i in range(len(world.sites))]
    world.campaign_cache[stratum] = (epoch, table)
    return table


def maybe_start_campaign(world, fu: FishingUnit) -> bool:
    """Bernoulli(campaign_prob) draw to relocate after a fruitless trip.

    The destination is the non-saturated site closest to the nearest patch
    of the unit's target stratum (random tie-break); with no patches left
    anywhere, a uniformly random other site. Duration is uniform in
    {1..campaign_max_months}; relocation is instantaneous.
    """
    params = world.cat_params[fu.cat]
    rng = world.rng
    if rng.random() >= params.campaign_prob:
        return False
    stratum = PELAGIC if fu.cat == 3 else (DEMERSAL if fu.cat == 1 else fu.trip_target)
    table = _campaign_site_table(world, stratum)
    sites = world.sites
    if table is None:
        others = [i for i in range(len(sites)) if i != fu.site]
        if not others:
            return False
        dest = others[rng.randrange(len(others))]
    else:
        candidates = [i for i in range(len(sites)) if not sites[i].is_saturated()]
        if not candidates:
            candidates = list(range(len(sites)))
        best_d = min(table[i] for i in candidates)
        best = [i for i in candidates if table[i] == best_d]
        dest = best[0] if len(best) == 1 else best[rng.randrange(len(best))]
    duration = rng.randint(1, params.campaign_max_months)
    origin = fu.site
    fu.site = dest
    fu.campaign_until = world.month_index + duration
    fu.pending_revert = -1
    fu.long_migrations += 1
    world.log_migration(fu.id, "long", origin, dest)
    return True


def land_catch(world, fu: FishingUnit, hour: int) -> None:
    """Beach the canoe, divert if the site is saturated, settle counters."""
    sites = world.sites
    site_idx = fu.site
    site = sites[site_idx]
    hold = fu.hold
    if hold > 0.0 and site.is_saturated():
        dist_row = world.site_site_dist[site_idx]
        best_d = math.inf
        best: list[int] = []
        for i, s in enumerate(sites):
            if i == site_idx or s.is_saturated():
                continue
            d = dist_row[i]
            if d < best_d:
                best_d = d
                best = [i]
            elif d == best_d:
                best.append(i)
        if best:
            dest = best[0] if len(best) == 1 else best[world.rng.randrange(len(best))]
            fu.pending_revert = site_idx
            fu.site = dest
            fu.short_migrations += 1
            world.log_migration(fu.id, "short", site_idx, dest)
            site = sites[dest]
    # capacity limits attractiveness, not intake: the full hold is landed
    if hold > 0.0:
        site.landed_today += hold
        world.country_catch[site.country] = world.country_catch.get(site.country, 0.0) + hold
        world.total_landed += hold
    fu.hold = 0.0
    fu.state = AT_PORT
    fu.next_attempt_hour = world.next_day_start(hour)
    fu.next_wake = fu.next_attempt_hour
    if fu.campaign_until != -1 and world.month_index >= fu.campaign_until:
        fu.campaign_until = -1
        fu.pending_revert = -1
        fu.site = fu.home_site
    if hold == 0.0:
        maybe_start_campaign(world, fu)


def _begin_trip(world, fu: FishingUnit, hour: int) -> bool:
    """Plan and start a trip; returns False when no ground is feasible."""
    rng = world.rng
    fu.trip_target = select_trip_target(fu, rng)
    grounds = find_fishing_grounds(world, fu)
    if not grounds:
        maybe_start_campaign(world, fu)
        return False
    cell, travel = grounds[rng.randrange(len(grounds))]
    travel = max(1, travel)      # reaching any ground takes at least the hour
    params = world.cat_params[fu.cat]
    fu.state = OUTBOUND
    fu.dest_cell = cell
    fu.depart_hour = hour
    fu.arrival_hour = hour + travel
    fu.deadline_hour = hour + params.max_trip
    if fu.cat == 3:
        fu.path = _outbound_path(world, fu, travel)
        detect = _first_detection_hour(world, fu, hour)
        if detect == hour:       # the first leg already crosses a school
            fu.fish_cell = fu.path[0]
            fu.travel_back = world.travel_hours(fu.site, fu.fish_cell)
            fu.state = FISHING
            fu.next_wake = hour + 1
        else:
            fu.next_wake = min(detect, world.next_day_start(hour))
    else:
        fu.path = EMPTY
        fu.next_wake = fu.arrival_hour
    return True


def _head_home(world, fu: FishingUnit, hour: int) -> None:
    """Switch to the inbound leg; ``hour`` is the first travel hour."""
    fu.state = INBOUND
    fu.land_hour = hour + max(0, fu.travel_back - 1)
    fu.next_wake = fu.land_hour


def _pick_patch(world, fu: FishingUnit, cell: int):
    """(species_id, biomass, effective_q) of the patch to fish in a cell.

    Target-stratum patches first (largest biomass when two species share
    the cell); a cat-3 unit in a cell with no pelagic patch falls back to
    demersal fishing at a reduced catchability.
    """
    pop = world.pop
    params = world.cat_params[fu.cat]
    best_sid = -1
    best_b = 0.0
    for sp in world.species_by_stratum[fu.trip_target]:
        b = pop.patches[sp.id].get(cell)
        if b is not None and b > best_b:
            best_b = b
            best_sid = sp.id
    if best_sid >= 0:
        if fu.cat == 3 and world.cat3_incidental_always and params.demersal_access_fraction > 0.0:
            # compare against the best demersal option at reduced catchability
            q_dem = params.q * params.demersal_access_fraction
            alt_sid = -1
            alt_b = 0.0
            for sp in world.species_by_stratum[DEMERSAL]:
                b = pop.patches[sp.id].get(cell)
                if b is not None and b > alt_b:
                    alt_b = b
                    alt_sid = sp.id
            if alt_sid >= 0 and catch_step(q_dem, alt_b, world.b_crit) > catch_step(
                    params.q, best_b, world.b_crit):
                return alt_sid, alt_b, q_dem
        return best_sid, best_b, params.q
    if fu.cat == 3 and params.demersal_access_fraction > 0.0:
        for sp in world.species_by_stratum[DEMERSAL]:
            b = pop.patches[sp.id].get(cell)
            if b is not None and b > best_b:
                best_b = b
                best_sid = sp.id
        if best_sid >= 0:
            return best_sid, best_b, params.q * params.demersal_access_fraction
    return None


def step_fu(fu: FishingUnit, world, hour: int) -> tuple:
    """Advance one unit by one simulated hour; returns landing/migration events
    only through world logs. No-event hours are pure no-ops."""
    state = fu.state

    if state == AT_PORT:
        if hour < fu.next_attempt_hour:
            return EMPTY
        if not _begin_trip(world, fu, hour):
            fu.next_attempt_hour = world.next_day_start(hour)
            fu.next_wake = fu.next_attempt_hour
        return EMPTY

    if state == OUTBOUND:
        if hour < fu.arrival_hour:
            # cat-3 seiners scan for schools along the route
            if fu.path:
                cell = fu.path[hour - fu.depart_hour]
                if cell in world.pop.stratum_cells[PELAGIC]:
                    fu.fish_cell = cell
                    fu.travel_back = world.travel_hours(fu.site, cell)
                    fu.state = FISHING
                    fu.next_wake = hour + 1
                else:
                    fu.next_wake = min(_first_detection_hour(world, fu, hour + 1),
                                       world.next_day_start(hour))
            return EMPTY
        fu.fish_cell = fu.dest_cell
        fu.travel_back = world.travel_hours(fu.site, fu.dest_cell)
        fu.state = FISHING
        # fall through: arrival hour is the first possible fishing hour

    if fu.state == FISHING:
        params = world.cat_params[fu.cat]
        storage = params.storage_capacity * world.representation_factor
        if fu.hold >= storage or hour + 1 + fu.travel_back > fu.deadline_hour:
            _head_home(world, fu, hour)
            if hour >= fu.land_hour:
                land_catch(world, fu, hour)
            return EMPTY
        picked = _pick_patch(world, fu, fu.fish_cell)
        if picked is None:
            # hop to a neighboring patch if one is reachable within the budget
            nbr = _neighbor_with_patch(world, fu, hour)
            if nbr >= 0:
                fu.fish_cell = nbr
                fu.travel_back = world.travel_hours(fu.site, nbr)
                fu.next_wake = hour + 1
            else:
                _head_home(world, fu, hour)
                if hour >= fu.land_hour:
                    land_catch(world, fu, hour)
            return EMPTY
        sid, biomass, q_eff = picked
        caught = catch_step(q_eff, biomass, world.b_crit)
        space = storage - fu.hold
        if caught > space:
            caught = space
        if caught > 0.0:
            removed = world.pop.harvest(sid, fu.fish_cell, caught)
            fu.hold += removed
        if fu.hold >= storage - 1e-12:
            _head_home(world, fu, hour + 1)
        else:
            fu.next_wake = hour + 1
        return EMPTY

    # INBOUND
    if hour >= fu.land_hour:
        land_catch(world, fu, hour)
    return EMPTY


def _neighbor_with_patch(world, fu: FishingUnit, hour: int) -> int:
    """Adjacent cell holding a target-stratum patch, reachable in budget."""
    grid = world.grid
    ncols = grid.ncols
    nrows = grid.nrows
    row, col = divmod(fu.fish_cell, ncols)
    cells = world.pop.stratum_cells[fu.trip_target]
    dist = world.site_cell_dist[fu.site]
    speed = world.cat_params[fu.cat].speed_kmh
    deadline = fu.deadline_hour
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
            if nbr in cells:
                travel_back = int(math.ceil(dist[nbr] / speed))
                if hour + 2 + travel_back <= deadline:   # move this hour, fish next
                    candidates.append(nbr)
    if not candidates:
        return -1
    if len(candidates) == 1:
        return candidates[0]
    return candidates[world.rng.randrange(len(candidates))]


# -- fleet file -----------------------------------------------------------------

FLEET_CSV_HEADER = ["site", "cat1", "cat2", "cat3"]


def load_fleet_csv(path: str | Path, site_names: dict[str, int]) -> list[tuple[int, int, int, int]]:
    """Read per-site model-unit counts: [(site_index, n1, n2, n3), ...]."""
    path = Path(path)
    if not path.exists():
        raise FleetConfigError(f"fleet file not found: {path}")
    rows = []
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        if reader.fieldnames != FLEET_CSV_HEADER:
            raise FleetConfigError(
                f"{path}: expected header {','.join(FLEET_CSV_HEADER)}, "
                f"got {','.join(reader.fieldnames or [])}")
        for i, row in enumerate(reader):
            name = row["site"]
            if name not in site_names:
                raise FleetConfigError(f"{path} line {i + 2}: unknown site '{name}'")
            try:
                counts = tuple(int(row[f"cat{c}"]) for c in (1, 2, 3))
            except ValueError as exc:
                raise FleetConfigError(f"{path} line {i + 2}: {exc}") from exc
            if any(n < 0 for n in counts):
                raise FleetConfigError(f"{path} line {i + 2}: negative unit count")
            rows.append((site_names[name], *counts))
    return rows


def build_fleet(rows: list[tuple[int, int, int, int]]) -> list[FishingUnit]:
    """Instantiate units with stable ids: file order, category 1 then 2 then 3."""
    units: list[FishingUnit] = []
    uid = 0
    for site_idx, n1, n2, n3 in rows:
        for cat, n in ((1, n1), (2, n2), (3, n3)):
            for _ in range(n):
                units.append(FishingUnit(uid, cat, site_idx))
                uid += 1
    return units
