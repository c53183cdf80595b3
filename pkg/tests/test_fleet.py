"""Fishing units: catch law, trip planning, the hourly state machine."""

import math
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pirogue.engine import step_hour
from pirogue.fleet import (AT_PORT, FISHING, INBOUND, OUTBOUND, FishingUnit,
                           catch_step, find_fishing_grounds, load_fleet_csv,
                           maybe_start_campaign, select_trip_target, step_fu)
from pirogue.geo import distance_km
from pirogue.ports import LandingSite, default_sites
from pirogue.species import DEMERSAL, PELAGIC

from conftest import dummy_config, make_species, make_world, uniform_grid


class TestCatchStep:
    def test_half_saturation_point(self):
        # correction factor is exactly 1/2 when biomass equals b_crit
        assert catch_step(0.05, 100.0, 100.0) == pytest.approx(2.5, abs=0)

    def test_linear_limit_without_threshold(self):
        assert catch_step(1e-3, 500.0, 0.0) == pytest.approx(0.5)

    def test_direct_arithmetic(self):
        assert catch_step(1e-2, 10_000.0, 100.0) == pytest.approx(1e8 * 1e-2 / 10_100)

    def test_zero_biomass_zero_catch(self):
        assert catch_step(0.05, 0.0, 100.0) == 0.0
        assert catch_step(0.05, 0.0, 0.0) == 0.0

    @settings(max_examples=80, deadline=None)
    @given(st.floats(1e-6, 1.0), st.floats(0, 1e6), st.floats(0, 1e6), st.floats(1, 2))
    def test_monotone_in_biomass(self, q, b, b_crit, factor):
        assert catch_step(q, b * factor, b_crit) >= catch_step(q, b, b_crit)

    @settings(max_examples=40, deadline=None)
    @given(st.floats(1e-6, 1e-1), st.floats(1, 1e6), st.floats(0, 1e4))
    def test_exactly_linear_in_catchability(self, q, b, b_crit):
        assert catch_step(10 * q, b, b_crit) == pytest.approx(10 * catch_step(q, b, b_crit), rel=1e-12)


class TestSelectTripTarget:
    def test_small_units_rig_demersal(self):
        fu = FishingUnit(0, 1, 0)
        assert select_trip_target(fu, random.Random(1)) == DEMERSAL

    def test_large_units_rig_pelagic(self):
        fu = FishingUnit(0, 3, 0)
        assert select_trip_target(fu, random.Random(1)) == PELAGIC

    def test_medium_units_flip_a_fair_coin(self):
        fu = FishingUnit(0, 2, 0)
        rng = random.Random(123)
        n = 10_000
        demersal = sum(select_trip_target(fu, rng) == DEMERSAL for _ in range(n))
        assert demersal / n == pytest.approx(0.5, abs=0.02)


def _world_with_patch_at_km(dist_km, stratum=DEMERSAL, biomass=10_000.0, **config_kw):
    """One site, one unit-free world; a patch exactly dist_km north of the site."""
    grid = uniform_grid(60, 20, sst=20.0, depth=50.0)
    patch_row, patch_col = 10, 10
    patch_lat = grid.origin_lat - patch_row * grid.cell_size_deg
    patch_lon = grid.origin_lon + patch_col * grid.cell_size_deg
    site_lat = patch_lat - dist_km / 111.19492664455873
    sites = [LandingSite("Home", site_lat, patch_lon, "Senegal", 1e9, index=0)]
    species = [
        make_species(id=0, name="dem", stratum=DEMERSAL, t_min=18, t_max=25,
                     depth_min=0, depth_max=100, K=1e6, k_density=100, B0=1e5),
        make_species(id=1, name="pel", stratum=PELAGIC, t_min=18, t_max=25,
                     depth_min=0, depth_max=100, K=1e6, k_density=100, B0=1e5),
    ]
    world = make_world(grid=grid, species=species, sites=sites,
                       fleet_rows=[], config=dummy_config(**config_kw))
    # drop the randomly initialized patches; place one controlled patch
    for sid in (0, 1):
        for cell in list(world.pop.patches[sid]):
            world.pop._remove_patch(world.species[sid], cell)
    sid = 0 if stratum == DEMERSAL else 1
    cell = patch_row * grid.ncols + patch_col
    world.pop._add_patch(world.species[sid], cell, biomass)
    world.pop.ledgers[sid].b0 = biomass
    world.pop.ledgers[1 - sid].b0 = 0.0
    return world, cell


class TestFindFishingGrounds:
    def test_ground_at_45km_is_feasible_for_daily_trip(self):
        world, cell = _world_with_patch_at_km(45.0)
        fu = FishingUnit(0, 1, 0)
        fu.trip_target = DEMERSAL
        grounds = find_fishing_grounds(world, fu)
        assert grounds == [(cell, 5)]          # ceil(45/10) = 5; 2*5+1 = 11 <= 12

    def test_ground_at_60km_excluded_by_radius(self):
        world, cell = _world_with_patch_at_km(60.0)
        fu = FishingUnit(0, 1, 0)
        fu.trip_target = DEMERSAL
        assert find_fishing_grounds(world, fu) == []

    def test_no_target_patches_means_no_grounds(self):
        world, cell = _world_with_patch_at_km(45.0, stratum=PELAGIC)
        fu = FishingUnit(0, 1, 0)
        fu.trip_target = DEMERSAL
        assert find_fishing_grounds(world, fu) == []

    def test_55km_ground_infeasible_in_12h_budget_even_inside_radius(self):
        # travel ceil(5.5)=6 each way -> 13 h > 12: radius alone is not enough
        world, cell = _world_with_patch_at_km(49.0)
        world.cat_params[1].radius_km = 49.5
        fu = FishingUnit(0, 1, 0)
        fu.trip_target = DEMERSAL
        assert find_fishing_grounds(world, fu) == [(cell, 5)]
        world.cat_params[1].max_trip = 10
        world.ground_cache.clear()
        assert find_fishing_grounds(world, fu) == []


def _add_unit(world, cat, site=0):
    fu = FishingUnit(len(world.units), cat, site)
    world.units.append(fu)
    return fu


def _drive(world, fu, hours, start=0):
    trace = []
    for h in range(start, start + hours):
        world.hour = h
        step_fu(fu, world, h)
        trace.append((h, fu.state, round(fu.hold, 6)))
    return trace


class TestStepFu:
    def test_45km_daily_trip_is_5_out_2_fishing_5_back(self):
        world, cell = _world_with_patch_at_km(45.0, biomass=10_000.0)
        world.cat_params[1].q = 1e-5                     # ~0.1 t/h: hold never fills
        fu = _add_unit(world, 1)
        states = _drive(world, fu, 13)
        assert [s for _, s, _ in states[0:5]] == [OUTBOUND] * 5
        assert [s for _, s, _ in states[5:7]] == [FISHING] * 2
        assert [s for _, s, _ in states[7:11]] == [INBOUND] * 4
        assert states[11][1] == AT_PORT                  # landed at hour 11: 12 h total
        landed = world.sites[0].landed_today
        c1 = catch_step(1e-5, 10_000.0, 100.0)
        c2 = catch_step(1e-5, 10_000.0 - c1, 100.0)
        assert landed == pytest.approx(c1 + c2, rel=1e-12)
        assert fu.hold == 0.0

    def test_hold_clipped_at_capacity_then_inbound(self):
        world, cell = _world_with_patch_at_km(15.0, biomass=10_000.0, b_crit=0.0)
        world.cat_params[1].q = 1e-3                     # 10 t/h on a fresh patch
        fu = _add_unit(world, 1)
        _drive(world, fu, 3)                             # depart, travel, arrive+fish
        assert fu.hold == pytest.approx(0.5)             # clipped to storage
        assert fu.state == INBOUND
        before = world.pop.patches[0][cell]
        assert before == pytest.approx(10_000.0 - 0.5)

    def test_patch_deleted_midtrip_heads_home_with_partial_hold(self):
        world, cell = _world_with_patch_at_km(15.0, biomass=10_000.0)
        world.cat_params[1].q = 1e-5                     # slow: several fishing hours
        fu = _add_unit(world, 1)
        _drive(world, fu, 4)                             # now fishing with some hold
        assert fu.state == FISHING and fu.hold > 0.0
        world.pop.harvest(0, cell, 1e12)                 # someone else empties the cell
        partial = fu.hold
        world.hour = 4
        step_fu(fu, world, 4)
        assert fu.state in (INBOUND, AT_PORT)
        assert fu.hold in (pytest.approx(partial), 0.0)

    def test_trip_duration_never_exceeds_max_trip(self):
        world, cell = _world_with_patch_at_km(45.0, biomass=50_000.0)
        fu = _add_unit(world, 1)
        depart = None
        for h in range(0, 24 * 6):
            world.hour = h
            was = fu.state
            step_fu(fu, world, h)
            if was == AT_PORT and fu.state == OUTBOUND:
                depart = h
            if was != AT_PORT and fu.state == AT_PORT:
                assert h - depart + 1 <= world.cat_params[1].max_trip

    def test_cat3_detects_pelagic_school_en_route(self):
        world, far_cell = _world_with_patch_at_km(300.0, stratum=PELAGIC)
        grid = world.grid
        # place a second pelagic patch straight on the route, ~100 km out
        mid_row, col = 30, 10
        site = world.sites[0]
        mid_cell = None
        fu = _add_unit(world, 3)
        world.hour = 0
        step_fu(fu, world, 0)
        assert fu.state == OUTBOUND and fu.path
        mid_cell = fu.path[len(fu.path) // 2]
        world.pop._add_patch(world.species[1], mid_cell, 8_000.0)
        hit_hour = len(fu.path) // 2 + 1
        for h in range(1, hit_hour + 2):
            world.hour = h
            step_fu(fu, world, h)
            if fu.state == FISHING:
                break
        assert fu.state == FISHING
        assert fu.fish_cell == mid_cell                  # stopped at the school


class TestLandCatch:
    def _three_site_world(self, capacities=(10.0, 1e9, 1e9)):
        grid = uniform_grid(60, 20, sst=20.0, depth=50.0)
        lat0 = grid.origin_lat - 10 * grid.cell_size_deg
        sites = [
            LandingSite("Near", lat0 - 0.30, -17.1, "Senegal", capacities[0], index=0),
            LandingSite("Mid", lat0 - 0.60, -17.1, "Senegal", capacities[1], index=1),
            LandingSite("Far", lat0 - 2.00, -17.1, "Senegal", capacities[2], index=2),
        ]
        species = [make_species(id=0, name="dem", stratum=DEMERSAL, depth_max=100,
                                K=1e6, B0=1e5, k_density=100)]
        world = make_world(grid=grid, species=species, sites=sites, fleet_rows=[])
        for cell in list(world.pop.patches[0]):
            world.pop._remove_patch(world.species[0], cell)
        world.pop._add_patch(world.species[0], 10 * grid.ncols + 10, 10_000.0)
        return world

    def test_saturated_home_diverts_to_nearest_open_site(self):
        world = self._three_site_world()
        world.sites[0].landed_today = 10.0               # at capacity: saturated
        fu = _add_unit(world, 1, site=0)
        fu.state = INBOUND
        fu.hold = 0.4
        fu.land_hour = 5
        step_fu(fu, world, 5)
        assert fu.site == 1                              # nearest non-saturated
        assert fu.short_migrations == 1
        assert world.sites[1].landed_today == pytest.approx(0.4)
        assert world.migrations and world.migrations[-1][2] == "short"
        assert fu.pending_revert == 0

    def test_open_home_lands_without_migration(self):
        world = self._three_site_world()
        fu = _add_unit(world, 1, site=0)
        fu.state = INBOUND
        fu.hold = 0.4
        fu.land_hour = 5
        step_fu(fu, world, 5)
        assert fu.site == 0 and fu.short_migrations == 0
        assert world.sites[0].landed_today == pytest.approx(0.4)

    def test_all_sites_saturated_lands_at_home_anyway(self):
        world = self._three_site_world(capacities=(0.0, 0.0, 0.0))
        fu = _add_unit(world, 1, site=0)
        fu.state = INBOUND
        fu.hold = 0.4
        fu.land_hour = 5
        step_fu(fu, world, 5)
        assert fu.site == 0 and fu.short_migrations == 0
        assert world.sites[0].landed_today == pytest.approx(0.4)

    def test_zero_catch_trip_draws_campaign_bernoulli(self):
        hits = 0
        trials = 400
        for seed in range(trials):
            world = self._three_site_world()
            world.cat_params[1].campaign_prob = 0.25
            world.rng = random.Random(seed)
            fu = _add_unit(world, 1, site=0)
            fu.state = INBOUND
            fu.hold = 0.0
            fu.land_hour = 5
            step_fu(fu, world, 5)
            hits += fu.long_migrations
        assert hits / trials == pytest.approx(0.25, abs=0.06)


class TestCampaigns:
    def test_probability_zero_never_migrates(self):
        world = self._patchy_world()
        world.cat_params[3].campaign_prob = 0.0
        fu = _add_unit(world, 3)
        for _ in range(200):
            assert not maybe_start_campaign(world, fu)
        assert fu.long_migrations == 0

    def _patchy_world(self):
        grid = uniform_grid(60, 20, sst=20.0, depth=50.0)
        species = [make_species(id=0, name="pel", stratum=PELAGIC, depth_max=100,
                                K=1e6, B0=1e5, k_density=100)]
        sites = default_sites()
        world = make_world(grid=grid, species=species, sites=sites, fleet_rows=[])
        return world

    def test_duration_uniform_over_campaign_window(self):
        world = self._patchy_world()
        world.cat_params[3].campaign_prob = 1.0
        world.rng = random.Random(77)
        durations = []
        for _ in range(10_000):
            fu = FishingUnit(0, 3, 0)
            assert maybe_start_campaign(world, fu)
            durations.append(fu.campaign_until - world.month_index)
        assert min(durations) == 1 and max(durations) == 12
        mean = sum(durations) / len(durations)
        assert mean == pytest.approx(6.5, abs=0.2)

    def test_destination_is_site_nearest_to_remaining_fish(self):
        """Oracle: exhaustive site-by-site minimum distance scan."""
        grid = uniform_grid(60, 20, sst=20.0, depth=50.0)  # 21.5N..16.2N... origin 16
        # rebuild with an origin near Mauritania so northern cells exist
        import numpy as np
        grid.origin_lat = 21.5
        grid.__post_init__()
        species = [make_species(id=0, name="pel", stratum=PELAGIC, depth_max=100,
                                K=1e6, B0=1e5, k_density=100)]
        sites = default_sites()
        world = make_world(grid=grid, species=species, sites=sites, fleet_rows=[])
        for cell in list(world.pop.patches[0]):
            world.pop._remove_patch(world.species[0], cell)
        # all remaining fish sit at ~21.1N: off the Mauritanian coast
        patch_cells = [4 * grid.ncols + 10, 5 * grid.ncols + 11]
        for cell in patch_cells:
            world.pop._add_patch(world.species[0], cell, 9_000.0)
        world.cat_params[3].campaign_prob = 1.0
        fu = FishingUnit(0, 3, 6)                        # based at Dakar
        assert maybe_start_campaign(world, fu)
        # oracle
        best_site, best_d = None, math.inf
        for i, s in enumerate(sites):
            d = min(distance_km((s.lat, s.lon), grid.cell_center(c)) for c in patch_cells)
            if d < best_d:
                best_site, best_d = i, d
        assert fu.site == best_site
        assert sites[best_site].country == "Mauritania"
        assert fu.long_migrations == 1

    def test_no_fish_anywhere_goes_to_random_other_site(self):
        world = self._patchy_world()
        for cell in list(world.pop.patches[0]):
            world.pop._remove_patch(world.species[0], cell)
        world.cat_params[3].campaign_prob = 1.0
        seen = set()
        for seed in range(40):
            world.rng = random.Random(seed)
            fu = FishingUnit(0, 3, 6)
            assert maybe_start_campaign(world, fu)
            assert fu.site != 6
            seen.add(fu.site)
        assert len(seen) > 3


class TestFleetFile:
    def test_round_trip_and_id_order(self, tmp_path):
        path = tmp_path / "fleet.csv"
        path.write_text("site,cat1,cat2,cat3\nKayar,2,1,0\nDakar,0,0,2\n")
        rows = load_fleet_csv(path, {"Kayar": 0, "Dakar": 1})
        from pirogue.fleet import build_fleet
        units = build_fleet(rows)
        assert [(u.id, u.cat, u.home_site) for u in units] == [
            (0, 1, 0), (1, 1, 0), (2, 2, 0), (3, 3, 1), (4, 3, 1)]

    def test_unknown_site_rejected(self, tmp_path):
        path = tmp_path / "fleet.csv"
        path.write_text("site,cat1,cat2,cat3\nAtlantis,1,0,0\n")
        from pirogue.fleet import FleetConfigError
        with pytest.raises(FleetConfigError, match="Atlantis"):
            load_fleet_csv(path, {"Kayar": 0})
