"""Population dynamics: placement, logistic growth, movement, harvest."""

import random

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pirogue.env_grid import SimClock
from pirogue.fish import (FishPatch, InitializationError, PopulationState,
                          harvest_patch, init_populations, logistic_increment,
                          move_patches, reproduce)
from pirogue.geo import distance_km
from pirogue.species import PATCH_DELETION_THRESHOLD_TONS

from conftest import desk_grid, make_species, uniform_grid


def _ledger_gap(pop, sid):
    led = pop.ledgers[sid]
    return led.expected_biomass() - pop.total_biomass(sid)


class TestInitPopulations:
    def test_exact_division_makes_full_patches(self):
        grid = desk_grid()
        sp = make_species(K=100_000, k_density=100, B0=30_000)   # patch 10 000 t
        pop = init_populations([sp], grid, SimClock(), random.Random(1))
        patches = list(pop.patches[0].values())
        assert len(patches) == 3
        assert all(b == pytest.approx(10_000.0) for b in patches)
        assert pop.ledgers[0].senescence == 0.0

    def test_remainder_above_threshold_becomes_partial_patch(self):
        grid = desk_grid()
        sp = make_species(K=100_000, k_density=100, B0=25_300)
        pop = init_populations([sp], grid, SimClock(), random.Random(1))
        values = sorted(pop.patches[0].values())
        assert values == pytest.approx([5_300.0, 10_000.0, 10_000.0])

    def test_remainder_below_threshold_goes_to_senescence(self):
        grid = desk_grid()
        sp = make_species(K=100_000, k_density=100, B0=20_050)
        pop = init_populations([sp], grid, SimClock(), random.Random(1))
        assert len(pop.patches[0]) == 2
        assert pop.ledgers[0].senescence == pytest.approx(50.0)
        assert _ledger_gap(pop, 0) == pytest.approx(0.0, abs=1e-9)

    def test_table_scale_patch_count(self, fullscale_config):
        # 3 Mt at 100 t/km2 on 100 km2 cells -> 300 patches
        from pirogue.env_grid import load_environment
        grid = load_environment(fullscale_config.env_dir)
        sp = make_species(K=3_000_000, k_density=100, B0=3_000_000)
        pop = init_populations([sp], grid, SimClock(), random.Random(7))
        assert len(pop.patches[0]) == 300

    def test_empty_habitat_names_species(self):
        grid = desk_grid()
        sp = make_species(name="ghostfish", t_min=35.0, t_max=39.0)
        with pytest.raises(InitializationError, match="ghostfish"):
            init_populations([sp], grid, SimClock(), random.Random(1))

    def test_b0_above_k_rejected(self):
        grid = desk_grid()
        sp = make_species()
        with pytest.raises(InitializationError, match="B0"):
            init_populations([sp], grid, SimClock(), random.Random(1),
                             b0_override={0: sp.K * 2})

    def test_patches_land_inside_habitat_in_distinct_cells(self):
        grid = desk_grid()
        sp = make_species(B0=140_000)
        pop = init_populations([sp], grid, SimClock(), random.Random(3))
        mask, cells, _ = grid.habitat_arrays(sp, 2001, 1)
        assert set(pop.patches[0]) <= set(cells)


class TestReproduce:
    def test_growth_zero_at_capacity(self):
        grid = desk_grid()
        sp = make_species(K=100_000, k_density=100, B0=100_000)
        pop = init_populations([sp], grid, SimClock(), random.Random(1))
        before = pop.total_biomass(0)
        reproduce(pop, sp, 2, grid, SimClock(), random.Random(2))
        assert pop.total_biomass(0) == pytest.approx(before)

    def test_direct_logistic_arithmetic(self):
        # r=1.5, s=2, B=K/2=1.5e6 -> G = 0.75 * 1.5e6 * 0.5 = 562 500
        assert logistic_increment(1_500_000, 3_000_000, 1.5, 2) == pytest.approx(562_500.0)

    def test_full_and_remainder_patch_counts(self):
        grid = uniform_grid(30, 30)         # 900 free cells: no placement limit
        sp = make_species(K=3_000_000, k_density=100, B0=1_500_000)
        pop = PopulationState([sp], grid.ncols)
        clock = SimClock()
        _, cells, _ = grid.habitat_arrays(sp, 2001, 1)
        rng = random.Random(5)
        for cell in cells[:150]:
            pop._add_patch(sp, cell, 10_000.0)
        pop.ledgers[0].b0 = 1_500_000.0
        reproduce(pop, sp, 2, grid, clock, rng)
        new_patches = {c: b for c, b in pop.patches[0].items() if c not in cells[:150]}
        full = [b for b in new_patches.values() if b == pytest.approx(10_000.0)]
        partial = [b for b in new_patches.values() if b != pytest.approx(10_000.0)]
        # 562 500 t of growth = 56 full patches + one 2 500 t remainder
        assert len(full) == 56
        assert partial == [pytest.approx(2_500.0)]
        assert pop.ledgers[0].senescence == 0.0

    def test_extinction_is_absorbing(self):
        grid = desk_grid()
        sp = make_species(K=100_000, k_density=100, B0=20_000)
        pop = init_populations([sp], grid, SimClock(), random.Random(1))
        for cell in list(pop.patches[0]):
            pop.harvest(0, cell, 1e12)
        assert pop.total_biomass(0) == 0.0
        for _ in range(5):
            reproduce(pop, sp, 2, grid, SimClock(), random.Random(2))
        assert pop.total_biomass(0) == 0.0

    def test_unfished_biomass_nondecreasing_and_bounded(self):
        grid = desk_grid()
        sp = make_species(K=120_000, k_density=100, B0=30_000)
        pop = init_populations([sp], grid, SimClock(), random.Random(11))
        rng = random.Random(12)
        last = pop.total_biomass(0)
        for _ in range(40):
            reproduce(pop, sp, 2, grid, SimClock(), rng)
            b = pop.total_biomass(0)
            assert b >= last - 1e-9
            assert b <= sp.K + sp.patch_capacity
            last = b
        assert _ledger_gap(pop, 0) == pytest.approx(0.0, abs=1e-6)

    def test_annual_growth_agrees_to_first_order_for_small_b(self):
        # analytic check: two half-rate events vs one full-rate event
        K, r, B = 1e9, 1.5, 100.0
        g_once = logistic_increment(B, K, r, 1)
        b_mid = B + logistic_increment(B, K, r, 2)
        g_twice = logistic_increment(B, K, r, 2) + logistic_increment(b_mid, K, r, 2)
        assert g_twice == pytest.approx(g_once, rel=r / 4 * 1.01)
        assert abs(g_twice - g_once) <= r * r / 4 * B * 1.01


class TestMovePatches:
    def test_pelagic_blocked_patch_stays(self):
        grid = desk_grid()
        sp = make_species(B0=10_000, k_density=100)
        pop = PopulationState([sp], grid.ncols)
        mask, cells, _ = grid.habitat_arrays(sp, 2001, 1)
        # occupy one cell and all of its in-habitat neighbors
        center = cells[len(cells) // 2]
        pop._add_patch(sp, center, 10_000.0)
        r0, c0 = divmod(center, grid.ncols)
        for dr in (-1, 0, 1):
            for dc in (-1, 0, 1):
                nbr = (r0 + dr) * grid.ncols + (c0 + dc)
                if nbr != center and nbr in cells:
                    pop._add_patch(sp, nbr, 5_000.0)
        before = dict(pop.patches[0])
        move_patches(pop, sp, grid, SimClock(), random.Random(1))
        assert pop.patches[0][center] == before[center]

    def test_demersal_single_cell_habitat_stays(self):
        grid = desk_grid()
        clock = SimClock()
        target = (5, 7)                      # 15 m column, one row of the gradient
        sst = grid.sst_at(target, clock)
        sp = make_species(stratum="demersal", t_min=sst - 0.2, t_max=sst + 0.2,
                          depth_min=14.0, depth_max=16.0)
        _, cells, _ = grid.habitat_arrays(sp, 2001, 1)
        assert len(cells) == 1               # the mask is exactly the patch's cell
        pop = PopulationState([sp], grid.ncols)
        pop._add_patch(sp, cells[0], 5_000.0)
        move_patches(pop, sp, grid, clock, random.Random(1))
        assert cells[0] in pop.patches[0]

    def test_evicted_pelagic_lands_on_nearest_habitat_cell(self):
        """Oracle: exhaustive nearest-cell scan by haversine."""
        grid = desk_grid()
        sp = make_species(t_min=18, t_max=25, depth_min=0, depth_max=300)
        pop = PopulationState([sp], grid.ncols)
        mask, cells, _ = grid.habitat_arrays(sp, 2001, 8)   # warm month, northern band
        outside = next(c for c in range(grid.nrows * grid.ncols)
                       if grid.sea.ravel()[c] and c not in cells)
        pop._add_patch(sp, outside, 8_000.0)
        rng = random.Random(9)
        move_patches(pop, sp, grid, SimClock(month=8), rng)
        (landed,) = pop.patches[0].keys()
        lat0, lon0 = grid.cell_center(outside)
        best = min(distance_km((lat0, lon0), grid.cell_center(c)) for c in cells)
        got = distance_km((lat0, lon0), grid.cell_center(landed))
        assert got == pytest.approx(best, abs=1e-9)

    def test_moves_stay_inside_habitat_and_one_per_cell(self):
        grid = desk_grid()
        sp = make_species(B0=120_000)
        pop = init_populations([sp], grid, SimClock(), random.Random(2))
        rng = random.Random(3)
        for month in (1, 2, 3, 8):
            clock = SimClock(month=month)
            move_patches(pop, sp, grid, clock, rng)
            _, cells, _ = grid.habitat_arrays(sp, 2001, month)
            cell_set = set(cells)
            occupied = list(pop.patches[0])
            assert len(occupied) == len(set(occupied))
            for cell in occupied:
                assert cell in cell_set


class TestHarvest:
    def _single_patch_pop(self, biomass):
        grid = desk_grid()
        sp = make_species(k_density=100)
        pop = PopulationState([sp], grid.ncols)
        pop._add_patch(sp, 11, biomass)
        pop.ledgers[0].b0 = biomass
        return pop, sp

    def test_partial_harvest(self):
        pop, _ = self._single_patch_pop(10_000.0)
        removed = pop.harvest(0, 11, 50.0)
        assert removed == pytest.approx(50.0)
        assert pop.patches[0][11] == pytest.approx(9_950.0)

    def test_residual_below_threshold_deletes_patch(self):
        pop, _ = self._single_patch_pop(120.0)
        removed = pop.harvest(0, 11, 30.0)
        assert removed == pytest.approx(30.0)
        assert 11 not in pop.patches[0]
        assert pop.ledgers[0].senescence == pytest.approx(90.0)
        assert pop.ledgers[0].harvested == pytest.approx(30.0)
        assert _ledger_gap(pop, 0) == pytest.approx(0.0, abs=1e-9)

    def test_zero_amount_is_noop(self):
        pop, _ = self._single_patch_pop(10_000.0)
        assert pop.harvest(0, 11, 0.0) == 0.0
        assert pop.patches[0][11] == pytest.approx(10_000.0)

    def test_negative_amount_rejected_via_public_api(self):
        pop, sp = self._single_patch_pop(10_000.0)
        patch = FishPatch(0, (0, 11), 10_000.0)
        with pytest.raises(ValueError):
            harvest_patch(pop, patch, -1.0)

    @settings(max_examples=60, deadline=None)
    @given(st.lists(st.floats(0, 4000), min_size=1, max_size=30))
    def test_ledger_conservation_under_random_harvests(self, amounts):
        grid = desk_grid()
        sp = make_species(K=100_000, B0=60_000)
        pop = init_populations([sp], grid, SimClock(), random.Random(4))
        cells = list(pop.patches[0])
        rng = random.Random(5)
        for amount in amounts:
            live = [c for c in cells if c in pop.patches[0]]
            if not live:
                break
            pop.harvest(0, live[rng.randrange(len(live))], amount)
        led = pop.ledgers[0]
        total = pop.total_biomass(0)
        assert led.expected_biomass() == pytest.approx(total, rel=1e-9, abs=1e-6)
        for b in pop.patches[0].values():
            assert b >= PATCH_DELETION_THRESHOLD_TONS
