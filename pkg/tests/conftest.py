"""Shared fixtures: generated input bundles and hand-built worlds."""

from __future__ import annotations

import pytest

from pirogue.config import RunConfig, parse_run_config
from pirogue.engine import WorldState
from pirogue.env_grid import EnvironmentGrid
from pirogue.fleet import default_category_params
from pirogue.ports import LandingSite
from pirogue.species import SpeciesParams
from pirogue.synth import build_desk_arrays, generate_preset


@pytest.fixture(scope="session")
def desk_bundle(tmp_path_factory):
    out = tmp_path_factory.mktemp("desk")
    return generate_preset(out, "desk")


@pytest.fixture(scope="session")
def desk_config(desk_bundle):
    return parse_run_config(desk_bundle)


@pytest.fixture(scope="session")
def fullscale_bundle(tmp_path_factory):
    out = tmp_path_factory.mktemp("fullscale")
    return generate_preset(out, "fullscale-synthetic")


@pytest.fixture(scope="session")
def fullscale_config(fullscale_bundle):
    return parse_run_config(fullscale_bundle)


def desk_grid() -> EnvironmentGrid:
    bathy, sst, top_lat, west_lon, cell = build_desk_arrays()
    return EnvironmentGrid(
        nrows=bathy.shape[0], ncols=bathy.shape[1], origin_lat=top_lat,
        origin_lon=west_lon, cell_size_deg=cell, bathy=bathy, sst_layers=sst)


def uniform_grid(nrows=30, ncols=30, sst=20.0, depth=50.0) -> EnvironmentGrid:
    """All-sea grid with constant SST and depth, for arithmetic tests."""
    import numpy as np
    bathy = np.full((nrows, ncols), depth)
    layers = np.full((12, nrows, ncols), sst)
    return EnvironmentGrid(nrows=nrows, ncols=ncols, origin_lat=16.0,
                           origin_lon=-18.0, cell_size_deg=0.09,
                           bathy=bathy, sst_layers=layers)


def make_species(**kw) -> SpeciesParams:
    defaults = dict(id=0, name="testfish", stratum="pelagic", t_min=18.0, t_max=25.0,
                    depth_min=0.0, depth_max=300.0, K=300_000.0, k_density=100.0,
                    r=1.5, B0=150_000.0)
    defaults.update(kw)
    return SpeciesParams(**defaults)


def dummy_config(**kw) -> RunConfig:
    defaults = dict(env_dir="unused", sites_file="unused", fleet_file="unused",
                    species_file="unused")
    defaults.update(kw)
    return RunConfig(**defaults)


def make_world(grid=None, species=None, sites=None, fleet_rows=None,
               config=None, **config_kw) -> WorldState:
    """Hand-built world for unit tests (no input files)."""
    grid = grid if grid is not None else desk_grid()
    if species is None:
        species = [
            make_species(id=0, name="demersal_a", stratum="demersal", t_min=18, t_max=25,
                         depth_min=0, depth_max=100, K=100_000, k_density=50, B0=50_000, r=0.5),
            make_species(id=1, name="pelagic_a", stratum="pelagic", t_min=18, t_max=25,
                         depth_min=0, depth_max=300, K=300_000, k_density=100, B0=150_000),
        ]
    if sites is None:
        sites = [LandingSite("Alpha", 15.82, -17.17, "Senegal", 100.0, index=0),
                 LandingSite("Beta", 15.37, -17.17, "Senegal", 100.0, index=1),
                 LandingSite("Gamma", 15.01, -17.17, "Senegal", 100.0, index=2)]
    if fleet_rows is None:
        fleet_rows = [(0, 1, 1, 1), (1, 1, 0, 0)]
    config = config or dummy_config(**config_kw)
    return WorldState(grid, species, sites, fleet_rows,
                      config.build_category_params(), config)
