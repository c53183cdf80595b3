"""Config parsing, output serialization, scenario matrix, plots, CLI."""

import csv
import dataclasses
import json
from pathlib import Path

import pytest

from pirogue.cli import main as cli_main
from pirogue.config import (ConfigError, config_from_mapping, parse_run_config,
                            write_run_config)
from pirogue.engine import run
from pirogue.matrix import (MatrixError, ScenarioMatrix, parse_matrix_spec,
                            run_matrix)
from pirogue.outputs import write_outputs
from pirogue.plots import PlotError, plot


def _read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


class TestParseRunConfig:
    def test_minimal_config_gets_defaults(self, desk_bundle, tmp_path):
        base = desk_bundle.parent
        cfg_file = tmp_path / "minimal.cfg"
        cfg_file.write_text(
            f"env_dir = {base}/env\nsites = {base}/sites.csv\n"
            f"fleet = {base}/fleet.csv\nspecies = {base}/species.csv\nseed = 7\n")
        cfg = parse_run_config(cfg_file)
        assert cfg.seed == 7
        assert cfg.s == 2 and cfg.b_crit == 100.0 and cfg.delta_sst == 0.0
        params = cfg.build_category_params()
        assert params[1].q == 1e-4 and params[3].q == 1e-2
        assert params[3].campaign_max_months == 12
        assert params[2].storage_capacity == 5.0

    def test_s_must_divide_twelve(self, desk_bundle, tmp_path):
        lines = [ln for ln in Path(desk_bundle).read_text().splitlines() if ln != "s = 2"]
        bad = tmp_path / "bad.cfg"
        bad.write_text("\n".join(lines) + "\ns = 5\n")
        with pytest.raises(ConfigError, match="divisor"):
            parse_run_config(bad)

    def test_unknown_key_rejected(self, desk_bundle, tmp_path):
        bad = tmp_path / "bad.cfg"
        bad.write_text(Path(desk_bundle).read_text() + "\nturbo_mode = on\n")
        with pytest.raises(ConfigError, match="turbo_mode"):
            parse_run_config(bad)

    def test_delta_reaches_grid_loader(self, desk_bundle, tmp_path):
        from pirogue.engine import build_world
        text = Path(desk_bundle).read_text().replace("delta_sst = 0.0", "delta_sst = 3.0")
        cfg_file = tmp_path / "warm.cfg"
        cfg_file.write_text(text)
        cfg = parse_run_config(cfg_file)
        assert cfg.delta_sst == 3.0
        world = build_world(cfg)
        assert world.grid.delta_sst == 3.0

    def test_round_trip(self, desk_config, tmp_path):
        cfg = dataclasses.replace(
            desk_config, seed=99, delta_sst=1.5, q_scale=0.25,
            category_overrides={"q_cat3": 5e-3, "campaign_prob_cat1": 0.0})
        path = tmp_path / "echo.cfg"
        write_run_config(cfg, path)
        again = parse_run_config(path)
        assert again == dataclasses.replace(cfg, output_dir=again.output_dir)

    def test_mapping_equivalent_to_file(self, desk_config):
        mapping = {
            "env_dir": desk_config.env_dir, "sites": desk_config.sites_file,
            "fleet": desk_config.fleet_file, "species": desk_config.species_file,
            "seed": 42, "years": 2, "representation_factor": 1.0,
        }
        cfg = config_from_mapping(mapping)
        assert cfg.seed == desk_config.seed
        assert cfg.env_dir == desk_config.env_dir


@pytest.fixture(scope="module")
def desk_run_dir(desk_config, tmp_path_factory):
    out_dir = tmp_path_factory.mktemp("run_out")
    outputs = run(desk_config)
    write_outputs(outputs, out_dir)
    return out_dir, outputs


class TestWriteOutputs:
    def test_landings_row_count_includes_initial_frame(self, desk_run_dir):
        out_dir, outputs = desk_run_dir
        rows = _read_rows(out_dir / "landings_daily.csv")
        n_sites = len(outputs.site_names)
        assert len(rows) == 731 * n_sites          # 2 years + initial frame

    def test_landings_total_equals_ledger_harvest(self, desk_run_dir):
        out_dir, outputs = desk_run_dir
        rows = _read_rows(out_dir / "landings_daily.csv")
        total = sum(float(r["tons"]) for r in rows)
        ledger = _read_rows(out_dir / "ledger.csv")
        harvested = sum(float(r["harvested_tons"]) for r in ledger)
        assert total == pytest.approx(harvested, rel=1e-9)

    def test_csvs_are_naive_splitter_safe(self, desk_run_dir):
        out_dir, _ = desk_run_dir
        for name in ("landings_daily.csv", "fleet_daily.csv", "biomass_daily.csv",
                     "migrations.csv", "ledger.csv", "country_catch_daily.csv",
                     "totals_daily.csv"):
            text = (out_dir / name).read_bytes().decode()
            assert "\r" not in text
            header = text.splitlines()[0]
            width = header.count(",")
            for line in text.splitlines()[1:]:
                assert line.count(",") == width
            for line in text.splitlines():
                for field in line.split(","):
                    assert '"' not in field

    def test_dates_are_iso(self, desk_run_dir):
        out_dir, _ = desk_run_dir
        rows = _read_rows(out_dir / "biomass_daily.csv")
        assert rows[0]["date"] == "2001-01-01"
        assert rows[-1]["date"] == "2002-12-31"

    def test_manifest_echoes_config_and_seed(self, desk_run_dir, desk_config):
        out_dir, _ = desk_run_dir
        manifest = json.loads((out_dir / "run_meta.json").read_text())
        assert manifest["seed"] == desk_config.seed
        assert manifest["config"]["s"] == desk_config.s
        assert not manifest["invalid"]
        echoed = parse_run_config(out_dir / "config_used.cfg")
        assert echoed.seed == desk_config.seed
        assert echoed.env_dir == desk_config.env_dir

    def test_no_migrations_when_campaigns_off_and_capacity_huge(self, desk_config, tmp_path):
        cfg = dataclasses.replace(
            desk_config, years=1,
            category_overrides={"campaign_prob_cat1": 0.0, "campaign_prob_cat2": 0.0,
                                "campaign_prob_cat3": 0.0})
        # raise all capacities so saturation (hence diversion) never happens
        sites_file = tmp_path / "sites.csv"
        text = Path(desk_config.sites_file).read_text().splitlines()
        out = [text[0]]
        for line in text[1:]:
            parts = line.split(",")
            parts[-1] = "1000000.0"
            out.append(",".join(parts))
        sites_file.write_text("\n".join(out) + "\n")
        cfg = dataclasses.replace(cfg, sites_file=str(sites_file))
        outputs = run(cfg)
        assert outputs.migrations == []
        write_outputs(outputs, tmp_path / "out")
        assert (tmp_path / "out" / "migrations.csv").read_text() == "date,fu_id,kind,from,to\n"


class TestMatrix:
    def test_combinatorics(self, tmp_path):
        spec = tmp_path / "matrix.cfg"
        spec.write_text("climate = 0.0, 1.5, 3.0\ncatchability = 1.0, 100.0\n"
                        "replicates = 2\nbase_seed = 7\n")
        matrix = parse_matrix_spec(spec)
        combos = list(matrix.combinations())
        assert len(combos) == 3 * 1 * 1 * 2 * 2
        assert combos[0] == (0.0, "reference", "reference", 1.0, 0)

    def test_unknown_variant_rejected(self, tmp_path):
        spec = tmp_path / "matrix.cfg"
        spec.write_text("infrastructure = reference, atlantis\n")
        with pytest.raises(MatrixError, match="atlantis"):
            parse_matrix_spec(spec)

    def test_desk_matrix_runs_and_summarizes(self, desk_config, tmp_path):
        cfg = dataclasses.replace(desk_config, years=1)
        matrix = ScenarioMatrix(climate=[0.0], infrastructure=["reference", "homogeneous"],
                                fleet=["reference"], catchability=[1.0, 400.0],
                                replicates=2, base_seed=42)
        summary = run_matrix(cfg, matrix, tmp_path)
        assert len(summary) == 2 * 2 * 2
        rows = _read_rows(tmp_path / "summary.csv")
        assert len(rows) == len(summary)
        # replicates share a config hash but differ in outputs
        by_combo = {}
        for row in rows:
            key = (row["climate"], row["infrastructure"], row["catchability"])
            by_combo.setdefault(key, []).append(row)
        for combo_rows in by_combo.values():
            assert len({r["config_hash"] for r in combo_rows}) == 1
            assert len({r["seed"] for r in combo_rows}) == 2

    def test_catchability_sweep_flips_collapse_flag(self, desk_config, tmp_path):
        # sustainable-vs-overfished pair: same config, catchability x100
        cfg = dataclasses.replace(desk_config, years=3, q_scale=0.01)
        matrix = ScenarioMatrix(catchability=[1.0, 100.0], replicates=1, base_seed=42)
        summary = run_matrix(cfg, matrix, tmp_path)
        flags = {row["catchability"]: row["collapsed"] for row in summary}
        assert flags[1.0] is False
        assert flags[100.0] is True
        assert summary[1]["years_to_collapse"] != ""

    def test_infrastructure_variants_rewrite_capacities(self, desk_config, tmp_path):
        from pirogue.matrix import _infra_variant_file
        from pirogue.ports import load_sites_csv
        base = load_sites_csv(desk_config.sites_file)
        total = sum(s.capacity for s in base)
        homog = load_sites_csv(_infra_variant_file(desk_config.sites_file, "homogeneous", tmp_path))
        assert all(s.capacity == pytest.approx(total / len(base)) for s in homog)
        tenth = load_sites_csv(_infra_variant_file(desk_config.sites_file, "homogeneous_x01", tmp_path))
        assert sum(s.capacity for s in tenth) == pytest.approx(total / 10)


class TestPlots:
    def test_all_kinds_render(self, desk_run_dir):
        out_dir, _ = desk_run_dir
        for kind in ("catch", "biomass", "fleet", "migrations"):
            files = plot(out_dir, kind)
            assert files and files[0].exists() and files[0].stat().st_size > 0

    def test_missing_csv_is_named_error(self, tmp_path):
        with pytest.raises(PlotError, match="landings_daily.csv"):
            plot(tmp_path, "catch")

    def test_degenerate_zero_year_run_plots(self, desk_config, tmp_path):
        cfg = dataclasses.replace(desk_config, years=0)
        outputs = run(cfg)
        write_outputs(outputs, tmp_path)
        for kind in ("catch", "biomass", "fleet", "migrations"):
            assert plot(tmp_path, kind)


class TestCli:
    def test_run_and_plot_roundtrip(self, desk_bundle, tmp_path):
        out = tmp_path / "cli_out"
        assert cli_main(["run", "--config", str(desk_bundle), "--out", str(out)]) == 0
        assert (out / "landings_daily.csv").exists()
        assert cli_main(["plot", "--dir", str(out), "--kind", "biomass"]) == 0

    def test_validation_failure_exits_1(self, tmp_path):
        missing = tmp_path / "nope.cfg"
        assert cli_main(["run", "--config", str(missing)]) == 1

    def test_gen_env_presets(self, tmp_path):
        assert cli_main(["gen-env", "--out", str(tmp_path / "d"), "--preset", "desk"]) == 0
        assert (tmp_path / "d" / "env" / "bathy.asc").exists()
        assert (tmp_path / "d" / "run.cfg").exists()

    def test_saltelli_cli_writes_reports(self, desk_bundle, tmp_path):
        specs = tmp_path / "specs.csv"
        specs.write_text("name,min,max,scale\nq_cat3,1e-4,1e-2,log10\ndelta_sst,-1,1,linear\n")
        rc = cli_main(["saltelli", "--config", str(desk_bundle), "--specs", str(specs),
                       "--n", "4", "--horizon", "1", "--seed", "5",
                       "--out", str(tmp_path / "sob")])
        assert rc == 0
        report = _read_rows(tmp_path / "sob" / "sobol_report.csv")
        assert [r["parameter"] for r in report] == ["q_cat3", "delta_sst"]
        raw = _read_rows(tmp_path / "sob" / "raw_samples.csv")
        assert len(raw) == 4 * 4

    def test_matrix_cli(self, desk_bundle, tmp_path):
        spec = tmp_path / "m.cfg"
        spec.write_text("catchability = 1.0\nreplicates = 1\n")
        rc = cli_main(["matrix", "--spec", str(spec), "--config", str(desk_bundle),
                       "--out", str(tmp_path / "mx")])
        assert rc == 0
        assert (tmp_path / "mx" / "summary.csv").exists()

    def test_oft_single_value_matches_plain_run(self, desk_config, capsys):
        from pirogue.sensitivity import run_oft
        cfg = dataclasses.replace(desk_config, years=1)
        rows = run_oft(cfg, "delta_sst", [0.0], seed=42)
        base = run(dataclasses.replace(cfg, seed=42))
        assert rows[0]["total_catch_tons"] == pytest.approx(
            sum(led["harvested_tons"] for led in base.ledgers))

    def test_oft_climate_sweep(self, desk_config):
        from pirogue.sensitivity import run_oft
        cfg = dataclasses.replace(desk_config, years=1)
        rows = run_oft(cfg, "delta_sst", [0.0, 1.5, 3.0], seed=42)
        assert [row["value"] for row in rows] == [0.0, 1.5, 3.0]
        assert all(not row["invalid"] for row in rows)
        assert len({round(row["total_catch_tons"]) for row in rows}) > 1
