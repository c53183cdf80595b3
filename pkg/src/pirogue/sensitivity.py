"""Global sensitivity analysis: Saltelli sampling and Sobol indices.

Implements the matched estimator pair for first-order and total effects
(sample mean of y_B * (y_ABi - y_A) over the total variance for S1, and
the Jansen half-mean-square form for ST), fed by a scrambled Sobol'
low-discrepancy design A, AB_1..AB_d, B of N * (d + 2) rows. The same
machinery drives both analytic test functions and full simulator runs,
plus a one-factor-at-a-time sweep over any config axis.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, replace
from pathlib import Path

import numpy as np
from scipy.stats import qmc

from pirogue.config import RunConfig
from pirogue.engine import run_months

ParamScale = ("linear", "log10")


class SensitivityError(Exception):
    pass


@dataclass(frozen=True)
class ParamSpec:
    name: str                    # must map to a RunConfig axis
    min: float
    max: float
    scale: str = "linear"        # "linear" | "log10"

    def validate(self) -> None:
        if not self.min < self.max:
            raise SensitivityError(f"{self.name}: need min < max")
        if self.scale not in ParamScale:
            raise SensitivityError(f"{self.name}: scale must be linear or log10")
        if self.scale == "log10" and self.min <= 0:
            raise SensitivityError(f"{self.name}: log10 scale requires min > 0")

    def from_unit(self, u: np.ndarray) -> np.ndarray:
        if self.scale == "log10":
            lo, hi = np.log10(self.min), np.log10(self.max)
            return 10.0 ** (lo + u * (hi - lo))
        return self.min + u * (self.max - self.min)


@dataclass
class SobolReport:
    parameters: list
    S1: list                      # clamped to [-0.1, 1.1] for reporting
    ST: list
    S1_raw: list
    ST_raw: list
    S1_ci: list                   # (lo, hi) 95% bootstrap intervals
    ST_ci: list
    n_samples: int
    output_name: str
    degenerate: bool = False      # zero output variance: indices undefined


def saltelli_sample(specs: list[ParamSpec], n: int, seed: int) -> np.ndarray:
    """Build the N*(d+2) Saltelli design mapped to parameter ranges.

    Row order: the N rows of A, then the N rows of each AB_i (A with
    column i taken from B), then B. N must be a power of two for the
    scrambled Sobol' generator.
    """
    if n < 1 or (n & (n - 1)) != 0:
        raise SensitivityError(f"N must be a power of 2, got {n}")
    d = len(specs)
    if d < 1:
        raise SensitivityError("need at least one parameter")
    for spec in specs:
        spec.validate()
    sampler = qmc.Sobol(d=2 * d, scramble=True, seed=seed)
    base = sampler.random(n)
    a_unit = base[:, :d]
    b_unit = base[:, d:]
    blocks = [a_unit]
    for i in range(d):
        ab = a_unit.copy()
        ab[:, i] = b_unit[:, i]
        blocks.append(ab)
    blocks.append(b_unit)
    unit = np.vstack(blocks)
    out = np.empty_like(unit)
    for i, spec in enumerate(specs):
        out[:, i] = spec.from_unit(unit[:, i])
    return out


def _indices(y_a: np.ndarray, y_b: np.ndarray, y_ab: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    """Raw (S1, ST) vectors for output blocks of one Saltelli design."""
    var = np.var(np.concatenate([y_a, y_b]), ddof=0)
    if var <= 0.0:
        return np.full(y_ab.shape[0], np.nan), np.full(y_ab.shape[0], np.nan)
    s1 = np.mean(y_b[None, :] * (y_ab - y_a[None, :]), axis=1) / var
    st = 0.5 * np.mean((y_a[None, :] - y_ab) ** 2, axis=1) / var
    return s1, st


def sobol_indices(y_a, y_b, y_abi, parameters: list[str] | None = None,
                  output_name: str = "output", n_bootstrap: int = 200,
                  seed: int = 0) -> SobolReport:
    """First-order and total Sobol indices with bootstrap intervals.

    ``y_abi`` is a (d, N) array (or list of d arrays) of outputs for the
    AB_i blocks. Zero total variance flags the report degenerate.
    """
    y_a = np.asarray(y_a, dtype=float)
    y_b = np.asarray(y_b, dtype=float)
    y_ab = np.asarray(y_abi, dtype=float)
    if y_ab.ndim == 1:
        y_ab = y_ab[None, :]
    d, n = y_ab.shape
    if len(y_a) != n or len(y_b) != n:
        raise SensitivityError("y_A, y_B and y_ABi must share the sample count N")
    if not (np.all(np.isfinite(y_a)) and np.all(np.isfinite(y_b)) and np.all(np.isfinite(y_ab))):
        raise SensitivityError("outputs must be finite")
    parameters = parameters or [f"x{i + 1}" for i in range(d)]

    s1, st = _indices(y_a, y_b, y_ab)
    degenerate = bool(np.isnan(s1).any())
    if degenerate:
        nanl = [float("nan")] * d
        return SobolReport(parameters, nanl, nanl, nanl, nanl,
                           [(float("nan"),) * 2] * d, [(float("nan"),) * 2] * d,
                           n, output_name, degenerate=True)

    rng = np.random.default_rng(seed)
    boots1 = np.empty((n_bootstrap, d))
    bootst = np.empty((n_bootstrap, d))
    for k in range(n_bootstrap):
        idx = rng.integers(0, n, size=n)
        b1, bt = _indices(y_a[idx], y_b[idx], y_ab[:, idx])
        boots1[k] = b1
        bootst[k] = bt
    s1_ci = [tuple(np.percentile(boots1[:, i], [2.5, 97.5])) for i in range(d)]
    st_ci = [tuple(np.percentile(bootst[:, i], [2.5, 97.5])) for i in range(d)]

    clamp = lambda v: float(np.clip(v, -0.1, 1.1))
    return SobolReport(
        parameters=list(parameters),
        S1=[clamp(v) for v in s1], ST=[clamp(v) for v in st],
        S1_raw=[float(v) for v in s1], ST_raw=[float(v) for v in st],
        S1_ci=s1_ci, ST_ci=st_ci, n_samples=n, output_name=output_name)


# -- simulator harness -------------------------------------------------------------

# The 13-parameter exploration space: a uniform climate offset, campaign
# behavior and catchability/storage per fishing-unit category.
def default_param_specs() -> list[ParamSpec]:
    return [
        ParamSpec("delta_sst", -2.0, 2.0),
        ParamSpec("campaign_prob_cat1", 0.0, 1.0),
        ParamSpec("campaign_prob_cat2", 0.0, 1.0),
        ParamSpec("campaign_prob_cat3", 0.0, 1.0),
        ParamSpec("campaign_max_months_cat1", 1.0, 10.0),
        ParamSpec("campaign_max_months_cat2", 1.0, 10.0),
        ParamSpec("campaign_max_months_cat3", 1.0, 10.0),
        ParamSpec("q_cat1", 1e-6, 1e-5, "log10"),
        ParamSpec("q_cat2", 1e-5, 1e-4, "log10"),
        ParamSpec("q_cat3", 1e-4, 1e-3, "log10"),
        ParamSpec("storage_cat1", 0.25, 0.75),
        ParamSpec("storage_cat2", 0.5, 1.5),
        ParamSpec("storage_cat3", 1.0, 100.0),
    ]


def load_param_specs(path: str | Path) -> list[ParamSpec]:
    """Read specs from CSV: name,min,max,scale."""
    specs = []
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            spec = ParamSpec(row["name"], float(row["min"]), float(row["max"]),
                             row.get("scale", "linear") or "linear")
            spec.validate()
            specs.append(spec)
    if not specs:
        raise SensitivityError(f"{path}: no parameter rows")
    return specs


_CONFIG_AXES = ("delta_sst", "b_crit", "q_scale", "s", "representation_factor", "years")


def apply_axis(config: RunConfig, name: str, value: float) -> RunConfig:
    """Return a copy of the config with one axis overridden."""
    if name in _CONFIG_AXES:
        cast = int if name in ("s", "years") else float
        return replace(config, **{name: cast(value)})
    from pirogue.config import CATEGORY_OVERRIDE_KEYS
    if name in CATEGORY_OVERRIDE_KEYS:
        overrides = dict(config.category_overrides)
        overrides[name] = float(value)
        return replace(config, category_overrides=overrides)
    raise SensitivityError(f"unknown config axis: {name}")


METRICS = ("cumulative_total_catch", "cumulative_catch_by_country", "final_biomass")


def evaluate_metric(outputs, metric: str, arg: str | None = None) -> float:
    if outputs.invalid:
        raise SensitivityError(f"run failed: {outputs.error}")
    if metric == "cumulative_total_catch":
        return float(sum(led["harvested_tons"] for led in outputs.ledgers))
    if metric == "cumulative_catch_by_country":
        return float(outputs.frames[-1].country_catch.get(arg, 0.0))
    if metric == "final_biomass":
        for led in outputs.ledgers:
            if led["species"] == arg:
                return float(led["final_biomass_tons"])
        raise SensitivityError(f"unknown species: {arg}")
    raise SensitivityError(f"unknown metric: {metric} (choose from {METRICS})")


def _row_seed(seed: int, row: int) -> int:
    return (seed * 1_000_003 + row) % (2 ** 63 - 1)


def run_saltelli(base_config: RunConfig, specs: list[ParamSpec], n: int,
                 horizon_months: int, metric: str, seed: int,
                 metric_arg: str | None = None, progress=None):
    """Evaluate the simulator over a Saltelli design and decompose variance.

    Each row runs with an independent deterministic seed derived from
    (seed, row). Failed rows are excluded and reported. Returns
    (SobolReport, raw table rows).
    """
    matrix = saltelli_sample(specs, n, seed)
    d = len(specs)
    total = matrix.shape[0]
    y = np.empty(total)
    failed: list[int] = []
    raw_rows = []
    for row in range(total):
        config = replace(base_config, seed=_row_seed(seed, row))
        for i, spec in enumerate(specs):
            config = apply_axis(config, spec.name, matrix[row, i])
        try:
            outputs = run_months(config, horizon_months)
            y[row] = evaluate_metric(outputs, metric, metric_arg)
            status = "ok"
        except Exception as exc:   # row failures must not sink the analysis
            y[row] = np.nan
            failed.append(row)
            status = f"failed: {exc}"
        raw_rows.append([row, *[float(v) for v in matrix[row]], y[row], status])
        if progress is not None:
            progress(row + 1, total)

    if failed:
        keep = np.setdiff1d(np.arange(n), np.unique([f % n for f in failed]))
    else:
        keep = np.arange(n)
    if len(keep) < 2:
        raise SensitivityError(f"too many failed rows: {len(failed)}")
    y_a = y[:n][keep]
    y_b = y[(d + 1) * n:][keep]
    y_ab = np.stack([y[(1 + i) * n:(2 + i) * n][keep] for i in range(d)])
    name = metric if metric_arg is None else f"{metric}({metric_arg})"
    report = sobol_indices(y_a, y_b, y_ab, [s.name for s in specs],
                           output_name=f"{name}@{horizon_months}mo", seed=seed)
    return report, raw_rows


def run_oft(base_config: RunConfig, axis: str, values: list[float], seed: int):
    """One-factor-at-a-time sweep: one full run per value, others fixed.

    Returns summary rows of headline metrics per value.
    """
    from pirogue.engine import run as run_full
    rows = []
    for value in values:
        config = apply_axis(replace(base_config, seed=seed), axis, value)
        outputs = run_full(config)
        total_catch = sum(led["harvested_tons"] for led in outputs.ledgers)
        b0 = sum(led["b0_tons"] for led in outputs.ledgers)
        series = [sum(fr.species_biomass) for fr in outputs.frames]
        collapse_day = next((i for i, b in enumerate(series) if b < 0.05 * b0), None)
        rows.append({
            "axis": axis, "value": value, "seed": seed,
            "total_catch_tons": total_catch,
            "final_biomass_tons": series[-1],
            "collapsed": collapse_day is not None,
            "years_to_collapse": (collapse_day / 365.0) if collapse_day is not None else "",
            "catch_by_country": dict(outputs.frames[-1].country_catch),
            "invalid": outputs.invalid,
        })
    return rows


def write_sobol_report(report: SobolReport, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["parameter", "S1", "ST", "S1_raw", "ST_raw",
                         "S1_ci_lo", "S1_ci_hi", "ST_ci_lo", "ST_ci_hi",
                         "N", "output", "degenerate"])
        for i, name in enumerate(report.parameters):
            writer.writerow([
                name, report.S1[i], report.ST[i], report.S1_raw[i], report.ST_raw[i],
                report.S1_ci[i][0], report.S1_ci[i][1],
                report.ST_ci[i][0], report.ST_ci[i][1],
                report.n_samples, report.output_name, report.degenerate])


def write_raw_samples(raw_rows, specs: list[ParamSpec], path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh, lineterminator="\n")
        writer.writerow(["row", *[s.name for s in specs], "output", "status"])
        for row in raw_rows:
            writer.writerow(row)
