"""Run configuration: flat ``key = value`` files with ``#`` comments.

Paths are resolved relative to the config file. Unknown keys are rejected
so typos fail loudly. Category overrides (catchability, storage, radius,
trip length, campaign behavior) replace the built-in defaults one field at
a time.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path

from pirogue.fleet import FleetCategoryParams, default_category_params

VALID_S = (1, 2, 3, 4, 6, 12)

_CAT_OVERRIDE_FIELDS = {
    "q": "q",
    "storage": "storage_capacity",
    "radius": "radius_km",
    "max_trip": "max_trip",
    "campaign_prob": "campaign_prob",
    "campaign_max_months": "campaign_max_months",
}

CATEGORY_OVERRIDE_KEYS = tuple(
    f"{name}_cat{c}" for name in _CAT_OVERRIDE_FIELDS for c in (1, 2, 3)
) + ("demersal_access_fraction",)


class ConfigError(Exception):
    pass


@dataclass
class RunConfig:
    env_dir: str
    sites_file: str
    fleet_file: str
    species_file: str
    seed: int = 42
    years: int = 2
    s: int = 2                          # reproduction events per year
    b_crit: float = 100.0               # Holling half-saturation biomass, tons
    delta_sst: float = 0.0              # uniform climate offset, degC
    representation_factor: float = 1.0  # real canoes per model unit
    q_scale: float = 1.0                # multiplies every category's catchability
    start_year: int = 2001
    output_dir: str | None = None
    cat3_incidental_always: bool = False
    category_overrides: dict = field(default_factory=dict)

    def validate(self) -> None:
        if self.years < 0:
            raise ConfigError("years must be >= 0")
        if self.s not in VALID_S:
            raise ConfigError(f"s must be a divisor of 12 ({VALID_S}), got {self.s}")
        if self.b_crit < 0:
            raise ConfigError("b_crit must be >= 0")
        if self.representation_factor < 1:
            raise ConfigError("representation_factor must be >= 1")
        if self.q_scale <= 0:
            raise ConfigError("q_scale must be > 0")
        for key in self.category_overrides:
            if key not in CATEGORY_OVERRIDE_KEYS:
                raise ConfigError(f"unknown category override: {key}")

    def build_category_params(self) -> dict[int, FleetCategoryParams]:
        """Defaults + overrides + q_scale, as fresh mutable per-run params."""
        params = default_category_params()
        for key, value in self.category_overrides.items():
            if key == "demersal_access_fraction":
                params[3].demersal_access_fraction = float(value)
                continue
            name, cat = key.rsplit("_cat", 1)
            attr = _CAT_OVERRIDE_FIELDS[name]
            cast = int if attr in ("max_trip", "campaign_max_months") else float
            setattr(params[int(cat)], attr, cast(value))
        for p in params.values():
            p.q *= self.q_scale
            p.validate()
        return params


_SCALAR_KEYS = {
    "seed": int,
    "years": int,
    "s": int,
    "b_crit": float,
    "delta_sst": float,
    "representation_factor": float,
    "q_scale": float,
    "start_year": int,
    "cat3_incidental_always": lambda v: v.strip().lower() in ("1", "true", "yes"),
}

_PATH_KEYS = {"env_dir", "sites", "fleet", "species", "output_dir"}


def parse_run_config(path: str | Path) -> RunConfig:
    """Parse and fully validate a flat key=value run configuration."""
    path = Path(path)
    if not path.exists():
        raise ConfigError(f"config file not found: {path}")
    raw: dict[str, str] = {}
    with open(path) as fh:
        for lineno, line in enumerate(fh, start=1):
            text = line.split("#", 1)[0].strip()
            if not text:
                continue
            if "=" not in text:
                raise ConfigError(f"{path} line {lineno}: expected 'key = value'")
            key, value = (part.strip() for part in text.split("=", 1))
            if key in raw:
                raise ConfigError(f"{path} line {lineno}: duplicate key '{key}'")
            raw[key] = value
    return _config_from_raw(raw, path.parent, str(path))


def config_from_mapping(mapping: dict, base_dir: str | Path = ".") -> RunConfig:
    """Build a validated config from a key/value mapping (server bodies)."""
    raw = {str(k): str(v) for k, v in mapping.items()}
    return _config_from_raw(raw, Path(base_dir), "config body")


def _config_from_raw(raw: dict[str, str], base: Path, origin: str) -> RunConfig:
    kwargs: dict = {"category_overrides": {}}
    for key, value in raw.items():
        if key in _PATH_KEYS:
            resolved = str((base / value).resolve()) if not Path(value).is_absolute() else value
            if key == "env_dir":
                kwargs["env_dir"] = resolved
            elif key == "output_dir":
                kwargs["output_dir"] = resolved
            else:
                kwargs[f"{key}_file"] = resolved
        elif key in _SCALAR_KEYS:
            try:
                kwargs[key] = _SCALAR_KEYS[key](value)
            except ValueError as exc:
                raise ConfigError(f"{origin}: key '{key}': {exc}") from exc
        elif key in CATEGORY_OVERRIDE_KEYS:
            try:
                kwargs["category_overrides"][key] = float(value)
            except ValueError as exc:
                raise ConfigError(f"{origin}: key '{key}': {exc}") from exc
        else:
            raise ConfigError(f"{origin}: unknown key '{key}'")

    for required in ("env_dir", "sites_file", "fleet_file", "species_file"):
        if required not in kwargs:
            label = required.removesuffix("_file") if required != "env_dir" else required
            raise ConfigError(f"{origin}: missing required key '{label}'")
    config = RunConfig(**kwargs)
    config.validate()
    for p, label in ((config.env_dir, "env_dir"), (config.sites_file, "sites"),
                     (config.fleet_file, "fleet"), (config.species_file, "species")):
        if not Path(p).exists():
            raise ConfigError(f"{origin}: {label} path does not exist: {p}")
    config.build_category_params()      # surfaces bad override values now
    return config


def write_run_config(config: RunConfig, path: str | Path) -> None:
    """Write a config back out in the same flat format (round-trips)."""
    lines = [
        f"env_dir = {config.env_dir}",
        f"sites = {config.sites_file}",
        f"fleet = {config.fleet_file}",
        f"species = {config.species_file}",
        f"seed = {config.seed}",
        f"years = {config.years}",
        f"s = {config.s}",
        f"b_crit = {config.b_crit!r}",
        f"delta_sst = {config.delta_sst!r}",
        f"representation_factor = {config.representation_factor!r}",
        f"q_scale = {config.q_scale!r}",
        f"start_year = {config.start_year}",
        f"cat3_incidental_always = {str(config.cat3_incidental_always).lower()}",
    ]
    if config.output_dir:
        lines.append(f"output_dir = {config.output_dir}")
    for key, value in config.category_overrides.items():
        lines.append(f"{key} = {value!r}")
    Path(path).write_text("\n".join(lines) + "\n")
