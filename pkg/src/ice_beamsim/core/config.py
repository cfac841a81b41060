from __future__ import annotations

"""
Scenario configuration for ICE BeamSim.

Scope:
- Channel geometry
- OMP stopping rule
- Scenario sweep (arrays, grid, services, SNR, trials, seed)
- YAML load / save and run manifests

⚠️ IMPORTANT:
- Unknown keys are rejected, never ignored.
- Every validation failure names the offending field.
"""

import math
from dataclasses import dataclass, field, fields, replace
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Sequence

import yaml

from ice_beamsim.core.exceptions import ConfigurationError, ParsingError
from ice_beamsim.core.types import LocalizationService

METHOD_LOCATION_CS = "location_cs"
METHOD_EXHAUSTIVE = "exhaustive"
KNOWN_METHODS = (METHOD_LOCATION_CS, METHOD_EXHAUSTIVE)

DEFAULT_SERVICES: Dict[str, float] = {"gps": 5.0, "wifi": 10.0, "lte": 40.0}


# ======================================================================
# GEOMETRY
# ======================================================================

@dataclass(frozen=True)
class GeometryConfig:
    """
    Cell annulus around the AP and path-loss exponent n.
    """
    cell_min_radius_m: float = 50.0
    cell_max_radius_m: float = 170.0
    pathloss_exponent: float = 3.0

    def __post_init__(self) -> None:
        if not 0.0 < self.cell_min_radius_m < self.cell_max_radius_m:
            raise ConfigurationError(
                "cell radii must satisfy 0 < min < max, got "
                f"[{self.cell_min_radius_m}, {self.cell_max_radius_m}]",
                field="cell_min_radius_m",
            )
        if not self.pathloss_exponent > 0.0:
            raise ConfigurationError(
                f"pathloss exponent must be > 0, got {self.pathloss_exponent}",
                field="pathloss_exp",
            )


# ======================================================================
# OMP
# ======================================================================

@dataclass(frozen=True)
class OmpConfig:
    """
    OMP stopping rule: `max_atoms` atoms or relative residual <= `residual_tol`.
    """
    max_atoms: int = 3
    residual_tol: float = 1e-6

    def __post_init__(self) -> None:
        if int(self.max_atoms) != self.max_atoms or self.max_atoms < 1:
            raise ConfigurationError(
                f"max_atoms must be a positive integer, got {self.max_atoms!r}",
                field="omp.max_atoms",
            )
        if not self.residual_tol >= 0.0:
            raise ConfigurationError(
                f"residual_tol must be >= 0, got {self.residual_tol!r}",
                field="omp.residual_tol",
            )


# ======================================================================
# SCENARIO
# ======================================================================

def _default_sweep() -> List[float]:
    return [float(s) for s in range(-40, 1, 5)]


@dataclass(frozen=True)
class ScenarioConfig:
    """
    Full description of a Monte Carlo run.

    `omp_max_atoms = None` means "use n_paths".
    """

    # Arrays / grid
    n_ap: int = 64
    n_ue: int = 64
    spacing_wavelengths: float = 0.5
    grid_n: int = 72
    beamwidth_deg: float = 5.0

    # Channel
    n_paths: int = 3
    pathloss_exp: float = 3.0
    cell_min_radius_m: float = 50.0
    cell_max_radius_m: float = 170.0
    carrier_ghz: float = 28.0
    bandwidth_mhz: float = 100.0

    # Sweep
    snr_db_sweep: List[float] = field(default_factory=_default_sweep)
    noise_power: float = 1.0
    services: Dict[str, float] = field(default_factory=lambda: dict(DEFAULT_SERVICES))
    methods: List[str] = field(default_factory=lambda: list(KNOWN_METHODS))
    trials: int = 200
    seed: int = 2018

    # Alignment
    omp_max_atoms: Optional[int] = None
    omp_residual_tol: float = 1e-6
    refine: bool = True
    refine_oversample: int = 32

    # Execution
    workers: int = 1

    def __post_init__(self) -> None:
        for name, label in _FLOAT_FIELDS.items():
            object.__setattr__(self, name, _as_float(getattr(self, name), label))

        if not isinstance(self.snr_db_sweep, (list, tuple)):
            raise ConfigurationError(
                f"snr_db_sweep must be a list, got {self.snr_db_sweep!r}", field="snr_db_sweep"
            )
        object.__setattr__(
            self, "snr_db_sweep", [_as_float(s, "snr_db_sweep") for s in self.snr_db_sweep]
        )

        if not isinstance(self.services, Mapping):
            raise ConfigurationError(
                f"services must be a mapping, got {self.services!r}", field="services"
            )
        object.__setattr__(
            self,
            "services",
            {str(k): _as_float(v, f"services.{k}") for k, v in self.services.items()},
        )

        if not isinstance(self.methods, (list, tuple)):
            raise ConfigurationError(
                f"methods must be a list, got {self.methods!r}", field="methods"
            )
        object.__setattr__(self, "methods", [str(m) for m in self.methods])
        self._validate()

    # ------------------------------------------------------------------
    # VALIDATION
    # ------------------------------------------------------------------

    def _validate(self) -> None:
        for name in ("n_ap", "n_ue", "n_paths", "trials", "workers", "refine_oversample"):
            _require_int(name, getattr(self, name), minimum=1)
        _require_int("grid_n", self.grid_n, minimum=2)

        if not 0.0 < self.spacing_wavelengths <= 1.0:
            raise ConfigurationError(
                f"spacing_wavelengths must lie in (0, 1], got {self.spacing_wavelengths}",
                field="spacing_wavelengths",
            )

        n_beams = 360.0 / self.beamwidth_deg if self.beamwidth_deg > 0 else math.nan
        if not (n_beams == round(n_beams) and round(n_beams) % 2 == 0):
            raise ConfigurationError(
                "beamwidth_deg must divide 360° into an even number of beams, "
                f"got {self.beamwidth_deg}",
                field="beamwidth_deg",
            )

        if not self.snr_db_sweep:
            raise ConfigurationError("snr_db_sweep must not be empty", field="snr_db_sweep")
        if not self.noise_power > 0.0:
            raise ConfigurationError(
                f"noise_power must be > 0, got {self.noise_power}", field="noise_power"
            )

        if not self.services:
            raise ConfigurationError("at least one service is required", field="services")
        for name, sigma in self.services.items():
            if not sigma >= 0.0:
                raise ConfigurationError(
                    f"service {name!r} has negative sigma {sigma}", field=f"services.{name}"
                )

        if not self.methods:
            raise ConfigurationError("at least one method is required", field="methods")
        for method in self.methods:
            if method not in KNOWN_METHODS:
                raise ConfigurationError(
                    f"unknown method {method!r} (expected one of {', '.join(KNOWN_METHODS)})",
                    field="methods",
                )

        _require_int("seed", self.seed, minimum=0)
        if self.seed >= 2**64:
            raise ConfigurationError(
                f"seed must be an unsigned 64-bit integer, got {self.seed!r}", field="seed"
            )
        if self.omp_max_atoms is not None:
            _require_int("omp_max_atoms", self.omp_max_atoms, minimum=1)

        # nested configs validate themselves and report scenario field names
        _ = (self.geometry, self.omp)

    # ------------------------------------------------------------------
    # DERIVED
    # ------------------------------------------------------------------

    @property
    def n_codebook_beams(self) -> int:
        return int(round(360.0 / self.beamwidth_deg))

    @property
    def geometry(self) -> GeometryConfig:
        return GeometryConfig(
            cell_min_radius_m=self.cell_min_radius_m,
            cell_max_radius_m=self.cell_max_radius_m,
            pathloss_exponent=self.pathloss_exp,
        )

    @property
    def omp(self) -> OmpConfig:
        return OmpConfig(
            max_atoms=self.omp_max_atoms or self.n_paths,
            residual_tol=self.omp_residual_tol,
        )

    @property
    def service_list(self) -> List[LocalizationService]:
        return [LocalizationService(name, sigma) for name, sigma in self.services.items()]

    def tx_power(self, snr_db: float) -> float:
        """P such that P / ρ² equals the requested SNR."""
        return self.noise_power * 10.0 ** (snr_db / 10.0)

    def with_overrides(
        self,
        *,
        seed: Optional[int] = None,
        trials: Optional[int] = None,
        services: Optional[Sequence[str]] = None,
        workers: Optional[int] = None,
    ) -> ScenarioConfig:
        """
        Copy with CLI-level overrides applied. `services` selects by name.
        """
        changes: Dict[str, Any] = {}
        if seed is not None:
            changes["seed"] = seed
        if trials is not None:
            changes["trials"] = trials
        if workers is not None:
            changes["workers"] = workers
        if services is not None:
            unknown = [s for s in services if s not in self.services]
            if unknown:
                raise ConfigurationError(
                    f"unknown service(s): {', '.join(unknown)}", field="services"
                )
            changes["services"] = {s: self.services[s] for s in services}
        return replace(self, **changes)

    # ------------------------------------------------------------------
    # LOADERS
    # ------------------------------------------------------------------

    @classmethod
    def from_yaml(cls, path: Path) -> ScenarioConfig:
        data, key_lines = _load_yaml_mapping(Path(path))
        return cls.from_dict(data, key_lines=key_lines)

    @classmethod
    def from_dict(
        cls,
        data: Dict[str, Any],
        *,
        key_lines: Optional[Dict[str, int]] = None,
    ) -> ScenarioConfig:
        key_lines = key_lines or {}
        known = {f.name for f in fields(cls)}

        kwargs: Dict[str, Any] = {}
        for key, value in data.items():
            if key == "omp" and isinstance(value, dict):
                kwargs.update(_flatten_omp(value, key_lines))
                continue
            if key not in known:
                raise ConfigurationError(
                    f"unknown configuration field {key!r}",
                    field=str(key),
                    line_number=key_lines.get(str(key)),
                )
            if key == "services":
                value = _parse_services(value, key_lines.get(key))
            kwargs[key] = value

        try:
            return cls(**kwargs)
        except ConfigurationError as exc:
            if exc.line_number is None and exc.field:
                line = key_lines.get(exc.field) or key_lines.get(exc.field.split(".")[0])
                if line is not None:
                    raise ConfigurationError(
                        str(exc), field=exc.field, line_number=line
                    ) from exc
            raise
        except (TypeError, ValueError) as exc:
            raise ConfigurationError(f"invalid configuration value: {exc}") from exc

    @classmethod
    def from_manifest(cls, path: Path) -> ScenarioConfig:
        data, _ = _load_yaml_mapping(Path(path))
        if "config" not in data or not isinstance(data["config"], dict):
            raise ParsingError("manifest has no 'config' section", source=str(path))
        return cls.from_dict(data["config"])

    # ------------------------------------------------------------------
    # SERIALIZATION
    # ------------------------------------------------------------------

    def to_dict(self) -> Dict[str, Any]:
        out: Dict[str, Any] = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, dict):
                value = dict(value)
            elif isinstance(value, list):
                value = list(value)
            out[f.name] = value
        return out

    def save(self, path: Path) -> None:
        path = Path(path)
        path.parent.mkdir(parents=True, exist_ok=True)
        with path.open("w", encoding="utf-8") as f:
            yaml.safe_dump(self.to_dict(), f, indent=2, sort_keys=False)


# ----------------------------------------------------------------------
# HELPERS
# ----------------------------------------------------------------------

# scenario field → name reported in errors
_FLOAT_FIELDS: Dict[str, str] = {
    "spacing_wavelengths": "spacing_wavelengths",
    "beamwidth_deg": "beamwidth_deg",
    "pathloss_exp": "pathloss_exp",
    "cell_min_radius_m": "cell_min_radius_m",
    "cell_max_radius_m": "cell_max_radius_m",
    "carrier_ghz": "carrier_ghz",
    "bandwidth_mhz": "bandwidth_mhz",
    "noise_power": "noise_power",
    "omp_residual_tol": "omp.residual_tol",
}


def _as_float(value: Any, name: str, line_number: Optional[int] = None) -> float:
    if isinstance(value, bool):
        raise ConfigurationError(
            f"{name} must be a number, got {value!r}", field=name, line_number=line_number
        )
    try:
        return float(value)
    except (TypeError, ValueError) as exc:
        raise ConfigurationError(
            f"{name} must be a number, got {value!r}", field=name, line_number=line_number
        ) from exc


def _require_int(name: str, value: Any, *, minimum: int) -> None:
    if isinstance(value, bool) or not isinstance(value, int) or value < minimum:
        raise ConfigurationError(
            f"{name} must be an integer >= {minimum}, got {value!r}", field=name
        )


def _flatten_omp(section: Dict[str, Any], key_lines: Dict[str, int]) -> Dict[str, Any]:
    out: Dict[str, Any] = {}
    for key, value in section.items():
        if key not in ("max_atoms", "residual_tol"):
            raise ConfigurationError(
                f"unknown configuration field 'omp.{key}'",
                field=f"omp.{key}",
                line_number=key_lines.get(f"omp.{key}"),
            )
        out[f"omp_{key}"] = value
    return out


def _parse_services(value: Any, line_number: Optional[int]) -> Dict[str, float]:
    """
    Accepts either a mapping `{gps: 5}` or a list of `{name, sigma_m}` entries.
    """
    if isinstance(value, dict):
        return {str(k): _as_float(v, f"services.{k}", line_number) for k, v in value.items()}
    if isinstance(value, list):
        out: Dict[str, float] = {}
        for entry in value:
            if not isinstance(entry, dict) or set(entry) != {"name", "sigma_m"}:
                raise ConfigurationError(
                    "services entries need exactly 'name' and 'sigma_m'",
                    field="services",
                    line_number=line_number,
                )
            name = str(entry["name"])
            out[name] = _as_float(entry["sigma_m"], f"services.{name}", line_number)
        return out
    raise ConfigurationError(
        "services must be a mapping or a list", field="services", line_number=line_number
    )


def _load_yaml_mapping(path: Path) -> tuple[Dict[str, Any], Dict[str, int]]:
    """
    Read a YAML mapping plus the 1-based line of every top-level key
    (and of `omp.*` keys).
    """
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as exc:
        raise ParsingError(f"cannot read config file: {exc}", source=str(path)) from exc

    try:
        data = yaml.safe_load(text)
        root = yaml.compose(text)
    except yaml.YAMLError as exc:
        mark = getattr(exc, "problem_mark", None)
        raise ParsingError(
            f"invalid YAML in {path}: {getattr(exc, 'problem', exc)}",
            line_number=mark.line + 1 if mark is not None else None,
            source=str(path),
        ) from exc

    if data is None:
        return {}, {}
    if not isinstance(data, dict):
        raise ParsingError(
            f"config root must be a mapping, got {type(data).__name__}",
            line_number=1,
            source=str(path),
        )

    key_lines: Dict[str, int] = {}
    if isinstance(root, yaml.MappingNode):
        for key_node, value_node in root.value:
            key_lines[str(key_node.value)] = key_node.start_mark.line + 1
            if key_node.value == "omp" and isinstance(value_node, yaml.MappingNode):
                for sub_key, _ in value_node.value:
                    key_lines[f"omp.{sub_key.value}"] = sub_key.start_mark.line + 1
    return data, key_lines


# ----------------------------------------------------------------------
# DEFAULT INSTANCE
# ----------------------------------------------------------------------

default_config = ScenarioConfig()
