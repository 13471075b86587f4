"""
Configuration management for envelope runs.
Supports YAML configuration loading with environment variable substitution.
"""

import os
import re
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Any

import numpy as np
import yaml

from .errors import InputError


class ConfigError(InputError):
    """Configuration related errors"""
    pass


@dataclass
class CurveSpec:
    """Which curve to run on: a built-in by name, or sampled points."""
    name: str | None = "bean"
    params: list[float] = field(default_factory=list)
    samples: list[list[float]] | None = None
    samples_file: str | None = None
    closed: bool = True
    label: str | None = None
    linear: list[list[float]] | None = None
    translation: list[float] | None = None

    def to_mapping(self) -> dict[str, Any]:
        """Mapping accepted by curves.curve_from_spec."""
        spec: dict[str, Any] = {}
        if self.samples_file:
            try:
                rows = np.loadtxt(self.samples_file, delimiter=",", ndmin=2)
            except (OSError, ValueError) as e:
                raise ConfigError(f"Failed to read curve samples: {e}")
            spec["samples"] = rows.tolist()
        elif self.samples is not None:
            spec["samples"] = self.samples
        else:
            spec["name"] = self.name
            spec["params"] = list(self.params)
        if "samples" in spec:
            spec["closed"] = self.closed
            spec["label"] = self.label or Path(self.samples_file or "sampled").stem
        if self.linear is not None:
            spec["transform"] = {"linear": self.linear, "translation": self.translation or [0.0, 0.0]}
        return spec


@dataclass
class ToleranceConfig:
    """Numerical tolerances"""
    refine: float = 1e-10
    online: float = 1e-8
    detm: float = 1e-6
    equality: float = 1e-9


@dataclass
class EmitConfig:
    """Which output files to write"""
    csv: bool = True
    json: bool = True
    svg: bool = True


@dataclass
class SweepConfig:
    """Alpha sweep grid and bisection tolerance"""
    points: int = 99
    bisect_tol: float = 1e-4
    alphas: list[float] | None = None


@dataclass
class RunConfig:
    """Complete configuration of one CLI run"""
    curve: CurveSpec = field(default_factory=CurveSpec)
    alphas: list[float] = field(default_factory=lambda: [0.6])
    grid_n: int = 256
    samples: int = 256
    tolerances: ToleranceConfig = field(default_factory=ToleranceConfig)
    output_dir: str = "out"
    emit: EmitConfig = field(default_factory=EmitConfig)
    sweep: SweepConfig = field(default_factory=SweepConfig)
    workers: int = 1

    def validate(self) -> list[str]:
        """
        Validate the configuration.

        Returns:
            List of validation error messages (empty if valid)
        """
        errors = []
        if not self.alphas:
            errors.append("alphas must not be empty")
        for alpha in self.alphas:
            if not 0.0 < alpha < 1.0:
                errors.append(f"alpha must lie in (0, 1), got {alpha}")
        for alpha in self.sweep.alphas or []:
            if not 0.0 < alpha < 1.0:
                errors.append(f"sweep alpha must lie in (0, 1), got {alpha}")
        if self.grid_n < 64:
            errors.append(f"grid_n must be at least 64, got {self.grid_n}")
        if self.samples < 8:
            errors.append(f"samples must be at least 8, got {self.samples}")
        for name, value in self.tolerances.__dict__.items():
            if not value > 0:
                errors.append(f"tolerances.{name} must be positive, got {value}")
        if self.sweep.points < 2:
            errors.append(f"sweep.points must be at least 2, got {self.sweep.points}")
        if not self.sweep.bisect_tol > 0:
            errors.append("sweep.bisect_tol must be positive")
        if self.workers < 1:
            errors.append(f"workers must be at least 1, got {self.workers}")
        if self.curve.name is None and self.curve.samples is None and not self.curve.samples_file:
            errors.append("curve needs a name, samples or samples_file")
        return errors

    def merge(self, overrides: dict[str, Any] | None) -> "RunConfig":
        """Merge command-line overrides, overrides take precedence"""
        if not overrides:
            return self
        merged = replace(self)
        if overrides.get("grid_n") is not None:
            merged.grid_n = int(overrides["grid_n"])
        if overrides.get("alphas") is not None:
            merged.alphas = [float(a) for a in overrides["alphas"]]
        if overrides.get("output_dir") is not None:
            merged.output_dir = str(overrides["output_dir"])
        if overrides.get("workers") is not None:
            merged.workers = int(overrides["workers"])
        if overrides.get("curve") is not None:
            merged.curve = overrides["curve"]
        return merged


class ConfigManager:
    """
    Configuration manager for envelope runs.

    Supports:
    - Loading configuration from YAML files
    - Environment variable substitution (${VAR_NAME} syntax)
    - Built-in defaults for every missing section
    """

    ENV_VAR_PATTERN = re.compile(r'\$\{([^}]+)\}')

    def __init__(self, config_path: str | Path | None = None):
        """
        Initialize ConfigManager.

        Args:
            config_path: Path to YAML configuration file. If None, uses default config.yaml
        """
        self._config: RunConfig | None = None
        self._config_path = Path(config_path) if config_path else Path("config.yaml")

    @property
    def config(self) -> RunConfig:
        """Get the loaded configuration, loading it if necessary."""
        if self._config is None:
            self._config = self.load()
        return self._config

    def load(self, config_path: str | Path | None = None) -> RunConfig:
        """
        Load configuration from YAML file.

        Args:
            config_path: Optional path to override the default config path

        Returns:
            Loaded RunConfig object

        Raises:
            ConfigError: If configuration file is invalid or cannot be loaded
        """
        path = Path(config_path) if config_path else self._config_path

        if not path.exists():
            raise ConfigError(f"Configuration file not found: {path}")

        try:
            with open(path, 'r', encoding='utf-8') as f:
                raw_config = yaml.safe_load(f)
        except yaml.YAMLError as e:
            raise ConfigError(f"Invalid YAML format: {e}")
        except Exception as e:
            raise ConfigError(f"Failed to read configuration file: {e}")

        if raw_config is None:
            raise ConfigError("Configuration file is empty")

        if not isinstance(raw_config, dict):
            raise ConfigError("Configuration must be a YAML mapping")

        raw_config = self._substitute_env_vars(raw_config)
        config = self._parse_config(raw_config)
        errors = config.validate()
        if errors:
            raise ConfigError(f"Invalid configuration: {'; '.join(errors)}")
        return config

    def get_env_vars_used(self, config_path: str | Path | None = None) -> set[str]:
        """Return all environment variables referenced via ${VAR_NAME} in the config file."""
        path = Path(config_path) if config_path else self._config_path
        if not path.exists():
            raise ConfigError(f"Configuration file not found: {path}")
        raw_text = path.read_text(encoding="utf-8")
        return {match.group(1) for match in self.ENV_VAR_PATTERN.finditer(raw_text)}

    def _substitute_env_vars(self, obj: Any) -> Any:
        """
        Recursively substitute environment variables in configuration.

        A string that is exactly one reference is converted with yaml.safe_load,
        so "${GRID}" with GRID=512 becomes the integer 512.
        """
        if isinstance(obj, str):
            def replace_env_var(match: re.Match) -> str:
                var_name = match.group(1)
                value = os.environ.get(var_name)
                if value is None:
                    raise ConfigError(f"Environment variable not set: {var_name}")
                return value

            whole = self.ENV_VAR_PATTERN.fullmatch(obj)
            result = self.ENV_VAR_PATTERN.sub(replace_env_var, obj)
            if whole:
                try:
                    return yaml.safe_load(result)
                except yaml.YAMLError:
                    return result
            return result
        elif isinstance(obj, dict):
            return {k: self._substitute_env_vars(v) for k, v in obj.items()}
        elif isinstance(obj, list):
            return [self._substitute_env_vars(item) for item in obj]
        return obj

    @staticmethod
    def _section(raw: dict, name: str) -> dict:
        section = raw.get(name) or {}
        if not isinstance(section, dict):
            raise ConfigError(f"'{name}' section must be a mapping")
        return section

    @staticmethod
    def _float_list(value: Any, name: str) -> list[float]:
        if not isinstance(value, list):
            value = [value]
        try:
            return [float(v) for v in value]
        except (TypeError, ValueError):
            raise ConfigError(f"'{name}' must be a list of numbers")

    def _parse_curve(self, raw: dict) -> CurveSpec:
        section = self._section(raw, "curve")
        samples = section.get("samples")
        if samples is not None and not isinstance(samples, list):
            raise ConfigError("'curve.samples' must be a list of [t, x, y] rows")
        transform = section.get("transform") or {}
        if not isinstance(transform, dict):
            raise ConfigError("'curve.transform' section must be a mapping")
        return CurveSpec(
            name=section.get("name", None if samples or section.get("samples_file") else "bean"),
            params=self._float_list(section.get("params", []), "curve.params"),
            samples=samples,
            samples_file=section.get("samples_file"),
            closed=bool(section.get("closed", True)),
            label=section.get("label"),
            linear=transform.get("linear"),
            translation=transform.get("translation"),
        )

    def _parse_config(self, raw: dict) -> RunConfig:
        """Parse raw configuration dictionary into RunConfig object."""
        config = RunConfig(curve=self._parse_curve(raw))

        if "alphas" in raw:
            config.alphas = self._float_list(raw["alphas"], "alphas")
        try:
            config.grid_n = int(raw.get("grid_n", config.grid_n))
            config.samples = int(raw.get("samples", config.samples))
            config.workers = int(raw.get("workers", config.workers))
        except (TypeError, ValueError):
            raise ConfigError("'grid_n', 'samples' and 'workers' must be integers")
        config.output_dir = str(raw.get("output_dir", config.output_dir))

        tolerances = self._section(raw, "tolerances")
        try:
            config.tolerances = ToleranceConfig(**{k: float(v) for k, v in tolerances.items()})
        except TypeError as e:
            raise ConfigError(f"Unknown key in 'tolerances' section: {e}")
        except ValueError:
            raise ConfigError("'tolerances' values must be numbers")

        emit = self._section(raw, "emit")
        try:
            config.emit = EmitConfig(**{k: bool(v) for k, v in emit.items()})
        except TypeError as e:
            raise ConfigError(f"Unknown key in 'emit' section: {e}")

        sweep = self._section(raw, "sweep")
        try:
            config.sweep = SweepConfig(
                points=int(sweep.get("points", 99)),
                bisect_tol=float(sweep.get("bisect_tol", 1e-4)),
                alphas=self._float_list(sweep["alphas"], "sweep.alphas") if "alphas" in sweep else None,
            )
        except (TypeError, ValueError):
            raise ConfigError("'sweep' values must be numbers")
        return config
